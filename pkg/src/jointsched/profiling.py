"""Per-(job, technique, gpu-count) latency profiling.

The profile table is normally filled by the synthetic analytic executor
(one `profile` call per feasible configuration, charged as two simulated
mini-batches each); measured latencies can be ingested from CSV instead
and flow through the rest of the system unchanged.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Protocol

from .core import ClusterSpec, JobSpec, RunConfig, TechniqueSpec, Workload, feasible_configs, hosting_gpu_memory, memory_feasible
from .errors import ExecutorFailure, InfeasibleEntry, MissingEntry, NegativeLatency, ParseError

INFEASIBLE = math.inf

ProfileKey = tuple[str, str, int]  # (job id, technique name, gpus)

CSV_HEADER = "job,technique,gpus,latency_s"


def synthetic_latency(job: JobSpec, technique: TechniqueSpec, g: int, gpu_memory: float) -> float:
    """Analytic per-batch latency standing in for an on-GPU trial run.

    Amdahl serial fraction plus a linear communication term, scaled by the
    offload multiplier:

        mu * base * ((1 - sigma)/g + sigma + kappa*(g - 1))

    Returns INFEASIBLE when the configuration does not fit in memory.
    """
    if not memory_feasible(job, technique, g, gpu_memory):
        return INFEASIBLE
    sigma = technique.serial_fraction
    kappa = technique.comm_overhead
    return (
        technique.offload_multiplier
        * job.base_batch_time
        * ((1.0 - sigma) / g + sigma + kappa * (g - 1))
    )


class Executor(Protocol):
    """The two-function plugin surface a parallelism technique implements."""

    provenance: str

    def profile(self, job: JobSpec, technique: TechniqueSpec, g: int) -> float:
        """Per-batch latency in seconds, or INFEASIBLE."""

    def execute(self, job: JobSpec, technique: TechniqueSpec, g: int, batches: int) -> float:
        """Simulated elapsed seconds for `batches` mini-batches."""


class SyntheticExecutor:
    """Deterministic analytic executor bound to a cluster's GPU memory."""

    provenance = "synthetic"

    def __init__(self, cluster: ClusterSpec):
        self._cluster = cluster

    def profile(self, job: JobSpec, technique: TechniqueSpec, g: int) -> float:
        mem = hosting_gpu_memory(self._cluster, g)
        if mem is None:
            return INFEASIBLE
        return synthetic_latency(job, technique, g, mem)

    def execute(self, job: JobSpec, technique: TechniqueSpec, g: int, batches: int) -> float:
        lat = self.profile(job, technique, g)
        if math.isinf(lat):
            raise InfeasibleEntry((job.id, technique.name, g))
        return batches * lat


class TableExecutor:
    """Serves a previously ingested table through the executor contract."""

    provenance = "ingested"

    def __init__(self, table: "ProfileTable"):
        self._table = table

    def profile(self, job: JobSpec, technique: TechniqueSpec, g: int) -> float:
        key = (job.id, technique.name, g)
        if key not in self._table.entries:
            raise MissingEntry(key)
        return self._table.entries[key]

    def execute(self, job: JobSpec, technique: TechniqueSpec, g: int, batches: int) -> float:
        return batches * self._table.latency(job.id, technique.name, g)


class ProfileTable:
    """Map (job, technique, gpus) -> per-batch latency; INFEASIBLE marks misfits."""

    def __init__(self, entries: dict[ProfileKey, float], provenance: str, profiling_cost: float = 0.0):
        self.entries = entries
        self.provenance = provenance
        self.profiling_cost = profiling_cost

    def latency(self, job_id: str, technique: str, g: int) -> float:
        key = (job_id, technique, g)
        if key not in self.entries:
            raise MissingEntry(key)
        lat = self.entries[key]
        if math.isinf(lat):
            raise InfeasibleEntry(key)
        return lat

    def is_feasible(self, job_id: str, technique: str, g: int) -> bool:
        lat = self.entries.get((job_id, technique, g), INFEASIBLE)
        return math.isfinite(lat)

    def __len__(self) -> int:
        return len(self.entries)


def build_profile_table(workload: Workload, executor: Executor) -> ProfileTable:
    """Profile every feasible configuration of every job, exactly once each.

    The profiling charge (two mini-batches per feasible entry) is recorded
    on the table and surfaces in simulation reports; it is excluded from
    makespan comparisons.
    """
    entries: dict[ProfileKey, float] = {}
    cost = 0.0
    for job in workload.jobs:
        for cfg in feasible_configs(job, workload.cluster, workload.techniques):
            tech = workload.technique(cfg.technique)
            key = (job.id, cfg.technique, cfg.gpus)
            try:
                lat = executor.profile(job, tech, cfg.gpus)
            except Exception as exc:  # noqa: BLE001 - contract: abort with the offending key
                raise ExecutorFailure(key, exc) from exc
            if not math.isinf(lat) and lat <= 0:
                raise ExecutorFailure(key, ValueError(f"non-positive latency {lat}"))
            entries[key] = lat
            if math.isfinite(lat):
                cost += 2.0 * lat
    return ProfileTable(entries, executor.provenance, cost)


def estimate_runtime(table: ProfileTable, job: JobSpec, config: RunConfig, remaining_batches: int) -> float:
    """Linear extrapolation: remaining batches times profiled per-batch latency."""
    if remaining_batches < 0:
        raise ValueError("remaining_batches must be >= 0")
    return remaining_batches * table.latency(job.id, config.technique, config.gpus)


def feasible_entries(table: ProfileTable, job: JobSpec, workload: Workload) -> list[tuple[RunConfig, float]]:
    """Feasible configs of `job` with finite profiled latency, in canonical order."""
    out = []
    for cfg in feasible_configs(job, workload.cluster, workload.techniques):
        lat = table.entries.get((job.id, cfg.technique, cfg.gpus), INFEASIBLE)
        if math.isfinite(lat):
            out.append((cfg, lat))
    return out


def ensure_complete(table: ProfileTable, workload: Workload) -> None:
    """Every feasible configuration must have an entry (ingested tables)."""
    for job in workload.jobs:
        for cfg in feasible_configs(job, workload.cluster, workload.techniques):
            key = (job.id, cfg.technique, cfg.gpus)
            if key not in table.entries:
                raise MissingEntry(key)


def load_profiles(path: str | Path) -> ProfileTable:
    """Parse the profile CSV format: header then `job,technique,gpus,latency_s` rows.

    'inf' in the latency column marks an infeasible configuration.
    """
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ParseError(1, f"expected header {CSV_HEADER!r}")
    entries: dict[ProfileKey, float] = {}
    for idx, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(idx, f"expected 4 comma-separated fields, got {len(parts)}")
        job_id, tech, g_raw, lat_raw = (p.strip() for p in parts)
        try:
            g = int(g_raw)
        except ValueError:
            raise ParseError(idx, f"bad gpu count {g_raw!r}") from None
        if g < 1:
            raise ParseError(idx, f"gpu count must be >= 1, got {g}")
        if lat_raw == "inf":
            lat = INFEASIBLE
        else:
            try:
                lat = float(lat_raw)
            except ValueError:
                raise ParseError(idx, f"bad latency {lat_raw!r}") from None
            if lat <= 0:
                raise NegativeLatency(idx, lat)
        key = (job_id, tech, g)
        if key in entries:
            raise ParseError(idx, f"duplicate entry for {key}")
        entries[key] = lat
    return ProfileTable(entries, "ingested")


def save_profiles(table: ProfileTable, path: str | Path) -> None:
    rows = [CSV_HEADER]
    for (job_id, tech, g), lat in sorted(table.entries.items()):
        rows.append(f"{job_id},{tech},{g},{'inf' if math.isinf(lat) else repr(lat)}")
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")
