"""Domain types, validation, and feasibility logic.

All types are immutable pydantic models so a validated workload can be
shared freely across planner and simulator threads. Field-level
invariants live on the models; cross-cutting rules (unique ids, at least
one feasible configuration per job) live in :func:`validate_workload`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import CapacityViolation, DuplicateId, InvalidPlan, InvariantViolation, NoFeasibleConfig

Archetype = Literal["replicated", "sharded", "pipelined", "offloaded"]

_FROZEN = ConfigDict(frozen=True, extra="forbid", protected_namespaces=())


class JobSpec(BaseModel):
    """One model-training trial.

    ``base_batch_time`` is the single-GPU, no-overhead time for one
    mini-batch; memory figures are GiB (parameters+optimizer vs per-GPU
    working set).
    """

    model_config = _FROZEN

    id: str
    total_batches: int = Field(ge=1)
    base_batch_time: float = Field(gt=0)
    model_memory: float = Field(gt=0)
    activation_memory: float = Field(default=0.0, ge=0)


class NodeSpec(BaseModel):
    model_config = _FROZEN

    id: str
    gpu_count: int = Field(ge=1)
    gpu_memory: float = Field(gt=0)


class ClusterSpec(BaseModel):
    model_config = _FROZEN

    nodes: tuple[NodeSpec, ...] = Field(min_length=1)

    @property
    def max_gpus_per_node(self) -> int:
        return max(n.gpu_count for n in self.nodes)

    @property
    def total_gpus(self) -> int:
        return sum(n.gpu_count for n in self.nodes)

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


class TechniqueSpec(BaseModel):
    """A registered parallelism technique archetype.

    The analytic cost model reads ``serial_fraction`` (Amdahl term),
    ``comm_overhead`` (fractional latency added per extra GPU) and
    ``offload_multiplier`` (slowdown paid for spilling state off-GPU).
    """

    model_config = _FROZEN

    name: str
    archetype: Archetype
    serial_fraction: float = Field(ge=0, lt=1)
    comm_overhead: float = Field(ge=0)
    offload_multiplier: float = Field(default=1.0, ge=1)
    min_gpus: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _offload_only_multiplier(self) -> "TechniqueSpec":
        if self.archetype != "offloaded" and self.offload_multiplier != 1.0:
            raise ValueError("offload_multiplier must be 1 unless archetype is 'offloaded'")
        return self


class RunConfig(BaseModel):
    """A (technique, gpu-count) choice for one job. Gangs never span nodes."""

    model_config = _FROZEN

    technique: str
    gpus: int = Field(ge=1)

    def key(self) -> tuple[str, int]:
        return (self.technique, self.gpus)


class PlanEntry(BaseModel):
    model_config = _FROZEN

    config: RunConfig
    node: str
    start_time: float = Field(ge=0)


class Plan(BaseModel):
    """Per-job (config, node, start) assignments plus the planner's makespan estimate."""

    model_config = _FROZEN

    entries: dict[str, PlanEntry]
    predicted_makespan: float = Field(ge=0)


class Workload(BaseModel):
    """The single input contract: jobs + cluster + registered techniques."""

    model_config = _FROZEN

    jobs: tuple[JobSpec, ...]
    cluster: ClusterSpec
    techniques: tuple[TechniqueSpec, ...]

    def job(self, job_id: str) -> JobSpec:
        for j in self.jobs:
            if j.id == job_id:
                return j
        raise KeyError(job_id)

    def technique(self, name: str) -> TechniqueSpec:
        for t in self.techniques:
            if t.name == name:
                return t
        raise KeyError(name)


def memory_feasible(job: JobSpec, technique: TechniqueSpec, g: int, gpu_memory: float) -> bool:
    """Coarse shard-factor memory rule.

    Replication keeps the full model on every GPU; sharding and
    pipelining split it g ways; offloading always fits by definition.
    """
    if g < 1:
        raise ValueError("g must be >= 1")
    if technique.archetype == "offloaded":
        return True
    shard = 1.0 if technique.archetype == "replicated" else float(g)
    return job.model_memory / shard + job.activation_memory <= gpu_memory + 1e-12


def hosting_gpu_memory(cluster: ClusterSpec, g: int) -> float | None:
    """Largest per-GPU memory among nodes that can host a g-GPU gang."""
    fits = [n.gpu_memory for n in cluster.nodes if n.gpu_count >= g]
    return max(fits) if fits else None


def feasible_configs(job: JobSpec, cluster: ClusterSpec, techniques: Iterable[TechniqueSpec]) -> list[RunConfig]:
    """All (technique, g) runnable on at least one node.

    Order is deterministic: technique registration order, then ascending g.
    """
    out: list[RunConfig] = []
    max_g = cluster.max_gpus_per_node
    for tech in techniques:
        for g in range(tech.min_gpus, max_g + 1):
            mem = hosting_gpu_memory(cluster, g)
            if mem is None:
                continue
            if any(
                n.gpu_count >= g and memory_feasible(job, tech, g, n.gpu_memory)
                for n in cluster.nodes
            ):
                out.append(RunConfig(technique=tech.name, gpus=g))
    return out


def validate_workload(workload: Workload) -> Workload:
    """Check cross-cutting invariants; returns the workload unchanged (idempotent).

    Raises DuplicateId, NoFeasibleConfig, or InvariantViolation.
    """
    seen: set[str] = set()
    for job in workload.jobs:
        if job.id in seen:
            raise DuplicateId("job", job.id)
        seen.add(job.id)
    node_ids: set[str] = set()
    for node in workload.cluster.nodes:
        if node.id in node_ids:
            raise DuplicateId("node", node.id)
        node_ids.add(node.id)
    tech_names: set[str] = set()
    for tech in workload.techniques:
        if tech.name in tech_names:
            raise DuplicateId("technique", tech.name)
        tech_names.add(tech.name)
    for job in workload.jobs:
        if not feasible_configs(job, workload.cluster, workload.techniques):
            raise NoFeasibleConfig(job.id)
    return workload


@dataclass(frozen=True)
class RunningContext:
    """Snapshot handed to replanners during introspection.

    ``remaining`` maps every unfinished job to its outstanding batch
    count; ``current`` maps the currently *running* subset to the
    (technique, gpus, node) it holds right now. ``checkpoint_cost`` is
    the seconds charged when a running job's assignment changes.
    """

    remaining: Mapping[str, int]
    current: Mapping[str, tuple[str, int, str]] = field(default_factory=dict)
    checkpoint_cost: float = 0.0


def sweep_capacity(
    segments: Iterable[tuple[str, int, float, float]],
    cluster: ClusterSpec,
    tol: float = 1e-9,
) -> None:
    """Check instantaneous per-node GPU demand via a start/end event sweep.

    ``segments`` yields (node_id, gpus, start, end). A segment ending at t
    frees its GPUs before one starting at t claims them.
    """
    events: dict[str, list[tuple[float, int, int]]] = {}
    for node_id, gpus, start, end in segments:
        if end < start - tol:
            raise InvalidPlan(f"segment on {node_id} ends before it starts")
        events.setdefault(node_id, []).append((start, 1, gpus))
        events.setdefault(node_id, []).append((end, 0, -gpus))
    for node_id, evs in events.items():
        cap = cluster.node(node_id).gpu_count
        in_use = 0
        evs.sort(key=lambda e: (e[0], e[1]))
        for _t, _kind, delta in evs:
            in_use += delta
            if in_use > cap:
                raise CapacityViolation(
                    f"node {node_id}: {in_use} GPUs in use at t={_t:.6g}, capacity {cap}"
                )


def check_plan(
    plan: Plan,
    workload: Workload,
    runtimes: Mapping[str, float],
    tol: float = 1e-6,
) -> None:
    """Verify plan invariants against estimated per-job runtimes.

    Every job appears exactly once, each gang fits its node, the capacity
    sweep holds, and the predicted makespan covers every completion.
    """
    want = {j.id for j in workload.jobs}
    got = set(plan.entries)
    if want != got:
        raise InvalidPlan(f"plan covers {sorted(got)}, workload has {sorted(want)}")
    segs = []
    last_end = 0.0
    for job_id, entry in plan.entries.items():
        tech = workload.technique(entry.config.technique)
        node = workload.cluster.node(entry.node)
        if entry.config.gpus > node.gpu_count:
            raise CapacityViolation(
                f"job {job_id}: gang of {entry.config.gpus} exceeds node {node.id} ({node.gpu_count})"
            )
        if entry.config.gpus < tech.min_gpus:
            raise InvalidPlan(f"job {job_id}: {entry.config.gpus} GPUs below technique minimum")
        end = entry.start_time + runtimes[job_id]
        segs.append((entry.node, entry.config.gpus, entry.start_time, end))
        last_end = max(last_end, end)
    sweep_capacity(segs, workload.cluster)
    if plan.predicted_makespan < last_end - tol:
        raise InvalidPlan(
            f"predicted makespan {plan.predicted_makespan:.6g} below last completion {last_end:.6g}"
        )


def workload_from_dict(payload: dict) -> Workload:
    try:
        return Workload.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"])
        raise InvariantViolation(loc, first["msg"]) from exc


def load_workload(path: str | Path) -> Workload:
    """Read and validate a workload JSON file (see README for the format)."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InvariantViolation("<file>", f"not valid JSON: {exc}") from exc
    return validate_workload(workload_from_dict(payload))


def save_workload(workload: Workload, path: str | Path) -> None:
    Path(path).write_text(workload.model_dump_json(indent=2) + "\n", encoding="utf-8")
