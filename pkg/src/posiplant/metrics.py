"""Ground-state success probability and 99% time-to-solution."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError
from .samplers import SampleSet

__all__ = ["RunReport", "success_count", "gsp", "tts99", "run_report"]


def success_count(s: SampleSet, ground_energy: float) -> int:
    """Reads whose energy equals ``ground_energy`` exactly."""
    if s.num_reads == 0:
        raise ContractError("empty sample set")
    return int(np.count_nonzero(s.energies == ground_energy))


def gsp(s: SampleSet, ground_energy: float) -> float:
    return success_count(s, ground_energy) / s.num_reads


def tts99(total_time_s: float, num_reads: int, p: float) -> float | None:
    """Expected time to see the optimum once with 99% confidence.

    ``(t / A) * ln(0.01) / ln(1 - p)``; ``t / A`` when ``p == 1`` and
    ``None`` when ``p == 0``.
    """
    if not total_time_s > 0:
        raise ContractError("total time must be positive")
    if num_reads < 1:
        raise ContractError("need at least one read")
    if not 0.0 <= p <= 1.0:
        raise ContractError(f"probability out of range: {p}")
    per_read = total_time_s / num_reads
    if p == 0.0:
        return None
    if p == 1.0:
        return per_read
    return per_read * math.log(0.01) / math.log1p(-p)


@dataclass(frozen=True)
class RunReport:
    instance: str
    sampler: str
    num_reads: int
    ground_energy: float
    success_count: int
    gsp: float
    tts_99: float | None
    total_time: float
    time_source: str = "wall-clock"

    def __post_init__(self):
        if not 0.0 <= self.gsp <= 1.0:
            raise ContractError("gsp out of range")
        if (self.tts_99 is None) != (self.gsp == 0.0):
            raise ContractError("tts_99 must be present exactly when gsp > 0")


def run_report(s: SampleSet, ground_energy: float | None = None, instance: str | None = None) -> RunReport:
    """Summarise one sample set against the certified ground energy.

    Raises
    ------
    ContractError
        If no ground energy is given or recorded on the sample set.
    """
    if ground_energy is None:
        ground_energy = s.ground_energy
    if ground_energy is None:
        raise ContractError(f"no planted energy recorded for sample set {s.instance!r}")
    hits = success_count(s, ground_energy)
    p = hits / s.num_reads
    # a zero timer reading would make tts undefined; clamp to the clock resolution
    total = max(s.wall_time, 1e-9)
    return RunReport(
        instance=instance if instance is not None else s.instance,
        sampler=s.sampler,
        num_reads=s.num_reads,
        ground_energy=float(ground_energy),
        success_count=hits,
        gsp=p,
        tts_99=tts99(total, s.num_reads, p),
        total_time=total,
        time_source=s.time_source,
    )
