"""Classical samplers: simulated annealing, steepest descent and exhaustive search.

All samplers return a :class:`SampleSet` whose energies are recomputed
from the final bitstrings, so they never depend on incremental bookkeeping.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import kernels
from .exceptions import ContractError
from .model import DEFAULT_BRUTE_FORCE_CAP, Qubo, as_bitstring, brute_force
from .planting import make_rng

__all__ = [
    "SamplerParams",
    "SampleSet",
    "simulated_annealing",
    "steepest_descent",
    "exhaustive",
    "default_beta_range",
    "descent_trajectory",
    "SAMPLERS",
]

SWEEP_CHUNK = 16


@dataclass(frozen=True)
class SamplerParams:
    """Sampler settings; ``sweeps`` and ``beta_range`` only apply to annealing.

    ``beta_range=None`` derives the range from the instance (see
    :func:`default_beta_range`).
    """

    num_reads: int = 800
    sweeps: int = 1000
    beta_range: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1 or self.sweeps < 1:
            raise ContractError("num_reads and sweeps must be at least 1")
        if self.beta_range is not None:
            lo, hi = self.beta_range
            if not (0 < lo < hi):
                raise ContractError("beta_range must satisfy 0 < beta_min < beta_max")

    def as_dict(self) -> dict:
        return {
            "num_reads": self.num_reads,
            "sweeps": self.sweeps,
            "beta_range": None if self.beta_range is None else list(self.beta_range),
            "seed": self.seed,
        }


@dataclass
class SampleSet:
    """One row per read: final bitstring and its energy."""

    sampler: str
    states: np.ndarray
    energies: np.ndarray
    wall_time: float
    params: dict = field(default_factory=dict)
    seed: int | None = None
    instance: str = ""
    ground_energy: float | None = None
    time_source: str = "wall-clock"
    work: int = 0

    def use_nominal_clock(self, ns_per_update: float = 1.0) -> None:
        """Replace the measured time with ``work`` single-variable updates at a fixed cost.

        The result depends only on the inputs and seed, which makes report
        files reproducible byte for byte.
        """
        self.wall_time = max(self.work, 1) * ns_per_update * 1e-9
        self.time_source = f"nominal-{ns_per_update:g}ns-per-update"

    @property
    def num_reads(self) -> int:
        return int(self.energies.shape[0])

    @property
    def num_vars(self) -> int:
        return int(self.states.shape[1])

    def records(self) -> Iterator[tuple[int, tuple[int, ...], float]]:
        for r in range(self.num_reads):
            yield r, tuple(int(b) for b in self.states[r]), float(self.energies[r])

    def best(self) -> tuple[tuple[int, ...], float]:
        r = int(np.argmin(self.energies))
        return tuple(int(b) for b in self.states[r]), float(self.energies[r])


def default_beta_range(q: Qubo) -> tuple[float, float]:
    """Hot end accepts the largest possible uphill move with probability 1/2,
    the cold end accepts the smallest nonzero coefficient with probability 1/100."""
    lin, ii, jj, w = q.arrays
    reach = np.abs(lin).copy()
    np.add.at(reach, ii, np.abs(w))
    np.add.at(reach, jj, np.abs(w))
    coeffs = np.concatenate([np.abs(lin), np.abs(w)])
    coeffs = coeffs[coeffs > 0]
    if coeffs.size == 0:
        return 0.1, 1.0
    hot = math.log(2.0) / float(reach.max())
    cold = math.log(100.0) / float(coeffs.min())
    if cold <= hot:
        cold = hot * 10.0
    return hot, cold


def _fields(q: Qubo, x: np.ndarray) -> np.ndarray:
    """Local fields ``a_i + sum_j a_ij x_j`` for every row of ``x``."""
    lin, ii, jj, w = q.arrays
    xt = x.T.astype(np.float64)
    ft = np.repeat(lin[:, None], x.shape[0], axis=1)
    for s in range(0, w.size, 4096):
        sl = slice(s, s + 4096)
        np.add.at(ft, ii[sl], w[sl, None] * xt[jj[sl]])
        np.add.at(ft, jj[sl], w[sl, None] * xt[ii[sl]])
    return np.ascontiguousarray(ft.T)


def _anneal_debug(q, x, field_, betas, uniforms):
    """Scalar annealing that re-derives the fields after every accepted flip."""
    indptr, indices, data = q.csr
    reads, n = x.shape
    for r in range(reads):
        for s in range(betas.shape[0]):
            for i in range(n):
                sign = 1.0 - 2.0 * x[r, i]
                de = sign * field_[r, i]
                if de <= 0.0 or uniforms[s, r, i] < math.exp(-betas[s] * de):
                    x[r, i] ^= 1
                    for p in range(indptr[i], indptr[i + 1]):
                        field_[r, indices[p]] += sign * data[p]
                    fresh = q.local_fields(x[r])
                    if not np.array_equal(fresh, field_[r]):
                        raise AssertionError(f"field drift at read {r}, sweep {s}, var {i}")


def simulated_annealing(q: Qubo, params: SamplerParams = SamplerParams(), debug: bool = False) -> SampleSet:
    """Single-flip Metropolis annealing over a geometric inverse-temperature ladder.

    Each read starts from a uniformly random bitstring and performs
    ``params.sweeps`` sweeps; a sweep visits the variables in index order.

    With ``debug=True`` (at most 100 variables) a scalar loop checks the
    incremental fields against a full recomputation after every flip.  It
    consumes the same random stream, so its output matches the fast path.
    """
    n = q.num_vars
    if debug and n > 100:
        raise ContractError("debug annealing is limited to 100 variables")
    beta_range = params.beta_range or default_beta_range(q)
    betas = np.geomspace(beta_range[0], beta_range[1], params.sweeps)
    rng = make_rng(params.seed)
    start = time.perf_counter()
    x = rng.integers(0, 2, size=(params.num_reads, n)).astype(np.int8)
    field_ = _fields(q, x)
    indptr, indices, data = q.csr
    for s0 in range(0, params.sweeps, SWEEP_CHUNK):
        chunk = betas[s0:s0 + SWEEP_CHUNK]
        uniforms = rng.random((chunk.size, params.num_reads, n))
        if debug:
            _anneal_debug(q, x, field_, chunk, uniforms)
        else:
            kernels.anneal(x, field_, indptr, indices, data, np.ascontiguousarray(chunk), uniforms)
    wall = time.perf_counter() - start
    info = params.as_dict()
    info["beta_range"] = [float(beta_range[0]), float(beta_range[1])]
    states = x.astype(np.uint8)
    work = params.num_reads * params.sweeps * n
    return SampleSet("sa", states, q.energies(states), wall, info, params.seed, work=work)


def steepest_descent(q: Qubo, params: SamplerParams = SamplerParams()) -> SampleSet:
    """Greedy descent from random starts: flip the best improving bit until none is left.

    Ties go to the lowest variable index, so each output is a one-flip local
    minimum determined by its start.
    """
    rng = make_rng(params.seed)
    start = time.perf_counter()
    x = rng.integers(0, 2, size=(params.num_reads, q.num_vars)).astype(np.int8)
    field_ = _fields(q, x)
    indptr, indices, data = q.csr
    flips = kernels.steepest_descent(x, field_, indptr, indices, data)
    wall = time.perf_counter() - start
    states = x.astype(np.uint8)
    info = {"num_reads": params.num_reads, "seed": params.seed}
    # every step scans all n fields; the final step finds no improving flip
    work = int((np.asarray(flips, dtype=np.int64) + 1).sum()) * q.num_vars
    return SampleSet("greedy", states, q.energies(states), wall, info, params.seed, work=work)


def descent_trajectory(q: Qubo, x0) -> list[tuple[tuple[int, ...], float]]:
    """States and energies visited by steepest descent from ``x0``."""
    x = as_bitstring(x0, q.num_vars).copy()
    path = [(tuple(int(b) for b in x), q.energy(x))]
    while True:
        h = q.local_fields(x)
        de = (1.0 - 2.0 * x) * h
        i = int(np.argmin(de))
        if not de[i] < 0:
            return path
        x[i] ^= 1
        path.append((tuple(int(b) for b in x), q.energy(x)))


def exhaustive(q: Qubo, params: SamplerParams | None = None, cap: int = DEFAULT_BRUTE_FORCE_CAP) -> SampleSet:
    """Every global minimiser, one record each."""
    start = time.perf_counter()
    emin, minimizers = brute_force(q, cap)
    wall = time.perf_counter() - start
    states = np.array(minimizers, dtype=np.uint8).reshape(len(minimizers), q.num_vars)
    energies = np.full(len(minimizers), emin)
    return SampleSet("exhaustive", states, energies, wall, {"cap": cap}, None, work=1 << q.num_vars)


SAMPLERS = {
    "sa": simulated_annealing,
    "greedy": steepest_descent,
    "exhaustive": exhaustive,
}
