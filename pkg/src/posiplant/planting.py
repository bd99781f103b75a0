"""Posiform planting: QUBOs whose unique minimiser is a chosen bitstring.

Random exclusion clauses, each forbidding one assignment of a variable pair
that the planted bitstring does not use, are added until the planted
bitstring is the only model of the 2-SAT formula.  Every clause
``(z or z')`` then becomes the positive posiform term ``c * ~z * ~z'``,
which vanishes exactly where the clause holds, and expanding the posiform
gives the QUBO.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .exceptions import ConfigurationError, ContractError, DimensionError, SparseGraphError
from .model import (
    DEFAULT_BRUTE_FORCE_CAP,
    Literal,
    Posiform,
    Qubo,
    as_bitstring,
    brute_force,
    eval_posiform,
    eval_qubo,
    posiform_to_qubo,
)
from .topology import EdgeSet
from .twosat import Clause, TwoSatFormula, unique_solution

log = logging.getLogger(__name__)

GENERATOR_VERSION = f"posiplant {__version__}"

__all__ = [
    "PlantingConfig",
    "PlantedInstance",
    "exclude_clause",
    "plant",
    "plant_many",
    "instance_from_formula",
    "combine",
    "derive_seed",
    "random_planted",
    "make_rng",
    "GENERATOR_VERSION",
]


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; streams are reproducible across platforms."""
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(master_seed: int, index: int) -> int:
    """Child seed for instance ``index`` of a batch."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def random_planted(num_vars: int, seed: int) -> tuple[int, ...]:
    """Uniformly random bitstring from a stream separate from clause sampling."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), 1])))
    return tuple(int(b) for b in rng.integers(0, 2, size=num_vars))


@dataclass(frozen=True)
class PlantingConfig:
    """Inputs of :func:`plant`.

    ``batch_size`` and ``max_clauses`` default to ``num_vars`` and
    ``100 * num_vars``.  Uniqueness is first tested after ``batch_size``
    clauses and then after every further ``max(1, batch_size // 10)``.
    """

    num_vars: int
    planted: tuple[int, ...]
    edge_set: EdgeSet | None = None
    batch_size: int | None = None
    coefficient_pool: tuple[float, ...] = (1, 2)
    seed: int = 0
    max_clauses: int | None = None

    def __post_init__(self):
        if self.num_vars < 1:
            raise ConfigurationError("num_vars must be at least 1")
        planted = tuple(int(b) for b in as_bitstring(self.planted, self.num_vars))
        object.__setattr__(self, "planted", planted)
        pool = tuple(self.coefficient_pool)
        if not pool or any(not c > 0 for c in pool):
            raise ConfigurationError("coefficient pool must be nonempty and strictly positive")
        object.__setattr__(self, "coefficient_pool", pool)
        if self.batch_size is None:
            object.__setattr__(self, "batch_size", self.num_vars)
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be at least 1")
        if self.max_clauses is None:
            object.__setattr__(self, "max_clauses", 100 * self.num_vars)
        if self.max_clauses < 1:
            raise ConfigurationError("max_clauses must be at least 1")
        if self.edge_set is not None and self.edge_set.num_vars != self.num_vars:
            raise ConfigurationError(
                f"edge set has {self.edge_set.num_vars} nodes but num_vars is {self.num_vars}"
            )

    @property
    def recheck_interval(self) -> int:
        return max(1, self.batch_size // 10)


@dataclass(frozen=True)
class PlantedInstance:
    """A generated QUBO together with its certificate.

    ``qubo`` has zero offset; ``offset`` is the constant dropped from it, so
    ``eval_qubo(qubo, x) + offset == eval_posiform(posiform, x)`` everywhere
    and ``planted_energy + offset == 0``.
    """

    qubo: Qubo
    posiform: Posiform
    planted: tuple[int, ...]
    planted_energy: float
    offset: float
    clause_count: int
    config: PlantingConfig | None = None
    generator_version: str = GENERATOR_VERSION
    uniqueness_checks: int = 0
    edge_set_label: str = ""

    @property
    def num_vars(self) -> int:
        return self.qubo.num_vars

    @property
    def seed(self) -> int | None:
        return None if self.config is None else self.config.seed


def exclude_clause(xi_star: int, xj_star: int, choice: tuple[int, int], i: int = 0, j: int = 1) -> Clause:
    """Clause over ``x_i, x_j`` forbidding the assignment ``choice``.

    The literal on ``x_i`` is ``x_i`` when ``choice[0] == 0`` and ``~x_i``
    otherwise (likewise for ``x_j``), so the clause fails only at ``choice``.

    Raises
    ------
    ContractError
        If ``choice`` is the planted pair itself.
    """
    hi, hj = int(choice[0]), int(choice[1])
    if (hi, hj) == (int(xi_star), int(xj_star)):
        raise ContractError("cannot exclude the planted assignment")
    if hi not in (0, 1) or hj not in (0, 1):
        raise ContractError("choice must be a pair of bits")
    return Clause(Literal(i, hi == 1), Literal(j, hj == 1))


def _sample_clauses(rng, count, w, pairs):
    """Draw ``count`` exclusion clauses as literal-node arrays."""
    n = w.size
    if pairs is not None:
        e = rng.integers(0, pairs.shape[0], size=count)
        i, j = pairs[e, 0], pairs[e, 1]
    else:
        i = rng.integers(0, n, size=count)
        j = rng.integers(0, n - 1, size=count)
        j = j + (j >= i)
        i, j = np.minimum(i, j), np.maximum(i, j)
    planted_code = 2 * w[i].astype(np.int64) + w[j]
    r = rng.integers(0, 3, size=count)
    excluded = r + (r >= planted_code)
    hi, hj = excluded >> 1, excluded & 1
    # the literal on x_v is negated iff the excluded bit is 1
    return 2 * i + (1 - hi), 2 * j + (1 - hj)


def _node_true(nodes, w):
    bits = w[nodes >> 1].astype(bool)
    return np.where(nodes & 1, bits, ~bits)


def _posiform_from_clauses(num_vars, a, b, coefs) -> Posiform:
    """Sum of ``c * ~z * ~z'`` over clauses ``(z or z')``; unit clauses give ``c * ~z``."""
    # Sort keys are 2*v + negated, which orders like Literal.  Complementing
    # clause node 2*v + positive flips exactly that bit, so the key of the
    # posiform literal equals the clause node.
    ka, kb = np.minimum(a, b), np.maximum(a, b)
    unit = ka == kb
    lin_keys, lin_inv = np.unique(ka[unit], return_inverse=True)
    lin_vals = np.bincount(lin_inv, weights=coefs[unit], minlength=lin_keys.size)
    pair = ka[~unit] * (2 * num_vars) + kb[~unit]
    quad_keys, quad_inv = np.unique(pair, return_inverse=True)
    quad_vals = np.bincount(quad_inv, weights=coefs[~unit], minlength=quad_keys.size)

    def lit(key):
        return Literal(key >> 1, bool(key & 1))

    linear = {lit(k): v for k, v in zip(lin_keys.tolist(), lin_vals.tolist())}
    quadratic = {
        (lit(k // (2 * num_vars)), lit(k % (2 * num_vars))): v
        for k, v in zip(quad_keys.tolist(), quad_vals.tolist())
    }
    return Posiform(num_vars, linear, quadratic, 0.0)


def _finish(num_vars, w, a, b, coefs, config, checks, label) -> PlantedInstance:
    posiform = _posiform_from_clauses(num_vars, a, b, coefs)
    full = posiform_to_qubo(posiform)
    qubo = full.with_offset(0.0)
    planted = tuple(int(v) for v in w)
    planted_energy = eval_qubo(qubo, planted)
    if eval_posiform(posiform, planted) != 0.0 or planted_energy + full.offset != 0.0:
        raise AssertionError("planted bitstring is not a zero of the posiform")
    return PlantedInstance(
        qubo=qubo,
        posiform=posiform,
        planted=planted,
        planted_energy=planted_energy,
        offset=full.offset,
        clause_count=int(a.size),
        config=config,
        uniqueness_checks=checks,
        edge_set_label=label,
    )


def plant(cfg: PlantingConfig) -> PlantedInstance:
    """Generate a QUBO whose unique minimiser is ``cfg.planted``.

    Pairs are drawn with replacement, uniformly from the edge set (or from
    all pairs), and one of the three non-planted assignments of the pair is
    excluded uniformly at random.  Coefficients are drawn from the pool
    once uniqueness holds, one per clause draw, so repeated clauses add up.

    Raises
    ------
    ConfigurationError
        If some variable has no incident edge.
    SparseGraphError
        If ``max_clauses`` are drawn without reaching uniqueness.
    """
    n = cfg.num_vars
    w = np.asarray(cfg.planted, dtype=np.uint8)
    rng = make_rng(cfg.seed)
    label = cfg.edge_set.label if cfg.edge_set is not None else f"complete({n})"
    pool = np.asarray(cfg.coefficient_pool, dtype=np.float64)

    if n == 1:
        # no pairs exist; a single unit clause pins the variable
        node = np.array([int(w[0])], dtype=np.int64)
        coefs = pool[rng.integers(0, pool.size, size=1)]
        return _finish(n, w, node, node, coefs, cfg, 1, label)

    pairs = None
    if cfg.edge_set is not None:
        uncovered = cfg.edge_set.uncovered()
        if uncovered:
            raise ConfigurationError(
                f"{len(uncovered)} of {n} variables have no incident edge (first: {uncovered[:5]})"
            )
        pairs = cfg.edge_set.array

    chunks_a: list[np.ndarray] = []
    chunks_b: list[np.ndarray] = []
    total = 0
    checks = 0
    target = min(cfg.batch_size, cfg.max_clauses)
    while True:
        a_new, b_new = _sample_clauses(rng, target - total, w, pairs)
        if not np.all(_node_true(a_new, w) | _node_true(b_new, w)):
            raise AssertionError("an exclusion clause rejects the planted bitstring")
        chunks_a.append(a_new)
        chunks_b.append(b_new)
        total = target
        a = np.concatenate(chunks_a)
        b = np.concatenate(chunks_b)
        chunks_a, chunks_b = [a], [b]
        checks += 1
        if unique_solution(n, a, b, w):
            break
        if total >= cfg.max_clauses:
            raise SparseGraphError(
                f"planted bitstring still not unique after {total} clauses on {label}"
            )
        target = min(total + cfg.recheck_interval, cfg.max_clauses)
    coefs = pool[rng.integers(0, pool.size, size=total)]
    log.debug("planted n=%d with %d clauses after %d checks", n, total, checks)
    return _finish(n, w, a, b, coefs, cfg, checks, label)


def instance_from_formula(
    formula: TwoSatFormula,
    planted: Sequence[int],
    coefficients: Sequence[float] | None = None,
    label: str = "",
) -> PlantedInstance:
    """Build the planted instance for a given clause list.

    ``coefficients`` gives one positive weight per clause (all ones by
    default).  The formula must have ``planted`` as its unique model.
    """
    w = as_bitstring(planted, formula.num_vars)
    if not formula.satisfied_by(w):
        raise ContractError("planted bitstring violates the formula")
    a, b = formula.nodes
    if not unique_solution(formula.num_vars, a, b, w):
        raise ContractError("planted bitstring is not the unique model of the formula")
    if coefficients is None:
        coefs = np.ones(len(formula), dtype=np.float64)
    else:
        coefs = np.asarray(coefficients, dtype=np.float64)
        if coefs.shape != (len(formula),) or np.any(coefs <= 0):
            raise ContractError("need one positive coefficient per clause")
    return _finish(formula.num_vars, w, a, b, coefs, None, 1, label)


def plant_many(
    template: PlantingConfig,
    count: int,
    master_seed: int,
    random_bits: bool = True,
    threads: int | None = None,
) -> list[PlantedInstance]:
    """Generate ``count`` instances with child seeds ``derive_seed(master_seed, k)``.

    With ``random_bits`` each instance plants a fresh uniformly random
    bitstring drawn from its own seed; otherwise ``template.planted`` is
    reused.  Output order follows the instance index.
    """
    if threads is None:
        threads = int(os.environ.get("POSIPLANT_THREADS", "1"))

    def one(k: int) -> PlantedInstance:
        seed = derive_seed(master_seed, k)
        bits = random_planted(template.num_vars, seed) if random_bits else template.planted
        cfg = PlantingConfig(
            num_vars=template.num_vars,
            planted=bits,
            edge_set=template.edge_set,
            batch_size=template.batch_size,
            coefficient_pool=template.coefficient_pool,
            seed=seed,
            max_clauses=template.max_clauses,
        )
        try:
            return plant(cfg)
        except SparseGraphError as exc:
            raise SparseGraphError(f"instance {k} (seed {seed}): {exc}") from exc

    if threads <= 1:
        return [one(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(count)))


def combine(
    a1: float,
    q1: Qubo,
    a2: float,
    q2_planted: PlantedInstance,
    cap: int = DEFAULT_BRUTE_FORCE_CAP,
) -> tuple[Qubo, bool]:
    """``a1 * q1 + a2 * q2`` where ``q2`` has a unique planted minimiser.

    If ``q1`` attains its minimum at the planted bitstring, that bitstring is
    the unique minimiser of the sum.  The precondition is checked by brute
    force when ``q1`` has at most ``cap`` variables; the returned flag says
    whether it was verified.

    Raises
    ------
    ContractError
        On a nonpositive multiplier or a failed precondition check.
    DimensionError
        If the QUBOs differ in size.
    """
    if not (a1 > 0 and a2 > 0):
        raise ContractError("multipliers must be strictly positive")
    q2 = q2_planted.qubo
    if q1.num_vars != q2.num_vars:
        raise DimensionError(f"QUBO sizes differ: {q1.num_vars} vs {q2.num_vars}")
    verified = False
    if q1.num_vars <= cap:
        emin, minimizers = brute_force(q1, cap)
        if tuple(q2_planted.planted) not in set(minimizers):
            raise ContractError("q1 does not attain its minimum at the planted bitstring")
        verified = True
    return q1.scaled(a1) + q2.scaled(a2), verified
