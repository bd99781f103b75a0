"""QUBO and posiform types, energy evaluation and exact conversions.

A QUBO is ``sum_i a_i x_i + sum_{i<j} a_ij x_i x_j + offset`` over
``x in {0,1}^n``.  A posiform is the same kind of quadratic function written
over literals (a variable or its complement ``1 - x_i``) with strictly
positive coefficients, so it is nonnegative up to its offset.

Both types keep their constant term.  Every conversion here is lossless:
the converted object evaluates to exactly the same number at every point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels
from .exceptions import ContractError, DimensionError, SizeCapError

__all__ = [
    "Literal",
    "Qubo",
    "Posiform",
    "as_bitstring",
    "eval_qubo",
    "eval_posiform",
    "qubo_to_posiform",
    "posiform_to_qubo",
    "brute_force",
    "DEFAULT_BRUTE_FORCE_CAP",
]

DEFAULT_BRUTE_FORCE_CAP = 24


class Literal(NamedTuple):
    """A variable ``x_i`` or, when ``negated``, its complement ``1 - x_i``."""

    variable: int
    negated: bool = False

    def complement(self) -> "Literal":
        return Literal(self.variable, not self.negated)

    def value(self, x: Sequence[int]) -> int:
        bit = int(x[self.variable])
        return 1 - bit if self.negated else bit

    def __str__(self) -> str:
        return f"{'~' if self.negated else ''}x{self.variable}"


def as_bitstring(x, num_vars: int) -> np.ndarray:
    """Return ``x`` as a uint8 array of length ``num_vars``.

    Raises
    ------
    DimensionError
        If the length differs or an entry is not 0/1.
    """
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.shape[0] != num_vars:
        raise DimensionError(f"expected a bitstring of length {num_vars}, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise DimensionError("bitstring entries must be 0 or 1")
    return arr.astype(np.uint8)


def _canonical_pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=True)
class Qubo:
    """Sparse QUBO with an explicit constant offset.

    Use :meth:`from_terms` to build one from unnormalised input; the plain
    constructor assumes the storage invariants already hold.
    """

    num_vars: int
    linear: Mapping[int, float] = field(default_factory=dict)
    quadratic: Mapping[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_terms(
        cls,
        num_vars: int,
        linear: Mapping[int, float] | Iterable[tuple[int, float]] = (),
        quadratic: Mapping[tuple[int, int], float] | Iterable[tuple[tuple[int, int], float]] = (),
        offset: float = 0.0,
    ) -> "Qubo":
        """Merge duplicate terms, order pairs ``i < j`` and drop zeros.

        A diagonal pair ``(i, i)`` is folded into the linear term since
        ``x_i * x_i == x_i`` on binary variables.
        """
        if num_vars < 0:
            raise ContractError("num_vars must be nonnegative")
        lin: dict[int, float] = {}
        quad: dict[tuple[int, int], float] = {}
        items = linear.items() if isinstance(linear, Mapping) else linear
        for i, a in items:
            i = int(i)
            if not 0 <= i < num_vars:
                raise DimensionError(f"variable {i} out of range for {num_vars} variables")
            lin[i] = lin.get(i, 0.0) + float(a)
        items = quadratic.items() if isinstance(quadratic, Mapping) else quadratic
        for (i, j), a in items:
            i, j = int(i), int(j)
            if not (0 <= i < num_vars and 0 <= j < num_vars):
                raise DimensionError(f"pair ({i}, {j}) out of range for {num_vars} variables")
            if i == j:
                lin[i] = lin.get(i, 0.0) + float(a)
                continue
            key = _canonical_pair(i, j)
            quad[key] = quad.get(key, 0.0) + float(a)
        lin = {i: a for i, a in sorted(lin.items()) if a != 0.0}
        quad = {k: a for k, a in sorted(quad.items()) if a != 0.0}
        return cls(num_vars, lin, quad, float(offset))

    @classmethod
    def zero(cls, num_vars: int) -> "Qubo":
        return cls(num_vars, {}, {}, 0.0)

    def energy(self, x) -> float:
        return eval_qubo(self, x)

    def energies(self, states: np.ndarray) -> np.ndarray:
        """Vectorised energies for a ``(k, n)`` array of bitstrings."""
        states = np.asarray(states, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != self.num_vars:
            raise DimensionError(f"expected shape (k, {self.num_vars}), got {states.shape}")
        lin, ii, jj, w = self.arrays
        out = states @ lin + self.offset
        if w.size:
            out += (states[:, ii] * states[:, jj]) @ w
        return out

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Dense linear vector plus COO arrays ``(i, j, a_ij)`` of the couplers."""
        lin = np.zeros(self.num_vars, dtype=np.float64)
        for i, a in self.linear.items():
            lin[i] = a
        m = len(self.quadratic)
        ii = np.empty(m, dtype=np.int32)
        jj = np.empty(m, dtype=np.int32)
        w = np.empty(m, dtype=np.float64)
        for k, ((i, j), a) in enumerate(self.quadratic.items()):
            ii[k], jj[k], w[k] = i, j, a
        return lin, ii, jj, w

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric adjacency ``(indptr, indices, data)`` used by the samplers."""
        _, ii, jj, w = self.arrays
        rows = np.concatenate([ii, jj])
        cols = np.concatenate([jj, ii])
        data = np.concatenate([w, w])
        order = np.lexsort((cols, rows))
        rows, cols, data = rows[order], cols[order], data[order]
        indptr = np.zeros(self.num_vars + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, cols.astype(np.int32), data

    def local_fields(self, x) -> np.ndarray:
        """``a_i + sum_j a_ij x_j`` for every variable."""
        xa = as_bitstring(x, self.num_vars).astype(np.float64)
        lin, ii, jj, w = self.arrays
        h = lin.copy()
        np.add.at(h, ii, w * xa[jj])
        np.add.at(h, jj, w * xa[ii])
        return h

    def scaled(self, alpha: float) -> "Qubo":
        return Qubo.from_terms(
            self.num_vars,
            {i: alpha * a for i, a in self.linear.items()},
            {k: alpha * a for k, a in self.quadratic.items()},
            alpha * self.offset,
        )

    def __add__(self, other: "Qubo") -> "Qubo":
        if not isinstance(other, Qubo):
            return NotImplemented
        if other.num_vars != self.num_vars:
            raise DimensionError(f"cannot add QUBOs on {self.num_vars} and {other.num_vars} variables")
        return Qubo.from_terms(
            self.num_vars,
            list(self.linear.items()) + list(other.linear.items()),
            list(self.quadratic.items()) + list(other.quadratic.items()),
            self.offset + other.offset,
        )

    def with_offset(self, offset: float) -> "Qubo":
        return Qubo(self.num_vars, dict(self.linear), dict(self.quadratic), float(offset))

    def max_abs_coefficient(self) -> float:
        vals = [abs(a) for a in self.linear.values()] + [abs(a) for a in self.quadratic.values()]
        return max(vals, default=0.0)

    def __str__(self) -> str:
        parts = [f"{a:+g}*x{i}" for i, a in self.linear.items()]
        parts += [f"{a:+g}*x{i}*x{j}" for (i, j), a in self.quadratic.items()]
        if self.offset:
            parts.append(f"{self.offset:+g}")
        return " ".join(parts) or "0"


def _check_literal(lit: Literal, num_vars: int) -> Literal:
    lit = Literal(int(lit[0]), bool(lit[1]))
    if not 0 <= lit.variable < num_vars:
        raise DimensionError(f"literal {lit} out of range for {num_vars} variables")
    return lit


def _canonical_literal_pair(z: Literal, zp: Literal) -> tuple[Literal, Literal]:
    return (z, zp) if z.variable < zp.variable else (zp, z)


@dataclass(frozen=True, eq=True)
class Posiform:
    """Quadratic form over literals with strictly positive coefficients.

    ``quadratic`` keys are literal pairs with the lower variable first; a
    literal is never paired with itself or its own complement.
    """

    num_vars: int
    linear: Mapping[Literal, float] = field(default_factory=dict)
    quadratic: Mapping[tuple[Literal, Literal], float] = field(default_factory=dict)
    offset: float = 0.0

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self):
        for lit, b in self.linear.items():
            if not b > 0:
                raise ContractError(f"posiform coefficient of {lit} must be positive, got {b}")
        for (z, zp), b in self.quadratic.items():
            if not b > 0:
                raise ContractError(f"posiform coefficient of {z}*{zp} must be positive, got {b}")
            if z.variable >= zp.variable:
                raise ContractError(f"quadratic key ({z}, {zp}) is not canonically ordered")

    @classmethod
    def from_terms(
        cls,
        num_vars: int,
        linear: Mapping[Literal, float] | Iterable[tuple[Literal, float]] = (),
        quadratic: Mapping[tuple[Literal, Literal], float]
        | Iterable[tuple[tuple[Literal, Literal], float]] = (),
        offset: float = 0.0,
    ) -> "Posiform":
        """Merge duplicate terms and canonicalise pair order.

        Raises
        ------
        ContractError
            On a nonpositive coefficient, or a pair of literals over the same
            variable (``z*z`` and ``z*~z`` are not stored as quadratic terms).
        """
        lin: dict[Literal, float] = {}
        quad: dict[tuple[Literal, Literal], float] = {}
        items = linear.items() if isinstance(linear, Mapping) else linear
        for lit, b in items:
            lit = _check_literal(lit, num_vars)
            if not b > 0:
                raise ContractError(f"posiform coefficient of {lit} must be positive, got {b}")
            lin[lit] = lin.get(lit, 0.0) + float(b)
        items = quadratic.items() if isinstance(quadratic, Mapping) else quadratic
        for (z, zp), b in items:
            z, zp = _check_literal(z, num_vars), _check_literal(zp, num_vars)
            if z.variable == zp.variable:
                raise ContractError(f"quadratic term {z}*{zp} repeats variable x{z.variable}")
            if not b > 0:
                raise ContractError(f"posiform coefficient of {z}*{zp} must be positive, got {b}")
            key = _canonical_literal_pair(z, zp)
            quad[key] = quad.get(key, 0.0) + float(b)
        return cls(num_vars, dict(sorted(lin.items())), dict(sorted(quad.items())), float(offset))

    def value(self, x) -> float:
        return eval_posiform(self, x)

    def __str__(self) -> str:
        parts = [f"{b:g}*{z}" for z, b in self.linear.items()]
        parts += [f"{b:g}*{z}*{zp}" for (z, zp), b in self.quadratic.items()]
        if self.offset:
            parts.append(f"{self.offset:+g}")
        return " + ".join(parts) or "0"


def eval_qubo(q: Qubo, x) -> float:
    """Energy of bitstring ``x`` including the offset."""
    xa = as_bitstring(x, q.num_vars)
    total = q.offset
    for i, a in q.linear.items():
        if xa[i]:
            total += a
    for (i, j), a in q.quadratic.items():
        if xa[i] and xa[j]:
            total += a
    return float(total)


def eval_posiform(p: Posiform, x) -> float:
    xa = as_bitstring(x, p.num_vars)
    total = p.offset
    for z, b in p.linear.items():
        total += b * z.value(xa)
    for (z, zp), b in p.quadratic.items():
        total += b * z.value(xa) * zp.value(xa)
    return float(total)


def qubo_to_posiform(
    q: Qubo, mode: str = "lower", rng: np.random.Generator | None = None
) -> Posiform:
    """Rewrite ``q`` with positive coefficients, moving constants into the offset.

    A negative coupler ``a x_i x_j`` becomes ``a x_j + (-a) ~x_i x_j`` when
    ``x_i`` is complemented; the leftover linear part joins ``a_j`` before the
    linear terms are made positive.

    Parameters
    ----------
    mode : {"lower", "random"}
        Which variable of a negative coupler to complement: always the lower
        index, or a coin flip drawn from ``rng``.
    """
    if mode not in ("lower", "random"):
        raise ContractError(f"unknown complementing mode {mode!r}")
    if mode == "random" and rng is None:
        raise ContractError("mode='random' needs an rng")
    offset = q.offset
    lin = dict(q.linear)
    quad: list[tuple[tuple[Literal, Literal], float]] = []
    for (i, j), a in q.quadratic.items():
        if a > 0:
            quad.append(((Literal(i), Literal(j)), a))
            continue
        if mode == "lower" or rng.random() < 0.5:
            flipped, kept = i, j
        else:
            flipped, kept = j, i
        lin[kept] = lin.get(kept, 0.0) + a
        quad.append(((Literal(flipped, True), Literal(kept)), -a))
    linear: list[tuple[Literal, float]] = []
    for i, a in lin.items():
        if a > 0:
            linear.append((Literal(i), a))
        elif a < 0:
            linear.append((Literal(i, True), -a))
            offset += a
    return Posiform.from_terms(q.num_vars, linear, quad, offset)


def posiform_to_qubo(p: Posiform) -> Qubo:
    """Expand complements as ``1 - x_i`` and collect like terms."""
    lin: dict[int, float] = {}
    quad: dict[tuple[int, int], float] = {}
    offset = p.offset
    for z, b in p.linear.items():
        if z.negated:
            offset += b
            lin[z.variable] = lin.get(z.variable, 0.0) - b
        else:
            lin[z.variable] = lin.get(z.variable, 0.0) + b
    for (z, zp), b in p.quadratic.items():
        # (s x_i + c)(s' x_j + c') with s = -1, c = 1 for a complement
        s, c = (-1.0, 1.0) if z.negated else (1.0, 0.0)
        sp, cp = (-1.0, 1.0) if zp.negated else (1.0, 0.0)
        key = (z.variable, zp.variable)
        quad[key] = quad.get(key, 0.0) + b * s * sp
        if cp:
            lin[z.variable] = lin.get(z.variable, 0.0) + b * s * cp
        if c:
            lin[zp.variable] = lin.get(zp.variable, 0.0) + b * c * sp
        offset += b * c * cp
    return Qubo.from_terms(p.num_vars, lin, quad, offset)


def index_to_bits(k: int, num_vars: int) -> tuple[int, ...]:
    """Bitstring whose lexicographic rank is ``k`` (``x_0`` most significant)."""
    return tuple((k >> (num_vars - 1 - i)) & 1 for i in range(num_vars))


def bits_to_index(x) -> int:
    k = 0
    for b in x:
        k = (k << 1) | int(b)
    return k


def brute_force(
    q: Qubo, cap: int = DEFAULT_BRUTE_FORCE_CAP
) -> tuple[float, list[tuple[int, ...]]]:
    """Exact minimum and every minimiser, in lexicographic order.

    Raises
    ------
    SizeCapError
        If ``q.num_vars`` exceeds ``cap``.
    """
    n = q.num_vars
    if n > cap:
        raise SizeCapError(f"brute force over {n} variables exceeds the cap of {cap}")
    if n == 0:
        return float(q.offset), [()]
    lin, ii, jj, w = q.arrays
    scale = 1.0 + float(np.abs(lin).sum() + np.abs(w).sum())
    indptr, indices, data = q.csr
    _, candidates = kernels.brute_force(lin, indptr, indices, data, 1e-9 * scale)
    candidates = np.sort(candidates)
    # re-evaluate candidates directly so the tie set is exact
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    chunk = 1 << 16
    energies = np.empty(candidates.size, dtype=np.float64)
    for start in range(0, candidates.size, chunk):
        block = candidates[start:start + chunk]
        states = ((block[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        energies[start:start + chunk] = q.energies(states)
    best = energies.min()
    winners = candidates[energies == best]
    return float(best), [index_to_bits(int(k), n) for k in winners]
