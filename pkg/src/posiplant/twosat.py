"""2-SAT: implication-graph solving, uniqueness testing and a brute-force oracle.

Literal ``x_v`` is node ``2*v + 1`` of the implication graph and ``~x_v`` is
node ``2*v``.  Clause ``(a or b)`` contributes the edges ``~a -> b`` and
``~b -> a``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .exceptions import ContractError, DimensionError, SizeCapError
from .model import Literal, Posiform, as_bitstring, index_to_bits

__all__ = [
    "Clause",
    "TwoSatFormula",
    "solve",
    "is_uniquely_satisfiable",
    "brute_force_count",
    "posiform_to_twosat",
    "unique_solution",
    "to_dimacs",
    "from_dimacs",
]


class Clause(NamedTuple):
    first: Literal
    second: Literal

    def satisfied_by(self, x: Sequence[int]) -> bool:
        return bool(self.first.value(x) or self.second.value(x))

    def __str__(self) -> str:
        return f"({self.first} v {self.second})"


def literal_node(lit: Literal) -> int:
    return 2 * lit.variable + (0 if lit.negated else 1)


@dataclass(frozen=True)
class TwoSatFormula:
    """Conjunction of two-literal clauses over ``num_vars`` variables.

    Duplicate clauses are kept; a unit clause is written ``(l v l)``.
    """

    num_vars: int
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(Clause(Literal(*a), Literal(*b)) for a, b in self.clauses))
        for c in self.clauses:
            for lit in c:
                if not 0 <= lit.variable < self.num_vars:
                    raise DimensionError(f"clause {c} uses a variable outside [0, {self.num_vars})")

    def __len__(self) -> int:
        return len(self.clauses)

    def and_(self, more: Iterable[Clause]) -> "TwoSatFormula":
        return TwoSatFormula(self.num_vars, self.clauses + tuple(more))

    @cached_property
    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Literal-node arrays of the first and second literal of every clause."""
        a = np.fromiter((literal_node(c.first) for c in self.clauses), dtype=np.int64, count=len(self.clauses))
        b = np.fromiter((literal_node(c.second) for c in self.clauses), dtype=np.int64, count=len(self.clauses))
        return a, b

    def satisfied_by(self, x) -> bool:
        xa = as_bitstring(x, self.num_vars)
        a, b = self.nodes
        return bool(np.all(_node_values(a, xa) | _node_values(b, xa)))

    def __str__(self) -> str:
        return " & ".join(str(c) for c in self.clauses) or "True"


def _node_values(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Truth value of literal nodes under bitstring ``x``."""
    bits = x[nodes >> 1].astype(bool)
    return np.where(nodes & 1, bits, ~bits)


def implication_graph(num_vars: int, a: np.ndarray, b: np.ndarray, reverse: bool = False):
    """CSR adjacency of the implication graph for clause literal nodes ``a``, ``b``."""
    src = np.concatenate([a ^ 1, b ^ 1])
    dst = np.concatenate([b, a])
    if reverse:
        src, dst = dst, src
    return kernels.build_csr(2 * num_vars, src.astype(np.int64), dst.astype(np.int64))


def solve_nodes(num_vars: int, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Satisfying assignment for the clause arrays, or ``None`` if unsatisfiable."""
    indptr, indices = implication_graph(num_vars, a, b)
    comp = kernels.tarjan_scc(indptr, indices)
    pos, neg = comp[1::2], comp[0::2]
    if np.any(pos == neg):
        return None
    # Tarjan numbers sink components first; a literal later in topological
    # order than its complement is set true
    return (pos < neg).astype(np.uint8)


def solve(f: TwoSatFormula) -> tuple[int, ...] | None:
    """Satisfying assignment of ``f`` or ``None`` when it is unsatisfiable.

    The empty formula yields all zeros.
    """
    a, b = f.nodes
    x = solve_nodes(f.num_vars, a, b)
    return None if x is None else tuple(int(v) for v in x)


def unique_solution(num_vars: int, a: np.ndarray, b: np.ndarray, witness: np.ndarray) -> bool:
    """Whether ``witness`` is the only model of the clause arrays.

    Assumes ``witness`` satisfies every clause.  Variable ``v`` is fixed
    exactly when its false literal implies its true literal.
    """
    if num_vars == 0:
        return True
    indptr, indices = implication_graph(num_vars, a, b)
    rindptr, rindices = implication_graph(num_vars, a, b, reverse=True)
    true_nodes = 2 * np.arange(num_vars, dtype=np.int64) + witness.astype(np.int64)
    return bool(kernels.unique_backbone(true_nodes, indptr, indices, rindptr, rindices))


def is_uniquely_satisfiable(f: TwoSatFormula, witness, method: str = "backbone") -> bool:
    """True iff ``witness`` is the only satisfying assignment of ``f``.

    Parameters
    ----------
    method : {"backbone", "forcing"}
        ``"forcing"`` re-solves ``f`` once per variable with that variable
        pinned to the opposite of the witness by a unit clause; the witness
        is unique iff all of those are unsatisfiable.  ``"backbone"`` decides
        the same question with one reachability pass per unproven literal.

    Raises
    ------
    ContractError
        If ``witness`` does not satisfy ``f``.
    """
    w = as_bitstring(witness, f.num_vars)
    if not f.satisfied_by(w):
        raise ContractError("witness does not satisfy the formula")
    a, b = f.nodes
    if method == "backbone":
        return unique_solution(f.num_vars, a, b, w)
    if method != "forcing":
        raise ContractError(f"unknown method {method!r}")
    for v in range(f.num_vars):
        forced = 2 * v + (1 - int(w[v]))
        aa = np.append(a, forced)
        bb = np.append(b, forced)
        if solve_nodes(f.num_vars, aa, bb) is not None:
            return False
    return True


def brute_force_count(f: TwoSatFormula, cap: int = 24) -> tuple[int, list[tuple[int, ...]]]:
    """Count and list every satisfying assignment, lexicographically."""
    n = f.num_vars
    if n > cap:
        raise SizeCapError(f"enumerating {n} variables exceeds the cap of {cap}")
    a, b = f.nodes
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    chunk = 1 << min(n, 16)
    found: list[np.ndarray] = []
    for start in range(0, 1 << n, chunk):
        ks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        states = ((ks[:, None] >> shifts[None, :]) & 1).astype(bool)
        ok = np.ones(ks.size, dtype=bool)
        for na, nb in zip(a.tolist(), b.tolist()):
            va = states[:, na >> 1] if na & 1 else ~states[:, na >> 1]
            vb = states[:, nb >> 1] if nb & 1 else ~states[:, nb >> 1]
            ok &= va | vb
        found.append(ks[ok])
    sols = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
    return int(sols.size), [index_to_bits(int(k), n) for k in sols]


def posiform_to_twosat(p: Posiform) -> TwoSatFormula:
    """Clauses whose models are exactly the zeros of ``p`` (ignoring its offset).

    ``b*z`` vanishes iff ``~z`` holds; ``b*z*z'`` vanishes iff ``~z or ~z'``.
    """
    clauses = [Clause(z.complement(), z.complement()) for z in p.linear]
    clauses += [Clause(z.complement(), zp.complement()) for z, zp in p.quadratic]
    return TwoSatFormula(p.num_vars, tuple(clauses))


def to_dimacs(f: TwoSatFormula) -> str:
    """DIMACS CNF text; variables are 1-based and unit clauses are written once."""
    def lit(l: Literal) -> int:
        return -(l.variable + 1) if l.negated else l.variable + 1

    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    for c in f.clauses:
        if c.first == c.second:
            lines.append(f"{lit(c.first)} 0")
        else:
            lines.append(f"{lit(c.first)} {lit(c.second)} 0")
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> TwoSatFormula:
    num_vars = None
    clauses: list[Clause] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ContractError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v != 0:
                pending.append(v)
                continue
            if not 1 <= len(pending) <= 2:
                raise ContractError(f"clause {pending} is not a 1- or 2-literal clause")
            lits = [Literal(abs(t) - 1, t < 0) for t in pending]
            clauses.append(Clause(lits[0], lits[-1]))
            pending = []
    if num_vars is None:
        raise ContractError("missing DIMACS 'p cnf' header")
    if pending:
        raise ContractError("last clause is not terminated by 0")
    return TwoSatFormula(num_vars, tuple(clauses))
