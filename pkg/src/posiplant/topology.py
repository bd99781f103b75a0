"""Connectivity graphs: Chimera, Pegasus, Zephyr, complete and random graphs.

Each structured generator enumerates nodes in row-major order of its native
coordinates, so node ``i`` of the returned :class:`EdgeSet` is the ``i``-th
tuple of the matching ``*_coordinates`` function.
"""
from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from .exceptions import ConfigurationError, ContractError

__all__ = [
    "EdgeSet",
    "chimera",
    "pegasus",
    "zephyr",
    "complete",
    "random_graph",
    "apply_defects",
    "chimera_coordinates",
    "pegasus_coordinates",
    "zephyr_coordinates",
    "read_edge_list",
    "write_edge_list",
    "TABLE1_TARGETS",
    "defects_to_counts",
]

# available qubits / couplers of the reference devices
TABLE1_TARGETS = {
    "DW_2000Q_6": ("chimera", 16, 2041, 5974),
    "Advantage_system4.1": ("pegasus", 16, 5627, 40279),
    "Advantage_system6.1": ("pegasus", 16, 5616, 40135),
    "Advantage2_prototype1.1": ("zephyr", 4, 563, 4790),
}


@dataclass(frozen=True)
class EdgeSet:
    """Undirected simple graph on nodes ``0..num_vars-1``.

    ``inactive`` lists nodes removed by defect simulation; they keep their
    index but carry no edges.
    """

    num_vars: int
    edges: tuple[tuple[int, int], ...]
    label: str = ""
    inactive: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        canon = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ContractError(f"self-loop on node {i}")
            if not (0 <= i < self.num_vars and 0 <= j < self.num_vars):
                raise ContractError(f"edge ({i}, {j}) outside [0, {self.num_vars})")
            canon.add((i, j) if i < j else (j, i))
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        object.__setattr__(self, "inactive", frozenset(int(v) for v in self.inactive))

    @classmethod
    def from_array(cls, num_vars: int, pairs: np.ndarray, label: str = "", inactive=()) -> "EdgeSet":
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return cls(num_vars, tuple(map(tuple, pairs.tolist())), label, frozenset(inactive))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def array(self) -> np.ndarray:
        """``(m, 2)`` int64 array of the edges, ``i < j`` per row."""
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.array.ravel(), minlength=self.num_vars)

    @property
    def active_nodes(self) -> list[int]:
        return [v for v in range(self.num_vars) if v not in self.inactive]

    @property
    def num_active(self) -> int:
        return self.num_vars - len(self.inactive)

    def uncovered(self) -> list[int]:
        """Nodes with no incident edge."""
        return np.flatnonzero(self.degrees == 0).tolist()

    def is_connected(self) -> bool:
        if self.num_vars <= 1:
            return True
        adj: list[list[int]] = [[] for _ in range(self.num_vars)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_vars

    def compact(self) -> tuple["EdgeSet", np.ndarray]:
        """Drop inactive nodes and relabel the rest consecutively.

        Returns the new edge set and the array mapping new index to old.
        """
        keep = np.array(self.active_nodes, dtype=np.int64)
        relabel = np.full(self.num_vars, -1, dtype=np.int64)
        relabel[keep] = np.arange(keep.size)
        pairs = relabel[self.array] if self.edges else np.empty((0, 2), dtype=np.int64)
        return EdgeSet.from_array(keep.size, pairs, self.label), keep


def chimera_coordinates(m: int, t: int = 4) -> list[tuple[int, int, int, int]]:
    """Node coordinates ``(row, col, u, k)`` of Chimera ``C_m`` in index order."""
    return list(itertools.product(range(m), range(m), range(2), range(t)))


def chimera(m: int, t: int = 4) -> EdgeSet:
    """Chimera ``C_m``: an ``m x m`` grid of ``K_{t,t}`` cells.

    Vertical qubits (``u = 0``) couple to the same ``k`` in the cell below,
    horizontal ones (``u = 1``) to the same ``k`` in the cell to the right.
    """
    if m < 1 or t < 1:
        raise ContractError("chimera needs m >= 1 and t >= 1")

    def idx(i, j, u, k):
        return ((i * m + j) * 2 + u) * t + k

    edges = []
    for i, j in itertools.product(range(m), range(m)):
        for k, kk in itertools.product(range(t), range(t)):
            edges.append((idx(i, j, 0, k), idx(i, j, 1, kk)))
        for k in range(t):
            if i + 1 < m:
                edges.append((idx(i, j, 0, k), idx(i + 1, j, 0, k)))
            if j + 1 < m:
                edges.append((idx(i, j, 1, k), idx(i, j + 1, 1, k)))
    return EdgeSet(2 * t * m * m, tuple(edges), f"chimera({m})" if t == 4 else f"chimera({m},{t})")


_PEGASUS_VERTICAL_OFFSETS = (2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6)
_PEGASUS_HORIZONTAL_OFFSETS = (6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10)


def _pegasus_full(m: int):
    """Every coordinate ``(u, w, k, z)`` and all couplers among them."""
    coords = list(itertools.product(range(2), range(m), range(12), range(m - 1)))
    index = {c: n for n, c in enumerate(coords)}
    edges = []
    for u, w, k, z in coords:
        a = index[(u, w, k, z)]
        if z + 1 < m - 1:
            edges.append((a, index[(u, w, k, z + 1)]))
        if k % 2 == 0:
            edges.append((a, index[(u, w, k + 1, z)]))
    # vertical qubit: column 12w+k, rows [12z+off, 12z+off+12); horizontal transposed
    for w, k, z in itertools.product(range(m), range(12), range(m - 1)):
        col = 12 * w + k
        row0 = 12 * z + _PEGASUS_VERTICAL_OFFSETS[k]
        for row in range(row0, row0 + 12):
            wh, kh = divmod(row, 12)
            if wh >= m:
                continue
            off = _PEGASUS_HORIZONTAL_OFFSETS[kh]
            zh, rem = divmod(col - off, 12)
            if col - off < 0 or zh >= m - 1:
                continue
            edges.append((index[(0, w, k, z)], index[(1, wh, kh, zh)]))
    return coords, edges


def pegasus_coordinates(m: int) -> list[tuple[int, int, int, int]]:
    """Coordinates ``(u, w, k, z)`` of the fabric nodes of ``P_m`` in index order."""
    return [c for c, _ in _pegasus_fabric(m)[0]]


def _pegasus_fabric(m: int):
    coords, edges = _pegasus_full(m)
    internal = np.zeros(len(coords), dtype=bool)
    for a, b in edges:
        if coords[a][0] != coords[b][0]:
            internal[a] = internal[b] = True
    keep = [(c, n) for n, c in enumerate(coords) if internal[n]]
    return keep, edges, internal


def pegasus(m: int) -> EdgeSet:
    """Pegasus ``P_m`` restricted to qubits with at least one internal coupler.

    Qubit ``(u, w, k, z)`` has 12 internal couplers to crossing orthogonal
    qubits, one odd coupler to its partner ``k ^ 1`` and external couplers
    to ``z +/- 1``.  Nodes are relabelled consecutively after the boundary
    qubits without internal couplers are dropped.
    """
    if m < 2:
        raise ContractError("pegasus needs m >= 2")
    keep, edges, internal = _pegasus_fabric(m)
    relabel = np.full(internal.size, -1, dtype=np.int64)
    relabel[[n for _, n in keep]] = np.arange(len(keep))
    kept = [(relabel[a], relabel[b]) for a, b in edges if internal[a] and internal[b]]
    return EdgeSet(len(keep), tuple(kept), f"pegasus({m})")


def zephyr_coordinates(m: int, t: int = 4) -> list[tuple[int, int, int, int, int]]:
    """Coordinates ``(u, w, k, j, z)`` of Zephyr ``Z_{m,t}`` in index order."""
    return list(itertools.product(range(2), range(2 * m + 1), range(t), range(2), range(m)))


def zephyr(m: int, t: int = 4) -> EdgeSet:
    """Zephyr ``Z_{m,t}``.

    Qubit ``(u, w, k, j, z)`` lies on line ``w`` and spans the two
    orthogonal lines ``2z+j`` and ``2z+j+1``; it couples to every orthogonal
    qubit it crosses (``4t`` of them), to ``z +/- 1`` on its own track, and
    through odd couplers to the half-shifted neighbours ``(1-j)`` on the
    same line.
    """
    if m < 1 or t < 1:
        raise ContractError("zephyr needs m >= 1 and t >= 1")
    W = 2 * m + 1

    def idx(u, w, k, j, z):
        return (((u * W + w) * t + k) * 2 + j) * m + z

    edges = []
    for u, w, k in itertools.product(range(2), range(W), range(t)):
        for j, z in itertools.product(range(2), range(m)):
            if z + 1 < m:
                edges.append((idx(u, w, k, j, z), idx(u, w, k, j, z + 1)))
        for z in range(m):
            edges.append((idx(u, w, k, 0, z), idx(u, w, k, 1, z)))
            if z + 1 < m:
                edges.append((idx(u, w, k, 1, z), idx(u, w, k, 0, z + 1)))
    for w, j, z in itertools.product(range(W), range(2), range(m)):
        for wh in (2 * z + j, 2 * z + j + 1):
            # horizontal qubits on line wh whose span covers column w
            for start in (w - 1, w):
                if not 0 <= start < 2 * m:
                    continue
                zh, jh = divmod(start, 2)
                for k, kh in itertools.product(range(t), range(t)):
                    edges.append((idx(0, w, k, j, z), idx(1, wh, kh, jh, zh)))
    label = f"zephyr({m})" if t == 4 else f"zephyr({m},{t})"
    return EdgeSet(4 * t * m * W, tuple(edges), label)


def complete(n: int) -> EdgeSet:
    if n < 0:
        raise ContractError("n must be nonnegative")
    return EdgeSet(n, tuple(itertools.combinations(range(n), 2)), f"complete({n})")


def random_graph(n: int, density: float, seed: int) -> EdgeSet:
    """Erdos-Renyi ``G(n, p)``; connectivity is not enforced."""
    if not 0.0 < density <= 1.0:
        raise ContractError(f"density must lie in (0, 1], got {density}")
    rng = np.random.Generator(np.random.Philox(seed))
    ii, jj = np.triu_indices(n, k=1)
    keep = rng.random(ii.size) < density
    pairs = np.stack([ii[keep], jj[keep]], axis=1)
    return EdgeSet.from_array(n, pairs, f"random({n},{density:g},seed={seed})")


def apply_defects(e: EdgeSet, node_kill: int, edge_kill: int, seed: int) -> EdgeSet:
    """Remove ``node_kill`` random active nodes, then ``edge_kill`` random edges.

    Removed nodes keep their index and are listed in ``inactive``.
    """
    if node_kill < 0 or edge_kill < 0:
        raise ContractError("kill counts must be nonnegative")
    if node_kill == 0 and edge_kill == 0:
        return e
    active = np.array(e.active_nodes, dtype=np.int64)
    if node_kill > active.size:
        raise ContractError(f"cannot remove {node_kill} of {active.size} active nodes")
    rng = np.random.Generator(np.random.Philox(seed))
    dead = np.sort(rng.choice(active, size=node_kill, replace=False)) if node_kill else np.empty(0, np.int64)
    pairs = e.array
    if dead.size:
        hit = np.isin(pairs, dead).any(axis=1)
        pairs = pairs[~hit]
    if edge_kill > pairs.shape[0]:
        raise ContractError(f"cannot remove {edge_kill} of {pairs.shape[0]} remaining edges")
    if edge_kill:
        drop = rng.choice(pairs.shape[0], size=edge_kill, replace=False)
        pairs = np.delete(pairs, drop, axis=0)
    label = f"{e.label}+defects({node_kill},{edge_kill},seed={seed})"
    return EdgeSet.from_array(e.num_vars, pairs, label, e.inactive | set(dead.tolist()))


def defects_to_counts(e: EdgeSet, qubits: int, couplers: int, seed: int) -> EdgeSet:
    """Apply random defects leaving exactly ``qubits`` active nodes and ``couplers`` edges.

    Node removal runs first and takes edges with it; the remaining surplus
    is removed as edge defects.

    Raises
    ------
    ContractError
        If the node removal already leaves fewer than ``couplers`` edges.
    """
    node_kill = e.num_active - qubits
    if node_kill < 0:
        raise ContractError(f"graph has only {e.num_active} active nodes, {qubits} requested")
    # same seed, so the node draw below repeats this one exactly
    survivors = apply_defects(e, node_kill, 0, seed).num_edges
    if survivors < couplers:
        raise ContractError(
            f"removing {node_kill} nodes with seed {seed} leaves {survivors} edges, {couplers} requested"
        )
    return apply_defects(e, node_kill, survivors - couplers, seed)


def write_edge_list(e: EdgeSet, path_or_file) -> None:
    """Write ``n <num_vars>`` then one ``i j`` pair per line.

    Label and inactive nodes go on ``#`` comment lines after the header.
    """
    buf = io.StringIO()
    buf.write(f"n {e.num_vars}\n")
    if e.label:
        buf.write(f"# label {e.label}\n")
    if e.inactive:
        buf.write("# inactive " + " ".join(map(str, sorted(e.inactive))) + "\n")
    for i, j in e.edges:
        buf.write(f"{i} {j}\n")
    text = buf.getvalue()
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        Path(path_or_file).write_bytes(text.encode("ascii"))


def read_edge_list(path_or_file) -> EdgeSet:
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
    else:
        text = Path(path_or_file).read_text(encoding="ascii")
    lines = text.splitlines()
    num_vars = None
    label = ""
    inactive: list[int] = []
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("label "):
                label = body[len("label "):]
            elif body.startswith("inactive"):
                inactive.extend(int(v) for v in body.split()[1:])
            continue
        parts = line.split()
        if num_vars is None:
            if len(parts) != 2 or parts[0] != "n":
                raise ConfigurationError(f"line {lineno}: expected header 'n <num_vars>'")
            num_vars = int(parts[1])
            continue
        if len(parts) != 2:
            raise ConfigurationError(f"line {lineno}: expected 'i j'")
        pairs.append((int(parts[0]), int(parts[1])))
    if num_vars is None:
        raise ConfigurationError("empty edge list (missing 'n <num_vars>' header)")
    return EdgeSet(num_vars, tuple(pairs), label, frozenset(inactive))


def by_name(kind: str, size: int, t: int = 4, density: float | None = None, seed: int = 0) -> EdgeSet:
    """Dispatch on a topology name as used by the command line."""
    if kind == "chimera":
        return chimera(size, t)
    if kind == "pegasus":
        return pegasus(size)
    if kind == "zephyr":
        return zephyr(size, t)
    if kind == "complete":
        return complete(size)
    if kind == "random":
        if density is None:
            raise ContractError("random graphs need a density")
        return random_graph(size, density, seed)
    raise ContractError(f"unknown topology {kind!r}")
