"""Pure-Python/numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` call for call.  Given the same inputs both
backends produce the same outputs, including consumption of the supplied
uniform variates, so the compiled core can be checked against this module.

Literal nodes of an implication graph are numbered ``2*v + 1`` for ``x_v``
and ``2*v`` for its complement; ``node ^ 1`` is the complementary literal.
"""
from __future__ import annotations

from collections import deque

import numpy as np

BACKEND = "python"


def brute_force(lin, indptr, indices, data, tol):
    """Enumerate all ``2**n`` states; return ``(best, candidate_indices)``.

    State index ``k`` stores variable ``v`` at bit ``n - 1 - v``.  Every
    state within ``tol`` of the minimum is returned.
    """
    n = lin.shape[0]
    # rebuild the upper-triangular coupler list from the symmetric CSR
    rows = np.repeat(np.arange(n), np.diff(indptr))
    keep = rows < indices
    ii, jj, w = rows[keep], indices[keep], data[keep]
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    chunk = 1 << min(n, 16)
    best = np.inf
    keys: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for start in range(0, 1 << n, chunk):
        ks = np.arange(start, start + chunk, dtype=np.int64)
        states = ((ks[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        e = states @ lin
        if w.size:
            e += (states[:, ii] * states[:, jj]) @ w
        emin = float(e.min())
        if emin < best:
            best = emin
            keep_old = [v <= best + tol for v in vals]
            keys = [k[m] for k, m in zip(keys, keep_old)]
            vals = [v[m] for v, m in zip(vals, keep_old)]
        mask = e <= best + tol
        if mask.any():
            keys.append(ks[mask])
            vals.append(e[mask])
    return best, np.concatenate(keys)


def anneal(x, field, indptr, indices, data, betas, uniforms):
    """Metropolis sweeps in place over every read at once.

    ``x`` is ``(reads, n)`` int8, ``field`` holds the matching local fields,
    ``uniforms`` is ``(sweeps, reads, n)``.  Variables are visited in index
    order; a flip is accepted when ``dE <= 0`` or ``u < exp(-beta * dE)``.
    """
    n = x.shape[1]
    for s in range(betas.shape[0]):
        beta = betas[s]
        u = uniforms[s]
        for i in range(n):
            sign = 1 - 2 * x[:, i].astype(np.float64)
            de = sign * field[:, i]
            accept = (de <= 0.0) | (u[:, i] < np.exp(-beta * np.maximum(de, 0.0)))
            if not accept.any():
                continue
            rows = np.flatnonzero(accept)
            x[rows, i] ^= 1
            lo, hi = indptr[i], indptr[i + 1]
            if hi > lo:
                nbrs = indices[lo:hi]
                field[np.ix_(rows, nbrs)] += sign[rows, None] * data[None, lo:hi]


def steepest_descent(x, field, indptr, indices, data):
    """Greedy single-flip descent in place; returns flips made per read.

    Each step flips the variable with the most negative ``dE``, lowest index
    on ties, until no flip lowers the energy.
    """
    reads = x.shape[0]
    flips = np.zeros(reads, dtype=np.int64)
    active = np.arange(reads)
    while active.size:
        de = (1 - 2 * x[active].astype(np.float64)) * field[active]
        j = np.argmin(de, axis=1)
        best = de[np.arange(active.size), j]
        improving = best < 0.0
        active, j = active[improving], j[improving]
        for r, i in zip(active.tolist(), j.tolist()):
            sign = 1.0 - 2.0 * x[r, i]
            x[r, i] ^= 1
            lo, hi = indptr[i], indptr[i + 1]
            field[r, indices[lo:hi]] += sign * data[lo:hi]
        flips[active] += 1
    return flips


def tarjan_scc(indptr, indices):
    """Iterative Tarjan; components are numbered in completion order (sinks first)."""
    num_nodes = indptr.shape[0] - 1
    indptr = indptr.tolist()
    indices = indices.tolist()
    index = [-1] * num_nodes
    low = [0] * num_nodes
    on_stack = [False] * num_nodes
    comp = [-1] * num_nodes
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(num_nodes):
        if index[root] != -1:
            continue
        work = [(root, indptr[root])]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, ptr = work[-1]
            if ptr < indptr[v + 1]:
                work[-1] = (v, ptr + 1)
                w = indices[ptr]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, indptr[w]))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return np.asarray(comp, dtype=np.int64)


def unique_backbone(true_nodes, indptr, indices, rindptr, rindices):
    """True iff every false literal implies its complement.

    ``true_nodes[v]`` is the literal node made true by the witness.  A false
    literal ``f`` that reaches a literal already shown to imply its own
    complement inherits the property by contraposition, and every literal
    that reaches a proven one is proven too, so each success is propagated
    backwards once.
    """
    n = true_nodes.shape[0]
    indptr = indptr.tolist()
    indices = indices.tolist()
    rindptr = rindptr.tolist()
    rindices = rindices.tolist()
    proven = [False] * (2 * n)
    seen = [-1] * (2 * n)
    for v in range(n):
        target = int(true_nodes[v])
        f = target ^ 1
        if proven[f]:
            continue
        seen[f] = v
        queue = deque([f])
        ok = False
        while queue and not ok:
            a = queue.popleft()
            for p in range(indptr[a], indptr[a + 1]):
                b = indices[p]
                if b == target or proven[b]:
                    ok = True
                    break
                if seen[b] != v:
                    seen[b] = v
                    queue.append(b)
        if not ok:
            return False
        proven[f] = True
        back = [f]
        while back:
            a = back.pop()
            for p in range(rindptr[a], rindptr[a + 1]):
                b = rindices[p]
                if not proven[b]:
                    proven[b] = True
                    back.append(b)
    return True


def build_csr(num_nodes, src, dst):
    """Stable sort of the edge list by source node."""
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(src, minlength=num_nodes))
    return indptr, dst[order].astype(np.int32)
