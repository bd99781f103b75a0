# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp
from libc.stdint cimport int8_t, int32_t, int64_t

cnp.import_array()

BACKEND = "cython"


def brute_force(double[::1] lin, int64_t[::1] indptr, int32_t[::1] indices,
                double[::1] data, double tol):
    """Gray-code enumeration with O(deg) energy updates per step."""
    cdef Py_ssize_t n = lin.shape[0]
    cdef int64_t total = (<int64_t>1) << n
    cdef double[::1] field = np.array(lin, dtype=np.float64)
    cdef int8_t[::1] x = np.zeros(n, dtype=np.int8)
    cdef int64_t k, gray = 0, p, count = 0, cap = 1024
    cdef Py_ssize_t b, v
    cdef double energy = 0.0, best = 0.0, sign
    cdef cnp.ndarray keys_arr = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray vals_arr = np.empty(cap, dtype=np.float64)
    cdef int64_t[::1] keys = keys_arr
    cdef double[::1] vals = vals_arr
    cdef int64_t i, kept

    keys[0] = 0
    vals[0] = 0.0
    count = 1
    for k in range(1, total):
        b = 0
        while not ((k >> b) & 1):
            b += 1
        gray ^= (<int64_t>1) << b
        v = n - 1 - b
        sign = 1.0 - 2.0 * x[v]
        energy += sign * field[v]
        x[v] ^= 1
        for p in range(indptr[v], indptr[v + 1]):
            field[indices[p]] += sign * data[p]
        if energy < best - tol:
            best = energy
            kept = 0
            for i in range(count):
                if vals[i] <= best + tol:
                    keys[kept] = keys[i]
                    vals[kept] = vals[i]
                    kept += 1
            count = kept
        if energy <= best + tol:
            if count == cap:
                cap *= 2
                keys_arr = np.resize(keys_arr, cap)
                vals_arr = np.resize(vals_arr, cap)
                keys = keys_arr
                vals = vals_arr
            keys[count] = gray
            vals[count] = energy
            count += 1
    return float(best), np.asarray(keys_arr[:count]).copy()


def anneal(int8_t[:, ::1] x, double[:, ::1] field, int64_t[::1] indptr,
           int32_t[::1] indices, double[::1] data, double[::1] betas,
           double[:, :, ::1] uniforms):
    cdef Py_ssize_t reads = x.shape[0], n = x.shape[1], sweeps = betas.shape[0]
    cdef Py_ssize_t r, s, i
    cdef int64_t p
    cdef double beta, de, sign, u
    with nogil:
        for r in range(reads):
            for s in range(sweeps):
                beta = betas[s]
                for i in range(n):
                    sign = 1.0 - 2.0 * x[r, i]
                    de = sign * field[r, i]
                    if de > 0.0:
                        u = uniforms[s, r, i]
                        # exp(-40) is below the smallest nonzero uniform (2**-53),
                        # so skipping exp there cannot change the decision
                        if beta * de > 40.0 and u > 0.0:
                            continue
                        if not u < exp(-beta * de):
                            continue
                    x[r, i] ^= 1
                    for p in range(indptr[i], indptr[i + 1]):
                        field[r, indices[p]] += sign * data[p]


def steepest_descent(int8_t[:, ::1] x, double[:, ::1] field, int64_t[::1] indptr,
                     int32_t[::1] indices, double[::1] data):
    cdef Py_ssize_t reads = x.shape[0], n = x.shape[1]
    cdef Py_ssize_t r, i, j
    cdef int64_t p
    cdef double de, best, sign
    cdef cnp.ndarray flips_arr = np.zeros(reads, dtype=np.int64)
    cdef int64_t[::1] flips = flips_arr
    with nogil:
        for r in range(reads):
            while True:
                best = 0.0
                j = -1
                for i in range(n):
                    de = (1.0 - 2.0 * x[r, i]) * field[r, i]
                    if de < best:
                        best = de
                        j = i
                if j < 0:
                    break
                sign = 1.0 - 2.0 * x[r, j]
                x[r, j] ^= 1
                for p in range(indptr[j], indptr[j + 1]):
                    field[r, indices[p]] += sign * data[p]
                flips[r] += 1
    return flips_arr


def tarjan_scc(int64_t[::1] indptr, int32_t[::1] indices):
    cdef Py_ssize_t num_nodes = indptr.shape[0] - 1
    cdef cnp.ndarray comp_arr = np.full(num_nodes, -1, dtype=np.int64)
    cdef int64_t[::1] comp = comp_arr
    cdef int64_t[::1] index = np.full(num_nodes, -1, dtype=np.int64)
    cdef int64_t[::1] low = np.zeros(num_nodes, dtype=np.int64)
    cdef int8_t[::1] on_stack = np.zeros(num_nodes, dtype=np.int8)
    cdef int64_t[::1] stack = np.empty(num_nodes, dtype=np.int64)
    cdef int64_t[::1] work_node = np.empty(num_nodes, dtype=np.int64)
    cdef int64_t[::1] work_ptr = np.empty(num_nodes, dtype=np.int64)
    cdef Py_ssize_t sp = 0, wp = 0
    cdef int64_t counter = 0, ncomp = 0, root, v, w, ptr, parent
    for root in range(num_nodes):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = 1
        work_node[0] = root
        work_ptr[0] = indptr[root]
        wp = 1
        while wp > 0:
            v = work_node[wp - 1]
            ptr = work_ptr[wp - 1]
            if ptr < indptr[v + 1]:
                work_ptr[wp - 1] = ptr + 1
                w = indices[ptr]
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = 1
                    work_node[wp] = w
                    work_ptr[wp] = indptr[w]
                    wp += 1
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            wp -= 1
            if wp > 0:
                parent = work_node[wp - 1]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    sp -= 1
                    w = stack[sp]
                    on_stack[w] = 0
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp_arr


def unique_backbone(int64_t[::1] true_nodes, int64_t[::1] indptr, int32_t[::1] indices,
                    int64_t[::1] rindptr, int32_t[::1] rindices):
    cdef Py_ssize_t n = true_nodes.shape[0]
    cdef int8_t[::1] proven = np.zeros(2 * n, dtype=np.int8)
    cdef int64_t[::1] seen = np.full(2 * n, -1, dtype=np.int64)
    cdef int64_t[::1] queue = np.empty(2 * n, dtype=np.int64)
    cdef Py_ssize_t head, tail, v
    cdef int64_t target, f, a, b, p
    cdef bint ok
    for v in range(n):
        target = true_nodes[v]
        f = target ^ 1
        if proven[f]:
            continue
        seen[f] = v
        queue[0] = f
        head = 0
        tail = 1
        ok = False
        while head < tail and not ok:
            a = queue[head]
            head += 1
            for p in range(indptr[a], indptr[a + 1]):
                b = indices[p]
                if b == target or proven[b]:
                    ok = True
                    break
                if seen[b] != v:
                    seen[b] = v
                    queue[tail] = b
                    tail += 1
        if not ok:
            return False
        # reverse closure of f, used as a LIFO stack
        proven[f] = 1
        queue[0] = f
        tail = 1
        while tail > 0:
            tail -= 1
            a = queue[tail]
            for p in range(rindptr[a], rindptr[a + 1]):
                b = rindices[p]
                if not proven[b]:
                    proven[b] = 1
                    queue[tail] = b
                    tail += 1
    return True


def build_csr(Py_ssize_t num_nodes, int64_t[::1] src, int64_t[::1] dst):
    """Stable counting sort of the edge list by source node."""
    cdef Py_ssize_t m = src.shape[0], e
    cdef cnp.ndarray indptr_arr = np.zeros(num_nodes + 1, dtype=np.int64)
    cdef cnp.ndarray out_arr = np.empty(m, dtype=np.int32)
    cdef int64_t[::1] indptr = indptr_arr
    cdef int32_t[::1] out = out_arr
    cdef int64_t[::1] fill = np.empty(num_nodes, dtype=np.int64)
    cdef Py_ssize_t v
    for e in range(m):
        indptr[src[e] + 1] += 1
    for v in range(num_nodes):
        indptr[v + 1] += indptr[v]
        fill[v] = indptr[v]
    for e in range(m):
        out[fill[src[e]]] = <int32_t>dst[e]
        fill[src[e]] += 1
    return indptr_arr, out_arr
