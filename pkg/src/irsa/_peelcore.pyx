# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled hot kernels: distinct-slot sampling and synchronous SIC peeling.

Both functions consume pre-drawn uniforms / flat edge arrays so that the
pure-Python fallback in ``_peelpure`` can reproduce them bit-exactly.
"""

import numpy as np


def choose_slots(long long[::1] offsets, double[::1] uniforms, int n_slots):
    """Distinct slot indices per burst via Floyd's sampling.

    Burst b occupies ``offsets[b+1] - offsets[b]`` slots; entry i of its block
    consumes ``uniforms[offsets[b] + i]``.  Exactly one uniform per edge.
    """
    cdef Py_ssize_t m = offsets.shape[0] - 1
    cdef Py_ssize_t total = offsets[m]
    out = np.empty(total, dtype=np.int32)
    cdef int[::1] ov = out
    cdef Py_ssize_t b, pos
    cdef int l, i, j, t, c
    cdef bint dup
    for b in range(m):
        pos = offsets[b]
        l = <int> (offsets[b + 1] - offsets[b])
        for i in range(l):
            j = n_slots - l + i
            t = <int> (uniforms[pos + i] * (j + 1))
            if t > j:
                t = j
            dup = False
            for c in range(i):
                if ov[pos + c] == t:
                    dup = True
                    break
            ov[pos + i] = j if dup else t
    return out


def peel(long long[::1] offsets, int[::1] slots, int n_slots, int max_iters):
    """Synchronous-sweep peeling decoder on a flat bipartite frame graph.

    Each sweep reveals every burst reachable through a slot that holds exactly
    one unresolved burst at the start of the sweep, then removes all edges of
    the revealed bursts.  Returns (decoded bool array, sweeps used).
    """
    cdef Py_ssize_t m = offsets.shape[0] - 1
    deg_arr = np.zeros(n_slots, dtype=np.int32)
    acc_arr = np.zeros(n_slots, dtype=np.int64)
    decoded_arr = np.zeros(m, dtype=np.uint8)
    reveal_arr = np.empty(m, dtype=np.int64)
    cdef int[::1] deg = deg_arr
    cdef long long[::1] acc = acc_arr
    cdef unsigned char[::1] decoded = decoded_arr
    cdef long long[::1] reveal = reveal_arr
    cdef Py_ssize_t b, i, n_reveal
    cdef int s
    cdef long long bb
    cdef int iters = 0

    for b in range(m):
        for i in range(offsets[b], offsets[b + 1]):
            s = slots[i]
            deg[s] += 1
            acc[s] ^= b

    while iters < max_iters:
        n_reveal = 0
        for s in range(n_slots):
            if deg[s] == 1:
                bb = acc[s]
                if not decoded[bb]:
                    decoded[bb] = 1
                    reveal[n_reveal] = bb
                    n_reveal += 1
        if n_reveal == 0:
            break
        for i in range(n_reveal):
            bb = reveal[i]
            for b in range(offsets[bb], offsets[bb + 1]):
                s = slots[b]
                deg[s] -= 1
                acc[s] ^= bb
        iters += 1

    return decoded_arr.view(np.bool_), iters
