"""Pure-Python fallback for the compiled peeling kernels.

Mirrors ``_peelcore`` operation for operation so both backends produce
bit-identical results from the same uniform stream.
"""

import numpy as np


def choose_slots(offsets, uniforms, n_slots):
    """Distinct slot indices per burst via Floyd's sampling (one uniform per edge)."""
    m = len(offsets) - 1
    out = np.empty(int(offsets[m]), dtype=np.int32)
    for b in range(m):
        pos = int(offsets[b])
        l = int(offsets[b + 1]) - pos
        for i in range(l):
            j = n_slots - l + i
            t = int(uniforms[pos + i] * (j + 1))
            if t > j:
                t = j
            if t in out[pos : pos + i]:
                out[pos + i] = j
            else:
                out[pos + i] = t
    return out


def peel(offsets, slots, n_slots, max_iters):
    """Synchronous-sweep peeling decoder; see ``_peelcore.peel``."""
    m = len(offsets) - 1
    deg = np.zeros(n_slots, dtype=np.int32)
    acc = np.zeros(n_slots, dtype=np.int64)
    decoded = np.zeros(m, dtype=np.uint8)

    np.add.at(deg, slots, 1)
    for b in range(m):
        for i in range(int(offsets[b]), int(offsets[b + 1])):
            acc[slots[i]] ^= b

    iters = 0
    while iters < max_iters:
        reveal = []
        for s in np.flatnonzero(deg == 1):
            b = int(acc[s])
            if not decoded[b]:
                decoded[b] = 1
                reveal.append(b)
        if not reveal:
            break
        for b in reveal:
            for i in range(int(offsets[b]), int(offsets[b + 1])):
                s = slots[i]
                deg[s] -= 1
                acc[s] ^= b
        iters += 1

    return decoded.view(np.bool_), iters
