"""Reference implementations of the hot loops, used when the extension is absent.

Enumeration is vectorised with numpy; annealing is a plain Python loop that
consumes the random stream exactly like the compiled kernel, so both
backends produce identical samples for a seed.
"""
from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_CHUNK = 1 << 14


def splitmix64(state: int) -> tuple[int, int]:
    """One step of splitmix64: returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _upper_pairs(indptr, indices, data):
    rows, cols, coefs = [], [], []
    for i in range(len(indptr) - 1):
        for k in range(indptr[i], indptr[i + 1]):
            j = int(indices[k])
            if i < j:
                rows.append(i)
                cols.append(j)
                coefs.append(int(data[k]))
    return (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
            np.array(coefs, dtype=np.int64))


def enumerate_level(nvars, offset, lin, indptr, indices, data, minimize, target):
    if nvars > 62:
        raise ValueError("too many variables for exhaustive enumeration")
    lin = np.asarray(lin, dtype=np.int64)
    rows, cols, coefs = _upper_pairs(indptr, indices, data)
    shifts = np.arange(nvars, dtype=np.int64)
    best = None if minimize else int(target)
    found: list[np.ndarray] = []
    total = 1 << nvars
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(np.int64)
        values = offset + bits @ lin
        if len(coefs):
            values = values + (bits[:, rows] * bits[:, cols]) @ coefs
        if minimize:
            low = int(values.min())
            if best is None or low < best:
                best = low
                found = []
            if low > best:
                continue
        hit = masks[values == best]
        if len(hit):
            found.append(hit)
    out = np.concatenate(found) if found else np.zeros(0, dtype=np.int64)
    return best, out


def anneal(lin, indptr, indices, data, betas, seed, reads, check=None):
    """Pure-Python twin of the compiled annealer.

    ``check(read, state, energy)`` is called after every accepted flip when
    given; tests use it to audit the incremental bookkeeping.
    """
    lin = [int(v) for v in lin]
    n = len(lin)
    nbrs = [
        [(int(indices[k]), int(data[k])) for k in range(indptr[i], indptr[i + 1])]
        for i in range(n)
    ]
    states = np.zeros((reads, n), dtype=np.uint8)
    energies = np.zeros(reads, dtype=np.int64)
    exp = math.exp
    for r in range(reads):
        rng = (int(seed) ^ r) & _MASK64
        x = []
        for _ in range(n):
            rng, z = splitmix64(rng)
            x.append(z >> 63)
        field = list(lin)
        energy = 0
        for i in range(n):
            if x[i]:
                energy += lin[i]
                for j, q in nbrs[i]:
                    field[j] += q
                    if j < i and x[j]:
                        energy += q
        for beta in betas:
            beta = float(beta)
            for i in range(n):
                d = field[i] if x[i] == 0 else -field[i]
                if d > 0:
                    rng, z = splitmix64(rng)
                    u = (z >> 11) * (1.0 / 9007199254740992.0)
                    if not (u < exp(-beta * d)):
                        continue
                energy += d
                step = 1 if x[i] == 0 else -1
                x[i] ^= 1
                for j, q in nbrs[i]:
                    field[j] += step * q
                if check is not None:
                    check(r, x, energy)
        states[r] = x
        energies[r] = energy
    return states, energies
