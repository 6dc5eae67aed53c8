# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Gray-code enumeration and single-flip annealing.

Both functions take the polynomial in CSR form (symmetric adjacency, each
coupling stored twice) with int64 coefficients; see ``_backend.compile_poly``.
``_pykernels`` holds the reference implementation that these must match
bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp
from libc.stdint cimport int64_t, uint64_t, uint8_t

cnp.import_array()


cdef inline uint64_t _splitmix(uint64_t* state) nogil:
    cdef uint64_t z
    state[0] += <uint64_t>0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def enumerate_level(int nvars, int64_t offset,
                    const int64_t[::1] lin,
                    const int64_t[::1] indptr,
                    const int64_t[::1] indices,
                    const int64_t[::1] data,
                    bint minimize, int64_t target):
    """Walk all 2**nvars points in Gray-code order.

    With ``minimize`` returns ``(min, masks of all argmins)``; otherwise
    ``(target, masks with value == target)``.  Bit ``i`` of a mask is
    variable ``i``.
    """
    if nvars > 62:
        raise ValueError("too many variables for exhaustive enumeration")
    cdef uint8_t[::1] x = np.zeros(nvars, dtype=np.uint8)
    cdef int64_t value = offset
    cdef int64_t best = offset if minimize else target
    cdef uint64_t mask = 0
    cdef uint64_t g, total = (<uint64_t>1) << nvars
    cdef int b
    cdef int64_t k, field
    cdef Py_ssize_t count = 0, cap = 1024
    cdef int64_t[::1] out = np.empty(cap, dtype=np.int64)

    if value == best:
        out[0] = 0
        count = 1
    g = 1
    while g < total:
        b = 0
        while not ((g >> b) & 1):
            b += 1
        field = lin[b]
        for k in range(indptr[b], indptr[b + 1]):
            if x[indices[k]]:
                field += data[k]
        if x[b]:
            value -= field
            x[b] = 0
        else:
            value += field
            x[b] = 1
        mask ^= (<uint64_t>1) << b
        if minimize and value < best:
            best = value
            count = 0
        if value == best:
            if count == cap:
                cap *= 2
                grown = np.empty(cap, dtype=np.int64)
                grown[:count] = out[:count]
                out = grown
            out[count] = <int64_t>mask
            count += 1
        g += 1
    return best, np.asarray(out[:count]).copy()


def anneal(const int64_t[::1] lin,
           const int64_t[::1] indptr,
           const int64_t[::1] indices,
           const int64_t[::1] data,
           const double[::1] betas,
           uint64_t seed, int reads):
    """Run ``reads`` Metropolis chains; read ``r`` is seeded with ``seed ^ r``.

    Returns ``(states[reads, n] uint8, energies[reads] int64)``; energies
    exclude the polynomial's constant offset.
    """
    cdef Py_ssize_t n = lin.shape[0]
    cdef Py_ssize_t sweeps = betas.shape[0]
    states_arr = np.zeros((reads, n), dtype=np.uint8)
    energies_arr = np.zeros(reads, dtype=np.int64)
    cdef uint8_t[:, ::1] states = states_arr
    cdef int64_t[::1] energies = energies_arr
    cdef int64_t[::1] field = np.zeros(n, dtype=np.int64)
    cdef uint8_t[::1] x
    cdef uint64_t rng
    cdef Py_ssize_t r, s, i, k
    cdef int64_t energy, d, step
    cdef double beta, u

    for r in range(reads):
        rng = seed ^ <uint64_t>r
        x = states[r]
        for i in range(n):
            x[i] = <uint8_t>(_splitmix(&rng) >> 63)
        energy = 0
        for i in range(n):
            field[i] = lin[i]
        for i in range(n):
            if x[i]:
                energy += lin[i]
                for k in range(indptr[i], indptr[i + 1]):
                    field[indices[k]] += data[k]
                    if indices[k] < i and x[indices[k]]:
                        energy += data[k]
        for s in range(sweeps):
            beta = betas[s]
            for i in range(n):
                d = field[i] if x[i] == 0 else -field[i]
                if d > 0:
                    u = (_splitmix(&rng) >> 11) * (1.0 / 9007199254740992.0)
                    if not (u < exp(-beta * d)):
                        continue
                energy += d
                if x[i]:
                    x[i] = 0
                    step = -1
                else:
                    x[i] = 1
                    step = 1
                for k in range(indptr[i], indptr[i + 1]):
                    field[indices[k]] += step * data[k]
        energies[r] = energy
    return states_arr, energies_arr
