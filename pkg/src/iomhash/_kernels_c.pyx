# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Must stay bit-identical to ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double INV53 = 1.1102230246251565e-16  # 2**-53

cdef Py_ssize_t _BLOCK = 1 << 22


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t _draw(uint64_t seed, uint64_t ctr) noexcept nogil:
    return _mix64(seed + (ctr + 1) * GOLDEN)


def mix64(z):
    cdef cnp.uint64_t[::1] src = np.ascontiguousarray(z, dtype=np.uint64).reshape(-1)
    out = np.empty(src.shape[0], dtype=np.uint64)
    cdef cnp.uint64_t[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _mix64(src[i])
    return out.reshape(np.shape(z))


def stream_u64(seeds, Py_ssize_t start, Py_ssize_t count):
    cdef cnp.uint64_t[::1] s = np.ascontiguousarray(seeds, dtype=np.uint64).reshape(-1)
    cdef Py_ssize_t n = s.shape[0]
    out = np.empty((n, count), dtype=np.uint64)
    cdef cnp.uint64_t[:, ::1] o = out
    cdef Py_ssize_t r, c
    with nogil:
        for r in range(n):
            for c in range(count):
                o[r, c] = _draw(s[r], <uint64_t>(start + c))
    return out


def uniform_pairs(seeds, Py_ssize_t npairs):
    cdef cnp.uint64_t[::1] s = np.ascontiguousarray(seeds, dtype=np.uint64).reshape(-1)
    cdef Py_ssize_t n = s.shape[0]
    u1 = np.empty((n, npairs), dtype=np.float64)
    u2 = np.empty((n, npairs), dtype=np.float64)
    cdef double[:, ::1] a = u1
    cdef double[:, ::1] b = u2
    cdef Py_ssize_t r, c
    cdef uint64_t seed
    with nogil:
        for r in range(n):
            seed = s[r]
            for c in range(npairs):
                a[r, c] = <double>((_draw(seed, <uint64_t>(2 * c)) >> 11) + 1) * INV53
                b[r, c] = <double>(_draw(seed, <uint64_t>(2 * c + 1)) >> 11) * INV53
    return u1, u2


def perm_prefix(seeds, Py_ssize_t d, Py_ssize_t k):
    cdef cnp.uint64_t[::1] s = np.ascontiguousarray(seeds, dtype=np.uint64).reshape(-1)
    cdef Py_ssize_t n = s.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    work = np.empty(d, dtype=np.int64)
    cdef cnp.int64_t[::1] perm = work
    cdef Py_ssize_t r, i, j, steps = min(k, d - 1)
    cdef uint64_t seed, ctr, x, bound, thr
    cdef int64_t held
    with nogil:
        for r in range(n):
            seed = s[r]
            ctr = 0
            for i in range(d):
                perm[i] = i
            for i in range(steps):
                bound = <uint64_t>(d - i)
                thr = (0 - bound) % bound
                x = _draw(seed, ctr)
                ctr += 1
                while x < thr:
                    x = _draw(seed, ctr)
                    ctr += 1
                j = i + <Py_ssize_t>(x % bound)
                held = perm[i]
                perm[i] = perm[j]
                perm[j] = held
            for i in range(k):
                o[r, i] = perm[i]
    return out


def hadamard_argmax(X, idx):
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.int64_t[:, :, ::1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t n = x.shape[0], m = ix.shape[0], p = ix.shape[1], k = ix.shape[2]
    out = np.empty((n, m), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    cdef Py_ssize_t r, i, j, l, best
    cdef double v, top
    with nogil:
        for r in range(n):
            for i in range(m):
                best = 0
                top = 0.0
                for j in range(k):
                    v = x[r, ix[i, 0, j]]
                    for l in range(1, p):
                        v = v * x[r, ix[i, l, j]]
                    if j == 0 or v > top:
                        top = v
                        best = j
                o[r, i] = best
    return out


def collision_counts(A, B):
    cdef cnp.int64_t[:, ::1] a = np.ascontiguousarray(A, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] b = np.ascontiguousarray(B, dtype=np.int64)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], m = a.shape[1]
    out = np.empty((na, nb), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    cdef Py_ssize_t r, c, i, hits
    with nogil:
        for r in range(na):
            for c in range(nb):
                hits = 0
                for i in range(m):
                    if a[r, i] == b[c, i]:
                        hits += 1
                o[r, c] = hits
    return out
