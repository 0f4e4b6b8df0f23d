# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan over blocks of sign assignments."""

cdef extern from *:
    int __builtin_parity(unsigned int) nogil


cdef inline int _witness(unsigned int x, const int[:, :, ::1] fibers) noexcept nogil:
    cdef Py_ssize_t b, f
    cdef int npp, nmm, sp, sq
    for b in range(fibers.shape[0]):
        npp = 0
        nmm = 0
        for f in range(fibers.shape[1]):
            sp = ((x >> fibers[b, f, 0]) & 1) ^ fibers[b, f, 1]
            sq = ((x >> fibers[b, f, 2]) & 1) ^ fibers[b, f, 3]
            if sp and sq:
                npp += 1
            elif not sp and not sq:
                nmm += 1
        if npp and nmm:
            return <int>b
    return -1


def scan_block(const unsigned int[::1] masks, const unsigned char[::1] rhs,
               const int[:, :, ::1] fibers, unsigned int fixed, int shift,
               unsigned long long count, Py_ssize_t limit):
    """Scan x = fixed | (h << shift) for h in range(count).

    Returns (n_hypothesis, n_failures, [(x, witness), ...]) where the list holds
    at most ``limit`` hypothesis-satisfying assignments in scan order and
    witness is -1 when no bundle has both a (+,+) and a (-,-) fiber.
    """
    cdef unsigned long long h
    cdef unsigned int x
    cdef Py_ssize_t c, nc = masks.shape[0]
    cdef long long n_sat = 0, n_fail = 0
    cdef int w
    cdef bint ok
    found = []
    for h in range(count):
        x = fixed | <unsigned int>(h << shift)
        ok = True
        for c in range(nc):
            if __builtin_parity(x & masks[c]) != rhs[c]:
                ok = False
                break
        if not ok:
            continue
        n_sat += 1
        w = _witness(x, fibers)
        if w < 0:
            n_fail += 1
        if len(found) < limit:
            found.append((x, w))
    return n_sat, n_fail, found
