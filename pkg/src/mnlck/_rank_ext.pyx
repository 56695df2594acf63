# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact rank kernel: dense int64 fraction-free echelon.

Same reduction as ``_rank_py.integer_rank`` but on a dense C array.  Every
multiply and subtract is overflow-checked; on overflow ``OverflowError`` is
raised and the caller falls back to the unbounded-integer path, so the
result is exact whenever this returns.
"""

cdef extern from *:
    """
    static inline int mnlck_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int mnlck_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int mnlck_mul_ovf(long long a, long long b, long long *r) nogil
    int mnlck_sub_ovf(long long a, long long b, long long *r) nogil


cdef inline long long _gcd(long long a, long long b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef int _normalize(long long[:, ::1] A, Py_ssize_t i, Py_ssize_t start, Py_ssize_t n) noexcept nogil:
    cdef long long g = 0
    cdef Py_ssize_t c
    for c in range(start, n):
        if A[i, c] != 0:
            g = _gcd(g, A[i, c])
            if g == 1:
                return 0
    if g > 1:
        for c in range(start, n):
            A[i, c] = A[i, c] // g
    return 0


cdef int _echelon(long long[:, ::1] A, Py_ssize_t* pivot_row, Py_ssize_t* rank) noexcept nogil:
    # returns 1 on overflow
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t i, c, lead, pr
    cdef long long a, b, g, fa, fb, x, y
    for i in range(m):
        lead = 0
        while True:
            while lead < n and A[i, lead] == 0:
                lead += 1
            if lead == n:
                break
            pr = pivot_row[lead]
            if pr < 0:
                _normalize(A, i, lead, n)
                pivot_row[lead] = i
                rank[0] += 1
                break
            a = A[pr, lead]
            b = A[i, lead]
            g = _gcd(a, b)
            fa = a // g
            fb = b // g
            for c in range(lead, n):
                if mnlck_mul_ovf(A[i, c], fa, &x):
                    return 1
                if mnlck_mul_ovf(A[pr, c], fb, &y):
                    return 1
                if mnlck_sub_ovf(x, y, &A[i, c]):
                    return 1
            _normalize(A, i, lead + 1, n)
            lead += 1
    return 0


def integer_rank_dense(long long[:, ::1] A):
    """Rank over Q of a dense int64 matrix; ``A`` is overwritten."""
    cdef Py_ssize_t n = A.shape[1]
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t k
    cdef int overflow
    if A.shape[0] == 0 or n == 0:
        return 0
    pivots = bytearray(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* pivot_row = <Py_ssize_t*> (<char*> pivots)
    for k in range(n):
        pivot_row[k] = -1
    with nogil:
        overflow = _echelon(A, pivot_row, &rank)
    if overflow:
        raise OverflowError("int64 overflow in exact elimination")
    return rank
