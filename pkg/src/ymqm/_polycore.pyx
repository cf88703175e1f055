# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the sparse phase-space polynomial kernels.

Same data layout and semantics as ``_poly_py``: packed 7-bit exponent keys
(so a monomial product is one integer addition) and coefficients as
normalized (num, den) tuples.  Keys run as C integers; rational arithmetic
takes a C fast path while the operands fit in 30 bits (virtually always in
these recursions) and falls back to Python big integers otherwise.
"""

BACKEND_NAME = "compiled"

FIELD_BITS = 7
FIELD_MASK = (1 << FIELD_BITS) - 1
MAX_EXPONENT = FIELD_MASK

cdef int _FIELD_BITS = 7
cdef unsigned long long _FIELD_MASK = 127
cdef long long _LIM = 1 << 30


def pack(exps):
    cdef unsigned long long key = 0
    cdef int i = 0
    for e in exps:
        if e < 0 or e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} outside packed-field range")
        key |= (<unsigned long long> e) << (_FIELD_BITS * i)
        i += 1
    return key


def unpack(key, nfields):
    cdef unsigned long long k = key
    cdef int i
    return tuple((k >> (_FIELD_BITS * i)) & _FIELD_MASK for i in range(nfields))


cdef inline long long c_gcd(long long a, long long b) noexcept:
    cdef long long r
    if a < 0:
        a = -a
    while b:
        r = a % b
        a = b
        b = r
    return a


cdef object _py_gcd(object a, object b):
    while b:
        a, b = b, a % b
    return a


cdef tuple _norm_py(object num, object den):
    """Arbitrary-precision normalization (den may be negative or huge)."""
    if not num:
        return (0, 1)
    if den < 0:
        num = -num
        den = -den
    g = _py_gcd(num if num > 0 else -num, den)
    if g > 1:
        return (num // g, den // g)
    return (num, den)


cdef inline tuple _norm_c(long long num, long long den):
    # den > 0 guaranteed by callers on this path
    cdef long long g
    if num == 0:
        return (0, 1)
    g = c_gcd(num, den)
    if g > 1:
        return (num // g, den // g)
    return (num, den)


cdef inline bint _small(tuple c, long long* n, long long* d) except -1:
    """Unbox a coefficient into C integers when safely small."""
    cdef object on = c[0], od = c[1]
    cdef long long nn, dd
    try:
        nn = on
        dd = od
    except OverflowError:
        return 0
    if -_LIM < nn < _LIM and dd < _LIM:
        n[0] = nn
        d[0] = dd
        return 1
    return 0


cdef inline tuple _rat_mul(tuple a, tuple b):
    cdef long long an, ad, bn, bd
    if _small(a, &an, &ad) and _small(b, &bn, &bd):
        return _norm_c(an * bn, ad * bd)
    return _norm_py(a[0] * b[0], a[1] * b[1])


cdef inline tuple _rat_add(tuple a, tuple b):
    cdef long long an, ad, bn, bd
    if _small(a, &an, &ad) and _small(b, &bn, &bd):
        return _norm_c(an * bd + bn * ad, ad * bd)
    return _norm_py(a[0] * b[1] + b[0] * a[1], a[1] * b[1])


def rat_add(a, b):
    return _rat_add(a, b)


def rat_mul(a, b):
    return _rat_mul(a, b)


def add(dict A, dict B):
    cdef dict out = dict(A)
    cdef tuple s
    for k, c in B.items():
        prev = out.get(k)
        if prev is None:
            out[k] = c
        else:
            s = _rat_add(<tuple> prev, <tuple> c)
            if s[0]:
                out[k] = s
            else:
                del out[k]
    return out


def scale(dict A, num, den):
    if not num:
        return {}
    cdef tuple c = _norm_py(num, den)
    cdef dict out = {}
    for k, v in A.items():
        out[k] = _rat_mul(<tuple> v, c)
    return out


def mul(dict A, dict B):
    cdef dict out = {}
    cdef unsigned long long k1, k2, k
    cdef tuple c1, c2, c, s
    cdef long long an, ad, bn, bd
    cdef bint a_small
    if len(A) > len(B):
        A, B = B, A
    for k1obj, c1obj in A.items():
        k1 = <unsigned long long> k1obj
        c1 = <tuple> c1obj
        a_small = _small(c1, &an, &ad)
        for k2obj, c2obj in B.items():
            k2 = <unsigned long long> k2obj
            c2 = <tuple> c2obj
            k = k1 + k2
            if a_small and _small(c2, &bn, &bd):
                c = _norm_c(an * bn, ad * bd)
            else:
                c = _norm_py(c1[0] * c2[0], c1[1] * c2[1])
            prev = out.get(k)
            if prev is None:
                out[k] = c
            else:
                s = _rat_add(<tuple> prev, c)
                if s[0]:
                    out[k] = s
                else:
                    del out[k]
    return out


def mul_mono(dict A, key, num, den):
    if not num:
        return {}
    cdef tuple c = _norm_py(num, den)
    cdef unsigned long long dk = <unsigned long long> key
    cdef unsigned long long k
    cdef dict out = {}
    for kobj, vobj in A.items():
        k = <unsigned long long> kobj
        out[k + dk] = _rat_mul(<tuple> vobj, c)
    return out


def diff(dict A, int shift):
    cdef dict out = {}
    cdef unsigned long long k, unit = (<unsigned long long> 1) << shift
    cdef unsigned long long e
    cdef tuple v
    cdef long long n, d
    for kobj, vobj in A.items():
        k = <unsigned long long> kobj
        e = (k >> shift) & _FIELD_MASK
        if e:
            v = <tuple> vobj
            if _small(v, &n, &d):
                out[k - unit] = _norm_c(n * (<long long> e), d)
            else:
                out[k - unit] = _norm_py(v[0] * e, v[1])
    return out


def integrate_unit(dict A, int shift):
    cdef dict out = {}
    cdef unsigned long long k, unit = (<unsigned long long> 1) << shift
    cdef unsigned long long e
    cdef tuple v
    cdef long long n, d
    for kobj, vobj in A.items():
        k = <unsigned long long> kobj
        e = ((k >> shift) & _FIELD_MASK) + 1
        if e > _FIELD_MASK:
            raise OverflowError("integration exceeds packed-field range")
        v = <tuple> vobj
        if _small(v, &n, &d):
            out[k + unit] = _norm_c(n, d * (<long long> e))
        else:
            out[k + unit] = _norm_py(v[0], v[1] * e)
    return out
