"""Pure-Python backend for the sparse phase-space polynomial kernels.

Terms are stored in a dict mapping a packed exponent key (7 bits per
variable, so monomial products reduce to a single integer addition) to an
exact rational coefficient held as a normalized ``(numerator, denominator)``
pair with a positive denominator.  The compiled backend in ``_polycore``
implements the same functions with identical semantics.
"""

from math import gcd

BACKEND_NAME = "pure-python"

FIELD_BITS = 7
FIELD_MASK = (1 << FIELD_BITS) - 1
MAX_EXPONENT = FIELD_MASK


def pack(exps):
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} outside packed-field range")
        key |= e << (FIELD_BITS * i)
    return key


def unpack(key, nfields):
    return tuple((key >> (FIELD_BITS * i)) & FIELD_MASK for i in range(nfields))


def _norm(num, den):
    if num == 0:
        return (0, 1)
    if den < 0:
        num, den = -num, -den
    g = gcd(num, den)
    return (num // g, den // g) if g > 1 else (num, den)


def rat_add(a, b):
    an, ad = a
    bn, bd = b
    return _norm(an * bd + bn * ad, ad * bd)


def rat_mul(a, b):
    an, ad = a
    bn, bd = b
    return _norm(an * bn, ad * bd)


def add(A, B):
    out = dict(A)
    for k, c in B.items():
        prev = out.get(k)
        if prev is None:
            out[k] = c
        else:
            s = rat_add(prev, c)
            if s[0]:
                out[k] = s
            else:
                del out[k]
    return out


def scale(A, num, den):
    if num == 0:
        return {}
    c = _norm(num, den)
    return {k: rat_mul(v, c) for k, v in A.items()}


def mul(A, B):
    if len(A) > len(B):
        A, B = B, A
    out = {}
    for k1, c1 in A.items():
        n1, d1 = c1
        for k2, c2 in B.items():
            k = k1 + k2
            c = _norm(n1 * c2[0], d1 * c2[1])
            prev = out.get(k)
            if prev is None:
                out[k] = c
            else:
                s = rat_add(prev, c)
                if s[0]:
                    out[k] = s
                else:
                    del out[k]
    return out


def mul_mono(A, key, num, den):
    """Multiply by a single monomial ``(num/den) * x^key``."""
    if num == 0:
        return {}
    c = _norm(num, den)
    return {k + key: rat_mul(v, c) for k, v in A.items()}


def diff(A, shift):
    """Differentiate with respect to the variable whose field starts at ``shift``."""
    out = {}
    unit = 1 << shift
    for k, (n, d) in A.items():
        e = (k >> shift) & FIELD_MASK
        if e:
            out[k - unit] = _norm(n * e, d)
    return out


def integrate_unit(A, shift):
    """Integrate in the variable at ``shift`` from 0 (constant of integration 0)."""
    out = {}
    unit = 1 << shift
    for k, (n, d) in A.items():
        e = ((k >> shift) & FIELD_MASK) + 1
        if e > MAX_EXPONENT:
            raise OverflowError("integration exceeds packed-field range")
        out[k + unit] = _norm(n, d * e)
    return out
