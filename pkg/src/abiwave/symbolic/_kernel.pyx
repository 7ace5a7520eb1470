# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for sparse exact-integer polynomial arithmetic.

Same contract as ``_kernel_py`` (which holds the reference
implementation and the documentation): polynomials are dicts mapping
packed monomial keys (7 bits per variable, 18 variables, one Python
integer) to nonzero integer coefficients.  Arithmetic stays exact:
coefficients are Python integers throughout; only the loop structure
is compiled.
"""
from cpython.dict cimport PyDict_GetItem, PyDict_SetItem, PyDict_DelItem
from cpython.object cimport PyObject

from . import _kernel_py

NVARS = _kernel_py.NVARS
BITS = _kernel_py.BITS
MASK = _kernel_py.MASK
MAX_EXP = _kernel_py.MAX_EXP

pack = _kernel_py.pack
unpack = _kernel_py.unpack

cdef int _BITS = _kernel_py.BITS
cdef long _MASK = _kernel_py.MASK

# keys hold 18 x 7 = 126 bits; variables 0..8 sit in the low 63 bits
_LO_MASK_OBJ = (1 << 63) - 1


cdef inline long _degree_key(object key):
    cdef unsigned long long lo = key & _LO_MASK_OBJ
    cdef unsigned long long hi = key >> 63
    cdef long d = 0
    while lo:
        d += lo & 0x7F
        lo >>= 7
    while hi:
        d += hi & 0x7F
        hi >>= 7
    return d


def degree(dict terms):
    """Total degree (0 for the zero polynomial)."""
    cdef long best = 0, d
    cdef object key
    for key in terms:
        d = _degree_key(key)
        if d > best:
            best = d
    return best

_STAGE1 = _kernel_py._STAGE1
_STAGE2 = _kernel_py._STAGE2
_trinomial_rows = _kernel_py._trinomial_rows


cdef inline void _acc(dict out, object key, object val):
    cdef PyObject* hit = PyDict_GetItem(out, key)
    if hit is NULL:
        if val != 0:
            PyDict_SetItem(out, key, val)
        return
    cdef object nv = (<object>hit) + val
    if nv == 0:
        PyDict_DelItem(out, key)
    else:
        PyDict_SetItem(out, key, nv)


def add_into(dict acc, dict p, c):
    """acc += c * p, dropping cancelled terms."""
    if c == 0:
        return
    cdef object k, v
    for k, v in p.items():
        _acc(acc, k, c * v)


def mul(dict p, dict q):
    """Product of two polynomials (carry-guarded)."""
    cdef dict out = {}
    if not p or not q:
        return out
    if degree(p) + degree(q) > MAX_EXP:
        raise OverflowError("product degree exceeds packing capacity")
    cdef object k1, v1, k2, v2
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            _acc(out, k1 + k2, v1 * v2)
    return out


def mul_add_into(dict acc, c, dict p, dict q, dict r):
    """acc += c * p * q * r (tensor contraction core)."""
    if c == 0 or not p or not q or not r:
        return
    if degree(p) + degree(q) + degree(r) > MAX_EXP:
        raise OverflowError("product degree exceeds packing capacity")
    cdef object k1, v1, k2, v2, k3, v3, k12, v12
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            k12 = k1 + k2
            v12 = c * v1 * v2
            for k3, v3 in r.items():
                _acc(acc, k12 + k3, v12 * v3)


def stage1_substitute(dict p, s):
    """Eliminate X7..X9 and X16..X18 via the collinearity relations."""
    if degree(p) > MAX_EXP:
        raise OverflowError("degree exceeds packing capacity")
    cdef dict out = {}
    cdef long sign_pow, e
    cdef int src, dst
    cdef bint signed
    cdef long s_c = s
    cdef object key, v, nk, eo
    for key, v in p.items():
        sign_pow = 0
        nk = key
        for src, dst, signed in _STAGE1:
            e = (key >> (_BITS * src)) & _MASK
            if e:
                eo = e  # Python-int shifts: packed keys exceed 63 bits
                nk = nk - (eo << (_BITS * src)) + (eo << (_BITS * dst))
                if signed:
                    sign_pow += e
        if s_c < 0 and (sign_pow & 1):
            v = -v
        _acc(out, nk, v)
    return out


def stage2_rewrite(dict p):
    """Rewrite even powers of X3, X6, X12, X15 via the unit-sum relations."""
    if degree(p) > MAX_EXP:
        raise OverflowError("degree exceeds packing capacity")
    cdef dict cur = p, out
    cdef int var, pa, pb, sh
    cdef long e, m, r, j, l
    cdef object key, v, base, c, eo
    for var, pa, pb in _STAGE2:
        out = {}
        sh = _BITS * var
        for key, v in cur.items():
            e = (key >> sh) & _MASK
            if e < 2:
                _acc(out, key, v)
                continue
            m = e >> 1
            r = e & 1
            eo = e - r  # Python-int shifts: packed keys exceed 63 bits
            base = key - (eo << sh)
            for (j, l), c in _trinomial_rows(m).items():
                _acc(out, base + ((<object>(2 * j)) << (_BITS * pa))
                     + ((<object>(2 * l)) << (_BITS * pb)), c * v)
        cur = out
    return cur


def evaluate(dict p, values):
    """Evaluate at a float 18-vector."""
    cdef double[18] vals
    cdef int i
    vlist = list(values)
    for i in range(18):
        vals[i] = vlist[i]
    cdef double total = 0.0, t
    cdef object key, c, k
    cdef long e
    for key, c in p.items():
        t = <double> c
        k = key
        i = 0
        while k:
            e = k & _MASK
            if e == 1:
                t *= vals[i]
            elif e:
                t *= vals[i] ** e
            k = k >> _BITS
            i += 1
        total += t
    return total
