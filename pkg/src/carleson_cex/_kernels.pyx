# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Function-for-function twin of :mod:`carleson_cex._kernels_py`; see that
module for the meaning of the arguments.  All loops run without the GIL so
that thread pools scale.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, expm1, sin, cos, fabs, M_PI, isinf
from libc.stdlib cimport malloc, calloc, free

cnp.import_array()

BACKEND = "cython"

DEF SERIES_TERMS = 28
DEF TINY_ELL = 1e-17


cdef inline double _series(double x, double delta) noexcept nogil:
    # E(x) - E(x (1 + delta)),  E(y) = (1 - exp(-y)) / y, for x <= 1
    cdef double total = 0.0, xk = 1.0, powm1 = 0.0, fact = 1.0, sign = 1.0, term
    cdef int k
    for k in range(1, SERIES_TERMS + 1):
        xk *= x
        powm1 = powm1 * (1.0 + delta) + delta
        fact *= k + 1
        term = xk * powm1 / fact
        total += sign * term
        sign = -sign
        if term < 1e-18 * total:
            break
    return total


cdef inline double _g_small(double x, double emx) noexcept nogil:
    # G(x) = (1 - exp(-x) (1 + x)) / x^2 = sum_k (-x)^k / (k! (k + 2))
    cdef double total = 0.5, term = 1.0, piece
    cdef int k
    if x >= 0.01:
        return (1.0 - emx * (1.0 + x)) / (x * x)
    for k in range(1, 12):
        term *= -x / k
        piece = term / (k + 2)
        total += piece
        if fabs(piece) < 1e-18 * total:
            break
    return total


cdef inline double _radial(double u, double ell, double h2, double emx) noexcept nogil:
    # emx = exp(-u * ell) (precomputed by the caller), h2 = -expm1(-2 ell)
    cdef double x
    if isinf(ell):
        return 4.0 * M_PI / u / (u + 2.0)
    x = u * ell
    if x > 1.0:
        return 2.0 * M_PI * (2.0 - emx * (2.0 + u * h2)) / u / (u + 2.0)
    if ell < TINY_ELL:
        # first order in 2 ell, exact to rounding since ell < 1e-17:
        # 2 pi int_0^ell exp(-u t) 2t dt = 4 pi ell^2 G(x)
        return 4.0 * M_PI * ell * ell * _g_small(x, emx)
    return 2.0 * M_PI * ell * _series(x, 2.0 / u)


cdef inline double _sinpi(double y) noexcept nogil:
    # sin(pi y); odd Taylor polynomial for |y| < 1/32 (relative remainder < 1e-17)
    cdef double z, z2
    if fabs(y) >= 0.03125:
        return sin(M_PI * y)
    z = M_PI * y
    z2 = z * z
    return z * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0))))


cdef inline double _sin_pi_diff(double a1, double b1, double a2, double b2) noexcept nogil:
    # sin(pi ((a1 + b1) - (a2 + b2))) for dyadic a, b in [0, 2); the argument is
    # carried as an unevaluated sum (error-free two-sum) so that values close
    # to an integer keep full relative accuracy
    cdef double s1, e1, s2, e2, s, e3, bb, es
    s1 = a1 - a2
    bb = s1 - a1
    e1 = (a1 - (s1 - bb)) + (-a2 - bb)
    s2 = b1 - b2
    bb = s2 - b1
    e2 = (b1 - (s2 - bb)) + (-b2 - bb)
    s = s1 + s2
    bb = s - s1
    e3 = (s1 - (s - bb)) + (s2 - bb)
    es = e1 + e2 + e3
    while s > 1.0:
        s -= 2.0
    while s < -1.0:
        s += 2.0
    if s > 0.5:
        return _sinpi(((1.0 - s) - es))
    if s < -0.5:
        return -_sinpi(((1.0 + s) + es))
    return _sinpi(s + es)


def radial_factor_vec(u, double ell):
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = uu.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double h2 = 0.0
    if not isinf(ell):
        h2 = -expm1(-2.0 * ell)
    with nogil:
        for i in range(n):
            if isinf(ell):
                o[i] = _radial(uu[i], ell, h2, 0.0)
            else:
                o[i] = _radial(uu[i], ell, h2, exp(-uu[i] * ell))
    return out


cdef inline void _sincospi(double x, double *c, double *s) noexcept nogil:
    # cos and sin of pi x for a dyadic x in [0, 2), exact at multiples of 1/2
    if x == 0.0:
        c[0] = 1.0
        s[0] = 0.0
    elif x == 1.0:
        c[0] = -1.0
        s[0] = 0.0
    elif x == 0.5:
        c[0] = 0.0
        s[0] = 1.0
    elif x == 1.5:
        c[0] = 0.0
        s[0] = -1.0
    else:
        c[0] = cos(M_PI * x)
        s[0] = sin(M_PI * x)


# below this value of |n - n'| |I| the sine is evaluated from the exact
# argument; above it the angle-difference formula loses at most
# 2 eps / (pi |d| |I|) relative to the |I| scale of the entries
DEF EXACT_SINE_BELOW = 0.015625


def accumulate_pairs(cnp.int64_t[::1] coord, double complex[::1] coef,
                     double[::1] hi_pow, double[::1] lo_val,
                     double[::1] frac_hi, double[::1] frac_lo,
                     cnp.int64_t[::1] group, cnp.int64_t[::1] blk_start,
                     cnp.int64_t[::1] pair_b1, cnp.int64_t[::1] pair_b2,
                     cnp.uint8_t[::1] row_keep, double length, double ell,
                     double complex[:, ::1] phases,
                     double complex[:, ::1] out_free,
                     double complex[:, :, ::1] out_arcs):
    cdef Py_ssize_t K = coord.shape[0]
    cdef Py_ssize_t P = pair_b1.shape[0]
    cdef Py_ssize_t A = phases.shape[1]
    cdef Py_ssize_t N = out_free.shape[0]
    cdef Py_ssize_t ip, t, s, s1, e1, s2, e2, a, start2, ntouch = 0, it
    cdef cnp.int64_t b1, b2, p, q, g1, g2, cur1 = -1, cur2 = -1
    cdef double u, d, sv, w, R, h2 = 0.0, e2l = 0.0, ct, st, cth, sth, ctl, stl
    cdef double complex val
    cdef double complex *dst
    cdef bint inf_ell = isinf(ell)
    cdef bint same_block
    cdef double *expn = <double *> malloc(max(K, 1) * sizeof(double))
    cdef double *cosv = <double *> malloc(max(K, 1) * sizeof(double))
    cdef double *sinv = <double *> malloc(max(K, 1) * sizeof(double))
    cdef double complex *prod = <double complex *> malloc(max(A, 1) * sizeof(double complex))
    cdef double complex *tile = <double complex *> calloc(max(N * N, 1), sizeof(double complex))
    cdef Py_ssize_t *touched = <Py_ssize_t *> malloc(max(N * N, 1) * sizeof(Py_ssize_t))
    cdef unsigned char *mark = <unsigned char *> calloc(max(N * N, 1), sizeof(unsigned char))
    if (expn == NULL or cosv == NULL or sinv == NULL or prod == NULL or tile == NULL
            or touched == NULL or mark == NULL):
        free(expn); free(cosv); free(sinv); free(prod); free(tile); free(touched); free(mark)
        raise MemoryError()
    try:
        with nogil:
            if not inf_ell:
                h2 = -expm1(-2.0 * ell)
                e2l = exp(-2.0 * ell)
                for t in range(K):
                    expn[t] = exp(-(hi_pow[t] + lo_val[t]) * ell)
            for t in range(K):
                _sincospi(frac_hi[t], &cth, &sth)
                _sincospi(frac_lo[t], &ctl, &stl)
                cosv[t] = cth * ctl - sth * stl
                sinv[t] = sth * ctl + cth * stl
            for ip in range(P + 1):
                if ip < P:
                    b1 = pair_b1[ip]
                    b2 = pair_b2[ip]
                    s1 = blk_start[b1]
                    e1 = blk_start[b1 + 1]
                    s2 = blk_start[b2]
                    e2 = blk_start[b2 + 1]
                    if e1 == s1 or e2 == s2:
                        continue
                    # the phase group is constant on a block
                    g1 = group[s1]
                    g2 = group[s2]
                # flush the tile of the previous group pair
                if ntouch > 0 and (ip == P or g1 != cur1 or g2 != cur2):
                    for a in range(A):
                        prod[a] = phases[cur1, a] * phases[cur2, a].conjugate()
                    for it in range(ntouch):
                        p = touched[it] // N
                        q = touched[it] - p * N
                        val = tile[touched[it]]
                        tile[touched[it]] = 0.0
                        mark[touched[it]] = 0
                        dst = &out_arcs[p, q, 0]
                        for a in range(A):
                            dst[a] = dst[a] + val * prod[a]
                    ntouch = 0
                if ip == P:
                    break
                cur1 = g1
                cur2 = g2
                same_block = b1 == b2
                for t in range(s1, e1):
                    start2 = t if same_block else s2
                    ct = cosv[t]
                    st = sinv[t]
                    for s in range(start2, e2):
                        if same_block and s != t and row_keep[s] == 0:
                            continue
                        if same_block:
                            d = lo_val[t] - lo_val[s]
                        else:
                            d = (hi_pow[t] - hi_pow[s]) + (lo_val[t] - lo_val[s])
                        if d == 0.0:
                            w = length
                        else:
                            if fabs(d) * length < EXACT_SINE_BELOW:
                                sv = _sin_pi_diff(frac_hi[t], frac_lo[t], frac_hi[s], frac_lo[s])
                            else:
                                sv = st * cosv[s] - ct * sinv[s]
                            if sv == 0.0:
                                continue
                            w = sv / (M_PI * d)
                        u = hi_pow[t] + lo_val[t] + hi_pow[s] + lo_val[s] + 2.0
                        if inf_ell:
                            R = _radial(u, ell, h2, 0.0)
                        else:
                            R = _radial(u, ell, h2, expn[t] * expn[s] * e2l)
                        val = coef[t] * coef[s].conjugate() * (R * w)
                        if s == t:
                            val = 0.5 * val
                        p = coord[t]
                        q = coord[s]
                        if g1 == g2:
                            out_free[p, q] = out_free[p, q] + val
                        else:
                            it = p * N + q
                            if mark[it] == 0:
                                mark[it] = 1
                                touched[ntouch] = it
                                ntouch += 1
                            tile[it] = tile[it] + val
    finally:
        free(expn); free(cosv); free(sinv); free(prod); free(tile); free(touched); free(mark)


def bucket_pair_sum(double[::1] m_vals, double[::1] n_vals, double complex[::1] coefs,
                    cnp.int64_t[::1] starts):
    cdef Py_ssize_t B = starts.shape[0] - 1
    cdef Py_ssize_t b, x, y, s, e
    cdef double total = 0.0, ss
    cdef double complex acc
    with nogil:
        for b in range(B):
            s = starts[b]
            e = starts[b + 1]
            for x in range(s, e):
                acc = 0.0
                for y in range(s, e):
                    ss = m_vals[x] + n_vals[y]
                    acc = acc + coefs[y].conjugate() * (M_PI / (ss + 1.0) / (ss + 2.0))
                total += (coefs[x] * acc).real
    return total
