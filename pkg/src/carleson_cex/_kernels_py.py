"""Pure-Python (numpy) implementation of the hot kernels.

This module mirrors the compiled extension ``_kernels`` function by function
and is selected automatically when the extension is unavailable, or on
request through the ``CARLESON_CEX_PURE`` environment variable.

Pair accumulation
-----------------
Terms are Taylor coefficients ``c_t w^(n_t)`` with a single coordinate
``p_t`` and an index of the form ``n_t = hi_t + lo_t`` where ``hi_t`` is a
power of two shared by a whole *block* and ``lo_t`` is zero or a smaller
power of two.  For a Carleson square of side ``|I|`` the pair kernel is real:

    K(t, t') = R(n_t + n_t' + 2) * |I| * sinc((n_t - n_t') |I|)

and every pair contributes ``c_t conj(c_t') K(t, t') * z_g conj(z_g')`` to
entry ``(p_t, p_t')`` of the matrix, where ``z_g`` is a per-group phase.  Pairs
whose two groups coincide do not depend on the phase table and are added to
a single shared matrix; the rest are added once per arc column.
"""
from __future__ import annotations

import math

import numpy as np

from .disk import radial_factor_array

BACKEND = "python"


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def sin_pi_diff(a1, b1, a2, b2):
    """``sin(pi ((a1 + b1) - (a2 + b2)))`` for dyadic ``a, b`` in ``[0, 2)``.

    The argument is carried as an unevaluated sum of doubles (error-free
    two-sum), so arguments within a few ulps of an integer keep full relative
    accuracy.  A naive ``mod(x, 2)`` would round ``-2^-128`` to ``2``.
    """
    s1, e1 = _two_sum(a1, -a2)
    s2, e2 = _two_sum(b1, -b2)
    s, e3 = _two_sum(s1, s2)
    es = e1 + e2 + e3
    s = np.where(s > 1.0, s - 2.0, s)
    s = np.where(s > 1.0, s - 2.0, s)
    s = np.where(s < -1.0, s + 2.0, s)
    s = np.where(s < -1.0, s + 2.0, s)
    return np.where(s > 0.5, np.sin(np.pi * ((1.0 - s) - es)),
                    np.where(s < -0.5, -np.sin(np.pi * ((1.0 + s) + es)),
                             np.sin(np.pi * (s + es))))


def _pair_values(n1, n2, lo1, lo2, hp1, hp2, fh1, fl1, fh2, fl2, c1, c2, length, ell):
    u = (n1[:, None] + n2[None, :]) + 2.0
    R = radial_factor_array(u.ravel(), ell).reshape(u.shape)
    if hp1 == hp2:
        d = lo1[:, None] - lo2[None, :]
    else:
        d = (hp1 - hp2) + (lo1[:, None] - lo2[None, :])
    sv = sin_pi_diff(fh1[:, None], fl1[:, None], fh2[None, :], fl2[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        sinc = sv / (np.pi * d * length)
    sinc = np.where(d == 0.0, 1.0, sinc)
    return (c1[:, None] * np.conj(c2)[None, :]) * (R * length * sinc)


def accumulate_pairs(coord, coef, hi_pow, lo_val, frac_hi, frac_lo, group, blk_start,
                     pair_b1, pair_b2, row_keep, length, ell, phases,
                     out_free, out_arcs):
    """Accumulate one-sided kept pair sums into ``out_free`` and ``out_arcs``.

    Each kept pair ``(t, s)`` with ``t <= s`` adds its value to entry
    ``(p_t, p_s)`` only; diagonal pairs add half their value.  The Hermitian
    matrices are then ``X + X^H``.

    Parameters
    ----------
    coord : int64[K]
        Coordinate of each term.
    coef : complex128[K]
        Term coefficients.
    hi_pow, lo_val : float64[K]
        ``n_t = hi_pow[t] + lo_val[t]``; ``hi_pow`` is constant on a block.
    frac_hi, frac_lo : float64[K]
        ``hi_pow[t] |I|`` and ``lo_val[t] |I|`` reduced modulo 2 (exact
        dyadic numbers); their sum is ``n_t |I|`` modulo 2.
    group : int64[K]
        Row of ``phases`` that multiplies the term; constant on a block.
    blk_start : int64[B + 1]
        Block boundaries; within a block ``lo_val`` is increasing.
    pair_b1, pair_b2 : int64[P]
        Kept block pairs with ``pair_b1 <= pair_b2``.
    row_keep : uint8[K]
        For pairs inside one block, the pair ``(s, t)`` with ``s < t`` is kept
        iff ``row_keep[t]``; diagonal pairs are always kept.
    length, ell : float
        ``|I|`` and ``-log(1 - |I|)`` (``inf`` for the whole disk).
    phases : complex128[G, A]
        Phase table, one column per arc; row 0 must be identically one.
    out_free : complex128[N, N]
    out_arcs : complex128[N, N, A]
    """
    n_all = hi_pow + lo_val
    for b1, b2 in zip(np.asarray(pair_b1), np.asarray(pair_b2)):
        s1, e1 = int(blk_start[b1]), int(blk_start[b1 + 1])
        s2, e2 = int(blk_start[b2]), int(blk_start[b2 + 1])
        if e1 == s1 or e2 == s2:
            continue
        W = _pair_values(n_all[s1:e1], n_all[s2:e2], lo_val[s1:e1], lo_val[s2:e2],
                         hi_pow[s1], hi_pow[s2], frac_hi[s1:e1], frac_lo[s1:e1],
                         frac_hi[s2:e2], frac_lo[s2:e2],
                         coef[s1:e1], coef[s2:e2], length, ell)
        p1 = coord[s1:e1]
        p2 = coord[s2:e2]
        g1 = int(group[s1])
        g2 = int(group[s2])
        if b1 == b2:
            m = e1 - s1
            keep = np.triu(np.ones((m, m), dtype=bool), 1) & (row_keep[s1:e1].astype(bool)[None, :])
            W = np.where(keep, W, 0.0) + 0.5 * np.diag(np.diag(W))
        if g1 == g2:
            out_free[np.ix_(p1, p2)] += W
        else:
            prod = phases[g1] * np.conj(phases[g2])
            out_arcs[np.ix_(p1, p2)] += W[:, :, None] * prod[None, None, :]


def radial_factor_vec(u, ell):
    """Vectorised radial factor; see :func:`carleson_cex.disk.radial_factor`."""
    return radial_factor_array(np.asarray(u, dtype=float), float(ell))


def bucket_pair_sum(m_vals, n_vals, coefs, starts):
    """Pair sum ``sum_b sum_{x,y in b} c_x conj(c_y) pi / ((s+1)(s+2))``.

    ``s = m_x + n_y`` and ``b`` ranges over consecutive buckets delimited by
    ``starts``.  Used by the spectral embedding route.
    """
    total = 0.0
    for b in range(len(starts) - 1):
        s, e = int(starts[b]), int(starts[b + 1])
        if e == s:
            continue
        m = m_vals[s:e]
        n = n_vals[s:e]
        c = coefs[s:e]
        ss = m[:, None] + n[None, :]
        ker = math.pi / (ss + 1.0) / (ss + 2.0)
        total += float(np.real(c @ (ker @ np.conj(c))))
    return total
