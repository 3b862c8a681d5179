"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test: integrals are evaluated by
Gauss-Legendre quadrature, sums over dyadic arcs by brute force and
eigenvalues through the characteristic polynomial.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def gl_nodes(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def square_quadrature(arc_left, arc_length, f, nr=200, nx=400):
    """``int_Q f(r, x) dA_1`` over a Carleson square by tensor Gauss-Legendre.

    ``f`` receives broadcast arrays ``r`` and ``x`` (``w = r e^{2 pi i x}``);
    ``dA_1 = (1 - r^2) 2 pi r dr dx``.  The whole disk is ``arc_length = 1``.
    """
    r, wr = gl_nodes(1.0 - arc_length, 1.0, nr)
    x, wx = gl_nodes(arc_left, arc_left + arc_length, nx)
    R, X = np.meshgrid(r, x, indexing="ij")
    vals = f(R, X) * (1.0 - R * R) * 2.0 * math.pi * R
    return np.einsum("i,j,ij->", wr, wx, vals)


def moment_quadrature(arc_left, arc_length, a, b, nr=220, nx=None):
    if nx is None:
        nx = max(64, int(4 * abs(a - b) * arc_length) + 64)

    def f(r, x):
        return r ** (a + b) * np.exp(2j * math.pi * (a - b) * x)

    return square_quadrature(arc_left, arc_length, f, nr=nr, nx=nx)


def faddeev_leverrier(A):
    """Coefficients ``c`` of ``det(t I - A) = sum_k c[k] t^(n-k)``."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    M = np.zeros_like(A)
    eye = np.eye(n)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * eye
        coeffs.append(-np.trace(A @ M) / k)
    return np.array(coeffs)


def largest_root_by_bisection(coeffs, hi):
    """Largest real root of a polynomial with real roots, all ``<= hi``."""
    c = np.real(coeffs)

    def p(t):
        return np.polyval(c, t)

    lo_ = -hi
    # sweep downward to bracket the largest sign change
    grid = np.linspace(hi, lo_, 20001)
    vals = p(grid)
    sign0 = np.sign(vals[0])
    idx = int(np.argmax(np.sign(vals) != sign0))
    a, b = grid[idx], grid[idx - 1]
    for _ in range(200):
        m = 0.5 * (a + b)
        if np.sign(p(m)) == np.sign(p(b)):
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def phi_brute_force(N, profile, n_max):
    """Dense Taylor coefficients ``phi^(n)`` for ``1 <= n <= n_max``.

    Direct sum over every dyadic arc of rank ``1..N`` of
    ``g_I^(n) omega_I`` with the coefficients written out from scratch.
    """
    a = np.zeros(N + 1)
    a[1:] = 1.0 / (np.arange(1, N + 1) * math.sqrt(math.log(N)))
    out = np.zeros((n_max + 1, N), dtype=complex)
    for j in range(1, N + 1):
        length = 2.0 ** -j
        for k in range(2 ** j):
            c = (k + 0.5) * length
            omega = np.array([a[j - l] * np.exp(2j * math.pi * 2 ** l * c) if l < j else 0.0
                              for l in range(N)])
            for n in range(1, n_max + 1):
                x = n * length
                amp = 4.0 * math.pi * x * float(profile(x))
                if amp == 0.0:
                    continue
                out[n] += amp * np.exp(-2j * math.pi * n * c) * omega
    return out


def beta_brute_force_folded(m, j1, j2):
    """``sum_{I1, I2} exp(-2 pi i m (C_I1 - C_I2))`` as exact integers.

    Every phase is a power of ``zeta = exp(2 pi i / M)`` with
    ``M = 2^(max(j1, j2) + 1)``.  The exponents are counted, folded with
    ``zeta^(M/2) = -1`` and returned as integer coordinates in the basis
    ``1, zeta, ..., zeta^(M/2 - 1)``, which is linearly independent over Q.
    """
    J = max(j1, j2) + 1
    M = 1 << J
    counts = [0] * M
    for k1 in range(1 << j1):
        e1 = (2 * k1 + 1) << (J - j1 - 1)
        for k2 in range(1 << j2):
            e2 = (2 * k2 + 1) << (J - j2 - 1)
            counts[(-m * (e1 - e2)) % M] += 1
    half = M // 2
    return [counts[r] - counts[r + half] for r in range(half)]


def frac_phase(num, den_log2):
    f = Fraction(num, 1 << den_log2) % 1
    return complex(math.cos(2 * math.pi * float(f)), math.sin(2 * math.pi * float(f)))
