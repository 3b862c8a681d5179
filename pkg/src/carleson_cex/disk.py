"""Integration primitives on the disk and the upper half-plane.

Measure conventions
-------------------
Points of the disk are written ``w = r exp(2 pi i x)`` with ``x`` in
``[0, 1)``, and the area element is ``dA = 2 pi r dr dx``.  With the weight
``dA_1 = (1 - |w|^2) dA`` the monomial moments are

    int_D w^a conj(w)^b dA_1 = delta_ab * pi / ((a + 1)(a + 2)).

The Carleson square over an arc ``I`` is ``{w : x in I, 1 - |I| < r < 1}``;
its moments factor into an angular part (a function of ``a - b``) and a
radial part (a function of ``a + b``).

Large exponents
---------------
Taylor indices reach ``2^(N+1)`` for the dimensions of interest, so the
radial factor is evaluated with ``r0^u = exp(-u * ell)``,
``ell = -log1p(-|I|)``, and the closed form is replaced by a convergent
series when ``u * ell <= 1`` where it would cancel catastrophically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .dyadic import DyadicInterval, turn_phase
from .errors import DomainError, NumericError
from .wavelet import DEFAULT_PROFILE, SUPPORT_HI, SUPPORT_LO, WaveletProfile, eval_psi_hat

__all__ = [
    "CarlesonSquare",
    "MomentKey",
    "moment_disk",
    "radial_factor",
    "radial_factor_array",
    "angular_factor",
    "moment_carleson_square",
    "halfplane_lp_pairing",
    "eval_f_poisson",
]

_TWO_PI = 2.0 * math.pi
_SERIES_TERMS = 28
_LOG_SPACE_THRESHOLD = 10**15


@dataclass(frozen=True)
class MomentKey:
    """Exponent pair ``(a, b)`` of the monomial ``w^a conj(w)^b``."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise DomainError("moment exponents must be nonnegative")


@dataclass(frozen=True)
class CarlesonSquare:
    """Carleson square ``Q_I`` over a dyadic arc.

    The rank-0 square is treated as the whole disk.
    """

    arc: DyadicInterval

    def __post_init__(self):
        self.arc.require_arc()

    @property
    def rank(self) -> int:
        return self.arc.rank

    @property
    def r0(self) -> float:
        return 1.0 - self.arc.length

    @property
    def ell(self) -> float:
        """``-log(r0)``; infinite for the rank-0 square."""
        if self.arc.rank == 0:
            return math.inf
        return -math.log1p(-self.arc.length)


def _check_exponents(a: int, b: int) -> None:
    if a < 0 or b < 0:
        raise DomainError(f"moment exponents must be nonnegative, got ({a}, {b})")


def moment_disk(a: int, b: int) -> float:
    """``int_D w^a conj(w)^b dA_1``.

    Examples
    --------
    >>> moment_disk(0, 0) == math.pi / 2
    True
    >>> moment_disk(3, 5)
    0.0
    """
    _check_exponents(a, b)
    if a != b:
        return 0.0
    if a > _LOG_SPACE_THRESHOLD:
        # math.log accepts integers of any size
        return math.exp(math.log(math.pi) - math.log(a + 1) - math.log(a + 2))
    return math.pi / ((a + 1) * (a + 2))


def _series_difference(x: float, delta: float) -> float:
    """``E(x) - E(x (1 + delta))`` with ``E(y) = (1 - exp(-y)) / y``.

    Only used for ``x <= 1`` and ``0 < delta <= 1``; every term is computed
    without cancellation and the alternating tail is geometrically small.
    """
    total = 0.0
    xk = 1.0
    powm1 = 0.0  # (1 + delta)^k - 1
    fact = 1.0   # (k + 1)!
    sign = 1.0
    for k in range(1, _SERIES_TERMS + 1):
        xk *= x
        powm1 = powm1 * (1.0 + delta) + delta
        fact *= k + 1
        total += sign * xk * powm1 / fact
        sign = -sign
    return total


def radial_factor(u: float, ell: float) -> float:
    """``2 pi int_0^ell exp(-u t) (1 - exp(-2 t)) dt``.

    With ``u = a + b + 2`` and ``ell = -log(r0)`` this equals
    ``2 pi int_{r0}^1 r^(a+b+1) (1 - r^2) dr``.

    Parameters
    ----------
    u : float
        ``a + b + 2 >= 2``.
    ell : float
        Depth parameter; ``inf`` for the whole disk.
    """
    if math.isinf(ell):
        return 2.0 * _TWO_PI / u / (u + 2.0)
    x = u * ell
    if x > 1.0:
        h = -math.expm1(-2.0 * ell)
        return _TWO_PI * (2.0 - math.exp(-x) * (2.0 + u * h)) / u / (u + 2.0)
    return _TWO_PI * ell * _series_difference(x, 2.0 / u)


def radial_factor_array(u: np.ndarray, ell: float) -> np.ndarray:
    """Vectorised :func:`radial_factor` for an array of ``u`` values."""
    u = np.asarray(u, dtype=float)
    if math.isinf(ell):
        return 2.0 * _TWO_PI / u / (u + 2.0)
    x = u * ell
    out = np.empty_like(u)
    big = x > 1.0
    if np.any(big):
        ub = u[big]
        h = -math.expm1(-2.0 * ell)
        out[big] = _TWO_PI * (2.0 - np.exp(-x[big]) * (2.0 + ub * h)) / ub / (ub + 2.0)
    small = ~big
    if np.any(small):
        xs = x[small]
        delta = 2.0 / u[small]
        total = np.zeros_like(xs)
        xk = np.ones_like(xs)
        powm1 = np.zeros_like(xs)
        fact = 1.0
        sign = 1.0
        for k in range(1, _SERIES_TERMS + 1):
            xk = xk * xs
            powm1 = powm1 * (1.0 + delta) + delta
            fact *= k + 1
            total += sign * xk * powm1 / fact
            sign = -sign
        out[small] = _TWO_PI * ell * total
    return out


def _sin_pi_reduced(d: int, rank: int) -> tuple[float, bool]:
    """``sin(pi d 2^-rank)`` from the exact residue of ``d`` modulo ``2^(rank+1)``.

    Returns the value and a flag telling whether it is an exact zero.
    """
    half = 1 << rank
    res = d % (half << 1)
    if res % half == 0:
        return 0.0, True
    # representative in (-2^rank, 2^rank), then sin(pi y) = sin(pi (1 - y)) so
    # that the argument stays in (0, 1/2] and keeps full relative accuracy
    if res > half:
        res -= half << 1
    sign = -1.0 if res < 0 else 1.0
    a = abs(res)
    if 2 * a > half:
        a = half - a
    return sign * math.sin(math.pi * (a / half)), False


def angular_factor(d: int, arc: DyadicInterval) -> complex:
    """``int_I exp(2 pi i d x) dx`` for an integer frequency ``d``.

    Written as ``|I| exp(2 pi i d C_I) sinc(d |I|)`` with every phase reduced
    exactly, so the result stays accurate for very large ``d``.
    """
    length = arc.length
    if d == 0:
        return complex(length)
    s, is_zero = _sin_pi_reduced(d, arc.rank)
    if is_zero:
        return 0j
    y = d / (1 << arc.rank)  # d |I| as a correctly rounded float
    return length * (s / (math.pi * y)) * turn_phase(d * arc.center_numerator, arc.rank + 1)


def moment_carleson_square(Q: CarlesonSquare, a: int, b: int) -> complex:
    """``int_Q w^a conj(w)^b dA_1`` over a Carleson square.

    Examples
    --------
    >>> Q = CarlesonSquare(DyadicInterval(0, 0))
    >>> abs(moment_carleson_square(Q, 2, 2) - moment_disk(2, 2)) < 1e-15
    True
    """
    _check_exponents(a, b)
    ang = angular_factor(a - b, Q.arc)
    if ang == 0:
        return 0j
    return ang * radial_factor(float(a + b + 2), Q.ell)


# ---------------------------------------------------------------------------
# half-plane quantities


def _psi(profile, x):
    if isinstance(profile, WaveletProfile):
        return eval_psi_hat(profile, x)
    return profile(x)


def halfplane_lp_pairing(I: DyadicInterval, J: DyadicInterval,
                         profile: WaveletProfile = DEFAULT_PROFILE,
                         rtol: float = 1e-10) -> float:
    """Weighted pairing ``int f_I conj(f_J) y dx dy`` on the upper half-plane.

    Evaluated on the Fourier side as
    ``int f_I^(xi) conj(f_J^(xi)) / (16 pi^2 xi^2) dxi``, which reduces to
    ``2 |I| |J| int_0^inf psi_hat(|I| xi) psi_hat(|J| xi) cos(2 pi xi (C_I - C_J)) dxi``.
    The integral is split at the profile breakpoints and each piece is
    handled by adaptive Gauss-Kronrod quadrature with an oscillatory weight.

    Raises
    ------
    NumericError
        If the quadrature fails to reach the requested tolerance.
    """
    li, lj = I.length, J.length
    lo = max(SUPPORT_LO / li, SUPPORT_LO / lj)
    hi = min(SUPPORT_HI / li, SUPPORT_HI / lj)
    if lo >= hi:
        return 0.0
    breaks = {lo, hi}
    for length in (li, lj):
        for c in (SUPPORT_LO, 2.0 / 3.0, SUPPORT_HI):
            p = c / length
            if lo < p < hi:
                breaks.add(p)
    pts = sorted(breaks)
    # C_I - C_J computed exactly on a common dyadic grid
    top = max(I.rank, J.rank) + 1
    num = I.center_numerator * (1 << (top - I.rank - 1)) - J.center_numerator * (1 << (top - J.rank - 1))
    delta = num / (1 << top)
    omega = _TWO_PI * delta

    def amp(xi):
        return float(_psi(profile, li * xi)) * float(_psi(profile, lj * xi))

    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        kwargs = dict(epsabs=1e-14 / min(li, lj), epsrel=rtol, limit=400, full_output=1)
        if omega == 0.0:
            res = integrate.quad(amp, a, b, **kwargs)
        else:
            res = integrate.quad(amp, a, b, weight="cos", wvar=omega, **kwargs)
        # QUADPACK also flags round-off on pieces whose integral cancels to
        # nearly zero; only an error estimate above the tolerance is a failure
        if len(res) >= 4 and res[1] > max(kwargs["epsabs"], rtol * abs(res[0])):
            raise NumericError(f"pairing quadrature did not converge on [{a}, {b}]",
                               achieved=res[1])
        total += res[0]
    # the two frequency half-lines are mirror images, so the imaginary
    # (sine) parts cancel identically and only the cosine integral remains
    return 2.0 * li * lj * total


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _panels(a: float, b: float, count: int):
    edges = np.linspace(a, b, count + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfw = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halfw[:, None] * _GL_NODES[None, :]).ravel()
    weights = (halfw[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def eval_f_poisson(I: DyadicInterval, x, y, profile: WaveletProfile = DEFAULT_PROFILE):
    """Poisson extension of ``f_I`` at ``x + i y``.

    Computed as ``int f_I^(xi) exp(-2 pi |xi| y) exp(2 pi i x xi) dxi`` by
    composite Gauss-Legendre quadrature over the two frequency bands; ``x``
    and ``y`` broadcast against each other.

    Raises
    ------
    DomainError
        If any ``y <= 0``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0.0)):
        raise DomainError("eval_f_poisson requires y > 0")
    length = I.length
    X, Y = np.broadcast_arrays((x - I.center) / length, y / length)
    # panel count follows the number of oscillations across the band
    osc = float(np.max(np.abs(X))) if X.size else 0.0
    count = max(2, int(math.ceil(osc / 2.0)) + 1)
    t1, w1 = _panels(SUPPORT_LO, 2.0 / 3.0, count)
    t2, w2 = _panels(2.0 / 3.0, SUPPORT_HI, 2 * count)
    t = np.concatenate([t1, t2])
    w = np.concatenate([w1, w2])
    # variables in units of the interval: xi = t / |I|
    base = w * 4.0 * math.pi * t * np.asarray(_psi(profile, t), dtype=float)
    flatX = X.reshape(-1, 1)
    flatY = Y.reshape(-1, 1)
    decay = np.exp(-_TWO_PI * t[None, :] * flatY)
    pos = np.exp(1j * _TWO_PI * t[None, :] * flatX)
    neg = np.exp(-1j * _TWO_PI * t[None, :] * flatX)
    vals = ((base[None, :] * decay) * (pos + neg)).sum(axis=1) / length
    vals = vals.reshape(X.shape)
    if vals.ndim == 0:
        return complex(vals)
    return vals
