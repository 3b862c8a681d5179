"""The embedding quadratic form of the lacunary test function ``E``.

``E(w) = sum_{l<N} w^(2^l) e_l`` has ``||E||^2 = N``, and the quantity

    int_D <dmu E, E> = int_D |<E(w), phi(w)>|^2 dA_1(w)

is computed by two routes that share nothing below the profile evaluation:

* :func:`embedding_form_spectral` pairs Taylor terms of
  ``<E, phi> = sum_(l, n) conj(phi^(n)_l) w^(2^l) conj(w)^n``; two terms pair
  only when ``n - 2^l`` agrees, so the terms are bucketed by that integer.
* :func:`embedding_form_paper` evaluates the two closed-form families of
  surviving generation pairs (``l = j - 1`` on both sides, and
  ``j_1 = j_2`` with both ``l <= j - 2``), with the powers ``2^j`` factored
  out of every ratio.

Both are limited to ``N <= 256`` so that squared coefficients of size
``~ 4^N`` stay within double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .construction import phi_spectrum
from .errors import DomainError
from .measure import IntensityResult, carleson_intensity
from .wavelet import DEFAULT_PROFILE, WaveletProfile

__all__ = [
    "MAX_EMBEDDING_DIM",
    "EmbeddingResult",
    "beta_sum",
    "alpha_term",
    "generation_sum_unreduced",
    "generation_sum_reduced",
    "embedding_form_spectral",
    "embedding_form_paper",
    "ratio_lower_bound",
]

MAX_EMBEDDING_DIM = 256
_SIXTEEN_PI_CUBED = 16.0 * math.pi ** 3


def _check_embedding_dim(N: int) -> int:
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise DomainError(f"dimension must be an integer, got {N!r}")
    N = int(N)
    if N < 2:
        raise DomainError(f"dimension N={N} must be >= 2")
    if N > MAX_EMBEDDING_DIM:
        raise DomainError(f"dimension N={N} exceeds {MAX_EMBEDDING_DIM}: "
                          "squared coefficients would overflow double precision")
    return N


def _psi(profile, x):
    return profile(x) if callable(profile) else DEFAULT_PROFILE(x)


# ----------------------------------------------------------------------
# generation sums


def beta_sum(m: int, j1: int, j2: int) -> complex:
    """``sum_{I1 in D_j1, I2 in D_j2} exp(-2 pi i m (C_I1 - C_I2))``.

    Geometric summation leaves ``2^(j1+j2) (-1)^(m/2^j1 - m/2^j2)`` when ``m``
    is divisible by both ``2^j1`` and ``2^j2``, and ``0`` otherwise.  The
    value is an exact Gaussian integer.

    Examples
    --------
    >>> beta_sum(0, 1, 1), beta_sum(1, 1, 1), beta_sum(2, 1, 1)
    ((4+0j), 0j, (4+0j))
    """
    if j1 < 1 or j2 < 1:
        raise DomainError("generations j1, j2 must be >= 1")
    m = int(m)
    if m % (1 << j1) or m % (1 << j2):
        return 0j
    q = (m >> j1) - (m >> j2)
    return complex((1 << (j1 + j2)) * (-1 if q & 1 else 1))


def alpha_term(m: int, j1: int, l1: int, j2: int, l2: int,
               profile: WaveletProfile = DEFAULT_PROFILE) -> float:
    """Weight ``alpha_m`` of the pairing of generations ``(j1, l1)`` and ``(j2, l2)``.

    ``16 pi^3 2^(-j1-j2) (m+2^l1)(m+2^l2) psi(x1) psi(x2) / ((s+1)(s+2))``
    with ``x_i = (m + 2^l_i) / 2^j_i`` and ``s = m + 2^l1 + 2^l2``; the
    analytic projection keeps ``x_i > 0`` only.
    """
    p1 = m + (1 << l1)
    p2 = m + (1 << l2)
    if p1 <= 0 or p2 <= 0:
        return 0.0
    x1 = math.ldexp(float(p1), -j1)
    x2 = math.ldexp(float(p2), -j2)
    psi = float(_psi(profile, x1)) * float(_psi(profile, x2))
    if psi == 0.0:
        return 0.0
    s = float(m + (1 << l1) + (1 << l2))
    return _SIXTEEN_PI_CUBED * x1 * x2 * psi / ((s + 1.0) * (s + 2.0))


def generation_sum_unreduced(j1: int, j2: int, N: int,
                             profile: WaveletProfile = DEFAULT_PROFILE) -> float:
    """``sum_{l1<j1, l2<j2} a_(j1-l1) a_(j2-l2) sum_m alpha_m beta_m``, term by term.

    Every ``m >= -2^l1`` with a nonzero ``alpha_m`` is visited; ``beta_m`` is
    taken from :func:`beta_sum`.  Meant for small generations.
    """
    N = _check_embedding_dim(N)
    if not (1 <= j1 <= N and 1 <= j2 <= N):
        raise DomainError("generations must lie in [1, N]")
    norm = 1.0 / math.sqrt(math.log(N))
    total = 0.0
    for l1 in range(j1):
        for l2 in range(j2):
            a = norm / (j1 - l1) * norm / (j2 - l2)
            # alpha_m needs (m + 2^l1) / 2^j1 < 4/3
            m_hi = (4 << j1) // 3 - (1 << l1) + 1
            acc = 0.0
            for m in range(-(1 << l1), m_hi + 1):
                beta = beta_sum(m, j1, j2)
                if beta == 0:
                    continue
                acc += alpha_term(m, j1, l1, j2, l2, profile) * beta.real
            total += a * acc
    return total


def _family_one(j1: int, j2: int, a1: float, psi_half: float) -> float:
    # l_i = j_i - 1: 2^(l1+l2) psi(1/2)^2 / ((2^l1 + 2^l2 + 1)(2^l1 + 2^l2 + 2))
    l1, l2 = j1 - 1, j2 - 1
    big, small = max(l1, l2), min(l1, l2)
    r = math.ldexp(1.0, small - big)          # 2^(small - big)
    eps = math.ldexp(1.0, -big)               # 2^-big
    ratio = r / ((1.0 + r + eps) * (1.0 + r + 2.0 * eps))
    return a1 * a1 * psi_half * psi_half * ratio


def _family_two(j: int, N: int, norm: float, profile) -> float:
    # j1 = j2 = j, l1, l2 <= j - 2
    if j < 2:
        return 0.0
    ls = np.arange(j - 1)
    t = np.ldexp(1.0, ls - j)                 # 2^(l - j)
    psi = np.asarray(_psi(profile, 1.0 + t), dtype=float)
    a = norm / (j - ls)
    w = a * (1.0 + t) * psi
    eps = math.ldexp(1.0, -j)
    den = (1.0 + t[:, None] + t[None, :] + eps) * (1.0 + t[:, None] + t[None, :] + 2.0 * eps)
    return float(np.sum(np.outer(w, w) / den))


def generation_sum_reduced(j1: int, j2: int, N: int,
                           profile: WaveletProfile = DEFAULT_PROFILE) -> float:
    """Closed-form contribution of the generation pair ``(j1, j2)``.

    Only ``l_i = j_i - 1`` survive, plus, when ``j1 == j2``, the terms with
    ``l1, l2 <= j - 2``; the total carries the factor ``16 pi^3``.
    """
    N = _check_embedding_dim(N)
    norm = 1.0 / math.sqrt(math.log(N))
    total = _family_one(j1, j2, norm, float(_psi(profile, 0.5)))
    if j1 == j2:
        total += _family_two(j1, N, norm, profile)
    return _SIXTEEN_PI_CUBED * total


# ----------------------------------------------------------------------
# the two routes


def embedding_form_spectral(N: int, profile: WaveletProfile = DEFAULT_PROFILE) -> float:
    """``int_D |<E, phi>|^2 dA_1`` from the Taylor spectrum of ``phi``.

    The terms ``c w^(2^l) conj(w)^n`` with ``c = conj(phi^(n)_l)`` are sorted
    into buckets of equal ``n - 2^l`` (exact integers, ordered by the key and
    then by ``(j, l)`` provenance); two terms of a bucket pair with weight
    ``pi / ((s+1)(s+2))``, ``s = 2^l_x + n_y``.
    """
    N = _check_embedding_dim(N)
    spectrum = phi_spectrum(N, profile)
    buckets: dict[int, list] = {}
    for e in spectrum:
        for p, v in zip(e.coords, e.values):
            p = int(p)
            buckets.setdefault(e.n - (1 << p), []).append(
                ((e.j, e.l), float(1 << p), float(e.n), complex(np.conj(v))))
    m_vals, n_vals, coefs, starts = [], [], [], [0]
    for key in sorted(buckets):
        for _, m, n, c in sorted(buckets[key], key=lambda t: (t[0][0] or 0, t[0][1] or 0, t[2])):
            m_vals.append(m)
            n_vals.append(n)
            coefs.append(c)
        starts.append(len(m_vals))
    total = kernels.bucket_pair_sum(np.asarray(m_vals, dtype=np.float64),
                                    np.asarray(n_vals, dtype=np.float64),
                                    np.asarray(coefs, dtype=complex),
                                    np.asarray(starts, dtype=np.int64))
    return max(float(total), 0.0)


def embedding_form_paper(N: int, profile: WaveletProfile = DEFAULT_PROFILE) -> float:
    """``int_D |<E, phi>|^2 dA_1`` from the two surviving generation families.

    ``16 pi^3 (S1 + S2)`` with

    * ``S1 = sum_{j1, j2} a_1^2 2^(l1+l2) psi(1/2)^2 / ((2^l1+2^l2+1)(2^l1+2^l2+2))``,
      ``l_i = j_i - 1``;
    * ``S2 = sum_j sum_{l1, l2 <= j-2} a_(j-l1) a_(j-l2) (2^j+2^l1)(2^j+2^l2)
      psi(1+2^(l1-j)) psi(1+2^(l2-j)) / ((2^j+2^l1+2^l2+1)(2^j+2^l1+2^l2+2))``.

    Every ratio is evaluated with the largest power of two divided out.
    """
    N = _check_embedding_dim(N)
    norm = 1.0 / math.sqrt(math.log(N))
    psi_half = float(_psi(profile, 0.5))
    s1 = 0.0
    for j1 in range(1, N + 1):
        for j2 in range(1, N + 1):
            s1 += _family_one(j1, j2, norm, psi_half)
    s2 = 0.0
    for j in range(2, N + 1):
        s2 += _family_two(j, N, norm, profile)
    return _SIXTEEN_PI_CUBED * (s1 + s2)


@dataclass(frozen=True)
class EmbeddingResult:
    """Both routes of the embedding form and the resulting ratio.

    Attributes
    ----------
    N : int
    value_spectral, value_paper : float
    relative_gap : float
        ``|value_spectral - value_paper| / max(value_spectral, value_paper)``.
    ratio_lower_bound : float
        ``sqrt(value_spectral / N) / intensity``.
    intensity : IntensityResult
    """

    N: int
    value_spectral: float
    value_paper: float
    relative_gap: float
    ratio_lower_bound: float
    intensity: IntensityResult = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "value_spectral": self.value_spectral,
            "value_paper": self.value_paper,
            "relative_gap": self.relative_gap,
            "ratio_lower_bound": self.ratio_lower_bound,
            "intensity": self.intensity.to_dict(),
        }


def ratio_lower_bound(N: int, max_rank: int | None = None, *,
                      profile: WaveletProfile = DEFAULT_PROFILE, **intensity_options) -> EmbeddingResult:
    """Lower bound ``||E||^-1 (int <dmu E, E>)^(1/2) / ||mu||`` for the embedding norm.

    ``E`` is one admissible test function and the intensity is the dyadic
    scan of :func:`carleson_cex.measure.carleson_intensity`, so the ratio
    bounds the norm ratio from below up to the scan's reported remainder.

    Parameters
    ----------
    N : int
    max_rank : int, optional
        Passed to :func:`carleson_intensity` (default ``N + 2``).
    profile : WaveletProfile
    **intensity_options
        ``tol``, ``arc_budget``, ``seed``, ``threads``.
    """
    N = _check_embedding_dim(N)
    vs = embedding_form_spectral(N, profile)
    vp = embedding_form_paper(N, profile)
    denom = max(vs, vp)
    gap = abs(vs - vp) / denom if denom > 0 else 0.0
    intensity = carleson_intensity(phi_spectrum(N, profile), max_rank, **intensity_options)
    ratio = math.sqrt(vs / N) / intensity.value if intensity.value > 0 else math.inf
    return EmbeddingResult(N, vs, vp, gap, ratio, intensity)
