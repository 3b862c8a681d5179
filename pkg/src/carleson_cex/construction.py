"""The explicit construction: coefficients, direction vectors and spectra.

Conventions
-----------
* Dyadic arcs of the circle are identified with dyadic subintervals of
  ``[0, 1)``; the circle has unit length.
* ``a_l = 1 / (l * sqrt(ln N))`` with the natural logarithm.
* ``omega_I = sum_{l<j} a_{j-l} e_l exp(2 pi i 2^l C_I)`` for arcs of rank
  ``j`` in ``[1, N]`` and zero otherwise.
* The periodised functions ``g_I`` have circle Fourier coefficients
  ``4 pi |n| |I| psi_hat(|n| |I|) exp(-2 pi i n C_I)``.

The analytic function ``phi = sum_I g_I^+ omega_I`` only keeps positive
frequencies.  Summing over all arcs of a rank collapses most terms (a
geometric sum of roots of unity), and the surviving Taylor indices are
``2^(j-1)`` and ``2^j + 2^l`` with ``l <= j - 2``, each carrying a single
coordinate.  :func:`phi_spectrum` builds this spectrum directly.
"""
from __future__ import annotations

import math

import numpy as np

from .dyadic import DyadicInterval, turn_phase
from .errors import DomainError
from .spectrum import SpectrumEntry, VectorSpectrum
from .wavelet import DEFAULT_PROFILE, WaveletProfile, eval_psi_hat

__all__ = [
    "MAX_DIM",
    "coeff_a",
    "coeff_a_vector",
    "omega_vector",
    "g_hat_coefficient",
    "phi_spectrum",
    "phi_support_size",
    "test_spectrum_E",
]

#: Largest dimension accepted by :func:`phi_spectrum`; beyond it the
#: coefficients ``~ 2^N`` leave the double-precision range.
MAX_DIM = 1000


def _check_dim(N: int) -> int:
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise DomainError(f"dimension must be an integer, got {N!r}")
    N = int(N)
    if N < 2:
        raise DomainError(f"dimension must be >= 2, got {N}")
    if N > MAX_DIM:
        raise DomainError(f"dimension {N} exceeds the supported maximum {MAX_DIM}")
    return N


def coeff_a(l: int, N: int) -> float:
    """Coefficient ``a_l = 1 / (l sqrt(ln N))``.

    Raises
    ------
    DomainError
        If ``N < 2`` or ``l`` is outside ``[1, N]``.
    """
    N = _check_dim(N)
    if not 1 <= l <= N:
        raise DomainError(f"coefficient index l={l} outside [1, {N}]")
    return 1.0 / (l * math.sqrt(math.log(N)))


def coeff_a_vector(N: int) -> np.ndarray:
    """Array ``a`` with ``a[l] = a_l`` for ``1 <= l <= N`` and ``a[0] = 0``."""
    N = _check_dim(N)
    out = np.zeros(N + 1)
    out[1:] = 1.0 / (np.arange(1, N + 1) * math.sqrt(math.log(N)))
    return out


def omega_vector(I: DyadicInterval, N: int) -> np.ndarray:
    """Direction vector ``omega_I`` in ``C^N``.

    Examples
    --------
    >>> v = omega_vector(DyadicInterval(1, 0), 16)
    >>> round(v[0].imag, 5), v[0].real
    (0.60056, 0.0)
    """
    N = _check_dim(N)
    out = np.zeros(N, dtype=complex)
    j = I.rank
    if not 1 <= j <= N:
        return out
    a = coeff_a_vector(N)
    num = I.center_numerator
    for l in range(j):
        out[l] = a[j - l] * turn_phase(num << l, j + 1)
    return out


def _psi(profile, x):
    if isinstance(profile, WaveletProfile):
        return eval_psi_hat(profile, x)
    return profile(x)


def g_hat_coefficient(I: DyadicInterval, n: int,
                      profile: WaveletProfile = DEFAULT_PROFILE) -> complex:
    """Circle Fourier coefficient ``g_I^(n)`` for ``n != 0``.

    Returns an exact ``0`` when ``|n| |I|`` lies outside the profile support.
    """
    if n == 0:
        raise DomainError("g_hat_coefficient is defined for nonzero n only")
    scaled = math.ldexp(float(abs(n)), -I.rank)
    amp = 4.0 * math.pi * scaled * float(_psi(profile, scaled))
    if amp == 0.0:
        return 0j
    return amp * turn_phase(-n * I.center_numerator, I.rank + 1)


def phi_support_size(N: int) -> int:
    """Number of Taylor indices carried by ``phi``: ``N + N (N - 1) / 2``."""
    N = _check_dim(N)
    return N + N * (N - 1) // 2


def phi_spectrum(N: int, profile: WaveletProfile = DEFAULT_PROFILE) -> VectorSpectrum:
    """Exact sparse Taylor spectrum of the analytic function ``phi``.

    Parameters
    ----------
    N : int
        Dimension, ``N >= 2``.
    profile : WaveletProfile, optional

    Returns
    -------
    VectorSpectrum
        Entries ``phi(2^(j-1)) = 2 pi psi_hat(1/2) a_1 2^j e_(j-1)`` and
        ``phi(2^j + 2^l) = -4 pi (2^j + 2^l) psi_hat(1 + 2^(l-j)) a_(j-l) e_l``
        for ``l <= j - 2``.  Each entry records its ``(j, l)`` provenance.
    """
    N = _check_dim(N)
    a = coeff_a_vector(N)
    half = float(_psi(profile, 0.5))
    entries = []
    for j in range(1, N + 1):
        val = 2.0 * math.pi * half * a[1] * math.ldexp(1.0, j)
        entries.append(SpectrumEntry(1 << (j - 1), np.array([j - 1], dtype=np.int64),
                                     np.array([val], dtype=complex), j, j - 1))
        if j < 2:
            continue
        ls = np.arange(j - 1)
        xs = 1.0 + np.ldexp(1.0, ls - j)
        psi = np.asarray(_psi(profile, xs), dtype=float)
        for l in range(j - 1):
            n = (1 << j) + (1 << l)
            val = -4.0 * math.pi * float(n) * psi[l] * a[j - l]
            entries.append(SpectrumEntry(n, np.array([l], dtype=np.int64),
                                         np.array([val], dtype=complex), j, l))
    return VectorSpectrum.from_entries(N, entries)


def test_spectrum_E(N: int) -> VectorSpectrum:
    """Spectrum of the lacunary test function ``E(w) = sum_l w^(2^l) e_l``.

    Indices run over ``l = 0, ..., N-1`` so that ``E`` pairs with every
    coordinate of ``phi``.  ``||E||^2 = N``.
    """
    N = _check_dim(N)
    entries = [SpectrumEntry(1 << l, np.array([l], dtype=np.int64),
                             np.array([1.0 + 0j]), None, l) for l in range(N)]
    return VectorSpectrum.from_entries(N, entries)


# keep pytest from collecting the constructor as a test function
test_spectrum_E.__test__ = False


# keep test collectors from mistaking the constructor for a test function
test_spectrum_E.__test__ = False
