"""Matrix-valued measure ``dmu = phi (x) phi dA_1`` and its Carleson intensity.

For a Carleson square ``Q`` the matrix ``mu(Q)`` has entries

    M_pq = sum_{n, n'} phi^(n)_p conj(phi^(n')_q) m_Q(n, n')

with ``m_Q`` the weighted moments of :mod:`carleson_cex.disk`.  Spectra of the
lacunary two-bit shape produced by :func:`carleson_cex.construction.phi_spectrum`
are assembled by the structured engine in :mod:`carleson_cex._engine`; any
other spectrum goes through the direct double sum.

The intensity reported here is normalised by the arc length,

    value = sup_I lambda_max(mu(Q_I)) / |I|,

the quantity that stays bounded for a Carleson measure.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._engine import TwoBitSpectrum
from .disk import CarlesonSquare, moment_carleson_square
from .dyadic import DyadicInterval
from .errors import NumericError, PreconditionError
from .spectrum import VectorSpectrum
from .wavelet import DEFAULT_PROFILE, SUPPORT_HI, SUPPORT_LO, WaveletProfile

__all__ = [
    "DEFAULT_TOL",
    "HermitianForm",
    "IntensityResult",
    "RankScan",
    "arc_candidates",
    "default_arc_budget",
    "gram_matrix",
    "largest_eigenvalue",
    "carleson_intensity",
    "remainder_bound",
    "g_norm_dA1",
]

DEFAULT_TOL = 1e-9
"""Default relative truncation budget of the structured assembly."""

_HERMITIAN_RTOL = 1e-12
_PSD_RTOL = 1e-10


@dataclass(frozen=True)
class HermitianForm:
    """A Hermitian ``N x N`` matrix.

    The input matrix is checked to be Hermitian up to ``1e-12`` relative to
    its largest entry and then symmetrised exactly.

    Attributes
    ----------
    dim : int
    matrix : numpy.ndarray
        Complex ``(dim, dim)`` array, read-only.
    truncation_bound : float
        Spectral-norm bound of the entries dropped during assembly (``0`` for
        exact assembly).
    """

    dim: int
    matrix: np.ndarray
    truncation_bound: float = 0.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise PreconditionError(f"matrix shape {m.shape} does not match dim {self.dim}")
        scale = float(np.abs(m).max(initial=0.0))
        asym = float(np.abs(m - m.conj().T).max(initial=0.0))
        if asym > _HERMITIAN_RTOL * max(scale, np.finfo(float).tiny):
            raise PreconditionError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, truncation_bound: float = 0.0) -> "HermitianForm":
        matrix = np.asarray(matrix)
        return cls(matrix.shape[0], matrix, truncation_bound)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        """All eigenvalues in ascending order."""
        return scipy.linalg.eigvalsh(self.matrix)

    def is_psd(self, rtol: float = _PSD_RTOL) -> bool:
        """``lambda_min >= -rtol * trace`` (and ``>= -rtol`` for a zero trace)."""
        if self.dim == 0:
            return True
        lam_min = float(self.eigenvalues()[0])
        return lam_min >= -rtol * max(abs(self.trace), 1.0 if self.trace == 0 else 0.0)

    def quadratic(self, e) -> float:
        """``<M e, e>`` for a vector ``e``."""
        e = np.asarray(e, dtype=complex)
        return float(np.real(np.vdot(e, self.matrix @ e)))


# ----------------------------------------------------------------------
# assembly

_STRUCTURED_CACHE: dict[int, tuple[VectorSpectrum, TwoBitSpectrum | None]] = {}


def _structured(spectrum: VectorSpectrum) -> TwoBitSpectrum | None:
    """Cached :class:`TwoBitSpectrum` view, or ``None`` for other shapes."""
    hit = _STRUCTURED_CACHE.get(id(spectrum))
    if hit is not None and hit[0] is spectrum:
        return hit[1]
    view = TwoBitSpectrum(spectrum) if len(spectrum) and TwoBitSpectrum.accepts(spectrum) else None
    if len(_STRUCTURED_CACHE) >= 8:
        _STRUCTURED_CACHE.pop(next(iter(_STRUCTURED_CACHE)))
    _STRUCTURED_CACHE[id(spectrum)] = (spectrum, view)
    return view


def _gram_direct(Q: CarlesonSquare, spectrum: VectorSpectrum) -> np.ndarray:
    N = spectrum.dim
    entries = list(spectrum)
    M = np.zeros((N, N), dtype=complex)
    for a, e in enumerate(entries):
        for f in entries[a:]:
            m = moment_carleson_square(Q, e.n, f.n)
            if m == 0:
                continue
            block = m * np.outer(e.values, np.conj(f.values))
            M[np.ix_(e.coords, f.coords)] += block
            if f.n != e.n:
                M[np.ix_(f.coords, e.coords)] += block.conj().T
    return M


def gram_matrix(Q: CarlesonSquare | DyadicInterval, spectrum: VectorSpectrum,
                tol: float = 0.0, method: str = "auto") -> HermitianForm:
    """Matrix ``mu(Q)`` of the measure ``phi (x) phi dA_1``.

    Parameters
    ----------
    Q : CarlesonSquare or DyadicInterval
        The square, or the arc it sits over.
    spectrum : VectorSpectrum
        Taylor coefficients of ``phi``; must be nonempty.
    tol : float
        Relative truncation budget of the structured assembly; ``0`` keeps
        every pair.  The dropped mass is stored in
        :attr:`HermitianForm.truncation_bound`.
    method : {"auto", "structured", "direct"}
        ``"auto"`` uses the structured engine whenever the spectrum has the
        lacunary two-bit shape.

    Returns
    -------
    HermitianForm
    """
    if not isinstance(Q, CarlesonSquare):
        Q = CarlesonSquare(Q)
    if len(spectrum) == 0:
        raise PreconditionError("gram_matrix needs a nonempty spectrum")
    if tol < 0:
        raise PreconditionError("tol must be >= 0")
    if method not in ("auto", "structured", "direct"):
        raise PreconditionError(f"unknown method {method!r}")
    view = None if method == "direct" else _structured(spectrum)
    if method == "structured" and view is None:
        raise PreconditionError("spectrum is not lacunary two-bit")
    if view is None:
        return HermitianForm(spectrum.dim, _gram_direct(Q, spectrum))
    arc = Q.arc
    asm = view.assemble(arc.rank, tol)
    shared, per_arc = view.accumulate(asm, [arc.index])
    D = view.coordinate_phases(arc.rank, arc.index)
    M = D[:, None] * (shared + per_arc[0]) * np.conj(D)[None, :]
    return HermitianForm(spectrum.dim, M, asm.dropped_mass)


def largest_eigenvalue(M) -> float:
    """Largest eigenvalue of a Hermitian PSD matrix, clipped at ``0``.

    Parameters
    ----------
    M : HermitianForm or array_like

    Raises
    ------
    NumericError
        If the eigensolver does not converge.
    """
    A = M.matrix if isinstance(M, HermitianForm) else np.asarray(M, dtype=complex)
    n = A.shape[0]
    if n == 0:
        return 0.0
    try:
        lam = scipy.linalg.eigvalsh(A, subset_by_index=[n - 1, n - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        resid = float(np.abs(A - A.conj().T).max(initial=0.0))
        raise NumericError(f"eigensolver failed: {exc}", achieved=resid) from exc
    return max(float(lam[-1]), 0.0)


# ----------------------------------------------------------------------
# intensity scan


def default_arc_budget(dim: int) -> int:
    """Number of arcs scanned per rank when the rank is not scanned in full."""
    return max(8, 2048 // max(int(dim), 1))


def arc_candidates(rank: int, budget: int, seed: int = 0) -> list[int]:
    """Arc indices ``k`` scanned at ``rank``.

    All ``2^rank`` arcs when that is within ``budget``.  Otherwise, in order:
    the two arcs whose index bits alternate (the extremal ones for lacunary
    spectra), both end arcs, all indices below the largest power of two not
    exceeding ``budget / 2``, and seeded random indices up to ``budget``.
    The list depends only on ``(rank, budget, seed)``.
    """
    total = 1 << rank
    if total <= budget:
        return list(range(total))
    mask = total - 1
    alt = int("01" * (rank // 2 + 1), 2) & mask
    chosen: dict[int, None] = {}
    for k in (alt, alt ^ mask, 0, mask):
        chosen.setdefault(k)
    low = 1 << max(0, (budget // 2).bit_length() - 1)
    for k in range(low):
        if len(chosen) >= budget:
            break
        chosen.setdefault(k)
    rng = random.Random(seed * 1_000_003 + rank)
    while len(chosen) < budget:
        chosen.setdefault(rng.getrandbits(rank))
    return list(chosen)[:budget]


@dataclass(frozen=True)
class RankScan:
    """Best arc found at one rank."""

    rank: int
    value: float
    index: int
    arcs_scanned: int
    exhaustive: bool
    truncation_bound: float


@dataclass(frozen=True)
class IntensityResult:
    """Outcome of :func:`carleson_intensity`.

    Attributes
    ----------
    value : float
        ``lambda_max(mu(Q_W)) / |W|`` for the witness arc ``W``.
    witness : DyadicInterval
    max_rank : int
        Largest rank scanned.
    remainder_bound : float
        Bound of ``lambda_max(mu(Q_I)) / |I|`` over all arcs of larger rank.
    eigenvalue : float
        ``largest_eigenvalue(gram_matrix(witness))`` (unnormalised).
    truncation_bound : float
        Largest normalised truncation error over the scanned ranks.
    exhaustive : bool
        Whether every arc of every scanned rank was evaluated.
    arcs_scanned : int
    per_rank : tuple of RankScan
    """

    value: float
    witness: DyadicInterval
    max_rank: int
    remainder_bound: float
    eigenvalue: float = 0.0
    truncation_bound: float = 0.0
    exhaustive: bool = True
    arcs_scanned: int = 0
    per_rank: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": self.witness.to_dict(),
            "max_rank": self.max_rank,
            "remainder_bound": self.remainder_bound,
            "eigenvalue": self.eigenvalue,
            "truncation_bound": self.truncation_bound,
            "exhaustive": self.exhaustive,
            "arcs_scanned": self.arcs_scanned,
        }


def remainder_bound(spectrum: VectorSpectrum, max_rank: int) -> float:
    """Bound of ``lambda_max(mu(Q_I)) / |I|`` for arcs of rank ``> max_rank``.

    Such squares lie in the annulus ``|w| > r0 = 1 - 2^-(max_rank+1)``, where
    ``||phi||^2 <= sum_p (sum_n |phi^(n)_p|)^2``, and
    ``A_1(Q_I) / |I| <= pi (1 - r0^2)^2 / 2``.
    """
    if len(spectrum) == 0:
        return 0.0
    l1 = np.zeros(spectrum.dim)
    for e in spectrum:
        np.add.at(l1, e.coords, np.abs(e.values))
    phi_sup_sq = float(np.sum(l1 ** 2))
    eps = math.ldexp(1.0, -(max_rank + 1))
    one_minus_r0_sq = eps * (2.0 - eps)
    return phi_sup_sq * math.pi * one_minus_r0_sq ** 2 / 2.0


def _scan_rank_structured(view: TwoBitSpectrum, rank: int, tol: float,
                          budget: int, seed: int) -> RankScan:
    ks = arc_candidates(rank, budget, seed)
    asm = view.assemble(rank, tol)
    shared, per_arc = view.accumulate(asm, ks)
    lam = np.linalg.eigvalsh(per_arc + shared[None, :, :])[:, -1]
    best = int(np.argmax(lam))  # first maximiser
    return RankScan(rank, float(lam[best]) / asm.length, ks[best], len(ks),
                    len(ks) == (1 << rank), asm.dropped_mass / asm.length)


def _scan_rank_direct(spectrum: VectorSpectrum, rank: int, budget: int, seed: int) -> RankScan:
    ks = arc_candidates(rank, budget, seed)
    length = math.ldexp(1.0, -rank)
    lam = [largest_eigenvalue(gram_matrix(DyadicInterval(rank, k), spectrum, method="direct"))
           for k in ks]
    best = int(np.argmax(lam))
    return RankScan(rank, lam[best] / length, ks[best], len(ks), len(ks) == (1 << rank), 0.0)


def carleson_intensity(spectrum: VectorSpectrum, max_rank: int | None = None, *,
                       tol: float = DEFAULT_TOL, arc_budget: int | None = None,
                       seed: int = 0, threads: int = 1) -> IntensityResult:
    """Dyadic Carleson intensity ``sup_I lambda_max(mu(Q_I)) / |I|``.

    Parameters
    ----------
    spectrum : VectorSpectrum
    max_rank : int, optional
        Largest arc rank scanned; defaults to ``dim + 2``.
    tol : float
        Relative truncation budget per rank (structured spectra only).
    arc_budget : int, optional
        Arcs evaluated per rank; ranks with at most that many arcs are scanned
        in full.  Defaults to :func:`default_arc_budget`.
    seed : int
        Seed of the sampled arc indices.
    threads : int
        Worker threads over ranks.  Results do not depend on it.

    Returns
    -------
    IntensityResult
    """
    if max_rank is None:
        max_rank = spectrum.dim + 2
    if max_rank < 0:
        raise PreconditionError("max_rank must be >= 0")
    if threads < 1:
        raise PreconditionError("threads must be >= 1")
    budget = default_arc_budget(spectrum.dim) if arc_budget is None else int(arc_budget)
    if budget < 1:
        raise PreconditionError("arc_budget must be >= 1")
    rem = remainder_bound(spectrum, max_rank)
    if len(spectrum) == 0:
        return IntensityResult(0.0, DyadicInterval(0, 0), max_rank, rem)

    view = _structured(spectrum)
    if view is not None:
        def job(r):
            return _scan_rank_structured(view, r, tol, budget, seed)
    else:
        def job(r):
            return _scan_rank_direct(spectrum, r, budget, seed)

    ranks = range(max_rank + 1)
    if threads == 1:
        scans = [job(r) for r in ranks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scans = list(pool.map(job, ranks))

    best = scans[0]
    for s in scans[1:]:
        if s.value > best.value:
            best = s
    witness = DyadicInterval(best.rank, best.index)
    form = gram_matrix(witness, spectrum, tol=tol if view is not None else 0.0)
    lam = largest_eigenvalue(form)
    return IntensityResult(
        value=lam / witness.length,
        witness=witness,
        max_rank=max_rank,
        remainder_bound=rem,
        eigenvalue=lam,
        truncation_bound=max(s.truncation_bound for s in scans),
        exhaustive=all(s.exhaustive for s in scans),
        arcs_scanned=sum(s.arcs_scanned for s in scans),
        per_rank=tuple(scans),
    )


# ----------------------------------------------------------------------


def g_norm_dA1(I: DyadicInterval, profile: WaveletProfile = DEFAULT_PROFILE) -> float:
    """``int_D |g_I|^2 dA_1 = pi sum_{n != 0} |g_I^(n)|^2 / ((|n|+1)(|n|+2))``.

    Only ``|n|`` with ``|n| |I|`` inside the profile support contribute, and
    the coefficients at ``n`` and ``-n`` have equal modulus.
    """
    I = I.require_arc()
    scale = 1 << I.rank
    lo = max(1, math.ceil(SUPPORT_LO * scale))
    hi = math.floor(SUPPORT_HI * scale)
    total = 0.0
    chunk = 1 << 16
    for start in range(lo, hi + 1, chunk):
        n = np.arange(start, min(hi + 1, start + chunk), dtype=np.float64)
        x = n / scale
        amp = 4.0 * math.pi * x * np.asarray(profile(x), dtype=float)
        total += float(np.sum(amp ** 2 / ((n + 1.0) * (n + 2.0))))
    return 2.0 * math.pi * total
