"""Numerical checks of the construction and of the analytic estimates.

Every check returns a :class:`CheckReport` carrying the witnessed constant,
the threshold it is compared with and a per-case table.  A report passes
exactly when ``constant <= threshold``.  All randomness is drawn from
explicit seeds, so a report is a function of its parameters.

Checks
------
``L1``
    ``int |g_I|^2 dA_1 / |I|`` over ranks.
``L2``
    ``sum_{I in D(K)} |<omega_I, e>|^2 |I| / (|K| ||e||^2)`` over arcs ``K``
    and a net of unit vectors.
``omega``
    ``||omega_I||^2 * 6 ln N / pi^2`` over ranks.
``L3``
    Saturation of the truncated off-diagonal sums
    ``sum |int_{Q_K} g_I conj(g_J) dA_1| / |K|``; the constant is the last
    increment relative to the total.
``L4``
    ``|<f_I, f_J> - |I| delta_IJ| / |I|`` for the weighted half-plane pairing.
``L5``
    Ratio of the largest to the median value of the localization quantity
    of Poisson extensions on an ``(x, y)`` grid.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .construction import coeff_a_vector, g_hat_coefficient, omega_vector
from .disk import (CarlesonSquare, angular_factor, eval_f_poisson, halfplane_lp_pairing,
                   radial_factor)
from .dyadic import DyadicInterval, arcs_of_rank, relative_distance
from .embedding import MAX_EMBEDDING_DIM, ratio_lower_bound
from .errors import ExperimentAborted, PreconditionError
from .measure import arc_candidates, g_norm_dA1
from .wavelet import DEFAULT_PROFILE, SMOOTH_PROFILE, SUPPORT_HI, WaveletProfile

__all__ = [
    "Thresholds",
    "CheckReport",
    "verify_construction_lemmas",
    "verify_analysis_lemmas",
    "GrowthRow",
    "GrowthReport",
    "growth_experiment",
    "growth_checks",
    "l2_rank_matrix",
]

#: Largest rank accepted by :func:`verify_construction_lemmas`.
MAX_CONSTRUCTION_RANK = 14
#: Largest rank and relative distance accepted by :func:`verify_analysis_lemmas`.
MAX_ANALYSIS_RANK = 6
MAX_ANALYSIS_RD = 8
#: Arcs ``K`` per rank evaluated by the L2 check beyond exhaustive ranks.
L2_ARCS_PER_RANK = 64
#: Size of the deterministic net and of the random sample in the L2 check.
L2_NET_SIZE = 64
L2_RANDOM_SIZE = 64
#: Largest rank of the arcs ``K`` in the L3 check.
L3_OUTER_RANK = 3
#: Ranges of the L4 check.
L4_MAX_RANK = 5
L4_MAX_RD = 4

CSV_COLUMNS = ("N", "intensity", "value_spectral", "value_paper", "ratio", "ratio_over_sqrtlog")


@dataclass(frozen=True)
class Thresholds:
    """Pass thresholds of every check.

    The defaults are the documented gates; a config file may override any
    of them by name.
    """

    L1: float = 50.0
    L2: float = 10.0
    omega: float = 1.0
    L3_saturation: float = 0.05
    L4: float = 1e-6
    L5_peak_over_median: float = 10.0
    growth_value_band: float = 1.5
    growth_intensity_band: float = 2.0
    growth_ratio_band: float = 1.6

    @classmethod
    def from_mapping(cls, values) -> "Thresholds":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(values) - known)
        if unknown:
            raise PreconditionError(f"unknown threshold names {unknown}; expected {sorted(known)}")
        return cls(**{k: float(v) for k, v in values.items()})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one numerical check.

    Attributes
    ----------
    name : str
    parameters : dict
    constant : float
        Witnessed constant.
    threshold : float
    details : list of dict
        Per-case table.
    extras : dict
        Further scalar diagnostics.
    """

    name: str
    parameters: dict
    constant: float
    threshold: float
    details: list = field(default_factory=list, repr=False)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.constant <= self.threshold)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "parameters": dict(self.parameters),
            "constant": self.constant,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "extras": dict(self.extras),
            "details": list(self.details),
        }


def _run_all(jobs, threads: int):
    if threads <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


# ----------------------------------------------------------------------
# construction checks


def _check_l1(max_rank: int, threshold: float, profile: WaveletProfile) -> CheckReport:
    rows = []
    for j in range(max_rank + 1):
        I = DyadicInterval(j, 0)
        rows.append({"rank": j, "ratio": g_norm_dA1(I, profile) / I.length})
    constant = max(r["ratio"] for r in rows)
    return CheckReport("L1", {"max_rank": max_rank, "ramp": profile.ramp.value},
                       constant, threshold, rows)


def _sinpi_mod2(x: np.ndarray) -> np.ndarray:
    s = np.sin(np.pi * x)
    return np.where(x == np.rint(x), 0.0, s)


def _bit_fraction(bits: np.ndarray, rank: int) -> np.ndarray:
    # 2^(b - rank) reduced modulo 2
    return np.where(bits > rank, 0.0, np.where(bits == rank, 1.0, np.ldexp(1.0, bits - rank)))


def l2_rank_matrix(N: int, rank: int) -> np.ndarray:
    """``T = sum_{I in D(K), 1 <= rk(I) <= N} |I| omega_I omega_I^*`` for ``K = D(rank, 0)``.

    For an arc ``K`` of the same rank and index ``k`` the matrix is
    ``D T D^*`` with ``D = diag(exp(2 pi i 2^l k / 2^rank))``.  The sum over
    the ``2^(j - rank)`` arcs of rank ``j`` inside ``K`` is geometric and is
    evaluated in closed form.
    """
    a = coeff_a_vector(N)
    l = np.arange(N)
    L1, L2 = np.meshgrid(l, l, indexing="ij")
    xr = _bit_fraction(L1, rank) - _bit_fraction(L2, rank)
    head = np.exp(1j * np.pi * xr) * _sinpi_mod2(xr)
    T = np.zeros((N, N), dtype=complex)
    for j in range(max(rank, 1), N + 1):
        m = j  # coordinates l < j carry a_{j-l}
        xj = _bit_fraction(L1[:m, :m], j) - _bit_fraction(L2[:m, :m], j)
        with np.errstate(divide="ignore", invalid="ignore"):
            geo = head[:m, :m] / _sinpi_mod2(xj)
        np.fill_diagonal(geo, math.ldexp(1.0, j - rank))
        w = a[j - l[:m]]
        T[:m, :m] += math.ldexp(1.0, -j) * np.outer(w, w) * geo
    return T


def _l2_net(N: int, seed: int) -> np.ndarray:
    """Unit vectors as columns: a deterministic net followed by random vectors."""
    cols = []
    for p in range(min(N, L2_NET_SIZE // 2)):
        v = np.zeros(N, dtype=complex)
        v[p] = 1.0
        cols.append(v)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    p = np.arange(N)
    m = 0
    while len(cols) < L2_NET_SIZE:
        # flat vectors with Weyl-sequence phases, starting with the constant one
        phase = np.mod(m * golden * (p + 1) * (p + 2) / 2.0, 1.0)
        cols.append(np.exp(2j * np.pi * phase) / math.sqrt(N))
        m += 1
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((N, L2_RANDOM_SIZE)) + 1j * rng.standard_normal((N, L2_RANDOM_SIZE))
    z /= np.linalg.norm(z, axis=0)
    return np.concatenate([np.stack(cols, axis=1), z], axis=1)


def _check_l2(N: int, max_rank: int, seed: int, threshold: float) -> CheckReport:
    net = _l2_net(N, seed)
    top = min(max_rank, N)
    rows = []
    for r in range(top + 1):
        T = l2_rank_matrix(N, r)
        scale = math.ldexp(1.0, r)  # 1 / |K|
        best, best_k, best_e = -math.inf, 0, 0
        for k in arc_candidates(r, L2_ARCS_PER_RANK, seed):
            D = np.array([np.exp(2j * np.pi * math.ldexp(float((k << q) % (1 << r)), -r))
                          for q in range(N)]) if r > 0 else np.ones(N)
            E = np.conj(D)[:, None] * net
            vals = np.real(np.sum(np.conj(E) * (T @ E), axis=0)) * scale
            idx = int(np.argmax(vals))
            if vals[idx] > best:
                best, best_k, best_e = float(vals[idx]), k, idx
        sup = float(np.linalg.eigvalsh(T)[-1]) * scale
        rows.append({"rank": r, "value": best, "arc_index": best_k, "net_vector": best_e,
                     "operator_norm": sup})
    constant = max(r["value"] for r in rows)
    return CheckReport("L2", {"N": N, "max_rank": top, "seed": seed,
                              "net_size": L2_NET_SIZE, "random_size": L2_RANDOM_SIZE},
                       constant, threshold, rows,
                       {"operator_norm": max(r["operator_norm"] for r in rows)})


def _check_omega(N: int, seed: int, threshold: float) -> CheckReport:
    rng = np.random.default_rng(seed)
    factor = 6.0 * math.log(N) / math.pi ** 2
    rows = []
    for j in range(N + 1):
        k = int(rng.integers(0, 1 << min(j, 62))) if j > 0 else 0
        v = omega_vector(DyadicInterval(j, k), N)
        rows.append({"rank": j, "index": str(k), "value": float(np.vdot(v, v).real) * factor})
    constant = max(r["value"] for r in rows)
    return CheckReport("omega", {"N": N, "seed": seed}, constant, threshold, rows)


def verify_construction_lemmas(N: int, max_rank: int = 12, *, seed: int = 0,
                               thresholds: Thresholds | None = None,
                               profile: WaveletProfile = DEFAULT_PROFILE,
                               threads: int = 1) -> list[CheckReport]:
    """Run the L1, L2 and omega checks.

    Parameters
    ----------
    N : int
        Dimension, ``N >= 8``.
    max_rank : int
        Largest rank, at most 14.
    seed : int
        Seed of the random unit vectors and sampled arcs.
    thresholds : Thresholds, optional
    profile : WaveletProfile
        Profile of the L1 check.
    threads : int
        The three checks run concurrently when ``threads > 1``.

    Returns
    -------
    list of CheckReport
        ``[L1, L2, omega]``.
    """
    if N < 8:
        raise PreconditionError(f"construction checks need N >= 8, got {N}")
    if not 0 <= max_rank <= MAX_CONSTRUCTION_RANK:
        raise PreconditionError(f"max_rank must lie in [0, {MAX_CONSTRUCTION_RANK}], got {max_rank}")
    th = thresholds or Thresholds()
    jobs = [lambda: _check_l1(max_rank, th.L1, profile),
            lambda: _check_l2(N, max_rank, seed, th.L2),
            lambda: _check_omega(N, seed, th.omega)]
    return _run_all(jobs, threads)


# ----------------------------------------------------------------------
# analysis checks


def _periodic_rd(I: DyadicInterval, J: DyadicInterval) -> int:
    """Relative distance on the circle, the smaller arc measured against the larger."""
    if I.rank < J.rank:
        I, J = J, I
    d = relative_distance(I, J)
    return min(d, (1 << J.rank) - d)


def _l3_sums(K: DyadicInterval, ranks, coef, freqs, keep, max_rank) -> tuple[float, float]:
    """Sums of ``|int_{Q_K} g_I conj(g_J) dA_1|`` over the pairs in ``keep``.

    Returns the sum over all kept pairs and the sum restricted to arcs of
    rank ``< max_rank``.
    """
    Q = CarlesonSquare(K)
    fa = np.abs(freqs)
    pos = freqs > 0
    # exponents (a, b) of w^a conj(w)^b in b_f conj(b_f')
    A = np.where(pos[:, None] & pos[None, :], fa[:, None],
                 np.where(~pos[:, None] & ~pos[None, :], fa[None, :],
                          np.where(pos[:, None], fa[:, None] + fa[None, :], 0)))
    B = np.where(pos[:, None] & pos[None, :], fa[None, :],
                 np.where(~pos[:, None] & ~pos[None, :], fa[:, None],
                          np.where(pos[:, None], 0, fa[:, None] + fa[None, :])))
    # the moments factor into an angular part in a - b and a radial part in a + b
    dmax = int(np.max(np.abs(A - B)))
    smax = int(np.max(A + B))
    ang = {d: angular_factor(d, K) for d in range(-dmax, dmax + 1)}
    rad = [radial_factor(float(s + 2), Q.ell) for s in range(smax + 1)]
    ang_t = np.array([ang[d] for d in range(-dmax, dmax + 1)])
    G = ang_t[(A - B) + dmax] * np.asarray(rad)[A + B]
    M = np.abs(coef @ G @ coef.conj().T)
    total = float(np.sum(M[keep]))
    inner = keep & (ranks[:, None] < max_rank) & (ranks[None, :] < max_rank)
    return total, float(np.sum(M[inner]))


def _check_l3(max_rank: int, max_rd: int, threshold: float, profile: WaveletProfile) -> CheckReport:
    arcs = [I for j in range(max_rank + 1) for I in arcs_of_rank(j)]
    top = math.floor(SUPPORT_HI * (1 << max_rank))
    freqs = np.array([n for n in range(-top, top + 1) if n != 0])
    coef = np.array([[g_hat_coefficient(I, int(n), profile) for n in freqs] for I in arcs])
    ranks = np.array([I.rank for I in arcs])
    within = np.array([[_periodic_rd(I, J) <= max_rd for J in arcs] for I in arcs])
    rows = []
    for r in range(L3_OUTER_RANK + 1):
        for K in arcs_of_rank(r):
            # the diagonal terms I = J inside K are not part of the sum
            keep = within & ~np.diag([K.contains(I) for I in arcs])
            total, previous = _l3_sums(K, ranks, coef, freqs, keep, max_rank)
            increment = total - previous
            rows.append({"K": K.to_dict(), "sum": total / K.length,
                         "previous": previous / K.length,
                         "increment": increment / K.length,
                         "relative_increment": increment / total if total > 0 else 0.0})
    constant = max(r["relative_increment"] for r in rows)
    return CheckReport("L3", {"max_rank": max_rank, "max_rd": max_rd,
                              "outer_rank": L3_OUTER_RANK, "ramp": profile.ramp.value},
                       constant, threshold, rows,
                       {"largest_sum": max(r["sum"] for r in rows)})


def _check_l4(threshold: float, profile: WaveletProfile) -> CheckReport:
    arcs = [I for j in range(L4_MAX_RANK + 1) for I in arcs_of_rank(j)]
    rows = []
    for I in arcs:
        for J in arcs:
            if I.rank < J.rank or relative_distance(I, J) > L4_MAX_RD:
                continue
            val = halfplane_lp_pairing(I, J, profile)
            target = I.length if I == J else 0.0
            rows.append({"I": I.to_dict(), "J": J.to_dict(),
                         "pairing": val, "error": abs(val - target) / I.length})
    constant = max(r["error"] for r in rows)
    return CheckReport("L4", {"max_rank": L4_MAX_RANK, "max_rd": L4_MAX_RD,
                              "ramp": profile.ramp.value},
                       constant, threshold, rows)


def _check_l5(max_rank: int, threshold: float) -> CheckReport:
    X = np.linspace(-4.0, 4.0, 33)
    Y = np.geomspace(0.02, 4.0, 24)
    rows = []
    for j in range(min(max_rank, 3) + 1):
        I = DyadicInterval(j, 0)
        length = I.length
        x = I.center + length * X[:, None]
        y = length * Y[None, :]
        f = eval_f_poisson(I, x, y, SMOOTH_PROFILE)
        q = (np.abs((1.0 + X[:, None] ** 2) * f) * math.sqrt(length) * np.sqrt(y)
             * np.exp(2.0 * np.pi * Y[None, :] / 3.0) / (1.0 + Y[None, :] ** 2))
        peak = float(q.max())
        median = float(np.median(q))
        rows.append({"rank": j, "peak": peak, "median": median,
                     "peak_over_median": peak / median if median > 0 else math.inf})
    constant = max(r["peak_over_median"] for r in rows)
    return CheckReport("L5", {"max_rank": min(max_rank, 3), "ramp": SMOOTH_PROFILE.ramp.value,
                              "x_grid": [float(X[0]), float(X[-1]), len(X)],
                              "y_grid": [float(Y[0]), float(Y[-1]), len(Y)]},
                       constant, threshold, rows,
                       {"peak": max(r["peak"] for r in rows)})


def verify_analysis_lemmas(max_rank: int = 6, max_rd: int = 8, *,
                           thresholds: Thresholds | None = None,
                           profile: WaveletProfile = DEFAULT_PROFILE,
                           threads: int = 1) -> list[CheckReport]:
    """Run the L3, L4 and L5 checks.

    Parameters
    ----------
    max_rank : int
        Largest rank of the arcs ``I, J`` in the L3 sums, between 1 and 6.
    max_rd : int
        Largest relative distance in the L3 sums, at most 8.
    thresholds : Thresholds, optional
    profile : WaveletProfile
        Profile of the L3 and L4 checks; L5 always uses the smooth ramp.
    threads : int

    Returns
    -------
    list of CheckReport
        ``[L3, L4, L5]``.
    """
    if not 1 <= max_rank <= MAX_ANALYSIS_RANK:
        raise PreconditionError(f"max_rank must lie in [1, {MAX_ANALYSIS_RANK}], got {max_rank}")
    if not 0 <= max_rd <= MAX_ANALYSIS_RD:
        raise PreconditionError(f"max_rd must lie in [0, {MAX_ANALYSIS_RD}], got {max_rd}")
    th = thresholds or Thresholds()
    jobs = [lambda: _check_l3(max_rank, max_rd, th.L3_saturation, profile),
            lambda: _check_l4(th.L4, profile),
            lambda: _check_l5(max_rank, th.L5_peak_over_median)]
    return _run_all(jobs, threads)


# ----------------------------------------------------------------------
# growth experiment


@dataclass(frozen=True)
class GrowthRow:
    """One dimension of the growth experiment."""

    N: int
    intensity: float
    value_spectral: float
    value_paper: float
    ratio: float
    ratio_over_sqrtlog: float
    witness: DyadicInterval
    remainder_bound: float
    relative_gap: float

    def csv_row(self) -> list[str]:
        return [str(self.N)] + [repr(float(v)) for v in
                                (self.intensity, self.value_spectral, self.value_paper,
                                 self.ratio, self.ratio_over_sqrtlog)]

    def to_dict(self) -> dict:
        return {"N": self.N, "intensity": self.intensity, "value_spectral": self.value_spectral,
                "value_paper": self.value_paper, "ratio": self.ratio,
                "ratio_over_sqrtlog": self.ratio_over_sqrtlog,
                "witness": self.witness.to_dict(), "remainder_bound": self.remainder_bound,
                "relative_gap": self.relative_gap}


def _band(values) -> float:
    values = [float(v) for v in values]
    if not values:
        return math.nan
    lo = min(values)
    return max(values) / lo if lo > 0 else math.inf


@dataclass(frozen=True)
class GrowthReport:
    """Table of the growth experiment with its fitted diagnostics.

    Attributes
    ----------
    rows : tuple of GrowthRow
    slope : float or None
        Least-squares slope of ``value_spectral / N`` against ``ln N``;
        ``None`` with fewer than two rows.
    value_band, intensity_band, ratio_band : float
        ``max / min`` of ``value_spectral / (N ln N)``, of the intensity and
        of ``ratio / sqrt(ln N)``.
    """

    rows: tuple

    @property
    def slope(self) -> float | None:
        if len(self.rows) < 2:
            return None
        x = np.log([r.N for r in self.rows])
        y = np.array([r.value_spectral / r.N for r in self.rows])
        return float(np.polyfit(x, y, 1)[0])

    @property
    def value_band(self) -> float:
        return _band(r.value_spectral / (r.N * math.log(r.N)) for r in self.rows)

    @property
    def intensity_band(self) -> float:
        return _band(r.intensity for r in self.rows)

    @property
    def ratio_band(self) -> float:
        return _band(r.ratio_over_sqrtlog for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow(r.csv_row())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "slope": self.slope,
                "value_band": self.value_band, "intensity_band": self.intensity_band,
                "ratio_band": self.ratio_band}


def growth_experiment(dims, max_rank: int | None = None, *,
                      profile: WaveletProfile = DEFAULT_PROFILE,
                      on_row=None, **intensity_options) -> GrowthReport:
    """Embedding ratio across dimensions.

    Parameters
    ----------
    dims : iterable of int
        Each in ``[8, 256]``.
    max_rank : int, optional
        Passed to :func:`ratio_lower_bound`.
    profile : WaveletProfile
    on_row : callable, optional
        Called with each :class:`GrowthRow` as soon as it is computed.
    **intensity_options
        ``tol``, ``arc_budget``, ``seed``, ``threads``.

    Raises
    ------
    ExperimentAborted
        If a dimension fails; its ``partial`` attribute holds the rows
        computed so far as a :class:`GrowthReport`.
    """
    dims = [int(N) for N in dims]
    if not dims:
        raise PreconditionError("growth_experiment needs at least one dimension")
    for N in dims:
        if not 8 <= N <= MAX_EMBEDDING_DIM:
            raise PreconditionError(f"growth dimensions must lie in [8, {MAX_EMBEDDING_DIM}], got {N}")
    rows = []
    for N in dims:
        try:
            res = ratio_lower_bound(N, max_rank, profile=profile, **intensity_options)
        except Exception as exc:
            raise ExperimentAborted(f"growth experiment failed at N={N}: {exc}",
                                    GrowthReport(tuple(rows))) from exc
        row = GrowthRow(N, res.intensity.value, res.value_spectral, res.value_paper,
                        res.ratio_lower_bound, res.ratio_lower_bound / math.sqrt(math.log(N)),
                        res.intensity.witness, res.intensity.remainder_bound, res.relative_gap)
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return GrowthReport(tuple(rows))


def growth_checks(report: GrowthReport, thresholds: Thresholds | None = None) -> list[CheckReport]:
    """Band gates of a growth table as three reports."""
    th = thresholds or Thresholds()
    params = {"dims": [r.N for r in report.rows]}
    table = [r.to_dict() for r in report.rows]
    return [
        CheckReport("growth_value_band", params, report.value_band, th.growth_value_band, table,
                    {"slope": report.slope}),
        CheckReport("growth_intensity_band", params, report.intensity_band,
                    th.growth_intensity_band, table),
        CheckReport("growth_ratio_band", params, report.ratio_band, th.growth_ratio_band, table),
    ]
