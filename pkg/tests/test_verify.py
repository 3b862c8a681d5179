import math

import numpy as np
import pytest

from carleson_cex.construction import omega_vector
from carleson_cex.dyadic import DyadicInterval
from carleson_cex import verify as verify_module
from carleson_cex.errors import ExperimentAborted, PreconditionError
from carleson_cex.verify import (CheckReport, GrowthReport, GrowthRow, Thresholds,
                                 growth_checks, growth_experiment, l2_rank_matrix,
                                 verify_analysis_lemmas, verify_construction_lemmas)
from carleson_cex.wavelet import WaveletProfile


def test_check_report_verdict():
    assert CheckReport("x", {}, 1.0, 1.0).passed
    assert CheckReport("x", {}, 1.5, 1.0).verdict == "fail"
    assert CheckReport("x", {}, 0.5, 1.0).to_dict()["verdict"] == "pass"


def test_thresholds_from_mapping():
    th = Thresholds.from_mapping({"L2": 3})
    assert th.L2 == 3.0 and th.L1 == 50.0
    with pytest.raises(PreconditionError):
        Thresholds.from_mapping({"L9": 1})


@pytest.mark.parametrize("N,rank,k", [(6, 0, 0), (6, 2, 1), (7, 3, 5), (5, 5, 9), (9, 1, 1)])
def test_l2_matrix_against_interval_sum(N, rank, k):
    T = l2_rank_matrix(N, rank)
    D = np.array([np.exp(2j * np.pi * ((k << q) % (1 << rank)) / 2 ** rank) for q in range(N)])
    TK = D[:, None] * T * np.conj(D)[None, :]
    B = np.zeros((N, N), complex)
    for j in range(max(rank, 1), N + 1):
        for i in range(k << (j - rank), (k + 1) << (j - rank)):
            w = omega_vector(DyadicInterval(j, i), N)
            B += 2.0 ** -j * np.outer(w, w.conj())
    assert np.max(np.abs(TK - B)) <= 1e-13


def test_l2_whole_circle_first_basis_vector():
    N = 8
    brute = 0.0
    for j in range(1, N + 1):
        for k in range(1 << j):
            w = omega_vector(DyadicInterval(j, k), N)
            brute += abs(w[0]) ** 2 * 2.0 ** -j
    assert l2_rank_matrix(N, 0)[0, 0].real == pytest.approx(brute, rel=1e-13)
    reports = verify_construction_lemmas(N, 4)
    l2 = reports[1]
    # the first net vector is e_0 and K = T is the only arc of rank 0
    assert l2.details[0]["value"] >= brute * (1 - 1e-12)


@pytest.mark.parametrize("N", [8, 32])
def test_construction_suite(N):
    l1, l2, om = verify_construction_lemmas(N, 12, seed=1)
    assert (l1.name, l2.name, om.name) == ("L1", "L2", "omega")
    assert om.constant <= 1.0 and om.passed
    assert l2.passed
    assert l2.constant <= l2.extras["operator_norm"] * (1 + 1e-12)
    ratios = {row["rank"]: row["ratio"] for row in l1.details}
    assert abs(ratios[12] - ratios[6]) <= 0.1 * ratios[6]
    assert math.isfinite(l1.constant)


def test_construction_suite_deterministic():
    a = [r.to_dict() for r in verify_construction_lemmas(16, 8, seed=5)]
    b = [r.to_dict() for r in verify_construction_lemmas(16, 8, seed=5, threads=3)]
    assert a == b


def test_construction_preconditions():
    with pytest.raises(PreconditionError):
        verify_construction_lemmas(7, 4)
    with pytest.raises(PreconditionError):
        verify_construction_lemmas(8, 15)


def test_analysis_suite_small():
    l3, l4, l5 = verify_analysis_lemmas(3, 2)
    assert l4.passed and l4.constant <= 1e-6
    assert l5.passed
    diag = [r for r in l4.details if r["I"] == r["J"]]
    assert max(r["error"] for r in diag) <= 1e-8
    for row in l3.details:
        assert row["sum"] >= row["previous"] >= 0


def test_analysis_sums_nondecreasing():
    small = {str(r["K"]): r["sum"] for r in verify_analysis_lemmas(3, 2)[0].details}
    more_rd = {str(r["K"]): r["sum"] for r in verify_analysis_lemmas(3, 4)[0].details}
    more_rank = {str(r["K"]): r["sum"] for r in verify_analysis_lemmas(4, 2)[0].details}
    for key, value in small.items():
        assert more_rd[key] >= value * (1 - 1e-12)
        assert more_rank[key] >= value * (1 - 1e-12)


def test_analysis_excludes_diagonal_inside_k():
    """With the whole circle as the only arc, the single pair is I = J = K."""
    l3 = verify_module._check_l3(0, 0, 0.05, WaveletProfile())
    whole = next(r for r in l3.details if r["K"] == {"j": 0, "k": 0})
    assert whole["sum"] == 0.0
    # arcs of rank 1 are not inside a rank 1 K of the other half, so their
    # diagonal terms count there
    l3 = verify_analysis_lemmas(1, 0)[0]
    half = next(r for r in l3.details if r["K"] == {"j": 1, "k": 0})
    assert half["sum"] > 0.0


def test_analysis_preconditions():
    with pytest.raises(PreconditionError):
        verify_analysis_lemmas(7, 2)
    with pytest.raises(PreconditionError):
        verify_analysis_lemmas(3, 9)


def _row(N, intensity, value, ratio):
    return GrowthRow(N, intensity, value, value, ratio, ratio / math.sqrt(math.log(N)),
                     DyadicInterval(1, 0), 0.0, 0.0)


def test_growth_report_single_row_csv():
    report = growth_experiment([8])
    assert report.slope is None
    text = report.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "N,intensity,value_spectral,value_paper,ratio,ratio_over_sqrtlog"
    assert len(lines) == 2 and lines[1].startswith("8,")
    assert report.value_band == report.intensity_band == report.ratio_band == 1.0


def test_growth_bands_and_checks():
    rows = (_row(8, 100.0, 1000.0, 0.1), _row(16, 150.0, 3000.0, 0.12))
    report = GrowthReport(rows)
    assert report.intensity_band == pytest.approx(1.5)
    assert report.slope > 0
    checks = growth_checks(report)
    assert [c.name for c in checks] == ["growth_value_band", "growth_intensity_band",
                                        "growth_ratio_band"]
    assert checks[1].passed


def test_growth_preconditions_and_abort():
    with pytest.raises(PreconditionError):
        growth_experiment([4])
    with pytest.raises(PreconditionError):
        growth_experiment([])
    with pytest.raises(ExperimentAborted) as info:
        growth_experiment([8, 16], arc_budget=0)
    assert isinstance(info.value.partial, GrowthReport)
