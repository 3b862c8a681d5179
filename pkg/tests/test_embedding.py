import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carleson_cex.construction import phi_spectrum
from carleson_cex.embedding import (EmbeddingResult, alpha_term, beta_sum, embedding_form_paper,
                                    embedding_form_spectral, generation_sum_reduced,
                                    generation_sum_unreduced, ratio_lower_bound)
from carleson_cex.errors import DomainError
from carleson_cex.wavelet import SMOOTH_PROFILE
from oracles import beta_brute_force_folded, gl_nodes


def test_beta_examples():
    assert beta_sum(0, 1, 1) == 4
    assert beta_sum(1, 1, 1) == 0
    assert beta_sum(2, 1, 1) == 4
    assert beta_sum(4, 1, 2) == 8 * (-1) ** (2 - 1)
    with pytest.raises(DomainError):
        beta_sum(0, 0, 1)


def test_beta_double_sum_example():
    # m = 2, j1 = j2 = 1: all four terms equal one
    centres = [0.25, 0.75]
    total = sum(np.exp(-2j * math.pi * 2 * (c1 - c2)) for c1 in centres for c2 in centres)
    assert abs(total - beta_sum(2, 1, 1)) < 1e-14


@pytest.mark.parametrize("j1", range(1, 7))
@pytest.mark.parametrize("j2", range(1, 7))
def test_beta_exact_against_folded_brute_force(j1, j2):
    for m in range(-256, 257):
        coords = beta_brute_force_folded(m, j1, j2)
        closed = beta_sum(m, j1, j2)
        assert closed.imag == 0
        assert coords == [int(closed.real)] + [0] * (len(coords) - 1), m


@pytest.mark.parametrize("j1,j2", [(1, 1), (2, 3), (3, 3), (4, 2), (5, 6), (6, 6)])
def test_unreduced_generation_sum_matches_reduced(j1, j2):
    N = 6
    a = generation_sum_unreduced(j1, j2, N)
    b = generation_sum_reduced(j1, j2, N)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-12 * max(abs(a), 1.0))


def test_alpha_vanishes_off_support():
    assert alpha_term(-1, 2, 0, 2, 0) == 0.0
    assert alpha_term(100, 2, 0, 2, 0) == 0.0
    assert alpha_term(0, 1, 0, 1, 0) > 0.0


@pytest.mark.parametrize("N", [2, 3, 4, 5, 8, 13, 32, 64])
def test_two_routes_agree(N):
    a = embedding_form_spectral(N)
    b = embedding_form_paper(N)
    assert abs(a - b) <= 1e-9 * max(a, b)


def test_two_routes_agree_smooth_ramp():
    for N in (4, 16):
        a = embedding_form_spectral(N, SMOOTH_PROFILE)
        b = embedding_form_paper(N, SMOOTH_PROFILE)
        assert abs(a - b) <= 1e-9 * max(a, b)


def test_degenerate_profile_gives_zero():
    def zero(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    assert embedding_form_paper(8, zero) == 0.0
    assert embedding_form_spectral(8, zero) == 0.0


def test_embedding_against_polar_quadrature():
    """N = 4: int |<E, phi>|^2 dA_1 on a 512 x 512 polar grid."""
    N = 4
    spec = phi_spectrum(N)
    r, wr = gl_nodes(0.0, 1.0, 512)
    x = np.arange(512) / 512.0
    R, X = np.meshgrid(r, x, indexing="ij")
    w = R * np.exp(2j * math.pi * X)
    inner = np.zeros_like(w)
    for l in range(N):
        phi_l = sum(e.dense(N)[l] * w ** e.n for e in spec)
        inner += w ** (1 << l) * np.conj(phi_l)
    vals = np.abs(inner) ** 2 * (1 - R * R) * 2 * math.pi * R
    ref = float(np.sum(wr[:, None] * vals) / 512.0)
    got = embedding_form_spectral(N)
    assert abs(got - ref) <= 1e-4 * ref


@given(N=st.integers(2, 40))
def test_embedding_positive(N):
    assert embedding_form_spectral(N) > 0


def test_monotone_in_dimension():
    values = [embedding_form_spectral(N) for N in (8, 16, 32, 64, 128, 256)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("N", [1, 257])
def test_dimension_range(N):
    with pytest.raises(DomainError):
        embedding_form_spectral(N)
    with pytest.raises(DomainError):
        embedding_form_paper(N)


def test_ratio_record_is_reproducible():
    a = ratio_lower_bound(8)
    b = ratio_lower_bound(8)
    assert isinstance(a, EmbeddingResult)
    assert a.to_dict() == b.to_dict()
    assert a.relative_gap <= 1e-9
    assert a.ratio_lower_bound == pytest.approx(math.sqrt(a.value_spectral / 8) / a.intensity.value)
