import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carleson_cex import construction
from carleson_cex.construction import (coeff_a, coeff_a_vector, g_hat_coefficient, omega_vector,
                                       phi_spectrum, phi_support_size)
from carleson_cex.dyadic import DyadicInterval
from carleson_cex.errors import DomainError
from carleson_cex.spectrum import VectorSpectrum
from carleson_cex.wavelet import DEFAULT_PROFILE, SMOOTH_PROFILE
from oracles import phi_brute_force


def test_coefficients():
    assert coeff_a(1, 8) == pytest.approx(1.0 / math.sqrt(math.log(8)))
    assert coeff_a(4, 16) == pytest.approx(0.25 / math.sqrt(math.log(16)))
    a = coeff_a_vector(10)
    assert a[0] == 0.0 and a[3] == pytest.approx(coeff_a(3, 10))
    with pytest.raises(DomainError):
        coeff_a(0, 8)
    with pytest.raises(DomainError):
        coeff_a(9, 8)
    with pytest.raises(DomainError):
        coeff_a_vector(1)


def test_omega_vector_example():
    v = omega_vector(DyadicInterval(1, 0), 16)
    assert v[0] == pytest.approx(1j / math.sqrt(math.log(16)))
    assert np.all(v[1:] == 0)
    assert np.all(omega_vector(DyadicInterval(0, 0), 16) == 0)
    assert np.all(omega_vector(DyadicInterval(17, 3), 16) == 0)


@given(N=st.integers(2, 40), data=st.data())
def test_omega_norm(N, data):
    j = data.draw(st.integers(1, N))
    k = data.draw(st.integers(0, (1 << j) - 1))
    v = omega_vector(DyadicInterval(j, k), N)
    expected = sum(1.0 / (m * m) for m in range(1, j + 1)) / math.log(N)
    assert np.vdot(v, v).real == pytest.approx(expected, rel=1e-13)
    assert np.vdot(v, v).real * 6.0 * math.log(N) / math.pi ** 2 < 1.0


@given(j=st.integers(0, 40), n=st.integers(-(1 << 42), 1 << 42).filter(lambda n: n != 0))
def test_g_hat_support_and_modulus(j, n):
    I = DyadicInterval(j, 0)
    c = g_hat_coefficient(I, n)
    x = abs(n) / 2.0 ** j
    assert abs(c) == pytest.approx(4 * math.pi * x * DEFAULT_PROFILE(x), rel=1e-14, abs=1e-300)
    assert abs(c) == abs(g_hat_coefficient(I, -n))
    if not 1 / 3 < x < 4 / 3:
        assert c == 0


def test_g_hat_rejects_zero():
    with pytest.raises(DomainError):
        g_hat_coefficient(DyadicInterval(2, 1), 0)


@pytest.mark.parametrize("profile", [DEFAULT_PROFILE, SMOOTH_PROFILE])
@pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
def test_phi_spectrum_matches_interval_sum(N, profile):
    n_max = (4 << N) // 3 + 2
    dense = phi_brute_force(N, profile, n_max)
    spec = phi_spectrum(N, profile)
    scale = np.max(np.abs(dense))
    for n in range(1, n_max + 1):
        expected = dense[n]
        got = spec[n] if n in spec else np.zeros(N)
        assert np.max(np.abs(got - expected)) <= 1e-12 * scale, n


def test_phi_support_closed_form_n4():
    assert sorted(phi_spectrum(4).support()) == [1, 2, 4, 5, 8, 9, 10, 17, 18, 20]


@pytest.mark.parametrize("N", [2, 3, 7, 16, 33, 100])
def test_support_count(N):
    spec = phi_spectrum(N)
    assert len(spec) == phi_support_size(N) == N + N * (N - 1) // 2
    assert spec.single_coordinate


def test_phi_spectrum_entry_values():
    N = 8
    spec = phi_spectrum(N)
    a1 = 1.0 / math.sqrt(math.log(N))
    half = DEFAULT_PROFILE(0.5)
    np.testing.assert_allclose(spec[1 << 4][4], 2 * math.pi * half * a1 * 32, rtol=1e-15)
    n = (1 << 6) + (1 << 2)
    expected = -4 * math.pi * n * DEFAULT_PROFILE(1 + 2.0 ** -4) / (4 * math.sqrt(math.log(N)))
    np.testing.assert_allclose(spec[n][2], expected, rtol=1e-14)


def test_large_indices_exact():
    spec = phi_spectrum(300)
    assert spec.max_index == (1 << 300) + (1 << 298)
    doc = spec.to_dict()
    assert doc["entries"][-1]["n"] == str((1 << 300) + (1 << 298))


def test_spectrum_round_trip():
    spec = phi_spectrum(6)
    again = VectorSpectrum.from_dict(spec.to_dict())
    assert again.support() == spec.support()
    for n in spec.support():
        np.testing.assert_array_equal(again[n], spec[n])


def test_test_function_E():
    E = construction.test_spectrum_E(5)
    assert E.support() == [1, 2, 4, 8, 16]
    assert E.h2_norm_squared() == pytest.approx(5.0)
