import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carleson_cex import kernels
from carleson_cex._engine import TwoBitSpectrum
from carleson_cex.construction import g_hat_coefficient, phi_spectrum
from carleson_cex.dyadic import DyadicInterval
from carleson_cex.errors import PreconditionError
from carleson_cex.measure import (HermitianForm, arc_candidates, carleson_intensity,
                                  default_arc_budget, g_norm_dA1, gram_matrix,
                                  largest_eigenvalue, remainder_bound)
from carleson_cex.spectrum import SpectrumEntry, VectorSpectrum
from oracles import (faddeev_leverrier, largest_root_by_bisection, square_quadrature)


def _random_hermitian(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A @ A.conj().T


# -- Hermitian forms and eigenvalues ---------------------------------------


def test_hermitian_form_validation():
    with pytest.raises(PreconditionError):
        HermitianForm(2, np.array([[1, 2], [0, 1]]))
    with pytest.raises(PreconditionError):
        HermitianForm(3, np.eye(2))
    H = HermitianForm.from_matrix(np.array([[2, 1j], [-1j, 2]]))
    assert H.trace == 4.0
    assert H.is_psd()
    assert H.quadratic([1, 0]) == 2.0
    with pytest.raises(ValueError):
        H.matrix[0, 0] = 5


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_largest_eigenvalue_against_characteristic_polynomial(n):
    rng = np.random.default_rng(n)
    A = _random_hermitian(rng, n)
    coeffs = faddeev_leverrier(A)
    bound = float(np.sum(np.abs(A)))  # Gershgorin-type bound on |lambda|
    ref = largest_root_by_bisection(coeffs, bound)
    assert largest_eigenvalue(A) == pytest.approx(ref, rel=1e-9)
    assert largest_eigenvalue(HermitianForm.from_matrix(A)) == pytest.approx(ref, rel=1e-9)


def test_largest_eigenvalue_clips_roundoff():
    assert largest_eigenvalue(np.zeros((3, 3))) == 0.0
    assert largest_eigenvalue(-np.eye(2)) == 0.0


# -- Gram matrices -----------------------------------------------------------


def _phi_quadrature_gram(N, arc, nr=96, nx=160):
    spec = phi_spectrum(N)

    def field(r, x, p):
        w = r * np.exp(2j * math.pi * x)
        out = 0
        for e in spec:
            vec = e.dense(N)
            if vec[p] != 0:
                out = out + vec[p] * w ** e.n
        return out

    M = np.zeros((N, N), dtype=complex)
    for p in range(N):
        for q in range(p, N):
            M[p, q] = square_quadrature(arc.left, arc.length,
                                        lambda r, x: field(r, x, p) * np.conj(field(r, x, q)),
                                        nr=nr, nx=nx)
            M[q, p] = np.conj(M[p, q])
    return M


@pytest.mark.parametrize("rank,index", [(0, 0), (1, 1), (2, 2), (3, 5), (5, 21)])
def test_gram_matrix_against_quadrature(rank, index):
    N = 4
    arc = DyadicInterval(rank, index)
    ref = _phi_quadrature_gram(N, arc)
    for method in ("structured", "direct"):
        got = gram_matrix(arc, phi_spectrum(N), method=method).matrix
        assert np.max(np.abs(got - ref)) <= 1e-9 * np.max(np.abs(ref))


@pytest.mark.parametrize("N", [3, 5, 7])
def test_structured_matches_direct_all_arcs(N):
    spec = phi_spectrum(N)
    for rank in range(N + 3):
        for k in arc_candidates(rank, 16):
            arc = DyadicInterval(rank, k)
            a = gram_matrix(arc, spec, method="structured").matrix
            b = gram_matrix(arc, spec, method="direct").matrix
            assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b)), (rank, k)


def test_structured_engine_at_large_rank():
    # entries of generations 127..130 of the N = 134 spectrum; arcs of rank 128
    full = phi_spectrum(134)
    sub = VectorSpectrum.from_entries(134, [e for e in full if e.j in (127, 128, 129, 130)])
    for k in (0, int("01" * 64, 2), (1 << 128) - 1, 12345678901234567890):
        arc = DyadicInterval(128, k)
        a = gram_matrix(arc, sub, method="structured").matrix
        b = gram_matrix(arc, sub, method="direct").matrix
        scale = np.max(np.abs(b))
        assert scale > 0
        assert np.max(np.abs(a - b)) <= 1e-11 * scale


def test_backends_agree():
    if kernels.compiled_backend is None:
        pytest.skip("compiled kernels not built")
    view = TwoBitSpectrum(phi_spectrum(20))
    for rank in (0, 3, 11, 19, 21, 23):
        asm = view.assemble(rank, 1e-9)
        ks = arc_candidates(rank, 12)
        s1, p1 = view.accumulate(asm, ks, backend=kernels.compiled_backend)
        s2, p2 = view.accumulate(asm, ks, backend=kernels.python_backend)
        scale = np.max(np.abs(s2[None] + p2))
        assert np.max(np.abs((s1[None] + p1) - (s2[None] + p2))) <= 1e-13 * scale


def test_truncation_bound_controls_error():
    spec = phi_spectrum(24)
    for rank in (6, 14, 25):
        arc = DyadicInterval(rank, 3)
        exact = gram_matrix(arc, spec, tol=0.0)
        approx = gram_matrix(arc, spec, tol=1e-6)
        err = np.linalg.norm(exact.matrix - approx.matrix, 2)
        assert err <= approx.truncation_bound * (1 + 1e-9) + 1e-15 * np.abs(exact.matrix).max()


@given(theta=st.floats(0, 2 * math.pi), rank=st.integers(0, 8), data=st.data())
def test_gram_matrix_is_phase_invariant_and_psd(theta, rank, data):
    k = data.draw(st.integers(0, (1 << rank) - 1))
    spec = phi_spectrum(5)
    arc = DyadicInterval(rank, k)
    a = gram_matrix(arc, spec)
    b = gram_matrix(arc, spec.scaled(np.exp(1j * theta)))
    assert np.max(np.abs(a.matrix - b.matrix)) <= 1e-12 * np.max(np.abs(a.matrix))
    assert a.is_psd()
    e = np.array(data.draw(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                        allow_infinity=False),
                                    min_size=5, max_size=5)))
    assert a.quadratic(e) >= -1e-10 * a.trace * max(1.0, float(np.vdot(e, e).real))


def test_gram_matrix_direct_for_generic_spectrum():
    entries = [SpectrumEntry(3, np.array([0, 1]), np.array([1.0, 2.0j])),
               SpectrumEntry(5, np.array([1]), np.array([0.5 + 0j]))]
    spec = VectorSpectrum.from_entries(2, entries)
    H = gram_matrix(DyadicInterval(0, 0), spec)
    # on the whole disk different indices are orthogonal
    expected = np.zeros((2, 2), dtype=complex)
    for e in spec:
        v = e.dense(2)
        expected += np.outer(v, v.conj()) * math.pi / ((e.n + 1) * (e.n + 2))
    np.testing.assert_allclose(H.matrix, expected, rtol=1e-14, atol=1e-16)
    with pytest.raises(PreconditionError):
        gram_matrix(DyadicInterval(0, 0), spec, method="structured")


# -- intensity ---------------------------------------------------------------


def test_arc_candidates():
    assert arc_candidates(3, 16) == list(range(8))
    ks = arc_candidates(20, 40, seed=2)
    assert len(ks) == len(set(ks)) == 40
    assert int("0101" * 5, 2) in ks and 0 in ks and (1 << 20) - 1 in ks
    assert ks == arc_candidates(20, 40, seed=2)
    assert default_arc_budget(8) == 256 and default_arc_budget(1024) == 8


def test_intensity_n4_against_quadrature_net_scan():
    """Sup over arcs of rank <= 6 and a dense net of unit vectors, from quadrature."""
    N = 4
    rng = np.random.default_rng(0)
    net = rng.standard_normal((N, 3000)) + 1j * rng.standard_normal((N, 3000))
    net /= np.linalg.norm(net, axis=0)
    best = 0.0
    for rank in range(N + 3):
        for k in range(1 << rank):
            arc = DyadicInterval(rank, k)
            M = _phi_quadrature_gram(N, arc, nr=48, nx=64)
            vals = np.real(np.sum(np.conj(net) * (M @ net), axis=0)) / arc.length
            best = max(best, float(vals.max()))
    res = carleson_intensity(phi_spectrum(N))
    assert res.exhaustive
    assert best <= res.value * (1 + 1e-9)
    assert res.value <= best * 1.05


def test_intensity_record():
    res = carleson_intensity(phi_spectrum(8), 6)
    assert res.max_rank == 6
    assert res.value == pytest.approx(res.eigenvalue / res.witness.length)
    assert res.remainder_bound == pytest.approx(remainder_bound(phi_spectrum(8), 6))
    assert len(res.per_rank) == 7
    assert max(s.value for s in res.per_rank) == pytest.approx(res.value, rel=1e-12)
    d = res.to_dict()
    assert set(d) >= {"value", "witness", "max_rank", "remainder_bound"}


def test_intensity_monotone_in_max_rank():
    spec = phi_spectrum(6)
    prev_value, prev_rem = -1.0, math.inf
    for R in range(0, 10):
        res = carleson_intensity(spec, R)
        assert res.value >= prev_value * (1 - 1e-12)
        assert res.remainder_bound <= prev_rem
        prev_value, prev_rem = res.value, res.remainder_bound


@pytest.mark.parametrize("N", [8, 16])
def test_intensity_witness_rank_positive(N):
    assert carleson_intensity(phi_spectrum(N)).witness.rank >= 1


def test_intensity_threads_do_not_change_result():
    spec = phi_spectrum(12)
    a = carleson_intensity(spec, threads=1)
    b = carleson_intensity(spec, threads=3)
    assert a.value == b.value and a.witness == b.witness


def test_intensity_empty_and_invalid():
    empty = VectorSpectrum(3, ())
    assert carleson_intensity(empty).value == 0.0
    with pytest.raises(PreconditionError):
        carleson_intensity(phi_spectrum(4), -1)
    with pytest.raises(PreconditionError):
        carleson_intensity(phi_spectrum(4), threads=0)


# -- Lemma-1 norm -----------------------------------------------------------


@pytest.mark.parametrize("rank,index", [(0, 0), (1, 0), (2, 3), (3, 5)])
def test_g_norm_against_quadrature(rank, index):
    I = DyadicInterval(rank, index)
    top = math.floor(4 / 3 * 2 ** rank) + 1
    coeffs = [(n, g_hat_coefficient(I, n)) for n in range(-top, top + 1) if n != 0]

    def integrand(r, x):
        w = r * np.exp(2j * math.pi * x)
        g = 0
        for n, c in coeffs:
            g = g + c * (w ** n if n > 0 else np.conj(w) ** (-n))
        return np.abs(g) ** 2

    ref = square_quadrature(0.0, 1.0, integrand, nr=64, nx=96).real
    assert g_norm_dA1(I) == pytest.approx(ref, rel=1e-6)


@given(rank=st.integers(0, 16))
def test_g_norm_positive_and_translation_invariant(rank):
    a = g_norm_dA1(DyadicInterval(rank, 0))
    b = g_norm_dA1(DyadicInterval(rank, (1 << rank) - 1))
    assert a > 0 and a == b
