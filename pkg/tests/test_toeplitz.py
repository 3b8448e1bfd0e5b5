import math

import numpy as np
import pytest

from singlecopy.errors import ModelError
from singlecopy.model import build_model, classify_criticality
from singlecopy.toeplitz import (
    block_spectrum,
    build_T,
    build_gamma,
    coefficient_table,
    fourier_coefficient,
    spectrum_from_singular_values,
    _fourier_pair,
)

XX2 = build_model("xx", a=2)
ISING = build_model("ising")
XY = build_model("xy", a=2, gamma=0.5)
CONST = build_model("custom", A=(1,))


def test_xx_closed_form_values():
    # single-band sign symbol: t_0 = 2 k_F / pi - 1, t_l = 2 sin(k_F l)/(pi l)
    k_f = math.acos(0.5)
    assert fourier_coefficient(XX2, 0) == pytest.approx(2 * k_f / math.pi - 1, abs=1e-12)
    assert fourier_coefficient(XX2, 0) == pytest.approx(-1 / 3, abs=1e-12)
    assert fourier_coefficient(XX2, 1) == pytest.approx(2 * math.sin(k_f) / math.pi, abs=1e-12)
    assert fourier_coefficient(XX2, 7) == pytest.approx(2 * math.sin(7 * k_f) / (7 * math.pi), abs=1e-12)


def test_constant_symbol_coefficients():
    assert fourier_coefficient(CONST, 0) == 1.0
    assert fourier_coefficient(CONST, 3) == 0.0
    assert np.allclose(build_T(CONST, 3), np.eye(3))


def test_gapped_symbol_coefficients_decay():
    tab = coefficient_table(XY, 64)
    assert abs(tab.coeff(60)) < 1e-6  # smooth symbol: fast decay
    assert abs(tab.coeff(0)) <= 1.0


@pytest.mark.parametrize("a", [1.5, 2.0, 4.0])
def test_quadrature_matches_closed_form(a):
    model = build_model("xx", a=a)
    prof = classify_criticality(model)
    cuts = sorted(prof.fermi_points)
    tab = coefficient_table(model, 257)
    assert tab.method == "closed_form"
    for l in (0, 1, 2, 3, 8, 33, 100, 256):
        tp, tm = _fourier_pair(model, l, 1e-12, cuts)
        assert tp == pytest.approx(tab.coeff(l), abs=1e-10)
        assert tm == pytest.approx(tab.coeff(-l), abs=1e-10)


def test_coefficients_are_real_and_symmetric_for_isotropic():
    tab = coefficient_table(XX2, 32)
    for l in range(32):
        assert tab.coeff(l) == pytest.approx(tab.coeff(-l), abs=1e-12)


def test_anisotropic_coefficients_are_asymmetric():
    tab = coefficient_table(ISING, 16)
    asym = max(abs(tab.coeff(l) - tab.coeff(-l)) for l in range(1, 16))
    assert asym > 1e-3


def test_build_T_structure():
    tab = coefficient_table(ISING, 6)
    T = build_T(ISING, 6, table=tab)
    for i in range(6):
        for j in range(6):
            assert T[i, j] == tab.coeff(j - i)
    # isotropic blocks are exactly symmetric
    T_iso = build_T(XX2, 8)
    assert np.array_equal(T_iso, T_iso.T)


def test_build_T_single_entry():
    assert build_T(XX2, 1) == pytest.approx(np.array([[-1 / 3]]), abs=1e-12)


def test_gamma_is_exactly_skew():
    for model in (XX2, XY, ISING, CONST):
        g = build_gamma(model, 5)
        assert np.array_equal(g, -g.T)
    assert np.allclose(build_gamma(CONST, 1), [[0.0, 1.0], [-1.0, 0.0]])


@pytest.mark.parametrize("model", [XX2, XY, ISING], ids=["xx2", "xy", "ising"])
@pytest.mark.parametrize("L", [1, 2, 3, 8, 16, 64])
def test_gamma_eigenvalues_match_singular_values(model, L):
    mu_T = np.sort(np.linalg.svd(build_T(model, L), compute_uv=False))[::-1]
    ev = np.linalg.eigvals(build_gamma(model, L))
    assert np.abs(ev.real).max() < 1e-9
    mu_g = np.sort(np.abs(ev))[::-1][0::2]
    assert np.abs(mu_T - mu_g).max() < 1e-9


def test_block_spectrum_identity():
    s = block_spectrum(np.eye(5))
    assert np.allclose(s.mu, 1.0)
    assert s.ln_alpha1 == 0.0
    assert s.entropy_bits == 0.0


def test_block_spectrum_single_mode():
    s = block_spectrum(np.array([[-1 / 3]]))
    assert s.mu[0] == pytest.approx(1 / 3)
    assert math.exp(s.ln_alpha1) == pytest.approx(2 / 3)
    expected = -(2 / 3) * math.log2(2 / 3) - (1 / 3) * math.log2(1 / 3)
    assert s.entropy_bits == pytest.approx(expected, abs=1e-12)


def test_block_spectrum_zero_matrix():
    s = block_spectrum(np.zeros((3, 3)))
    assert np.allclose(s.mu, 0.0)
    assert math.exp(s.ln_alpha1) == pytest.approx(1 / 8)
    assert s.entropy_bits == pytest.approx(3.0)
    assert s.ln_absdet_T == -math.inf


def test_block_spectrum_rejects_bad_input():
    with pytest.raises(ModelError):
        block_spectrum(np.full((2, 2), math.nan))
    with pytest.raises(ModelError):
        block_spectrum(2.0 * np.eye(3))  # mu = 2 violates |T| <= 1
    with pytest.raises(ModelError):
        block_spectrum(np.zeros((2, 3)))


def test_spectrum_clamps_rounding_overshoot():
    s = spectrum_from_singular_values([1.0 + 5e-11, 0.5])
    assert s.mu[0] == 1.0


def test_aggregates_stay_in_range():
    for model in (XX2, XY, ISING):
        s = block_spectrum(build_T(model, 48))
        assert s.ln_alpha1 <= 0.0
        assert 0.0 < math.exp(s.ln_alpha1) <= 1.0
        assert 0.0 <= s.entropy_bits <= s.L
        assert np.all((0.0 <= s.mu) & (s.mu <= 1.0))


def test_table_reuse_across_lengths():
    tab = coefficient_table(XX2, 32)
    direct = build_T(XX2, 12)
    nested = build_T(XX2, 12, table=tab)
    assert np.allclose(direct, nested, atol=1e-12)
    with pytest.raises(ModelError):
        build_T(XX2, 64, table=tab)
