"""Solid harmonics, translation theorems and the Airy-operator form."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import sph_harm_y

from ballisticwaves.errors import DomainError, UnsupportedOrderError
from ballisticwaves.harmonics import (
    L_MAX,
    MultipoleIndex,
    klm_coeffs,
    klm_eval,
    klm_general_translate,
    klm_grad,
    klm_operator_on_airy,
    klm_operator_on_airy_scaled,
    klm_translate_z,
    translation_coeff_c,
    translation_coeff_t,
)
from ballisticwaves.specfun import airy_deriv_n

import oracles

RNG = np.random.default_rng(20260823)


def _random_point(rng):
    return rng.normal(size=3) * 1.5


def _sph(l, m, r):
    x, y, z = r
    rr = math.sqrt(x * x + y * y + z * z)
    theta = math.acos(z / rr)
    phi = math.atan2(y, x)
    return rr**l * sph_harm_y(l, m, theta, phi)


def test_klm_matches_spherical_harmonics():
    for l in range(7):
        for m in range(-l, l + 1):
            for _ in range(3):
                r = _random_point(RNG)
                got = klm_eval(MultipoleIndex(l, m), r)
                want = _sph(l, m, r)
                assert got == pytest.approx(want, rel=1e-11, abs=1e-13)


def test_klm_anchors():
    # Condon-Shortley: K_11 = -sqrt(3/8pi)(x+iy), K_10 = sqrt(3/4pi) z.
    r = (0.7, -0.4, 1.1)
    x, y, z = r
    assert klm_eval(MultipoleIndex(0, 0), r) == pytest.approx(
        math.sqrt(1.0 / (4 * math.pi)), rel=1e-14
    )
    assert klm_eval(MultipoleIndex(1, 1), r) == pytest.approx(
        -math.sqrt(3.0 / (8 * math.pi)) * complex(x, y), rel=1e-14
    )
    assert klm_eval(MultipoleIndex(1, -1), r) == pytest.approx(
        math.sqrt(3.0 / (8 * math.pi)) * complex(x, -y), rel=1e-14
    )
    assert klm_eval(MultipoleIndex(1, 0), r) == pytest.approx(
        math.sqrt(3.0 / (4 * math.pi)) * z, rel=1e-14
    )


def test_klm_conjugation_symmetry():
    for l in range(6):
        for m in range(1, l + 1):
            r = _random_point(RNG)
            assert klm_eval(MultipoleIndex(l, -m), r) == pytest.approx(
                (-1) ** m * klm_eval(MultipoleIndex(l, m), r).conjugate(), rel=1e-12
            )


def test_klm_is_harmonic():
    # The monomial expansion must satisfy Laplace's equation exactly
    # (term-wise second derivatives cancel analytically).
    for l in range(8):
        for m in range(-l, l + 1):
            exp = klm_coeffs(MultipoleIndex(l, m))
            r = _random_point(RNG)
            x, y, z = r
            lap = 0.0 + 0.0j
            scale = 0.0
            for p, q, s, c in exp.terms:
                if p >= 2:
                    lap += c * p * (p - 1) * x ** (p - 2) * y**q * z**s
                if q >= 2:
                    lap += c * q * (q - 1) * x**p * y ** (q - 2) * z**s
                if s >= 2:
                    lap += c * s * (s - 1) * x**p * y**q * z ** (s - 2)
                scale = max(scale, abs(c))
            assert abs(lap) <= 1e-10 * max(scale, 1.0)


def test_klm_grad_matches_finite_differences():
    for l, m in ((1, 0), (2, 1), (3, -2), (4, 4)):
        idx = MultipoleIndex(l, m)
        r = _random_point(RNG)
        g = klm_grad(idx, r)
        for d in range(3):
            def f(t, d=d):
                rr = list(r)
                rr[d] = t
                return klm_eval(idx, rr)

            fd = oracles.central_diff(f, r[d], 1e-3)
            assert g[d] == pytest.approx(fd, rel=1e-8, abs=1e-10)


def test_translation_coeff_t_anchors():
    assert translation_coeff_t(1, 1, 0) == pytest.approx(1.0, rel=1e-15)
    assert translation_coeff_t(3, 3, 2) == pytest.approx(1.0, rel=1e-15)
    assert translation_coeff_t(0, 1, 0) == pytest.approx(math.sqrt(3.0), rel=1e-15)
    assert translation_coeff_t(1, 2, 1) == pytest.approx(math.sqrt(5.0), rel=1e-15)
    with pytest.raises(DomainError):
        translation_coeff_t(0, 1, 1)


@given(
    st.integers(min_value=0, max_value=6),
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=-2.0, max_value=2.0, exclude_min=True),
)
@settings(max_examples=60, deadline=None)
def test_translate_z_theorem(l, a, seed):
    rng = np.random.default_rng(abs(hash((l, a, seed))) % 2**32)
    r = _random_point(rng)
    for m in range(-l, l + 1):
        idx = MultipoleIndex(l, m)
        direct = klm_eval(idx, (r[0], r[1], r[2] + a))
        summed = klm_translate_z(idx, a, r)
        assert summed == pytest.approx(direct, rel=1e-10, abs=1e-10)


def test_general_translation_theorem():
    for l in range(5):
        for m in range(-l, l + 1):
            idx = MultipoleIndex(l, m)
            r = _random_point(RNG)
            a = _random_point(RNG)
            direct = klm_eval(idx, (r[0] + a[0], r[1] + a[1], r[2] + a[2]))
            summed = klm_general_translate(idx, a, r)
            assert summed == pytest.approx(direct, rel=1e-10, abs=1e-11)


def test_translation_coeff_c_properties():
    assert translation_coeff_c(0, 0, 0, 0) == pytest.approx(
        math.sqrt(4.0 * math.pi), rel=1e-15
    )
    # Exact symmetry (lam, mu) -> (l - lam, m - mu): identical float values.
    for l, m, lam, mu in ((3, 1, 1, 0), (4, -2, 2, -1), (5, 3, 2, 2)):
        assert translation_coeff_c(l, m, lam, mu) == translation_coeff_c(
            l, m, l - lam, m - mu
        )
    # Selection rule.
    assert translation_coeff_c(2, 2, 1, -1) == 0.0
    with pytest.raises(DomainError):
        translation_coeff_c(2, 1, 3, 0)
    with pytest.raises(DomainError):
        translation_coeff_c(2, 1, 1, 2)


def test_operator_on_airy_p_wave():
    # K_10(X, Y, i d/dalpha) Ai = sqrt(3/4pi) i Ai'(alpha).
    alpha = -1.7
    got = klm_operator_on_airy(MultipoleIndex(1, 0), 0.3, -0.2, alpha)
    want = math.sqrt(3.0 / (4 * math.pi)) * 1j * airy_deriv_n(1, alpha)
    assert got == pytest.approx(want, rel=1e-13)
    # K_11 leaves Ai itself multiplied by the lateral factor.
    got = klm_operator_on_airy(MultipoleIndex(1, 1), 0.3, -0.2, alpha)
    want = -math.sqrt(3.0 / (8 * math.pi)) * complex(0.3, -0.2) * airy_deriv_n(0, alpha)
    assert got == pytest.approx(want, rel=1e-13)


def test_operator_on_airy_scaled_consistency():
    idx = MultipoleIndex(3, 1)
    alpha, X, Y = 0.9, 0.4, -0.7
    derivs = np.array([airy_deriv_n(n, alpha) for n in range(idx.l + 1)])
    assert klm_operator_on_airy_scaled(idx, X, Y, derivs) == pytest.approx(
        klm_operator_on_airy(idx, X, Y, alpha), rel=1e-14
    )


def test_index_validation():
    with pytest.raises(DomainError):
        MultipoleIndex(1, 2)
    with pytest.raises(DomainError):
        MultipoleIndex(-1, 0)
    with pytest.raises(UnsupportedOrderError):
        klm_eval(MultipoleIndex(L_MAX + 1, 0), (1.0, 0.0, 0.0))
