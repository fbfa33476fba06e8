import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from sl2heat.errors import DomainError, SpectrumMismatchError
from sl2heat.spectrum import (Continuous, Discrete, casimir_character,
                              enumerate_discrete, ghat_contains, heat_eigenvalue,
                              ktype_tail_bound, nu_cutoff, plancherel_density,
                              plancherel_weight)


class TestCasimir:
    def test_continuous(self):
        assert_allclose(casimir_character(Continuous(0, 1.0)), -0.625)

    def test_discrete_edge(self):
        assert casimir_character(Discrete(2)) == 0.0

    def test_discrete_m3(self):
        assert_allclose(casimir_character(Discrete(3)), 0.375)


class TestHeatEigenvalue:
    def test_values(self):
        assert_allclose(heat_eigenvalue(0, Continuous(0, 1.0)), -0.625)
        assert_allclose(heat_eigenvalue(3, Discrete(3)), -1.875)
        assert_allclose(heat_eigenvalue(2, Continuous(0, 1e-9)), -1.125, atol=1e-12)

    def test_rejects_mismatch(self):
        with pytest.raises(SpectrumMismatchError):
            heat_eigenvalue(1, Continuous(0, 1.0))  # parity mismatch
        with pytest.raises(SpectrumMismatchError):
            heat_eigenvalue(2, Discrete(4))         # |n| < m
        with pytest.raises(SpectrumMismatchError):
            heat_eigenvalue(4, Discrete(2, sign=+1))  # wrong side

    def test_always_negative(self):
        for n in range(-8, 9):
            for rep in enumerate_discrete(n):
                assert heat_eigenvalue(n, rep) < 0
            for nu in (1e-6, 0.3, 2.0, 10.0):
                assert heat_eigenvalue(n, Continuous(abs(n) % 2, nu)) < 0


class TestPlancherelWeight:
    def test_discrete_mass(self):
        assert_allclose(plancherel_weight(Discrete(2)), 1 / (4 * np.pi))

    def test_vanishes_at_zero_even(self):
        assert plancherel_weight(Continuous(0, 1e-12)) < 1e-12

    def test_odd_value_at_one(self):
        want = 1 / (2 * np.pi * np.tanh(np.pi))
        assert_allclose(plancherel_weight(Continuous(1, 1.0)), want, rtol=1e-14)
        assert_allclose(want, 0.15975048070767212, rtol=1e-13)

    def test_odd_limit_at_zero(self):
        # nu coth(pi nu) -> 1/pi
        assert_allclose(plancherel_weight(Continuous(1, 1e-9)), 1 / (2 * np.pi ** 2),
                        rtol=1e-8)

    def test_asymptote(self):
        nu = 10.0
        for eps in (0, 1):
            assert_allclose(plancherel_density(eps, nu), nu / (2 * np.pi), rtol=1e-6)

    def test_rejects_nonpositive_nu(self):
        with pytest.raises(DomainError):
            plancherel_weight(Continuous(0, -1.0))

    def test_even_density_increasing(self):
        nu = np.linspace(0.01, 6, 200)
        d = plancherel_density(0, nu)
        assert np.all(np.diff(d) > 0)


class TestEnumerateDiscrete:
    def test_examples(self):
        assert enumerate_discrete(1) == []
        assert [r.m for r in enumerate_discrete(5)] == [3, 5]
        assert [r.m for r in enumerate_discrete(4)] == [2, 4]

    def test_sign_convention(self):
        assert all(r.sign == -1 for r in enumerate_discrete(6))
        assert all(r.sign == +1 for r in enumerate_discrete(-6))

    def test_cardinality(self):
        for n in range(-9, 10):
            want = len([m for m in range(2, abs(n) + 1) if (m - n) % 2 == 0])
            assert len(enumerate_discrete(n)) == want

    def test_membership(self):
        for n in range(-6, 7):
            for rep in enumerate_discrete(n):
                assert ghat_contains(n, rep)


def _spectral_l1(T, n):
    """Direct quadrature of int e^{T lambda} dmu over the type-n spectrum."""
    eps = abs(n) % 2

    def f(nu):
        lam = -0.25 * n * n - 0.5 * (nu * nu + 0.25)
        return np.exp(T * lam) * plancherel_density(eps, nu)

    total = integrate.quad(f, 0, 40, limit=300)[0]
    for rep in enumerate_discrete(n):
        total += np.exp(T * heat_eigenvalue(n, rep)) * plancherel_weight(rep)
    return total


class TestTailBound:
    def test_value_T1_n0(self):
        # (e^{-1/8}/pi)(1 + e^{-1/2})
        want = np.exp(-0.125) / np.pi * (1 + np.exp(-0.5))
        assert_allclose(ktype_tail_bound(1.0, 0), want, rtol=1e-14)
        assert_allclose(want, 0.45128649300970336, rtol=1e-13)

    def test_monotone_in_n(self):
        vals = [ktype_tail_bound(1.0, n) for n in range(2, 30)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-20

    def test_dominates_direct_quadrature(self):
        for T in (0.5, 1.0, 2.0):
            for n in (0, 1, 2, 3, 5, 8):
                assert _spectral_l1(T, n) <= ktype_tail_bound(T, n)

    def test_rejects_bad_T(self):
        with pytest.raises(DomainError):
            ktype_tail_bound(0.0, 1)


class TestNuCutoff:
    def test_huge_tol(self):
        assert nu_cutoff(1.0, 0, 1e6) == 0.0

    def test_doubling_changes_nothing(self):
        t, tol = 1.0, 1e-12
        V = nu_cutoff(t, 0, tol)

        def tail(V0):
            return integrate.quad(
                lambda nu: np.exp(t * (-0.5 * (nu * nu + 0.25))) * plancherel_density(0, nu),
                V0, 4 * V0 + 40)[0]

        assert tail(V) <= tol
        assert abs(tail(V) - tail(2 * V)) <= tol

    def test_monotone_in_inverse_t(self):
        assert nu_cutoff(0.1, 0, 1e-8) > nu_cutoff(1.0, 0, 1e-8)
