import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from sl2heat.errors import TailError
from sl2heat.group import a_s, identity, k_theta, inverse
from sl2heat.spectrum import (enumerate_discrete, heat_eigenvalue, ktype_tail_bound,
                              nu_cutoff, plancherel_density, plancherel_weight)
from sl2heat.spherical import cont_diag_batch, disc_diag
from sl2heat.synthesis import (DEFAULT_CONFIG, SynthesisConfig, radial_profile, rho,
                               rho_n, rho_transform_side, tail_sum)


def _rho_n_adaptive_oracle(t, n, s):
    """Same nu-integral by adaptive quadrature (independent of the panel rule)."""
    eps = abs(n) % 2

    def f(nu):
        val, _ = cont_diag_batch(np.array([nu]), n, s)
        lam = -0.25 * n * n - 0.5 * (nu * nu + 0.25)
        return (val[0] * np.exp(t * lam) * plancherel_density(eps, nu)).real

    V = nu_cutoff(t, n, 1e-15) + 4
    total = integrate.quad(f, 0, V, limit=400, epsabs=1e-13)[0]
    for rep in enumerate_discrete(n):
        total += (disc_diag(rep.m, n, s) * np.exp(t * heat_eigenvalue(n, rep))
                  * plancherel_weight(rep)).real
    return total


class TestRhoN:
    def test_matches_adaptive_quadrature(self):
        cfg = SynthesisConfig(tol=1e-12)
        for (t, n, s) in [(1.0, 0, 0.8), (1.0, 0, 2.5), (0.7, 2, 1.2)]:
            got = rho_n(t, n, a_s(s), cfg)
            want = _rho_n_adaptive_oracle(t, n, s)
            assert abs(got.real - want) < 1e-9
            assert abs(got.imag) < 1e-12

    def test_n1_at_identity_real_positive(self):
        val = rho_n(1.0, 1, identity())
        assert enumerate_discrete(1) == []
        assert val.real > 0
        assert abs(val.imag) < 1e-12

    def test_dominated_by_tail_bound(self):
        for n in (1, 2, 4):
            assert abs(rho_n(3.0, n, identity())) <= ktype_tail_bound(3.0, n)

    def test_opposite_ktypes_conjugate(self):
        g = k_theta(0.9) @ a_s(1.1)
        a = rho_n(1.0, 2, g)
        b = rho_n(1.0, -2, g)
        assert abs(a - np.conj(b)) < 1e-12


class TestRho:
    def test_basic_certificates(self):
        kv = rho(1.0, a_s(0.5))
        assert kv.tail_bound <= DEFAULT_CONFIG.tol
        assert kv.imag_residual <= 10 * DEFAULT_CONFIG.tol
        assert kv.value > 0

    def test_per_n_decay_at_identity(self):
        kv = rho(1.0, identity())
        mags = {n: abs(v) for n, v in kv.per_n.items()}
        for n in range(3, max(mags) + 1):
            assert mags[n] <= mags[n - 2] + 1e-14

    def test_conjugation_invariance(self):
        g = a_s(1.0)
        k = k_theta(1.1)
        v1 = rho(1.0, g).value
        v2 = rho(1.0, k @ g @ inverse(k)).value
        assert abs(v1 - v2) <= 1e-9

    def test_decreasing_in_t_at_identity(self):
        assert rho(0.5, identity()).value > rho(1.0, identity()).value > rho(2.0, identity()).value

    def test_tail_error_below_tmin(self):
        with pytest.raises(TailError):
            rho(0.05, identity())

    def test_fixed_cutoff_policy(self):
        cfg = SynthesisConfig(ktype_cutoff=4)
        kv = rho(1.0, identity(), cfg)
        assert max(kv.per_n) == 4
        assert kv.tail_bound == tail_sum(1.0, 4)

    def test_certified_truncation(self):
        for t in (0.5, 1.0, 2.0):
            kv = rho(t, identity())
            N = max(kv.per_n)
            refined = SynthesisConfig(tol=DEFAULT_CONFIG.tol * 1e-3,
                                      nu_nodes_per_panel=64, ktype_cutoff=N + 2)
            kv2 = rho(t, identity(), refined)
            assert abs(kv2.value - kv.value) <= kv.tail_bound + kv.quad_estimate + 1e-12


class TestProfiles:
    def test_profile_matches_direct(self):
        prof = radial_profile(1.0, 0)
        for s in (0.3, 1.7, 4.2, 7.5):
            direct = rho_n(1.0, 0, a_s(s))
            assert abs(prof(s) - direct) < 2e-7 * abs(prof(0.0))

    def test_profile_vanishes_beyond_grid(self):
        prof = radial_profile(1.0, 0)
        assert prof(prof.s_grid[-1] + 1.0) == 0.0


class TestTransformSide:
    def test_t_zero_limit(self):
        f, disc = rho_transform_side(0.0, 2)
        assert_allclose(f(np.array([0.3, 2.0])), 1.0)
        assert all(v == 1.0 for _, v in disc)

    def test_product_law(self):
        f1, d1 = rho_transform_side(0.7, 3)
        f2, d2 = rho_transform_side(0.5, 3)
        f12, d12 = rho_transform_side(1.2, 3)
        nu = np.linspace(0.1, 5, 7)
        assert_allclose(f1(nu) * f2(nu), f12(nu), rtol=1e-13)
        for (m, a), (_, b), (_, c) in zip(d1, d2, d12):
            assert_allclose(a * b, c, rtol=1e-13)

    def test_l2_identity_1d(self, norm_grid):
        # || rho_{t,n} ||^2 via the group side equals int e^{2 t lambda} dmu
        from sl2heat.verify import l2_norm_sq_group, l2_norm_sq_spectral
        t, n = 2.0, 0
        gs = l2_norm_sq_group(t, n, norm_grid)
        sp = l2_norm_sq_spectral(t, n)
        oracle = integrate.quad(
            lambda nu: np.exp(-2 * t * (0.5 * (nu * nu + 0.25))) * plancherel_density(0, nu),
            0, 20)[0]
        assert_allclose(sp, oracle, rtol=1e-10)
        assert abs(gs - sp) / sp < 1e-3
