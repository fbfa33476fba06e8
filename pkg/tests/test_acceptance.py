"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured figure of merit.  Run with `pytest tests/test_acceptance.py -v -s`.
"""

import numpy as np
import pytest
from scipy import integrate

from sl2heat.group import (FRAME, a_s, exp_sl2, gauss_legendre_panels, haar_integrate,
                           cartan_batch, cartan_radius, identity, inverse, k_theta,
                           make_haar_grid, n_x)
from sl2heat.spectrum import (Continuous, Discrete, enumerate_discrete, ghat_contains,
                              heat_eigenvalue, ktype_tail_bound, plancherel_density,
                              plancherel_weight)
from sl2heat.spherical import (disc_diag, matrix_element, phi_tilde, run_qualification)
from sl2heat.synthesis import (DEFAULT_CONFIG, SynthesisConfig, rho, rho_n,
                               rho_transform_side, tail_sum)
from sl2heat.transforms import (convolve_profile, gaussian_radial, radial_from_kernel,
                                spherical_transform, spherical_transform_batch)
from sl2heat.verify import (FDScheme, McConfig, heat_residual, l2_norm_sq_group,
                            l2_norm_sq_spectral, mc_compare, semigroup_check,
                            total_mass)


def _report(num, name, detail):
    print(f"\nACCEPTANCE {num} {name}: PASS ({detail})")


@pytest.fixture(scope="module")
def norm_grid():
    return make_haar_grid(s_max=8.0, x_max=16.0, n_theta=8)


# ----------------------------------------------------------------------
# 1. eigenvalue law
# ----------------------------------------------------------------------

def _eigen_combos():
    g1 = k_theta(0.6) @ a_s(0.8) @ k_theta(-0.2)
    g2 = a_s(1.3)
    g3 = k_theta(2.1) @ a_s(0.45)
    combos = []
    for nu in (0.3, 0.7, 1.5, 4.0):
        for n in (0, 1, -2, 3, 4):
            combos.append((n, Continuous(abs(n) % 2, nu), g1))
    for m, n in [(2, 2), (2, -2), (2, 4), (3, 3), (3, -5), (4, 4), (4, 6), (2, 6)]:
        combos.append((n, Discrete(m, -1 if n > 0 else +1), g2))
    for nu, n in [(0.3, 0), (0.7, 2), (1.5, -1)]:
        combos.append((n, Continuous(abs(n) % 2, nu), g2))
    # nu = 4, n = 3 sits on a near-zero of phi_tilde at a_1.3; evaluate at a
    # point with |phi_tilde| well away from zero instead
    combos.append((3, Continuous(1, 4.0), a_s(0.3)))
    for m, n in [(2, 2), (3, -3), (4, 4)]:
        combos.append((n, Discrete(m, -1 if n > 0 else +1), g3))
    for nu, n in [(0.7, 0), (1.5, 2), (0.3, -1), (4.0, 1), (0.7, -4)]:
        combos.append((n, Continuous(abs(n) % 2, nu), g3))
    assert len(combos) == 40
    return combos


def test_acceptance_1_eigenvalue_law():
    h = 1e-3
    worst = 0.0
    for n, rep, g in _eigen_combos():
        lam = heat_eigenvalue(n, rep)
        f0 = phi_tilde(n, rep, g).value
        lap = 0.0 + 0j
        for X in FRAME:
            step = exp_sl2(h * X)
            lap += (phi_tilde(n, rep, g @ step).value - 2 * f0
                    + phi_tilde(n, rep, g @ inverse(step)).value) / h ** 2
        err = abs(lap - lam * f0) / (abs(lam * f0) + 1e-9)
        worst = max(worst, err)
        assert err <= 1e-5, (n, rep, err)
    _report(1, "eigenvalue law", f"40 combos, worst relative error {worst:.2e} <= 1e-5")


# ----------------------------------------------------------------------
# 2. route agreement
# ----------------------------------------------------------------------

def test_acceptance_2_route_agreement():
    report = run_qualification()
    assert report["max_delta_hypergeometric"] <= 1e-8
    assert report["max_delta_jacobi"] <= 1e-8
    assert report["nu_fit_max_abs_dev"] <= 1e-6
    # s = 0 orthonormality, exact at quadrature precision
    for rep, pairs in [(Continuous(0, 0.7), [(0, 0), (2, 2), (0, 2), (-2, 0)]),
                       (Continuous(1, 1.5), [(1, 1), (1, 3)]),
                       (Discrete(2), [(2, 2), (2, 4)])]:
        for n1, n2 in pairs:
            val = matrix_element(rep, n1, n2, 0.0).value
            assert val == (1.0 if n1 == n2 else 0.0)
    _report(2, "route agreement",
            "max deltas: hypergeometric %.2e, jacobi %.2e; nu-map fit dev %.2e"
            % (report["max_delta_hypergeometric"], report["max_delta_jacobi"],
               report["nu_fit_max_abs_dev"]))


# ----------------------------------------------------------------------
# 3. heat-equation residual
# ----------------------------------------------------------------------

def test_acceptance_3_heat_residual():
    points = {
        "e": identity(),
        "a_0.5": a_s(0.5),
        "a_1": a_s(1.0),
        "k_pi3_a_1": k_theta(np.pi / 3) @ a_s(1.0),
        "a1_n0.5": a_s(1.0) @ n_x(0.5),
    }
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        for name, g in points.items():
            res = heat_residual(t, g)
            worst = max(worst, res)
            assert res <= 1e-4, (t, name, res)
    r_coarse = heat_residual(1.0, a_s(0.6), scheme=FDScheme(8e-3), dt_factor=8e-3)
    r_fine = heat_residual(1.0, a_s(0.6), scheme=FDScheme(4e-3), dt_factor=4e-3)
    ratio = r_coarse / r_fine
    assert 2.5 <= ratio <= 6.5
    _report(3, "heat residual",
            f"15 points, worst normalized residual {worst:.2e} <= 1e-4; "
            f"halving ratio {ratio:.2f} ~ 4")


# ----------------------------------------------------------------------
# 4. Plancherel / L2 identity
# ----------------------------------------------------------------------

def test_acceptance_4_plancherel_l2(norm_grid):
    worst = 0.0
    for n in (0, 1, 2, 3):
        for t in (1.0, 2.0):
            gs = l2_norm_sq_group(t, n, norm_grid)
            sp = l2_norm_sq_spectral(t, n)
            rel = abs(gs - sp) / sp
            worst = max(worst, rel)
            assert rel <= 1e-3, (n, t, rel)
    _report(4, "Plancherel L2 identity",
            f"n in 0..3, t in (1,2), worst relative error {worst:.2e} <= 1e-3")


# ----------------------------------------------------------------------
# 5. product / semigroup
# ----------------------------------------------------------------------

def test_acceptance_5_semigroup():
    # group side: rho_{0.5,n} * rho_{0.5,n} = rho_{1,n} on a 5-point grid
    worst_group = 0.0
    for n in (0, 1):
        rel = semigroup_check(1.0, n)
        worst_group = max(worst_group, rel)
        assert rel <= 1e-2, (n, rel)

    # transform side: multiplier law is exact by construction...
    f1, d1 = rho_transform_side(0.5, 1)
    f12, d12 = rho_transform_side(1.0, 1)
    nu = np.linspace(0.1, 6, 9)
    assert np.allclose(f1(nu) ** 2, f12(nu), rtol=1e-14)
    assert all(abs(a * a - b) < 1e-14 for (_, a), (_, b) in zip(d1, d12))

    # ... and survives the quadrature round trip through the transform
    grid = make_haar_grid(s_max=6.0, x_max=40.0, n_theta=48,
                          s_nodes_per_unit=16, x_nodes_per_panel=24)
    worst_rt = 0.0
    for n in (0, 1):
        half = radial_from_kernel(0.5, n)
        s_pts = np.concatenate([np.linspace(0, 3, 16), np.linspace(3.25, 9, 24)])
        conv = convolve_profile(half, half, s_pts, grid)
        for rep in (Continuous(abs(n) % 2, 0.4), Continuous(abs(n) % 2, 1.1)):
            lhs = spherical_transform(conv, rep, grid)
            rhs = spherical_transform(half, rep, grid) ** 2
            rel = abs(lhs - rhs) / abs(rhs)
            worst_rt = max(worst_rt, rel)
            assert rel <= 1e-3, (n, rep, rel)
    _report(5, "product/semigroup",
            f"group-side worst {worst_group:.2e} <= 1e-2; "
            f"transform round trip worst {worst_rt:.2e} <= 1e-3")


# ----------------------------------------------------------------------
# 6. truncation certification
# ----------------------------------------------------------------------

def _spectral_l1(t, n):
    eps = abs(n) % 2

    def f(nu):
        lam = -0.25 * n * n - 0.5 * (nu * nu + 0.25)
        return np.exp(t * lam) * plancherel_density(eps, nu)

    total = integrate.quad(f, 0, 40, limit=300)[0]
    for rep in enumerate_discrete(n):
        total += np.exp(t * heat_eigenvalue(n, rep)) * plancherel_weight(rep)
    return total


def test_acceptance_6_truncation_certificates():
    # discarded tails never exceed the dominating bound
    for t in (0.5, 1.0, 2.0):
        for n in range(0, 7):
            bound = ktype_tail_bound(t, n)
            assert _spectral_l1(t, n) <= bound
            assert abs(rho_n(t, n, identity())) <= bound
    # doubling all cutoffs moves rho(t, e) by less than the certificate
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        kv = rho(t, identity())
        assert kv.tail_bound <= DEFAULT_CONFIG.tol
        N = max(kv.per_n)
        refined = SynthesisConfig(tol=DEFAULT_CONFIG.tol * 1e-3,
                                  nu_nodes_per_panel=64, ktype_cutoff=N + 2)
        kv2 = rho(t, identity(), refined)
        delta = abs(kv2.value - kv.value)
        budget = kv.tail_bound + kv.quad_estimate
        worst = max(worst, delta / budget)
        assert delta <= budget, (t, delta, budget)
    _report(6, "truncation certification",
            f"spectral tails below bounds; refinement shift <= {worst:.2f} "
            "of the reported certificate")


# ----------------------------------------------------------------------
# 7. Monte Carlo cross-validation
# ----------------------------------------------------------------------

def test_acceptance_7_monte_carlo():
    t = 0.5
    grid = make_haar_grid()
    mc_cfg = McConfig(paths=100_000, dt=t / 256, t_final=t, seed=7)

    def radial_bump(mats):
        return np.exp(-cartan_radius(mats) ** 2)

    def kphase_bump(mats):
        th1, sig, th2 = cartan_batch(mats)
        return np.exp(-sig ** 2) * np.cos(0.5 * (th1 + th2))

    observables = {
        "constant": lambda mats: np.ones(len(mats)),
        "radial_bump": radial_bump,
        "kphase_bump": kphase_bump,
    }
    reports = mc_compare(t, observables, mc_cfg, grid=grid)
    for r in reports:
        assert r.passed, r.to_dict()
    mass = total_mass(t, grid)
    assert 0.97 <= mass <= 1.01
    detail = "; ".join("%s |diff| %.1e <= %.1e" %
                       (r.check, abs(r.computed - r.reference), r.tolerance)
                       for r in reports)
    _report(7, "Monte Carlo", f"{detail}; box mass {mass:.4f} in [0.97, 1.01]")


# ----------------------------------------------------------------------
# 8. transform unitarity (Parseval)
# ----------------------------------------------------------------------

def test_acceptance_8_parseval(norm_grid):
    profiles = [(0, 0.5), (0, 2.0), (1, 1.0), (2, 0.75), (3, 1.5)]
    worst = 0.0
    for n, width in profiles:
        F = gaussian_radial(n, width=width)
        group_side = float(np.real(haar_integrate(
            lambda mats: np.abs(F.profile(cartan_radius(mats))) ** 2,
            norm_grid, theta_free=True)))
        V = max(np.sqrt(4.0 * width * np.log(1e8)), 6.0)
        edges = sorted({0.0, 1.0, *np.arange(2.0, np.floor(V) + 1), V})
        nu, w = gauss_legendre_panels(np.array(edges), 16)
        fhat = spherical_transform_batch(F, nu, norm_grid)
        spectral = float(np.sum(np.abs(fhat) ** 2
                                * plancherel_density(abs(n) % 2, nu) * w))
        for rep in enumerate_discrete(n):
            fh = spherical_transform(F, rep, norm_grid)
            spectral += abs(fh) ** 2 * plancherel_weight(rep)
        rel = abs(group_side - spectral) / group_side
        worst = max(worst, rel)
        assert rel <= 1e-3, (n, width, rel)
    _report(8, "transform unitarity",
            f"5 Gaussian profiles, worst Parseval mismatch {worst:.2e} <= 1e-3")
