"""Spherical transform machinery for K-type radial functions.

A radial function of type n is determined by its profile on A and extends by
F(k_a a_s k_b) = e^{-i n (a+b)/2} F(a_s).  Its spherical transform is

    F^(U) = int_G Phi_n^U(g) F(g) dg,   Phi_n^U(g) = e^{+i n (th1+th2)/2} M_nn(s),

which is multiplicative under the group convolution
F1 * F2 (g) = int F1(g'^{-1} g) F2(g') dg'.  The product Phi * F is exactly
K-left-invariant, so the Haar quadrature runs on the (s, x) slice; the
convolution itself needs the full 3D grid.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .group import (cartan, cartan_batch, cartan_radius, gauss_legendre_panels,
                    haar_integrate, inverse, k_theta)
from .spectrum import (Continuous, enumerate_discrete, plancherel_density,
                       plancherel_weight)
from .spherical import cont_diag_batch, diag_element, disc_diag


@dataclass
class RadialFunction:
    """K-type-n radial function given by its profile values on an s-grid."""
    n: int
    s_grid: np.ndarray
    values: np.ndarray
    _re: CubicSpline = field(init=False, repr=False)
    _im: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        self.s_grid = np.asarray(self.s_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        self._re = CubicSpline(self.s_grid, self.values.real)
        self._im = CubicSpline(self.s_grid, self.values.imag)

    def profile(self, s):
        """Profile on A; zero beyond the stored grid."""
        s = np.asarray(s, dtype=float)
        return np.where(s <= self.s_grid[-1], self._re(s) + 1j * self._im(s), 0.0)

    def values_at(self, mats):
        """Equivariant extension evaluated on a batch of group elements."""
        th1, sig, th2 = cartan_batch(mats)
        return np.exp(-0.5j * self.n * (th1 + th2)) * self.profile(sig)


def gaussian_radial(n, width=1.0, s_max=12.0, ds=0.05):
    """Gaussian test profile exp(-width * s^2) as a type-n radial function."""
    s = np.arange(0.0, s_max + ds, ds)
    return RadialFunction(n=n, s_grid=s, values=np.exp(-width * s * s) + 0j)


def from_profile_fn(n, fn, s_max=12.0, ds=0.05):
    s = np.arange(0.0, s_max + ds, ds)
    return RadialFunction(n=n, s_grid=s, values=np.asarray(fn(s), dtype=complex))


def radial_from_kernel(t, n, cfg=None):
    """The K-type-n kernel slice rho_n(t, .) wrapped as a radial function."""
    from .synthesis import DEFAULT_CONFIG, radial_profile
    prof = radial_profile(t, n, cfg if cfg is not None else DEFAULT_CONFIG)
    return RadialFunction(n=n, s_grid=prof.s_grid, values=prof.values)


def project_ktype(f, n, g, n_nodes=256):
    """K-type projection (P_n f)(g) = int_K e^{i n theta/2} f(g k_theta) dk.

    f maps a batch of group elements to values.  Idempotent, and the output
    transforms as f(gk) = e^{-i n theta/2} f(g) in the K variable.
    """
    theta = np.arange(n_nodes) * (4 * np.pi / n_nodes)
    mats = np.asarray(g) @ k_theta(theta)
    vals = np.asarray(f(mats))
    return complex(np.sum(np.exp(0.5j * n * theta) * vals) / n_nodes)


def _diag_profile_spline(rep, n, s_max, ds=0.05):
    """Spline of the diagonal element M_nn(s; rep) over [0, s_max]."""
    s_grid = np.arange(0.0, s_max + ds, ds)
    vals = np.empty(len(s_grid), dtype=complex)
    if isinstance(rep, Continuous):
        for i, s in enumerate(s_grid):
            batch, _ = cont_diag_batch(np.array([rep.nu]), n, s)
            vals[i] = batch[0]
    else:
        for i, s in enumerate(s_grid):
            vals[i] = disc_diag(rep.m, n, s)
    re = CubicSpline(s_grid, vals.real)
    im = CubicSpline(s_grid, vals.imag)
    return lambda sig: re(np.minimum(sig, s_max)) + 1j * im(np.minimum(sig, s_max))


def grid_cartan_radius_max(grid):
    """Largest Cartan radius reached inside the grid's Iwasawa box."""
    return float(np.max(cartan_radius(grid.an_matrices)))


def spherical_transform(F, rep, grid):
    """Spherical transform F^(rep) = int Phi_n^rep(g) F(g) dg on the Haar grid.

    The integrand Phi * F is K-left-invariant (the Cartan phases cancel), so
    quadrature runs on the grid's (s, x) slice with the Haar density.
    """
    n = F.n
    sig_max = grid_cartan_radius_max(grid) + 0.1
    melem = _diag_profile_spline(rep, n, sig_max)

    def integrand(mats):
        sig = cartan_radius(mats)
        return melem(sig) * F.profile(sig)

    return haar_integrate(integrand, grid, theta_free=True)


def spherical_transform_batch(F, nu_values, grid, ds=0.05):
    """Transforms at the continuous points Continuous(n mod 2, nu) for an
    array of nu, sharing one diagonal-element table across all of them.

    Equivalent to calling :func:`spherical_transform` per point; the batch
    form exists because spectral-side integrals need hundreds of points.
    """
    n = F.n
    nu_values = np.asarray(nu_values, dtype=float)
    sig_max = grid_cartan_radius_max(grid) + 0.1
    s_grid = np.arange(0.0, sig_max + ds, ds)
    table = np.empty((len(s_grid), len(nu_values)), dtype=complex)
    for i, s in enumerate(s_grid):
        table[i], _ = cont_diag_batch(nu_values, n, s)
    sig = cartan_radius(grid.an_matrices)
    fw = F.profile(sig) * grid.plane_weights
    out = np.empty(len(nu_values), dtype=complex)
    for j in range(len(nu_values)):
        re = CubicSpline(s_grid, table[:, j].real)
        im = CubicSpline(s_grid, table[:, j].imag)
        out[j] = np.sum((re(sig) + 1j * im(sig)) * fw)
    return out


def inverse_spherical_transform(fhat, n, g, nu_max=12.0, nodes_per_panel=32,
                                include_discrete=True):
    """Inverse transform: int phi(n, U, g) fhat(U) dmu(U) over the type-n dual.

    fhat maps a representation point (Continuous or Discrete) to a complex
    value and must decay in nu within [0, nu_max].
    """
    edges = sorted({0.0, min(1.0, nu_max), *np.arange(2.0, np.floor(nu_max) + 1), nu_max})
    nu, w = gauss_legendre_panels(np.array(edges), nodes_per_panel)
    eps = abs(n) % 2
    th1, s, th2 = cartan(g)
    phase = np.exp(-0.5j * n * (th1 + th2))
    diag, _ = cont_diag_batch(nu, n, s)
    fc = np.array([fhat(Continuous(eps, float(v))) for v in nu])
    total = phase * np.sum(diag * fc * plancherel_density(eps, nu) * w)
    if include_discrete:
        for rep in enumerate_discrete(n):
            val, _ = diag_element(rep, n, s)
            total += phase * val * fhat(rep) * plancherel_weight(rep)
    return complex(total)


def convolve(F1, F2, g, grid):
    """Group convolution (F1 * F2)(g) = int F1(g'^{-1} g) F2(g') dg'.

    Both factors must be type-n radial functions (same n) decaying inside the
    grid box.  Cost is one pass over the full 3D grid per output point; the
    theta' integral uses the phase equivariance of F2 so that only F1 is
    re-evaluated per theta' node.
    """
    if F1.n != F2.n:
        raise ValueError("convolution factors must share the same K-type")
    an = grid.an_matrices
    w = grid.plane_weights
    f2_vals = F2.values_at(an) * w
    an_inv = inverse(an)
    n_theta = len(grid.theta)
    g = np.asarray(g)
    total = 0.0 + 0j
    for th in grid.theta:
        mats = an_inv @ (k_theta(-th) @ g)
        total += np.exp(-0.5j * F2.n * th) * np.sum(F1.values_at(mats) * f2_vals)
    return complex(total / n_theta)


def convolve_profile(F1, F2, s_points, grid):
    """Convolution evaluated along a_s and wrapped as a radial function."""
    from .group import a_s
    s_points = np.asarray(s_points, dtype=float)
    vals = np.array([convolve(F1, F2, a_s(s), grid) for s in s_points])
    return RadialFunction(n=F1.n, s_grid=s_points, values=vals)
