"""SL(2,R) geometry: orthonormal frame, matrix exponential, Iwasawa and
Cartan factorizations, and Haar-measure quadrature.

Conventions
-----------
K = SO(2) is parametrized with half angles,

    k_theta = [[cos(theta/2), sin(theta/2)], [-sin(theta/2), cos(theta/2)]],

so theta has period 4*pi and the K-characters exp(i*n*theta/2) are single
valued for every integer n.  A = {a_s = diag(e^{s/2}, e^{-s/2})} and
N = {n_x = [[1, x], [0, 1]]}.  Haar measure in Iwasawa coordinates
g = k_theta a_s n_x is

    dg = (1/4pi) e^s  dtheta ds dx ,      theta in [0, 4pi).

The Lie algebra carries the inner product <X, Y> = 4 tr(X^T Y), for which

    X1 = (1/sqrt8)[[0,-1],[1,0]],  Y1 = (1/sqrt8)[[1,0],[0,-1]],
    Y2 = (1/sqrt8)[[0,1],[1,0]]

form an orthonormal basis (X1 spans so(2), Y1, Y2 the symmetric part).

Group elements are plain (..., 2, 2) float ndarrays throughout; every
operation here is vectorized over leading batch dimensions.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import BoundaryMassError

SQRT8 = np.sqrt(8.0)

X1 = np.array([[0.0, -1.0], [1.0, 0.0]]) / SQRT8
Y1 = np.array([[1.0, 0.0], [0.0, -1.0]]) / SQRT8
Y2 = np.array([[0.0, 1.0], [1.0, 0.0]]) / SQRT8

FRAME = (X1, Y1, Y2)

_DET_TOL = 1e-12
_RENORM_TOL = 1e-8


def algebra_element(x1, y1, y2):
    """Traceless matrix x1*X1 + y1*Y1 + y2*Y2 from frame coefficients."""
    x1, y1, y2 = np.broadcast_arrays(x1, y1, y2)
    out = np.empty(np.shape(x1) + (2, 2))
    out[..., 0, 0] = y1
    out[..., 0, 1] = -np.asarray(x1) + y2
    out[..., 1, 0] = np.asarray(x1) + y2
    out[..., 1, 1] = -np.asarray(y1)
    return out / SQRT8


def frame_coefficients(Z):
    """Inverse of :func:`algebra_element`; Z must be traceless."""
    Z = np.asarray(Z)
    x1 = (Z[..., 1, 0] - Z[..., 0, 1]) * SQRT8 / 2
    y1 = Z[..., 0, 0] * SQRT8
    y2 = (Z[..., 1, 0] + Z[..., 0, 1]) * SQRT8 / 2
    return x1, y1, y2


def algebra_inner(Z, W):
    """Ad(K)-invariant inner product 4 tr(Z^T W)."""
    return 4.0 * np.einsum("...ij,...ij->...", np.asarray(Z), np.asarray(W))


def group_element(a, b, c, d):
    """2x2 unimodular matrix with a determinant check.

    Entries with |det - 1| <= 1e-8 are renormalized by 1/sqrt(det);
    anything further from det 1 raises ValueError.
    """
    g = np.array([[float(a), float(b)], [float(c), float(d)]])
    det = a * d - b * c
    if abs(det - 1.0) > _DET_TOL:
        if abs(det - 1.0) > _RENORM_TOL or det <= 0:
            raise ValueError(f"matrix has det {det}, not in SL(2,R)")
        g = renormalize(g)
    return g


def renormalize(g):
    """Divide by sqrt(det) to land exactly on det 1 (det must be near 1)."""
    g = np.asarray(g, dtype=float)
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    return g / np.sqrt(det)[..., None, None]


def identity():
    return np.eye(2)


def k_theta(theta):
    """Rotation k_theta, vectorized over theta."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.empty(np.shape(theta) + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = s
    out[..., 1, 0] = -s
    out[..., 1, 1] = c
    return out


def a_s(s):
    """Diagonal one-parameter subgroup diag(e^{s/2}, e^{-s/2})."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(np.shape(s) + (2, 2))
    out[..., 0, 0] = np.exp(s / 2)
    out[..., 1, 1] = np.exp(-s / 2)
    return out


def n_x(x):
    """Upper unitriangular element."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(np.shape(x) + (2, 2))
    out[..., 0, 0] = 1.0
    out[..., 0, 1] = x
    out[..., 1, 1] = 1.0
    return out


def inverse(g):
    """Inverse of a det-1 matrix: [[d,-b],[-c,a]], batched."""
    g = np.asarray(g)
    out = np.empty_like(g)
    out[..., 0, 0] = g[..., 1, 1]
    out[..., 0, 1] = -g[..., 0, 1]
    out[..., 1, 0] = -g[..., 1, 0]
    out[..., 1, 1] = g[..., 0, 0]
    return out


def exp_sl2(Z):
    """Matrix exponential on sl(2,R) in closed form, batched.

    Uses Z^2 = -det(Z) I: trigonometric branch for det > 0, hyperbolic for
    det < 0, second-order series in the crossover |det| < 1e-9 where both
    branches lose relative accuracy.
    """
    Z = np.asarray(Z, dtype=float)
    d = Z[..., 0, 0] * Z[..., 1, 1] - Z[..., 0, 1] * Z[..., 1, 0]
    d = np.asarray(d)
    w = np.sqrt(np.abs(d))
    w_safe = np.where(w < 1e-30, 1.0, w)
    tiny = np.abs(d) < 1e-9
    pos = (d > 0) & ~tiny
    neg = (d < 0) & ~tiny
    # cos(sqrt(d)) and sin(sqrt(d))/sqrt(d) continued through d <= 0
    c = np.where(pos, np.cos(w), np.where(neg, np.cosh(w), 1.0 - d / 2 + d * d / 24))
    sl = np.where(pos, np.sin(w) / w_safe, np.where(neg, np.sinh(w) / w_safe, 1.0 - d / 6 + d * d / 120))
    eye = np.eye(2).reshape((1,) * (Z.ndim - 2) + (2, 2))
    return c[..., None, None] * eye + sl[..., None, None] * Z


class IwasawaCoords(NamedTuple):
    theta: float
    s: float
    x: float


class CartanCoords(NamedTuple):
    theta1: float
    s: float
    theta2: float


def iwasawa(g):
    """Iwasawa coordinates of g = k_theta a_s n_x, theta in [0, 4pi).

    e^{s/2} is the norm of the first column; theta the (half-)angle that
    rotates it onto the first axis; x follows from the remaining triangular
    factor.
    """
    g = np.asarray(g, dtype=float)
    a, c = g[..., 0, 0], g[..., 1, 0]
    b, d = g[..., 0, 1], g[..., 1, 1]
    r2 = a * a + c * c
    s = np.log(r2)
    theta = np.mod(2.0 * np.arctan2(-c, a), 4.0 * np.pi)
    x = (a * b + c * d) / r2
    if g.ndim == 2:
        return IwasawaCoords(float(theta), float(s), float(x))
    return IwasawaCoords(theta, s, x)


def reconstruct_iwasawa(coords):
    theta, s, x = coords
    return k_theta(theta) @ a_s(s) @ n_x(x)


_S_TOL = 1e-9


def _rotation_angle(m):
    # average the two cos/sin estimates; m is numerically near a k_theta
    c = (m[..., 0, 0] + m[..., 1, 1]) / 2
    s = (m[..., 0, 1] - m[..., 1, 0]) / 2
    return 2.0 * np.arctan2(s, c)


def cartan(g):
    """Cartan coordinates of g = k_theta1 a_s k_theta2 with s >= 0.

    s = arccosh(tr(g g^T)/2); theta1 diagonalizes g g^T; theta2 is read off
    the residual rotation.  At s < 1e-9 the split of the total rotation is
    arbitrary and theta2 = 0 is returned.
    """
    th1, s, th2 = cartan_batch(np.asarray(g, dtype=float))
    if np.ndim(s) == 0:
        return CartanCoords(float(th1), float(s), float(th2))
    return CartanCoords(th1, s, th2)


def cartan_batch(g):
    """Vectorized Cartan coordinates; returns (theta1, s, theta2) arrays."""
    g = np.asarray(g, dtype=float)
    A00 = g[..., 0, 0] ** 2 + g[..., 0, 1] ** 2
    A11 = g[..., 1, 0] ** 2 + g[..., 1, 1] ** 2
    A01 = g[..., 0, 0] * g[..., 1, 0] + g[..., 0, 1] * g[..., 1, 1]
    half_tr = np.maximum((A00 + A11) / 2, 1.0)
    s = np.arccosh(half_tr)
    small = s < _S_TOL

    th1 = np.where(small, _rotation_angle(g), np.arctan2(-2 * A01, A00 - A11))
    cs, sn = np.cos(th1 / 2), np.sin(th1 / 2)
    # m = a_{-s} k_{-theta1} g  (should be a rotation)
    es = np.exp(-s / 2)
    m00 = es * (cs * g[..., 0, 0] - sn * g[..., 1, 0])
    m01 = es * (cs * g[..., 0, 1] - sn * g[..., 1, 1])
    m10 = (sn * g[..., 0, 0] + cs * g[..., 1, 0]) / es
    m11 = (sn * g[..., 0, 1] + cs * g[..., 1, 1]) / es
    m = np.stack([np.stack([m00, m01], axis=-1), np.stack([m10, m11], axis=-1)], axis=-2)
    th2 = np.where(small, 0.0, _rotation_angle(m))
    th1 = np.mod(th1, 4 * np.pi)
    th2 = np.mod(th2, 4 * np.pi)
    return th1, s, th2


def reconstruct_cartan(coords):
    th1, s, th2 = coords
    return k_theta(th1) @ a_s(s) @ k_theta(th2)


def cartan_radius(g):
    """Cartan s alone (cheap; avoids angle extraction), batched."""
    g = np.asarray(g, dtype=float)
    half_tr = np.maximum(np.einsum("...ij,...ij->...", g, g) / 2, 1.0)
    return np.arccosh(half_tr)


# ----------------------------------------------------------------------
# quadrature
# ----------------------------------------------------------------------

def gauss_legendre_panels(edges, nodes_per_panel):
    """Gauss-Legendre nodes/weights on consecutive panels [e0,e1],[e1,e2],..."""
    edges = np.asarray(edges, dtype=float)
    xg, wg = np.polynomial.legendre.leggauss(nodes_per_panel)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


def _geometric_edges(limit, first=1.0):
    """0, first, 2*first, 4*first, ... capped at limit."""
    edges = [0.0]
    step = first
    while edges[-1] < limit:
        edges.append(min(edges[-1] + step, limit))
        step *= 2
    return np.array(edges)


@dataclass
class HaarGrid:
    """Quadrature grid for the truncated Iwasawa box [0,4pi) x [-S,S] x [-X,X].

    theta is an equispaced periodic grid (trapezoid rule, spectrally
    accurate), s and x are Gauss-Legendre panels.  ``s_weights`` already
    contain the e^s Haar density; the 1/4pi prefactor cancels against the
    4pi theta-range, leaving uniform theta weights 1/n_theta.
    """

    s_max: float
    x_max: float
    theta: np.ndarray
    s_nodes: np.ndarray
    s_weights: np.ndarray
    x_nodes: np.ndarray
    x_weights: np.ndarray
    boundary_fraction_limit: Optional[float] = None
    _an: Optional[np.ndarray] = field(default=None, repr=False)
    _bnd: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_nodes(self):
        return len(self.theta) * len(self.s_nodes) * len(self.x_nodes)

    @property
    def plane_weights(self):
        """(Ns*Nx,) weights of the (s, x) sub-grid, e^s density included."""
        return np.outer(self.s_weights, self.x_weights).ravel()

    @property
    def an_matrices(self):
        """(Ns*Nx, 2, 2) matrices a_s n_x of the theta = 0 slice."""
        if self._an is None:
            s = np.repeat(self.s_nodes, len(self.x_nodes))
            x = np.tile(self.x_nodes, len(self.s_nodes))
            self._an = a_s(s) @ n_x(x)
        return self._an

    @property
    def boundary_mask(self):
        """Nodes in the outermost ~5% of the s or x range."""
        if self._bnd is None:
            s = np.repeat(self.s_nodes, len(self.x_nodes))
            x = np.tile(self.x_nodes, len(self.s_nodes))
            self._bnd = (np.abs(s) > 0.95 * self.s_max) | (np.abs(x) > 0.95 * self.x_max)
        return self._bnd


def make_haar_grid(s_max=8.0, x_max=8.0, n_theta=32, s_nodes_per_unit=24,
                   x_nodes_per_panel=24, boundary_fraction_limit=None):
    """Build a :class:`HaarGrid`.

    s panels are unit width; x panels grow geometrically away from 0 where
    the Cartan radius varies fastest.
    """
    theta = np.arange(n_theta) * (4 * np.pi / n_theta)
    s_edges = np.linspace(-s_max, s_max, 2 * int(np.ceil(s_max)) + 1)
    sn, sw = gauss_legendre_panels(s_edges, s_nodes_per_unit)
    sw = sw * np.exp(sn)  # Haar density
    x_edges = _geometric_edges(x_max)
    x_edges = np.concatenate([-x_edges[::-1], x_edges[1:]])
    xn, xw = gauss_legendre_panels(x_edges, x_nodes_per_panel)
    return HaarGrid(s_max=s_max, x_max=x_max, theta=theta, s_nodes=sn,
                    s_weights=sw, x_nodes=xn, x_weights=xw,
                    boundary_fraction_limit=boundary_fraction_limit)


def haar_integrate(f, grid, theta_free=False):
    """Quadrature of int_G f dg over the grid's truncated box.

    Parameters
    ----------
    f : callable
        Maps a batch of group elements, shape (N, 2, 2), to complex values
        of shape (N,).
    grid : HaarGrid
    theta_free : bool
        When True, f is assumed K-left-invariant (f(k g) = f(g)) and is
        evaluated on the theta = 0 slice only.

    Raises
    ------
    BoundaryMassError
        If ``grid.boundary_fraction_limit`` is set and the outermost panels
        carry more than that fraction of the integrand's absolute mass.
    """
    w_plane = grid.plane_weights
    an = grid.an_matrices
    if theta_free:
        vals = np.asarray(f(an))
        total = np.sum(vals * w_plane)
        abs_acc = np.sum(np.abs(vals) * w_plane)
        bnd_acc = np.sum(np.abs(vals[grid.boundary_mask]) * w_plane[grid.boundary_mask])
    else:
        n_theta = len(grid.theta)
        total = 0.0 + 0.0j
        abs_acc = 0.0
        bnd_acc = 0.0
        mask = grid.boundary_mask
        for th in grid.theta:
            vals = np.asarray(f(k_theta(th) @ an))
            total += np.sum(vals * w_plane) / n_theta
            abs_acc += np.sum(np.abs(vals) * w_plane) / n_theta
            bnd_acc += np.sum(np.abs(vals[mask]) * w_plane[mask]) / n_theta
    limit = grid.boundary_fraction_limit
    if limit is not None and abs_acc > 0 and bnd_acc / abs_acc > limit:
        raise BoundaryMassError(
            f"boundary mass fraction {bnd_acc / abs_acc:.3e} exceeds {limit:.3e}")
    return total


def boundary_fraction(f, grid):
    """Diagnostic: fraction of the integrand's absolute mass on the boundary."""
    w_plane = grid.plane_weights
    vals = np.abs(np.asarray(f(grid.an_matrices)))
    tot = np.sum(vals * w_plane)
    if tot == 0:
        return 0.0
    return float(np.sum(vals[grid.boundary_mask] * w_plane[grid.boundary_mask]) / tot)


def k_integrate(f, n_nodes=256):
    """Normalized integral over K: (1/4pi) int_0^{4pi} f(k_theta) dtheta.

    f maps a batch of rotation matrices (N, 2, 2) to values (N,).
    Exact for trigonometric polynomials e^{i n theta / 2} with |n| < 2*n_nodes.
    """
    theta = np.arange(n_nodes) * (4 * np.pi / n_nodes)
    return np.sum(np.asarray(f(k_theta(theta)))) / n_nodes
