"""Matrix elements of the principal and discrete series along a_s, spherical
functions of a K-type on all of SL(2,R), and their ladder-relation
derivatives.

Three evaluation routes cross-validate each other:

* ``integral`` (canonical): the circle integral

      <U(a_s) e_{n1}, e_{n2}> = (cosh s/2)^p * (1/4pi) int_0^{4pi}
          (1 - tanh(s/2) e^{i psi})^{w1} (1 - tanh(s/2) e^{-i psi})^{w2}
          e^{i (n2-n1) psi / 2} dpsi

  with (p, w1, w2) = (-2i nu - 1, -i nu + n1/2 - 1/2, -i nu - n1/2 - 1/2)
  for the principal series and (-m, (-m+n1)/2, (-m-n1)/2) for the discrete
  series, evaluated by the periodic trapezoid rule.

* ``hypergeometric``: (tanh s/2)^{|n1-n2|/2} (cosh s/2)^{-2i nu - 1}
  F(a, b; 1; tanh^2 s/2), with nu tied to the representation through the
  frozen Casimir normalization nu^2 = -2*chi - 1/4 (see
  :func:`hyp_route_nu`).

* ``jacobi`` (diagonal only): (cosh s/2)^n  phi_lam^{(0,n)}(s/2) with
  lam = 2 nu (principal) or i(m-1) (discrete).

Expanding the circle integrand in Fourier modes gives an exact series form
used internally: for k = (n2-n1)/2 >= 0 the integral equals

    r^k ((-w2) choose-rising k)/k! * F(-w1, k - w2; k + 1; r^2),  r = tanh s/2,

which terminates for the discrete series and, combined with the expansion of
F around argument 1, furnishes a fast large-s path for the principal series.

Orientation bookkeeping: the canonical table is M_{n1 n2}(s) =
<U(a_s) e_{n1}, e_{n2}> (inner products linear in the first slot).  With the
Cartan phase law this yields

    phi(n, rep, g)       = e^{-i n (th1+th2)/2} M_nn(s) = <e_n, U(g) e_n>,
    phi_tilde(n, rep, g) = conj(phi)             = <U(g) e_n, e_n>,

so phi_tilde(g) = phi(g^{-1}) holds identically.

Discrete-series caveat: the ladder coefficients and the circle integral both
use the standard holomorphic (unnormalized) basis, mutually consistent, but
off-diagonal discrete elements are not bounded by 1.  Diagonal elements are
normalized (value 1 at s = 0) for every series.
"""

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .errors import ConvergenceError, DomainError, RouteError, SpectrumMismatchError, WeightError
from .group import SQRT8, cartan
from .specfun import hyp2f1_c1, hyp_connection, hyp_series, jacobi_phi
from .spectrum import Continuous, Discrete, casimir_character, ghat_contains

S_SWITCH = 5.0            # integral route below, connection expansion above
_PSI_MAX = 1 << 15
_PSI_MIN = 64


class SphericalValue(NamedTuple):
    value: complex
    route: str
    est_error: float


def _psi_count(r, order):
    """Trapezoid nodes resolving Fourier decay ~ r^k of the circle integrand."""
    if r <= 0.02:
        return _PSI_MIN
    need = int(38.0 / -np.log(r)) + 32 * (order + 1)
    n = _PSI_MIN
    while n < need:
        n <<= 1
        if n > _PSI_MAX:
            raise ConvergenceError(
                f"circle integral needs > {_PSI_MAX} nodes (r = {r}); "
                "use the large-s expansion instead")
    return n


def _circle_integral(w1, w2, k, nu, r, n_psi):
    """Mean over psi of (1-r e^{i psi})^{w1 - i nu} (1-r e^{-i psi})^{w2 - i nu}
    e^{i k psi}, vectorized over the array nu.  Returns (value, est) arrays.

    Splitting off the nu-dependence keeps the cost of a whole nu-grid at one
    outer product: the nu factor is exp(-i nu * 2 ln|1 - r e^{i psi}|).
    """
    psi = np.arange(n_psi) * (2 * np.pi / n_psi)
    L = np.log1p(-r * np.exp(1j * psi))
    base = np.exp(w1 * L + w2 * np.conj(L) + 1j * k * psi)
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    E = np.exp(np.outer(-1j * nu, 2 * L.real))
    full = E.dot(base) / n_psi
    half = E[:, ::2].dot(base[::2]) / (n_psi // 2)
    return full, np.abs(full - half)


def _cont_melem_trap(nu, n1, n2, s):
    """Principal-series <U(a_s) e_{n1}, e_{n2}> by the circle integral; nu array."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if s == 0:
        val = np.full(nu.shape, 1.0 + 0j if n1 == n2 else 0.0 + 0j)
        return val, np.zeros(nu.shape)
    r = np.tanh(s / 2)
    order = (abs(n1) + abs(n2)) // 2 + 2
    n_psi = _psi_count(r, order)
    J, est = _circle_integral(n1 / 2 - 0.5, -n1 / 2 - 0.5, (n2 - n1) // 2, nu, r, n_psi)
    pref = np.cosh(s / 2) ** (-2j * nu - 1)
    return pref * J, np.abs(pref) * est


def _cont_diag_connection(nu, n, s):
    """Large-s diagonal via the expansion of F(a,b;1;x) around x = 1.

    c - a - b = -2i nu is never an integer for nu > 0, so the two-term
    connection applies; each sub-series runs in sech^2(s/2).
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    a = 1j * nu + 0.5 + n / 2
    b = 1j * nu + 0.5 - n / 2
    x = np.tanh(s / 2) ** 2
    F = hyp_connection(a, b, 1.0, x)
    pref = np.cosh(s / 2) ** (-2j * nu - 1)
    val = pref * F
    # cancellation-limited: the two terms are O(1/nu) near nu = 0
    est = 5e-15 * np.abs(pref) * (1.0 + 1.0 / np.maximum(2 * nu, 1e-2))
    return val, est


def cont_diag_batch(nu, n, s):
    """Diagonal principal-series element over an array of nu, route chosen by s."""
    if s < 0:
        raise DomainError("s must be >= 0")
    if s <= S_SWITCH:
        return _cont_melem_trap(nu, n, n, s)
    return _cont_diag_connection(nu, n, s)


def _poch(z, k):
    out = 1.0 + 0j
    for j in range(k):
        out *= z + j
    return out


def _disc_melem_series(m, n1, n2, s):
    """Discrete-series element as a terminating Fourier-coefficient series.

    Exact (finite sum) for every weight pair; stable at any s.
    """
    r = np.tanh(s / 2)
    k = (n2 - n1) // 2
    if k >= 0:
        pref = r ** k * _poch((m + n1) / 2, k) / _factorial(k)
        F = hyp_series((m - n1) / 2, (m + n1) / 2 + k, k + 1.0, r * r)
    else:
        k = -k
        pref = r ** k * _poch((m - n1) / 2, k) / _factorial(k)
        F = hyp_series((m + n1) / 2, (m - n1) / 2 + k, k + 1.0, r * r)
    return complex(np.cosh(s / 2) ** (-m) * pref * F)


def _factorial(k):
    out = 1.0
    for j in range(2, k + 1):
        out *= j
    return out


def _disc_melem_trap(m, n1, n2, s):
    if s == 0:
        return (1.0 + 0j if n1 == n2 else 0.0 + 0j), 0.0
    r = np.tanh(s / 2)
    order = (abs(n1) + abs(n2)) // 2 + m + 2
    n_psi = _psi_count(r, order)
    J, est = _circle_integral((-m + n1) / 2, (-m - n1) / 2, (n2 - n1) // 2,
                              np.zeros(1), r, n_psi)
    pref = np.cosh(s / 2) ** float(-m)
    return complex(pref * J[0]), float(pref * est[0])


def disc_diag(m, n, s):
    """Diagonal discrete-series element (exact terminating series)."""
    return _disc_melem_series(m, n, n, s)


def _check_weights(rep, n1, n2):
    if isinstance(rep, Continuous):
        if n1 % 2 != rep.eps or n2 % 2 != rep.eps:
            raise WeightError(f"weights ({n1},{n2}) have wrong parity for eps={rep.eps}")
    else:
        for n in (n1, n2):
            if not ghat_contains(n, rep):
                raise WeightError(f"weight {n} outside the weight set of {rep}")


def hyp_route_nu(rep):
    """Spectral parameter of the hypergeometric route.

    Frozen normalization: nu^2 = -2*chi - 1/4 where chi is the Casimir
    character, i.e. nu for Continuous(eps, nu) and -i(m-1)/2 for Discrete(m).
    The branch with nonnegative i*nu keeps the prefactor (cosh s/2)^{-2i nu-1}
    decaying.  Confirmed against the integral route by least squares in
    :func:`run_qualification`.
    """
    if isinstance(rep, Continuous):
        return complex(rep.nu)
    return -0.5j * (rep.m - 1)


def _rep_lambda_jacobi(rep):
    if isinstance(rep, Continuous):
        return 2.0 * rep.nu
    return 1j * (rep.m - 1)


def matrix_element(rep, n1, n2, s, route="integral"):
    """<U(a_s) e_{n1}, e_{n2}> for a representation point.

    Parameters
    ----------
    rep : Continuous or Discrete
    n1, n2 : int
        Weights; must lie in the weight set of rep.
    s : float, >= 0
    route : {"integral", "hypergeometric", "jacobi"}
        The integral route is canonical.  The hypergeometric route follows
        the printed closed form (exactly equal on the diagonal; off-diagonal
        values use a different weight-vector normalization and are exposed
        for inspection only).  The jacobi route is diagonal-only.

    Returns
    -------
    SphericalValue
    """
    if s < 0:
        raise DomainError("s must be >= 0")
    _check_weights(rep, n1, n2)
    if route == "integral":
        if isinstance(rep, Continuous):
            vals, est = _cont_melem_trap(np.array([rep.nu]), n1, n2, s)
            return SphericalValue(complex(vals[0]), route, float(est[0]))
        val, est = _disc_melem_trap(rep.m, n1, n2, s)
        return SphericalValue(val, route, est)
    if route == "hypergeometric":
        nu = hyp_route_nu(rep)
        dn = abs(n1 - n2)
        a = 1j * nu + 0.5 + dn / 4 + (n1 + n2) / 4
        b = 1j * nu + 0.5 + dn / 4 - (n1 + n2) / 4
        x = np.tanh(s / 2) ** 2
        F = hyp2f1_c1(a, b, x)
        val = np.tanh(s / 2) ** (dn / 2) * np.cosh(s / 2) ** (-2j * nu - 1) * F
        return SphericalValue(complex(val), route, 1e-14 * abs(val))
    if route == "jacobi":
        if n1 != n2:
            raise RouteError("jacobi route only evaluates diagonal elements")
        val = np.cosh(s / 2) ** n1 * jacobi_phi(0.0, n1, _rep_lambda_jacobi(rep), s / 2)
        return SphericalValue(complex(val), route, 1e-14 * abs(val))
    raise RouteError(f"unknown route {route!r}")


def diag_element(rep, n, s):
    """Diagonal element with automatic route selection; returns (value, est)."""
    if isinstance(rep, Continuous):
        vals, est = cont_diag_batch(np.array([rep.nu]), n, s)
        return complex(vals[0]), float(est[0])
    return disc_diag(rep.m, n, s), 0.0


def phi(n, rep, g):
    """Spherical-type function <e_n, U(g) e_n> of the K-type n.

    Equivariance phi(k_a g k_b) = e^{-i n (a+b)/2} phi(g); value 1 at the
    identity; satisfies the Laplacian eigenvalue law with the heat
    eigenvalue of (n, rep).
    """
    if not ghat_contains(n, rep):
        raise SpectrumMismatchError(f"{rep} does not couple to K-type {n}")
    th1, s, th2 = cartan(g)
    val, est = diag_element(rep, n, s)
    phase = np.exp(-0.5j * n * (th1 + th2))
    return SphericalValue(complex(phase * val), "integral" if s <= S_SWITCH else "expansion", est)


def phi_tilde(n, rep, g):
    """Conjugate spherical function <U(g) e_n, e_n>; equals phi at g^{-1}."""
    v = phi(n, rep, g)
    return SphericalValue(np.conj(v.value), v.route, v.est_error)


_DIRECTIONS = ("X1", "Y1", "Y2")


def _ladder_coefficients(n, rep):
    """(c_minus, c_plus) with dU(Y1) e_n = (c_minus e_{n-2} + c_plus e_{n+2})/(2 sqrt8)."""
    if isinstance(rep, Continuous):
        return (2j * rep.nu + 1 - n), (2j * rep.nu + 1 + n)
    return complex(rep.m - n), complex(rep.m + n)


def phi_tilde_derivative(n, rep, g, direction):
    """Left-invariant derivative of phi_tilde along a frame direction.

    X1 acts diagonally: the value is -(i n / sqrt8) phi_tilde(g).  Y1 and Y2
    combine the two ladder neighbours,

        Y1: ( c_- G_{n-2} + c_+ G_{n+2} ) / (2 sqrt8),
        Y2: i( c_- G_{n-2} - c_+ G_{n+2} ) / (2 sqrt8),

    where G_{n'} = <U(g) e_{n'}, e_n> carries the Cartan phase
    e^{i(n th1 + n' th2)/2} and c_-, c_+ are the ladder coefficients of the
    series.  At the edge of a discrete weight set the out-of-set neighbour
    has coefficient 0 and is skipped.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    if not ghat_contains(n, rep):
        raise SpectrumMismatchError(f"{rep} does not couple to K-type {n}")
    if direction == "X1":
        return -1j * n / SQRT8 * phi_tilde(n, rep, g).value
    cm, cp = _ladder_coefficients(n, rep)
    th1, s, th2 = cartan(g)

    def _G(nprime):
        if isinstance(rep, Continuous):
            vals, _ = _cont_melem_trap(np.array([rep.nu]), nprime, n, s)
            m_val = complex(vals[0])
        else:
            m_val = _disc_melem_series(rep.m, nprime, n, s)
        return np.exp(0.5j * (n * th1 + nprime * th2)) * m_val

    terms = []
    for coef, nprime in ((cm, n - 2), (cp, n + 2)):
        if coef == 0:
            terms.append(0.0 + 0j)
            continue
        if not ghat_contains(nprime, rep):
            raise WeightError(
                f"ladder target {nprime} outside the weight set of {rep} "
                "with nonzero coefficient")
        terms.append(coef * _G(nprime))
    if direction == "Y1":
        return (terms[0] + terms[1]) / (2 * SQRT8)
    return 1j * (terms[0] - terms[1]) / (2 * SQRT8)


# ----------------------------------------------------------------------
# qualification: route agreement and frozen normalizations
# ----------------------------------------------------------------------

QUAL_S = (0.25, 0.5, 1.0, 2.0, 3.0)
QUAL_NU = (0.3, 0.7, 1.5, 4.0)
QUAL_N = tuple(range(-4, 5))
QUAL_M = (2, 3, 4)


def _qual_points():
    pts = []
    for nu in QUAL_NU:
        for n in QUAL_N:
            pts.append((Continuous(abs(n) % 2, nu), n))
    for m in QUAL_M:
        for n in QUAL_N:
            rep = Discrete(m, -1 if n > 0 else +1)
            if ghat_contains(n, rep):
                pts.append((rep, n))
    return pts


def _fit_nu_squared(rep, n):
    """Least-squares nu^2 of the hypergeometric route against the integral route."""
    s_pts = QUAL_S

    def mismatch(u):
        nu = np.sqrt(u) if u >= 0 else -1j * np.sqrt(-u)
        tot = 0.0
        for s in s_pts:
            a = 1j * nu + 0.5 + n / 2
            b = 1j * nu + 0.5 - n / 2
            F = hyp2f1_c1(a, b, np.tanh(s / 2) ** 2)
            hyp = np.cosh(s / 2) ** (-2j * nu - 1) * F
            ref = matrix_element(rep, n, n, s, route="integral").value
            tot += abs(hyp - ref) ** 2
        return tot

    u0 = (-2 * casimir_character(rep) - 0.25)
    if isinstance(rep, Discrete):
        u0 = -((rep.m - 1) / 2) ** 2
    span = max(0.5, 0.2 * abs(u0))
    res = optimize.minimize_scalar(mismatch, bounds=(u0 - span, u0 + span),
                                   method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(res.fun)


def run_qualification(fit_points=20):
    """Route-agreement sweep plus the frozen-normalization regression data.

    Returns a JSON-serializable report: per-route maximum deviations from the
    integral route on the qualification grid, the least-squares confirmation
    of the hypergeometric nu normalization (nu^2 = -2 chi - 1/4), and the
    adopted Jacobi prefactor with the raw discrepancy of the rejected
    (cosh s)^n variant.
    """
    report = {
        "grid": {"s": list(QUAL_S), "nu": list(QUAL_NU), "n": list(QUAL_N), "m": list(QUAL_M)},
        "frozen_nu_map": "nu^2 = -2*casimir_character - 1/4",
        "jacobi_prefactor": "cosh(s/2)**n",
    }
    max_hyp = 0.0
    max_jac = 0.0
    for rep, n in _qual_points():
        for s in QUAL_S:
            ref = matrix_element(rep, n, n, s, route="integral").value
            hyp = matrix_element(rep, n, n, s, route="hypergeometric").value
            jac = matrix_element(rep, n, n, s, route="jacobi").value
            max_hyp = max(max_hyp, abs(hyp - ref))
            max_jac = max(max_jac, abs(jac - ref))
    report["max_delta_hypergeometric"] = max_hyp
    report["max_delta_jacobi"] = max_jac

    fits = []
    pts = [p for p in _qual_points() if abs(p[1]) <= 3][:fit_points]
    for rep, n in pts:
        u_fit, resid = _fit_nu_squared(rep, n)
        u_frozen = -2 * casimir_character(rep) - 0.25
        fits.append({
            "rep": repr(rep), "n": n, "nu_sq_fit": u_fit,
            "nu_sq_frozen": u_frozen, "fit_residual": resid,
        })
    report["nu_fit"] = fits
    report["nu_fit_max_abs_dev"] = max(abs(f["nu_sq_fit"] - f["nu_sq_frozen"]) for f in fits)

    # rejected prefactor variant (cosh s)^n, sampled where n != 0
    rep, n, s = Continuous(0, 0.7), 2, 1.0
    ref = matrix_element(rep, n, n, s, route="integral").value
    adopted = np.cosh(s / 2) ** n * jacobi_phi(0.0, n, 2 * rep.nu, s / 2)
    printed = np.cosh(s) ** n * jacobi_phi(0.0, n, 2 * rep.nu, s / 2)
    report["jacobi_prefactor_check"] = {
        "sample": {"nu": rep.nu, "n": n, "s": s},
        "adopted_delta": abs(adopted - ref),
        "printed_cosh_s_delta": abs(printed - ref),
    }

    # off-diagonal: printed hypergeometric form is not normalization-matched
    off_ref = matrix_element(Continuous(0, 0.7), 0, 2, 1.0, route="integral").value
    off_hyp = matrix_element(Continuous(0, 0.7), 0, 2, 1.0, route="hypergeometric").value
    report["offdiagonal_note"] = {
        "delta_sample": abs(off_hyp - off_ref),
        "comment": "off-diagonal closed form uses a different weight-vector "
                   "normalization; ladder derivatives use the integral route",
    }
    return report


def write_qualification_report(path, report=None):
    if report is None:
        report = run_qualification()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
    return report
