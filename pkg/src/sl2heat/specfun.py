"""Special functions backing the matrix-element evaluations.

Gauss hypergeometric series with complex parameters (c = 1 surface plus the
general-c machinery needed for argument transformations), Jacobi functions
phi_lambda^{(alpha,beta)}, and a periodic trapezoid rule.
"""

import numpy as np
from scipy import special

from .errors import ConvergenceError, SingularityError

_X_SWITCH = 0.7          # beyond this, series in x is replaced by series in 1-x
_X_GUARD = 1e-6          # series surface keeps x < 1 - guard
_MAX_TERMS = 100_000
_REL_TOL = 1e-14


def _nonpositive_int(z, tol=1e-12):
    """Return k >= 0 with z == -k if z is (numerically) a nonpositive integer."""
    z = complex(z)
    if abs(z.imag) > tol:
        return None
    k = round(z.real)
    if k <= 0 and abs(z.real - k) <= tol:
        return -k
    return None


def hyp_series(a, b, c, x, rtol=_REL_TOL, max_terms=_MAX_TERMS):
    """Plain power series sum_k (a)_k (b)_k / ((c)_k k!) x^k.

    Parameters may be complex scalars or broadcastable arrays (x scalar).
    Terminates exactly when a or b is a scalar nonpositive integer; otherwise
    stops after three consecutive terms below rtol relative, or raises
    ConvergenceError at the term budget.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    shape = np.broadcast(a, b, c).shape
    term = np.ones(shape, dtype=complex)
    total = term.copy()
    for scalar in (a, b):
        if scalar.shape == ():
            k = _nonpositive_int(complex(scalar))
            if k is not None:
                for j in range(k):
                    term = term * (a + j) * (b + j) / ((c + j) * (1.0 + j)) * x
                    total = total + term
                return total if shape else complex(total)
    quiet = 0
    for j in range(max_terms):
        term = term * (a + j) * (b + j) / ((c + j) * (1.0 + j)) * x
        total = total + term
        if np.all(np.abs(term) <= rtol * (np.abs(total) + 1e-300)):
            quiet += 1
            if quiet >= 3:
                return total if shape else complex(total)
        else:
            quiet = 0
    raise ConvergenceError(f"hypergeometric series: no convergence in {max_terms} terms")


def hyp_connection(a, b, c, x, rtol=_REL_TOL):
    """F(a,b;c;x) through the two-term expansion around x = 1.

    Valid when c - a - b is not an integer; both sub-series run in 1 - x.
    Parameters may be broadcastable arrays (x scalar).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    y = 1.0 - x
    g = special.gamma
    t1 = g(c) * g(c - a - b) / (g(c - a) * g(c - b)) * hyp_series(a, b, a + b - c + 1, y, rtol)
    t2 = (np.asarray(y, dtype=complex) ** (c - a - b)) * g(c) * g(a + b - c) / (g(a) * g(b)) \
        * hyp_series(c - a, c - b, c - a - b + 1, y, rtol)
    out = t1 + t2
    return out if out.shape else complex(out)


def _hyp_auto(a, b, c, x, rtol=_REL_TOL):
    """Scalar F(a,b;c;x) on x in [0, 1): series, terminating sum, or connection."""
    if x == 0:
        return 1.0 + 0j
    if x < 0 or x >= 1:
        raise ConvergenceError(f"argument {x} outside [0, 1)")
    if _nonpositive_int(a) is not None or _nonpositive_int(b) is not None:
        return complex(hyp_series(a, b, c, x, rtol))
    if x <= _X_SWITCH:
        return complex(hyp_series(a, b, c, x, rtol))
    delta = complex(c) - complex(a) - complex(b)
    if _nonpositive_int(delta) is not None or _nonpositive_int(-delta) is not None \
            or abs(delta) < 1e-8:
        # degenerate connection case: fall back to the direct series
        if x > 1 - _X_GUARD:
            raise ConvergenceError("degenerate connection parameters too close to x = 1")
        return complex(hyp_series(a, b, c, x, rtol, max_terms=_MAX_TERMS))
    return complex(hyp_connection(a, b, c, x, rtol))


def hyp2f1_c1(a, b, x, rtol=_REL_TOL):
    """Gauss hypergeometric F(a, b; 1; x) for complex a, b and real x in [0, 1).

    Direct series up to x = 0.7; argument transformation toward x = 1 beyond
    (cross-checked against the series in tests), exact finite sum whenever a
    or b is a nonpositive integer.
    """
    return _hyp_auto(a, b, 1.0, float(x), rtol)


def jacobi_phi(alpha, beta, lam, t, rtol=_REL_TOL):
    """Jacobi function phi_lam^{(alpha,beta)}(t): the even solution of

        phi'' + ((2a+1) coth t + (2b+1) tanh t) phi' + (lam^2 + (a+b+1)^2) phi = 0

    with phi(0) = 1, evaluated via its hypergeometric closed form.

    Frobenius analysis at the regular singular point t = 0 gives the analytic
    solution F(ap, bp; alpha+1; -sinh^2 t) with ap, bp = (alpha+beta+1 -+ i lam)/2;
    a Pfaff transformation moves the argument to tanh^2 t in [0, 1), which is
    the form evaluated here (stable for all t >= 0).
    """
    alpha = complex(alpha)
    if _nonpositive_int(alpha + 1) is not None:
        raise SingularityError(f"alpha = {alpha} hits a pole (nonpositive integer)")
    t = float(t)
    if t < 0:
        t = -t  # even function
    ap = (alpha + beta + 1 - 1j * lam) / 2
    bp = (alpha + beta + 1 + 1j * lam) / 2
    c = alpha + 1
    x = np.tanh(t) ** 2
    val = _hyp_auto(ap, c - bp, c, x, rtol)
    return complex(np.cosh(t) ** (-2 * ap) * val)


def trapezoid_periodic(f, n_nodes):
    """Equispaced trapezoid rule for a 4pi-periodic function on [0, 4pi).

    f maps an array of nodes to values; returns sum(f) * (4pi / n_nodes).
    Spectrally accurate for smooth periodic integrands.
    """
    psi = np.arange(n_nodes) * (4 * np.pi / n_nodes)
    return complex(np.sum(np.asarray(f(psi))) * (4 * np.pi / n_nodes))
