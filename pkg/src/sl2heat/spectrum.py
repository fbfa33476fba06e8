"""Tempered dual of SL(2,R) restricted to a K-type: enumeration, Casimir
characters, heat eigenvalues, Plancherel densities, and truncation bounds.

A point of the support of the Plancherel measure coupling to the K-character
exp(i*n*theta/2) is either a principal (continuous) series point
Continuous(eps, nu) with eps = n mod 2, nu > 0, or a discrete series point
Discrete(m, sign) with 2 <= m <= |n|, m = n mod 2.  The sign convention
follows the weight sets: weights n >= m live in the sign = -1 family,
weights n <= -m in sign = +1.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, SpectrumMismatchError


@dataclass(frozen=True)
class Continuous:
    """Principal series point; eps in {0, 1} is the parity, nu > 0."""
    eps: int
    nu: float

    def __post_init__(self):
        if self.eps not in (0, 1):
            raise DomainError(f"eps must be 0 or 1, got {self.eps}")


@dataclass(frozen=True)
class Discrete:
    """Discrete series point; m >= 2, sign = +1 (weights <= -m) or -1 (>= m)."""
    m: int
    sign: int = -1

    def __post_init__(self):
        if self.m < 2:
            raise DomainError(f"discrete series needs m >= 2, got {self.m}")
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")


RepPoint = Union[Continuous, Discrete]


def ghat_contains(n, rep):
    """Whether rep couples to the K-type n (lies in the n-restricted dual)."""
    if isinstance(rep, Continuous):
        return rep.nu > 0 and rep.eps == abs(n) % 2
    if (abs(n) - rep.m) % 2 != 0 or abs(n) < rep.m:
        return False
    return (n >= rep.m and rep.sign == -1) or (n <= -rep.m and rep.sign == +1)


def casimir_character(rep):
    """Scalar by which the Casimir element acts in the representation."""
    if isinstance(rep, Continuous):
        return -0.5 * (rep.nu ** 2 + 0.25)
    return rep.m * (rep.m - 2) / 8.0


def heat_eigenvalue(n, rep):
    """Laplacian eigenvalue -n^2/4 + Casimir character on the K-type-n line.

    Strictly negative on the whole relevant spectrum.
    """
    if not ghat_contains(n, rep):
        raise SpectrumMismatchError(f"{rep} does not couple to K-type {n}")
    lam = -0.25 * n * n + casimir_character(rep)
    assert lam < 0
    return lam


def plancherel_weight(rep):
    """Plancherel density (continuous, per d nu) or point mass (discrete).

    (1/2pi) nu tanh(pi nu) for even parity, (1/2pi) nu coth(pi nu) for odd,
    (m-1)/(4pi) for the discrete series.
    """
    if isinstance(rep, Discrete):
        return (rep.m - 1) / (4 * np.pi)
    if rep.nu <= 0:
        raise DomainError("continuous Plancherel density needs nu > 0")
    t = np.tanh(np.pi * rep.nu)
    return rep.nu * (t if rep.eps == 0 else 1.0 / t) / (2 * np.pi)


def plancherel_density(eps, nu):
    """Vectorized continuous-series density over an array of nu > 0."""
    nu = np.asarray(nu, dtype=float)
    t = np.tanh(np.pi * nu)
    return nu * (t if eps == 0 else 1.0 / t) / (2 * np.pi)


def enumerate_discrete(n):
    """Discrete series points coupling to K-type n, ordered by m."""
    n = int(n)
    sign = -1 if n > 0 else +1
    start = 2 if n % 2 == 0 else 3
    return [Discrete(m, sign) for m in range(start, abs(n) + 1, 2)]


@dataclass(frozen=True)
class SpectralPoint:
    rep: RepPoint
    n: int
    eigenvalue: float
    weight: float


def discrete_spectral_points(n):
    """Discrete part of the spectrum for K-type n with eigenvalues and masses."""
    return [SpectralPoint(rep=r, n=n, eigenvalue=heat_eigenvalue(n, r),
                          weight=plancherel_weight(r))
            for r in enumerate_discrete(n)]


def ktype_tail_bound(T, n):
    """Upper bound for int e^{T lambda} dmu over the K-type-n spectrum.

    Continuous part: bound the density by (1/2pi) nu max(tanh nu, coth nu),
    split at nu = 1, giving (e^{-T/8}/pi)(1 + e^{-T/2}/T) e^{-T n^2/4}.
    Discrete part: each of the <= |n|/2 masses is at most
    e^{-T n^2/8} |n|/(4pi), giving (1/8pi) e^{-T n^2/8} n^2.
    Used to pick the K-type cutoff of the synthesis sum.
    """
    if T <= 0:
        raise DomainError("tail bound needs T > 0")
    n2 = float(n) * float(n)
    cont = (np.exp(-T / 8) / np.pi) * (1 + np.exp(-T / 2) / T) * np.exp(-T * n2 / 4)
    disc = n2 / (8 * np.pi) * np.exp(-T * n2 / 8)
    return cont + disc


# slope bound for the continuous density: (1/2pi) coth(pi) >= d(weight)/d nu scale
_DENSITY_SLOPE = 1.0 / np.tanh(np.pi) / (2 * np.pi)


def nu_cutoff(t, n, tol):
    """Smallest V such that the discarded tail of the nu-integral is <= tol.

    The tail of int_V^inf e^{t lambda} weight d nu is below
    (c/t) e^{-t V^2 / 2} with c = coth(pi)/(2pi); solve for V.  Monotone
    decreasing in t, can be 0 for very loose tolerances.
    """
    if t <= 0 or tol <= 0:
        raise DomainError("nu_cutoff needs t > 0 and tol > 0")
    arg = _DENSITY_SLOPE / (t * tol)
    if arg <= 1.0:
        return 0.0
    return float(np.sqrt(2.0 * np.log(arg) / t))


def nu_tail_bound(t, V):
    """Proven bound on the nu-integral tail discarded beyond the cutoff V."""
    if t <= 0:
        raise DomainError("nu_tail_bound needs t > 0")
    return float(_DENSITY_SLOPE / t * np.exp(-0.5 * t * V * V))
