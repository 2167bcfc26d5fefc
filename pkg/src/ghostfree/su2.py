"""Gauss decomposition of exp(mu S- + tau S+) for S- = p_x p_y, S+ = x y.

With S_z = i (p_x x + y p_y) / 2 the three operators close an su(2) algebra,
and

    exp(mu S- + tau S+) = exp(zeta_plus S+) exp(log(zeta_z) S_z) exp(zeta_minus S-).
"""

from dataclasses import dataclass

import numpy as np

from .numeric import cosh_sqrt, tanhc_sqrt
from .operator_algebra import CanonicalMap, WeylQuadraticForm


@dataclass(frozen=True)
class GaussFactors:
    zeta_z: float
    zeta_plus: float
    zeta_minus: float


def gauss_decompose(mu, tau):
    """Triangular factors of exp(mu S- + tau S+).

    zeta_z = 1/cosh^2(theta), zeta_plus = tau tanh(theta)/theta and
    zeta_minus = mu tanh(theta)/theta with theta^2 = mu*tau; all three are even in
    theta and are evaluated as functions of mu*tau, so mu*tau < 0 needs no
    complex square root.
    """
    s = mu * tau
    c = cosh_sqrt(s)
    if c == 0.0:
        raise ZeroDivisionError("cosh(sqrt(mu*tau)) vanishes")
    tc = tanhc_sqrt(s)
    return GaussFactors(zeta_z=1.0 / (c * c), zeta_plus=tau * tc, zeta_minus=mu * tc)


def s_minus(coefficient=1.0):
    return WeylQuadraticForm.from_terms({("px", "py"): coefficient})


def s_plus(coefficient=1.0):
    return WeylQuadraticForm.from_terms({("x", "y"): coefficient})


def s_z(coefficient=1.0):
    # i/2 (p_x x + y p_y) equals i/2 (sym(x p_x) + sym(y p_y)) exactly: the
    # ordering constants -i/2 and +i/2 cancel.
    return WeylQuadraticForm.from_terms(
        {("x", "px"): 0.5j * coefficient, ("y", "py"): 0.5j * coefficient}
    )


def eta_minus_map(zeta_minus):
    """x -> x - i zeta p_y, y -> y - i zeta p_x, momenta fixed."""
    S = np.eye(4, dtype=complex)
    S[0, 3] = -1j * zeta_minus
    S[1, 2] = -1j * zeta_minus
    return CanonicalMap(S)


def eta_z_map(zeta_z):
    """Dilation x -> sqrt(zeta) x, p -> p / sqrt(zeta)."""
    r = np.sqrt(complex(zeta_z))
    return CanonicalMap(np.diag([r, r, 1 / r, 1 / r]))


def eta_plus_map(zeta_plus):
    """p_x -> p_x + i zeta y, p_y -> p_y + i zeta x, positions fixed."""
    S = np.eye(4, dtype=complex)
    S[2, 1] = 1j * zeta_plus
    S[3, 0] = 1j * zeta_plus
    return CanonicalMap(S)
