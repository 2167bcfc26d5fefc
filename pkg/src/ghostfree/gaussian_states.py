"""Gaussian wavefunctions psi(x, y) = exp(-1/2 r^T A r + log_norm), r = (x, y).

The exponent matrix is A = [[alpha, -gamma], [-gamma, beta]], matching
exp(-alpha x^2/2 - beta y^2/2 + gamma x y).
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ChiSingular, SingularExponent
from .numeric import get_policy
from .su2 import gauss_decompose


class Divergence(enum.Enum):
    DIVERGENT = "divergent"

    def __bool__(self):
        return False


DIVERGENT = Divergence.DIVERGENT


@dataclass(frozen=True, eq=False)
class GaussianState:
    A: np.ndarray
    log_norm: complex = 0.0

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        if A.shape != (2, 2):
            raise ValueError(f"expected a 2x2 exponent matrix, got shape {A.shape}")
        if A[0, 1] != A[1, 0]:
            raise ValueError("exponent matrix must be symmetric")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "log_norm", complex(self.log_norm))

    @classmethod
    def from_params(cls, alpha, beta, gamma, log_norm=0.0):
        return cls(np.array([[alpha, -gamma], [-gamma, beta]], dtype=complex), log_norm)

    @property
    def alpha(self):
        return self.A[0, 0]

    @property
    def beta(self):
        return self.A[1, 1]

    @property
    def gamma(self):
        return -self.A[0, 1]

    @property
    def params(self):
        return self.alpha, self.beta, self.gamma

    def normalisability(self):
        """(a, b, ab - c^2) of Re(A) written in (alpha, beta, gamma) form."""
        R = self.A.real
        return R[0, 0], R[1, 1], R[0, 0] * R[1, 1] - R[0, 1] ** 2

    def is_normalisable(self, tol=None):
        tol = get_policy().region if tol is None else tol
        return all(q > tol for q in self.normalisability())


def _symmetric(K):
    K = np.asarray(K, dtype=complex)
    return (K + K.T) / 2


def multiply_position_gaussian(K, psi):
    """Multiply psi by exp(-1/2 r^T K r)."""
    return GaussianState(psi.A + _symmetric(K), psi.log_norm)


def _det2(A):
    return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]


def _inv2(A, det):
    return np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]) / det


def _singular(det, A, pole):
    return not np.isfinite(det) or abs(det) <= pole * max(1.0, np.abs(A).max() ** 2)


def multiply_momentum_gaussian(K, psi):
    """Apply exp(+1/2 p^T K p) with p = -i grad.

    In Fourier space the state is exp(-1/2 k^T A^-1 k), so the exponent becomes
    A^-1 - K and A -> (A^-1 - K)^-1.  The Gaussian integrals give the prefactor
    1/sqrt(det(A) det(A^-1 - K)) = 1/sqrt(det(I - A K)).
    """
    K = _symmetric(K)
    pole = get_policy().pole
    A = psi.A
    det_A = _det2(A)
    if _singular(det_A, A, pole):
        raise SingularExponent(f"det(A) = {det_A:.3e}")
    B = _inv2(A, det_A) - K
    det_B = _det2(B)
    if _singular(det_B, B, pole):
        raise SingularExponent(f"det(A^-1 - K) = {det_B:.3e}")
    A_new = _inv2(B, det_B)
    A_new = (A_new + A_new.T) / 2
    log_norm = psi.log_norm - 0.5 * np.log(det_A * det_B)
    return GaussianState(A_new, log_norm)


def scale_state(zeta, psi):
    """Apply exp(log(zeta) S_z): psi(r) -> sqrt(zeta) psi(sqrt(zeta) r).

    S_z = i/2 (p_x x + y p_y) = (r . grad)/2 + 1/2 on two coordinates.
    """
    if zeta == 0:
        raise ValueError("zeta must be nonzero")
    return GaussianState(zeta * psi.A, psi.log_norm + 0.5 * np.log(complex(zeta)))


def position_offdiag(zeta_plus):
    """K with exp(-1/2 r^T K r) = exp(zeta_plus x y)."""
    return np.array([[0.0, -zeta_plus], [-zeta_plus, 0.0]], dtype=complex)


def momentum_offdiag(zeta_minus):
    """K with exp(1/2 p^T K p) = exp(zeta_minus p_x p_y)."""
    return np.array([[0.0, zeta_minus], [zeta_minus, 0.0]], dtype=complex)


def chi(zeta_minus, psi):
    a, b, c = psi.params
    return zeta_minus**2 * (c * c - a * b) + 2 * c * zeta_minus + 1


def apply_eta2(mu, tau, psi):
    """Apply exp(mu p_x p_y + tau x y) factor by factor (minus, z, plus)."""
    factors = gauss_decompose(mu, tau)
    x = chi(factors.zeta_minus, psi)
    if abs(x) <= get_policy().pole:
        raise ChiSingular(f"chi = {x:.3e}")
    out = multiply_momentum_gaussian(momentum_offdiag(factors.zeta_minus), psi)
    out = scale_state(factors.zeta_z, out)
    return multiply_position_gaussian(position_offdiag(factors.zeta_plus), out)


@dataclass(frozen=True)
class Residual:
    Q: np.ndarray
    r: complex

    @property
    def size(self):
        return max(float(np.abs(self.Q).max()), abs(self.r))


def eigen_residual(H, psi, E):
    """Residual of H psi = E psi for a Weyl form H and a Gaussian psi.

    With p_b psi = i (A r)_b psi one finds H psi = (r^T Q r + t) psi where

        Q = M_xx + 2i sym(M_xp A) - A M_pp A,
        t = tr(M_pp A) - i tr(M_xp) + shift,

    the -i tr(M_xp) term coming from sym(x p) = x p - i/2.
    """
    M = H.M
    A = psi.A
    Mxx, Mxp, Mpp = M[:2, :2], M[:2, 2:], M[2:, 2:]
    cross = Mxp @ A
    Q = Mxx + 1j * (cross + cross.T) - A @ Mpp @ A
    t = np.trace(Mpp @ A) - 1j * np.trace(Mxp) + H.shift
    return Residual(Q=Q, r=complex(t - E))


def _gaussian_integral(B):
    """Integral of exp(-1/2 r^T B r) over R^2 for Re(B) positive definite.

    The eigenvalues of such a B have positive real part, so the product of their
    principal square roots is the analytic continuation of sqrt(det B).
    """
    eig = np.linalg.eigvals(B)
    return 2 * math.pi / np.prod(np.sqrt(eig.astype(complex)))


def _real_part_positive(B, tol):
    R = ((B + B.conj().T) / 2).real
    return bool(np.linalg.eigvalsh(R).min() > tol)


def norm_squared(psi):
    """Integral of |psi|^2, or DIVERGENT when Re(A) is not positive definite."""
    tol = get_policy().region
    if not _real_part_positive(psi.A, tol):
        return DIVERGENT
    B = psi.A + psi.A.conj()
    return float(math.exp(2 * psi.log_norm.real) * 2 * math.pi / math.sqrt(np.linalg.det(B.real)))


def overlap(bra, ket):
    """<bra|ket> = integral conj(bra) ket, or DIVERGENT."""
    B = bra.A.conj() + ket.A
    if not _real_part_positive(B, get_policy().region):
        return DIVERGENT
    return complex(np.exp(bra.log_norm.conjugate() + ket.log_norm) * _gaussian_integral(B))


def metric_inner_product(chain, phi, phi_prime):
    """<eta phi'|eta phi> = <phi'|rho phi> with rho = eta^dagger eta.

    ``chain`` lists state transformations in the order they act, so
    ``[eta0, eta1, eta2]`` realises eta = eta2 eta1 eta0.
    """
    ket, bra = phi, phi_prime
    for step in chain:
        ket = step(ket)
        bra = step(bra)
    return overlap(bra, ket)
