"""Quadratic operators on the phase space (x, y, p_x, p_y).

A quadratic Hamiltonian is stored in Weyl (symmetrized) form

    H = sum_jk M_jk * (z_j z_k + z_k z_j) / 2 + shift

with z = (x, y, p_x, p_y).  The adjoint action of the exponential of a quadratic
generator, eta z_j eta^-1 = sum_k S_jk z_k, is a linear map S that preserves the
commutation matrix, and acts on Weyl forms as M -> S^T M S.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NonCanonicalMap, NotHermitian
from .numeric import get_policy

LABELS = ("x", "y", "px", "py")
X, Y, PX, PY = range(4)

# C_jk = [z_j, z_k] / i
COMMUTATION = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)

# parity on (x, y, p_x, p_y); time reversal is complex conjugation
PARITY = np.diag([-1.0, -1.0, 1.0, 1.0])


def _index(label):
    if isinstance(label, (int, np.integer)):
        return int(label)
    return LABELS.index(label)


@dataclass(frozen=True, eq=False)
class WeylQuadraticForm:
    """Quadratic operator in symmetrized ordering.

    Parameters
    ----------
    M : array_like, shape (4, 4)
        Complex symmetric coefficient matrix.  Non-symmetric input is rejected.
    shift : complex
        Constant term.
    """

    M: np.ndarray
    shift: complex = 0.0

    def __post_init__(self):
        M = np.array(self.M, dtype=complex)
        if M.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {M.shape}")
        if not np.array_equal(M, M.T):
            raise ValueError("Weyl coefficient matrix must be symmetric")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "shift", complex(self.shift))

    @classmethod
    def from_terms(cls, terms, shift=0.0):
        """Build a form from monomial coefficients.

        ``terms`` maps pairs of labels, e.g. ``("x", "px")``, to the coefficient
        of the symmetrized monomial.  ``{("x", "px"): c}`` means
        ``c * (x p_x + p_x x) / 2``.
        """
        M = np.zeros((4, 4), dtype=complex)
        for (a, b), value in terms.items():
            j, k = _index(a), _index(b)
            if j == k:
                M[j, j] += value
            else:
                M[j, k] += value / 2
                M[k, j] += value / 2
        return cls(M, shift)

    def coefficient(self, a, b):
        """Coefficient of the symmetrized monomial z_a z_b."""
        j, k = _index(a), _index(b)
        return self.M[j, j] if j == k else 2 * self.M[j, k]

    def terms(self):
        out = {}
        for j in range(4):
            for k in range(j, 4):
                out[(LABELS[j], LABELS[k])] = self.coefficient(j, k)
        return out

    def __sub__(self, other):
        return WeylQuadraticForm(self.M - other.M, self.shift - other.shift)

    def max_abs(self):
        return max(float(np.abs(self.M).max()), abs(self.shift))


@dataclass(frozen=True, eq=False)
class CanonicalMap:
    """Linear action eta z_j eta^-1 = sum_k S_jk z_k on the phase-space basis.

    Construction does not validate S; call :meth:`check` or rely on
    :func:`transform_quadratic`, which refuses non-canonical maps.
    """

    S: np.ndarray = field(default_factory=lambda: np.eye(4, dtype=complex))

    def __post_init__(self):
        S = np.array(self.S, dtype=complex)
        if S.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {S.shape}")
        S.setflags(write=False)
        object.__setattr__(self, "S", S)

    @classmethod
    def identity(cls):
        return cls(np.eye(4, dtype=complex))

    def symplectic_residual(self):
        """max |S C S^T - C|."""
        return float(np.abs(self.S @ COMMUTATION @ self.S.T - COMMUTATION).max())

    def check(self, tol=None):
        """Raise NonCanonicalMap unless the residual, scaled by max(1, |S|^2), is within tol."""
        tol = get_policy().construction if tol is None else tol
        scale = max(1.0, float(np.abs(self.S).max()) ** 2)
        residual = self.symplectic_residual()
        if not residual <= tol * scale:
            raise NonCanonicalMap(
                f"symplectic residual {residual:.3e} exceeds {tol * scale:.3e}"
            )
        return residual

    def image(self, label):
        """Row of S for one basis operator, as {label: coefficient} without zeros."""
        row = self.S[_index(label)]
        return {LABELS[k]: row[k] for k in range(4) if row[k] != 0}


def transform_quadratic(S, H, tol=None):
    """Return eta H eta^-1 for the canonical map S of eta."""
    S.check(tol)
    M = S.S.T @ H.M @ S.S
    return WeylQuadraticForm((M + M.T) / 2, H.shift)


def compose_maps(S2, S1):
    """Map of the operator product eta2 eta1 (eta1 acts first).

    eta2 eta1 z eta1^-1 eta2^-1 = eta2 (S1 z) eta2^-1 = S1 S2 z.
    """
    return CanonicalMap(S1.S @ S2.S)


def ad_matrix(G):
    """Matrix A of z_j -> [G, z_j] = sum_k A_jk z_k for a quadratic G.

    [sym(z_a z_b), z_j] = i (C_bj z_a + C_aj z_b), hence A = -2i C M.
    """
    return -2j * COMMUTATION @ G.M


def bch_adjoint_oracle(G, K):
    """Truncated series sum_{k<=K} ad_G^k / k! restricted to span(z).

    Independent ground truth for the closed-form adjoint actions; the shift of G
    does not contribute.
    """
    if K < 1:
        raise ValueError("truncation order must be >= 1")
    A = ad_matrix(G)
    term = np.eye(4, dtype=complex)
    total = term.copy()
    for k in range(1, K + 1):
        term = term @ A / k
        total = total + term
    return CanonicalMap(total)


def is_hermitian(H, tol=None):
    """(flag, residual) with residual the largest imaginary part of a coefficient."""
    tol = get_policy().derived if tol is None else tol
    residual = max(float(np.abs(H.M.imag).max()), abs(H.shift.imag))
    return residual <= tol, residual


def is_pt_symmetric(H, tol=None):
    tol = get_policy().derived if tol is None else tol
    M_pt = PARITY @ H.M.conj() @ PARITY
    return bool(
        np.abs(M_pt - H.M).max() <= tol and abs(H.shift.conjugate() - H.shift) <= tol
    )


@dataclass(frozen=True)
class Definiteness:
    kinetic_signature: tuple
    form: str
    kinetic_eigenvalues: tuple
    eigenvalues: tuple

    @property
    def ghostly(self):
        return self.kinetic_signature == ("+", "-") or self.kinetic_signature == ("-", "+")


def _sign(value, tol):
    if value > tol:
        return "+"
    if value < -tol:
        return "-"
    return "0"


def classify_definiteness(H, tol=None):
    """Kinetic signature and definiteness of a Hermitian quadratic form.

    The kinetic signature lists the signs of the eigenvalues of the momentum
    block in descending order; ``("+", "-")`` marks a ghost.
    """
    policy = get_policy()
    herm, residual = is_hermitian(H)
    if not herm:
        raise NotHermitian(f"imaginary coefficients up to {residual:.3e}")
    tol = policy.region if tol is None else tol
    M = H.M.real
    kin = np.sort(np.linalg.eigvalsh(M[2:, 2:]))[::-1]
    eig = np.sort(np.linalg.eigvalsh(M))[::-1]
    scale = max(1.0, float(np.abs(eig).max()))
    if eig[-1] > tol * scale:
        form = "positive definite"
    elif eig[0] < -tol * scale:
        form = "negative definite"
    elif eig[-1] >= -tol * scale:
        form = "positive semidefinite"
    elif eig[0] <= tol * scale:
        form = "negative semidefinite"
    else:
        form = "indefinite"
    return Definiteness(
        kinetic_signature=tuple(_sign(v, tol) for v in kin),
        form=form,
        kinetic_eigenvalues=tuple(float(v) for v in kin),
        eigenvalues=tuple(float(v) for v in eig),
    )


