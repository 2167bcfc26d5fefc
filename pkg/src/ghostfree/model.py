"""The ghostly oscillator h0 = p_x^2 - p_y^2 + nu^2 x^2 + Omega y^2 + g x y and its maps.

Three non-unitary maps are applied in turn,

    eta0 = exp(-delta x^2/2 - lambda y^2/2)
    eta1 = exp(kappa p_x^2/2 + xi p_y^2/2)
    eta2 = exp(mu p_x p_y + tau x y)

taking h0 to H1 (non-Hermitian), H2 (Hermitian at g = 0) and h3 (Hermitian
under the eta2 constraints).  Every derived Hamiltonian is available both from
the map chain and from its closed form.
"""

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import gaussian_states as gs
from .errors import (
    ChiSingular,
    LambdaZero,
    OmegaInconsistent,
    SigmaZero,
    SingularChoice,
    SingularExponent,
    ThetaOutOfRange,
)
from .numeric import cosh_sqrt, get_policy, sinhc_sqrt
from .operator_algebra import CanonicalMap, WeylQuadraticForm, compose_maps, transform_quadratic
from .su2 import GaussFactors, eta_minus_map, eta_plus_map, eta_z_map, gauss_decompose

__all__ = [
    "ModelParams", "SectorLabel", "SECTORS", "SectorFrame", "SpectrumLevel",
    "ChainParams", "H3Constraints", "GaussFactors", "sector_params", "ground_state",
    "energy_levels", "level_energy", "build_h0", "build_eta0", "build_eta1",
    "build_eta2", "eta0_generator", "eta1_generator", "eta2_generator",
    "hermitising_choices", "derive_H1", "derive_H2", "derive_h3", "closed_form_H1",
    "closed_form_H2", "closed_form_h3", "theta", "eta2_constraints", "delta_branches",
    "gauss_decompose", "composed_eta2", "hat_parameters", "check_parameters",
    "state_chain",
]


@dataclass(frozen=True)
class ModelParams:
    nu: float
    omega: float
    g: float

    def __post_init__(self):
        for name in ("nu", "omega", "g"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class SectorLabel:
    eps: int
    eta: int

    def __post_init__(self):
        if self.eps not in (1, -1) or self.eta not in (1, -1):
            raise ValueError("eps and eta must be +1 or -1")

    def __str__(self):
        return f"({self.eps:+d},{self.eta:+d})"


SECTORS = tuple(SectorLabel(e, h) for e in (1, -1) for h in (1, -1))


@dataclass(frozen=True)
class SectorFrame:
    sigma: complex
    Sigma: complex
    alpha: complex
    beta: complex
    gamma: complex
    label: SectorLabel
    params: ModelParams
    is_real: bool

    @property
    def ground_energy(self):
        return self.alpha - self.beta

    def normalisability(self):
        return (
            self.alpha.real,
            self.beta.real,
            (self.alpha * self.beta - self.gamma**2).real,
        )


def sector_params(p, s):
    """Branch data alpha, beta, gamma of one (eps, eta) sector, in complex arithmetic."""
    sigma = s.eps * np.sqrt(complex(p.g**2 - 4 * p.nu**2 * p.omega))
    radicand = p.nu**2 - p.omega + sigma
    if radicand == 0:
        raise SigmaZero(f"nu^2 - Omega + sigma vanishes in sector {s}")
    Sigma = 2 * s.eta * np.sqrt(radicand)
    alpha = (2 * p.nu**2 + sigma) / Sigma
    beta = (2 * p.omega - sigma) / Sigma
    gamma = -p.g / Sigma
    tol = get_policy().derived
    is_real = all(abs(v.imag) <= tol for v in (alpha, beta, gamma))
    return SectorFrame(
        sigma=complex(sigma),
        Sigma=complex(Sigma),
        alpha=complex(alpha),
        beta=complex(beta),
        gamma=complex(gamma),
        label=s,
        params=p,
        is_real=is_real,
    )


def ground_state(f):
    return gs.GaussianState.from_params(f.alpha, f.beta, f.gamma)


@dataclass(frozen=True)
class SpectrumLevel:
    N: int
    n: object  # 1..N//2, or "diag"
    sign: int  # +1, -1, or 0 for the diagonal level
    E: complex
    is_real: bool


def level_energy(frame, N, n, sign):
    """(N+1)(alpha-beta) + sign (2-2n+N) sqrt((alpha+beta)^2 - 4 gamma^2)."""
    root = np.sqrt(complex((frame.alpha + frame.beta) ** 2 - 4 * frame.gamma**2))
    return (N + 1) * frame.ground_energy + sign * (2 - 2 * n + N) * root


def energy_levels(f, N_max):
    """All levels with N <= N_max.

    The diagonal level (1+N)(alpha-beta) is emitted for even N only, so N = 0
    gives exactly the ground state; identical (N, E) pairs are reported once.
    """
    if N_max < 0:
        raise ValueError("N_max must be non-negative")
    tol = get_policy().derived
    disc = (f.alpha + f.beta) ** 2 - 4 * f.gamma**2
    radical_real = abs(disc.imag) <= tol and disc.real >= -tol
    frame_real = f.is_real
    levels = []
    for N in range(N_max + 1):
        seen = set()
        candidates = []
        for n in range(1, N // 2 + 1):
            for sign in (1, -1):
                candidates.append((n, sign, level_energy(f, N, n, sign), radical_real))
        if N % 2 == 0:
            candidates.append(("diag", 0, (1 + N) * f.ground_energy, True))
        for n, sign, E, real_root in candidates:
            key = (round(E.real, 12), round(E.imag, 12))
            if key in seen:
                continue
            seen.add(key)
            real = frame_real and real_root and abs(E.imag) <= tol
            levels.append(SpectrumLevel(N=N, n=n, sign=sign, E=complex(E), is_real=real))
    return levels


def build_h0(p):
    return WeylQuadraticForm.from_terms(
        {
            ("px", "px"): 1.0,
            ("py", "py"): -1.0,
            ("x", "x"): p.nu**2,
            ("y", "y"): p.omega,
            ("x", "y"): p.g,
        }
    )


def eta0_generator(delta, lam):
    return WeylQuadraticForm.from_terms({("x", "x"): -delta / 2, ("y", "y"): -lam / 2})


def eta1_generator(kappa, xi):
    return WeylQuadraticForm.from_terms({("px", "px"): kappa / 2, ("py", "py"): xi / 2})


def eta2_generator(mu, tau):
    return WeylQuadraticForm.from_terms({("px", "py"): mu, ("x", "y"): tau})


def build_eta0(delta, lam):
    """p_x -> p_x - i delta x, p_y -> p_y - i lambda y."""
    S = np.eye(4, dtype=complex)
    S[2, 0] = -1j * delta
    S[3, 1] = -1j * lam
    return CanonicalMap(S)


def build_eta1(kappa, xi):
    """x -> x - i kappa p_x, y -> y - i xi p_y."""
    S = np.eye(4, dtype=complex)
    S[0, 2] = -1j * kappa
    S[1, 3] = -1j * xi
    return CanonicalMap(S)


def build_eta2(mu, tau):
    """Rows cosh(theta) z -/+ i (mu or tau) sinh(theta)/theta z', theta^2 = mu tau."""
    s = mu * tau
    c = cosh_sqrt(s)
    sc = sinhc_sqrt(s)
    S = c * np.eye(4, dtype=complex)
    S[0, 3] = -1j * mu * sc
    S[1, 2] = -1j * mu * sc
    S[2, 1] = 1j * tau * sc
    S[3, 0] = 1j * tau * sc
    return CanonicalMap(S)


def composed_eta2(mu, tau):
    """eta_plus eta_z eta_minus assembled from the Gauss factors."""
    f = gauss_decompose(mu, tau)
    return compose_maps(
        eta_plus_map(f.zeta_plus),
        compose_maps(eta_z_map(f.zeta_z), eta_minus_map(f.zeta_minus)),
    )


def hermitising_choices(nu, omega, delta, lam):
    """kappa = delta/(delta^2 - nu^2), xi = lambda/(lambda^2 + Omega).

    These remove the i p_x x and i p_y y terms of eta1 H1 eta1^-1.
    """
    d1 = delta**2 - nu**2
    d2 = lam**2 + omega
    if d1 == 0:
        raise SingularChoice("delta^2 = nu^2")
    if d2 == 0:
        raise SingularChoice("lambda^2 = -Omega")
    return delta / d1, lam / d2


@dataclass(frozen=True)
class ChainParams:
    delta: float = 0.0
    lam: float = 0.0
    kappa: float = 0.0
    xi: float = 0.0
    mu: float = 0.0
    tau: float = 0.0

    @property
    def theta_squared(self):
        return self.mu * self.tau

    @classmethod
    def hermitising(cls, p, delta, lam, with_eta2=True):
        """Chain with the hermitising kappa, xi and, optionally, the eta2 constraints."""
        kappa, xi = hermitising_choices(p.nu, p.omega, delta, lam)
        mu = tau = 0.0
        if with_eta2 and p.g != 0:
            con = eta2_constraints(p, delta, lam)
            mu, tau = con.mu, con.tau
        return cls(delta=delta, lam=lam, kappa=kappa, xi=xi, mu=mu, tau=tau)

    def maps(self):
        return (
            build_eta0(self.delta, self.lam),
            build_eta1(self.kappa, self.xi),
            build_eta2(self.mu, self.tau),
        )


def derive_H1(p, delta, lam):
    return transform_quadratic(build_eta0(delta, lam), build_h0(p))


def derive_H2(p, delta, lam):
    kappa, xi = hermitising_choices(p.nu, p.omega, delta, lam)
    return transform_quadratic(build_eta1(kappa, xi), derive_H1(p, delta, lam))


def derive_h3(p, chain):
    """h3 = eta2 eta1 eta0 h0 (eta2 eta1 eta0)^-1 for explicit chain parameters."""
    eta0, eta1, eta2 = chain.maps()
    total = compose_maps(eta2, compose_maps(eta1, eta0))
    return transform_quadratic(total, build_h0(p))


def closed_form_H1(p, delta, lam):
    # the imaginary y-term is i lambda (p_y y + y p_y)
    return WeylQuadraticForm.from_terms(
        {
            ("px", "px"): 1.0,
            ("py", "py"): -1.0,
            ("x", "x"): p.nu**2 - delta**2,
            ("y", "y"): p.omega + lam**2,
            ("x", "y"): p.g,
            ("x", "px"): -2j * delta,
            ("y", "py"): 2j * lam,
        }
    )


def closed_form_H2(p, delta, lam):
    # the i p_y x coefficient is -i g lambda/(lambda^2 + Omega)
    nu2 = p.nu**2
    d1 = nu2 - delta**2
    d2 = lam**2 + p.omega
    return WeylQuadraticForm.from_terms(
        {
            ("px", "px"): nu2 / d1,
            ("py", "py"): -p.omega / d2,
            ("x", "x"): d1,
            ("y", "y"): d2,
            ("x", "y"): p.g,
            ("px", "py"): p.g * delta * lam / (d1 * d2),
            ("y", "px"): 1j * p.g * delta / d1,
            ("x", "py"): -1j * p.g * lam / d2,
        }
    )


def closed_form_h3(p, delta, lam):
    con = eta2_constraints(p, delta, lam)
    d1 = delta**2 - p.nu**2
    f = d1**2 / (2 * delta**2)
    return WeylQuadraticForm.from_terms(
        {
            ("px", "px"): (con.b1 + con.b2_plus) / 2,
            ("py", "py"): (con.b1 - con.b2_plus) / 2,
            ("x", "x"): f * (con.b1 + con.b2_minus),
            ("y", "y"): f * (con.b1 - con.b2_minus),
            ("px", "py"): p.g * delta**2 / d1**2,
            ("x", "y"): p.g,
        }
    )


def theta(p, delta, lam):
    """g delta^2 / ((delta^2 - nu^2)(nu^2 - delta lambda))."""
    den = (delta**2 - p.nu**2) * (p.nu**2 - delta * lam)
    if den == 0:
        return math.copysign(math.inf, p.g * delta**2) if p.g != 0 else math.nan
    return p.g * delta**2 / den


def omega_from_constraint(nu, delta, lam):
    return lam * (nu**2 - delta * (delta + lam)) / delta


@dataclass(frozen=True)
class H3Constraints:
    Theta: float
    b1: float
    b2_plus: float
    b2_minus: float
    tau: float
    mu: float
    omega_consistent: bool
    delta_plus: float
    delta_minus: float


def eta2_constraints(p, delta, lam, check_omega=True):
    """Parameters that make eta2 H2 eta2^-1 Hermitian.

    mu = -delta/(2(delta^2 - nu^2)) artanh(Theta) and
    tau = -(delta^2 - nu^2)/(2 delta) artanh(Theta); the overall sign is fixed by
    requiring the imaginary coefficients of h3 to vanish with the eta2 action of
    :func:`build_eta2`.
    """
    if delta == 0:
        raise ValueError("delta must be nonzero")
    d1 = delta**2 - p.nu**2
    if d1 == 0:
        raise SingularChoice("delta^2 = nu^2")
    Th = theta(p, delta, lam)
    if not abs(Th) < 1:
        raise ThetaOutOfRange(Th)
    consistent = math.isclose(
        omega_from_constraint(p.nu, delta, lam),
        p.omega,
        rel_tol=get_policy().derived,
        abs_tol=get_policy().derived,
    )
    if check_omega and not consistent:
        raise OmegaInconsistent(
            f"Omega = {p.omega!r} but lambda[nu^2 - delta(delta+lambda)]/delta = "
            f"{omega_from_constraint(p.nu, delta, lam)!r}"
        )
    at = math.atanh(Th)
    root = math.sqrt(1 - Th * Th) * (delta * lam - p.nu**2) / d1
    if lam != 0:
        dp, dm = delta_branches(lam, p.nu, p.omega)
    else:
        dp = dm = math.nan
    return H3Constraints(
        Theta=Th,
        b1=-delta * (delta + lam) / d1,
        b2_plus=root + 1,
        b2_minus=root - 1,
        tau=-d1 / (2 * delta) * at,
        mu=-delta / (2 * d1) * at,
        omega_consistent=consistent,
        delta_plus=dp,
        delta_minus=dm,
    )


def delta_branches(lam, nu, omega):
    """Both solutions delta_pm of the Omega constraint for fixed lambda."""
    if lam == 0:
        raise LambdaZero("lambda must be nonzero")
    r = math.sqrt(4 * lam**2 * nu**2 + (lam**2 + omega) ** 2)
    return (r - lam**2 - omega) / (2 * lam), (-r - lam**2 - omega) / (2 * lam)


def hat_parameters(frame_params, delta, lam, nu, omega):
    """Closed-form exponents of psi2 = eta1 eta0 phi0 under the hermitising choices."""
    a, b, c = frame_params
    den = (a * delta + nu**2) * (omega - b * lam) + c * c * delta * lam
    if abs(den) <= get_policy().pole:
        raise SingularExponent(f"hat-parameter denominator = {den!r}")
    d1 = delta**2 - nu**2
    d2 = lam**2 + omega
    a_hat = ((a + delta) * (b * lam - omega) - c * c * lam) * d1 / den
    b_hat = ((b + lam) * (a * delta + nu**2) - c * c * delta) * d2 / den
    c_hat = -c * d1 * d2 / den
    return a_hat, b_hat, c_hat


def check_parameters(hat, factors):
    """Closed-form exponents of eta2 psi2 from the Gauss factors."""
    a, b, c = hat
    zm = factors.zeta_minus
    x = zm**2 * (c * c - a * b) + 2 * c * zm + 1
    if abs(x) <= get_policy().pole:
        raise ChiSingular(f"chi = {x!r}")
    a_chk = a * factors.zeta_z / x
    b_chk = b * factors.zeta_z / x
    c_chk = (zm * (c * c - a * b) + c) / x * factors.zeta_z + factors.zeta_plus
    return a_chk, b_chk, c_chk


def _eta0_on_state(delta, lam, psi):
    return gs.multiply_position_gaussian(np.diag([delta, lam]), psi)


def _eta1_on_state(kappa, xi, psi):
    return gs.multiply_momentum_gaussian(np.diag([kappa, xi]), psi)


def state_chain(chain, stages=3):
    """State transformations [eta0, eta1, eta2][:stages] for a chain."""
    steps = [
        partial(_eta0_on_state, chain.delta, chain.lam),
        partial(_eta1_on_state, chain.kappa, chain.xi),
        partial(gs.apply_eta2, chain.mu, chain.tau),
    ]
    return steps[:stages]
