"""Lambda sweeps of the normalisability quantities, boundary finding and CSV output."""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from scipy.optimize import brentq

from . import gaussian_states as gs
from .errors import GhostfreeError, NoSignChange
from .model import (
    SECTORS,
    ModelParams,
    SectorLabel,
    delta_branches,
    eta2_constraints,
    hat_parameters,
    sector_params,
    theta,
)
from .numeric import get_policy, policy_override

CSV_HEADER = ("lambda", "eps", "eta", "q_a", "q_b", "q_det", "valid", "energy")

FIGURE1_SECTORS = (SectorLabel(1, 1), SectorLabel(-1, 1))


@dataclass(frozen=True)
class ScanConfig:
    """One lambda sweep.

    ``delta_mode`` is ``"fixed"`` (use ``delta``), ``"plus"`` or ``"minus"``
    (delta solved from the Omega constraint).  ``quantity`` selects the hat
    exponents (after eta1 eta0) or the check exponents (after eta2 eta1 eta0).
    """

    params: ModelParams
    delta_mode: str = "fixed"
    delta: float = 0.0
    lam_min: float = -4.0
    lam_max: float = 4.0
    step: float = 0.005
    sectors: tuple = SECTORS
    quantity: str = "hat"
    output: str = None

    def __post_init__(self):
        if self.delta_mode not in ("fixed", "plus", "minus"):
            raise ValueError(f"unknown delta mode {self.delta_mode!r}")
        if self.quantity not in ("hat", "check"):
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not (math.isfinite(self.lam_min) and math.isfinite(self.lam_max)):
            raise ValueError("lambda range must be finite")

    def grid(self):
        if self.lam_max < self.lam_min:
            return []
        n = int(math.floor((self.lam_max - self.lam_min) / self.step + 1e-9)) + 1
        return [round(self.lam_min + i * self.step, 12) for i in range(n)]


@dataclass(frozen=True)
class ScanRow:
    lam: float
    sector: SectorLabel
    q_a: float = None
    q_b: float = None
    q_det: float = None
    valid: bool = False
    energy: float = None
    theta_in_range: bool = True
    nonsingular: bool = True
    frame_real: bool = True
    reason: str = field(default="", compare=False)

    @property
    def normalisable(self):
        tol = get_policy().region
        return self.valid and self.q_a > tol and self.q_b > tol and self.q_det > tol


def delta_for(cfg, lam):
    if cfg.delta_mode == "fixed":
        return cfg.delta
    plus, minus = delta_branches(lam, cfg.params.nu, cfg.params.omega)
    return plus if cfg.delta_mode == "plus" else minus


def exponents_at(params, sector, lam, delta, quantity):
    """(alpha, beta, gamma) of the transformed ground state; raises on poles."""
    frame = sector_params(params, sector)
    hat = hat_parameters((frame.alpha, frame.beta, frame.gamma), delta, lam, params.nu, params.omega)
    if quantity == "hat":
        return frame, hat
    if params.g == 0:
        mu = tau = 0.0
    else:
        con = eta2_constraints(params, delta, lam)
        mu, tau = con.mu, con.tau
    state = gs.apply_eta2(mu, tau, gs.GaussianState.from_params(*hat))
    return frame, state.params


def evaluate_row(cfg, lam, sector):
    p = cfg.params
    tol = get_policy().derived
    try:
        frame = sector_params(p, sector)
    except GhostfreeError as exc:
        return ScanRow(lam, sector, frame_real=False, reason=str(exc))
    energy = frame.ground_energy.real if abs(frame.ground_energy.imag) <= tol else None
    if not frame.is_real:
        return ScanRow(lam, sector, energy=energy, frame_real=False, reason="complex frame")
    try:
        delta = delta_for(cfg, lam)
    except GhostfreeError as exc:
        return ScanRow(lam, sector, energy=energy, nonsingular=False, reason=str(exc))
    theta_ok = True
    if cfg.quantity == "check" and p.g != 0:
        if delta == 0:
            return ScanRow(lam, sector, energy=energy, nonsingular=False, reason="delta = 0")
        theta_ok = abs(theta(p, delta, lam)) < 1
        if not theta_ok:
            return ScanRow(lam, sector, energy=energy, theta_in_range=False, reason="|Theta| >= 1")
    pole = get_policy().pole
    if abs(delta**2 - p.nu**2) <= pole or abs(lam**2 + p.omega) <= pole:
        return ScanRow(lam, sector, energy=energy, nonsingular=False, reason="hermitising choice singular")
    try:
        _, (a, b, c) = exponents_at(p, sector, lam, delta, cfg.quantity)
    except (GhostfreeError, ValueError, ZeroDivisionError) as exc:
        return ScanRow(lam, sector, energy=energy, nonsingular=False, reason=str(exc))
    if any(abs(complex(v).imag) > tol for v in (a, b, c)):
        return ScanRow(lam, sector, energy=energy, frame_real=False, reason="complex exponents")
    a, b, c = (complex(v).real for v in (a, b, c))
    return ScanRow(lam, sector, q_a=a, q_b=b, q_det=a * b - c * c, valid=True, energy=energy)


def sweep_lambda(cfg):
    """One row per (lambda, sector), ordered by lambda then by the sector list."""
    return [evaluate_row(cfg, lam, s) for lam in cfg.grid() for s in cfg.sectors]


def find_boundary(f, bracket, tol=1e-12):
    """Root of f in a sign-changing bracket, localised to width tol."""
    a, b = bracket
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if math.copysign(1, fa) == math.copysign(1, fb):
        raise NoSignChange(f"f({a}) = {fa!r} and f({b}) = {fb!r} have the same sign")
    return brentq(f, a, b, xtol=tol, maxiter=500)


def theta_margin(params, branch):
    """lambda -> |Theta(lambda, delta_branch(lambda))| - 1."""
    index = 0 if branch == "plus" else 1

    def f(lam):
        delta = delta_branches(lam, params.nu, params.omega)[index]
        return abs(theta(params, delta, lam)) - 1

    return f


def normalisability_quantity(params, sector, which="q_b", delta=0.0, quantity="hat"):
    """lambda -> one of q_a, q_b, q_det, evaluated without pole flagging.

    At delta = 0 the sector-(1,1) q_b has a removable 0/0 at lambda^2 = -Omega,
    exactly where it changes sign, so only an exact zero denominator is refused.
    """

    def f(lam):
        with policy_override(pole=0.0):
            _, (a, b, c) = exponents_at(params, sector, lam, delta, quantity)
        a, b, c = (complex(v).real for v in (a, b, c))
        return {"q_a": a, "q_b": b, "q_det": a * b - c * c}[which]

    return f


def grid_boundaries(rows, sector, key):
    """Adjacent grid points where ``key(row)`` flips, for one sector."""
    sel = [r for r in rows if r.sector == sector]
    cells = []
    for r0, r1 in zip(sel, sel[1:]):
        if key(r0) != key(r1):
            cells.append((r0.lam, r1.lam))
    return cells


def theta_boundaries(params, branch, lam_min=-4.0, lam_max=4.0, step=0.005, tol=1e-10):
    """Refined |lambda| where |Theta| crosses 1, bracketed on the grid first.

    Cells where Theta passes through a pole (sign flips with |Theta| > 1 on both
    sides) are not roots and are skipped.
    """
    f = theta_margin(params, branch)
    cfg = ScanConfig(params, delta_mode=branch, lam_min=lam_min, lam_max=lam_max, step=step)
    lams = [lam for lam in cfg.grid() if lam != 0]
    roots = []
    prev = None
    for lam in lams:
        try:
            val = f(lam)
        except (GhostfreeError, ZeroDivisionError):
            prev = None
            continue
        if prev is not None and math.isfinite(val) and math.isfinite(prev[1]):
            if (prev[1] < 0) != (val < 0) and prev[0] * lam > 0:
                roots.append(find_boundary(f, (prev[0], lam), tol))
        prev = (lam, val)
    return roots


def _fmt(value):
    if value is None:
        return ""
    return f"{value:.17g}"


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                _fmt(r.lam),
                r.sector.eps,
                r.sector.eta,
                _fmt(r.q_a),
                _fmt(r.q_b),
                _fmt(r.q_det),
                int(r.valid),
                _fmt(r.energy),
            ]
        )
    return buf.getvalue()


def write_csv(rows, path):
    Path(path).write_text(format_csv(rows), encoding="utf-8")


def _opt(text):
    return float(text) if text != "" else None


def parse_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        lam, eps, eta, qa, qb, qd, valid, energy = rec
        rows.append(
            ScanRow(
                lam=float(lam),
                sector=SectorLabel(int(eps), int(eta)),
                q_a=_opt(qa),
                q_b=_opt(qb),
                q_det=_opt(qd),
                valid=valid == "1",
                energy=_opt(energy),
            )
        )
    return rows


def read_csv(path):
    return parse_csv(Path(path).read_text(encoding="utf-8"))


def figure_configs(which, lam_min=-4.0, lam_max=4.0, step=0.005):
    """Panel name -> ScanConfig for the two normalisability figures."""
    if which == 1:
        return {
            f"figure1_{panel}": ScanConfig(
                ModelParams(4.0, -2.0, g),
                delta_mode="fixed",
                delta=0.0,
                lam_min=lam_min,
                lam_max=lam_max,
                step=step,
                sectors=FIGURE1_SECTORS,
                quantity="hat",
            )
            for panel, g in (("a", 0.0), ("b", 1.0))
        }
    if which == 2:
        return {
            f"figure2_{panel}": ScanConfig(
                ModelParams(4.0, -2.0, 3.0),
                delta_mode=branch,
                lam_min=lam_min,
                lam_max=lam_max,
                step=step,
                sectors=SECTORS,
                quantity="check",
            )
            for panel, branch in (("a", "plus"), ("b", "minus"))
        }
    raise ValueError("figure must be 1 or 2")


def reproduce_figures(which, outdir, **grid):
    """Write one CSV per panel into ``outdir`` and return the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, cfg in figure_configs(which, **grid).items():
        path = outdir / f"{name}.csv"
        write_csv(sweep_lambda(cfg), path)
        paths.append(path)
    return paths
