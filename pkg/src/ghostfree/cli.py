"""Command-line front end.

Exit codes: 0 success, 1 computation or constraint failure, 2 usage error.
Every flag can also be given in a ``--config`` file of ``key = value`` lines
using the flag name (dashes or underscores); flags on the command line win.
"""

import argparse
import dataclasses
import sys

import numpy as np

from . import gaussian_states as gs
from . import model as m
from . import scan as sc
from .errors import GhostfreeError, NonCanonicalMap
from .numeric import get_policy, set_policy
from .operator_algebra import (
    CanonicalMap,
    bch_adjoint_oracle,
    classify_definiteness,
    is_hermitian,
    is_pt_symmetric,
    transform_quadratic,
)
from .su2 import eta_minus_map, eta_plus_map, eta_z_map, s_minus, s_plus, s_z

CHAINS = ("h0", "h0,eta0", "h0,eta0,eta1", "h0,eta0,eta1,eta2")

# defaults applied after merging flags and config; None marks a required value
DEFAULTS = {
    "frame": {"nu": None, "omega": None, "g": None, "eps": None, "eta": None},
    "derive": {"nu": None, "omega": None, "g": None, "chain": "h0", "delta": 0.0, "lam": 0.0},
    "verify": {
        "nu": 4.0, "omega": -2.0, "g": 0.0, "chain": "h0,eta0,eta1",
        "delta": 0.0, "lam": 2.0, "eps": 1, "eta": 1,
    },
    "spectrum": {"nu": None, "omega": None, "g": None, "eps": None, "eta": None, "nmax": 10},
    "scan": {"figure": 2, "lam_min": -4.0, "lam_max": 4.0, "step": 0.005, "delta": 0.0},
    "boundary": {
        "target": "theta", "tol": 1e-10, "eps": 1, "eta": 1,
        "which": "q_b", "delta": 0.0,
    },
}

FIGURE_PARAMS = {1: (4.0, -2.0, 0.0), 2: (4.0, -2.0, 3.0)}


class UsageError(Exception):
    pass


def _sign(text):
    value = int(text)
    if value not in (1, -1):
        raise argparse.ArgumentTypeError("must be 1 or -1")
    return value


def _model_flags(p):
    p.add_argument("--nu", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--g", type=float)


def _sector_flags(p):
    p.add_argument("--eps", type=_sign)
    p.add_argument("--eta", type=_sign)


def _chain_flags(p):
    p.add_argument("--chain", choices=CHAINS)
    p.add_argument("--delta", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--branch", choices=("plus", "minus"),
                   help="solve delta from the Omega constraint instead of --delta")
    for name in ("kappa", "xi", "mu", "tau"):
        p.add_argument(f"--{name}", type=float, help="override the derived value")


def build_parser():
    parser = argparse.ArgumentParser(prog="ghostfree", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags win")
    common.add_argument("--digits", type=int, help="significant digits for display (default 17)")
    common.add_argument("--tol-construction", type=float)
    common.add_argument("--tol-derived", type=float)
    common.add_argument("--tol-region", type=float)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frame", parents=[common], help="branch parameters of one sector")
    _model_flags(p)
    _sector_flags(p)

    p = sub.add_parser("derive", parents=[common], help="apply a map chain to h0")
    _model_flags(p)
    _chain_flags(p)

    p = sub.add_parser("verify", parents=[common], help="run the consistency checks")
    _model_flags(p)
    _sector_flags(p)
    _chain_flags(p)
    p.add_argument("--corrupt", action="store_true", default=None, help="perturb the eta0 map (negative control)")

    p = sub.add_parser("spectrum", parents=[common], help="energy levels up to N_max")
    _model_flags(p)
    _sector_flags(p)
    p.add_argument("--nmax", type=int)
    p.add_argument("--out")

    p = sub.add_parser("scan", parents=[common], help="lambda sweep of the normalisability quantities")
    _model_flags(p)
    p.add_argument("--figure", type=int, choices=(1, 2))
    p.add_argument("--branch", choices=("plus", "minus"))
    p.add_argument("--delta", type=float)
    p.add_argument("--lam-min", type=float)
    p.add_argument("--lam-max", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--out")

    p = sub.add_parser("boundary", parents=[common], help="refine a region boundary in lambda")
    _model_flags(p)
    _sector_flags(p)
    p.add_argument("--target", choices=("theta", "normalisability"))
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--branch", choices=("plus", "minus"))
    p.add_argument("--which", choices=("q_a", "q_b", "q_det"))
    p.add_argument("--delta", type=float)
    p.add_argument("--tol", type=float)
    return parser


def read_config(path):
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            entries[key.replace("-", "_")] = value
    return entries


def _subparser(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise KeyError(command)


def merge_config(parser, args):
    """Fill unset flags from the config file, then apply per-command defaults."""
    sp = _subparser(parser, args.command)
    actions = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    if args.config:
        for key, raw in read_config(args.config).items():
            if key not in actions:
                raise UsageError(f"unknown config key {key!r} for '{args.command}'")
            if getattr(args, key) is not None:
                continue
            action = actions[key]
            try:
                if action.nargs == 2:
                    value = [action.type(v) for v in raw.split()]
                elif action.const is True:
                    value = raw.lower() in ("1", "true", "yes", "on")
                elif action.type is not None:
                    value = action.type(raw)
                else:
                    value = raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"bad value for {key!r}: {exc}") from exc
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"bad value for {key!r}: {raw!r}")
            setattr(args, key, value)
    for key, default in DEFAULTS.get(args.command, {}).items():
        if getattr(args, key, None) is None:
            if default is None:
                raise UsageError(f"missing required option --{key.replace('_', '-')}")
            setattr(args, key, default)
    overrides = {
        name: getattr(args, f"tol_{name}")
        for name in ("construction", "derived", "region")
        if getattr(args, f"tol_{name}") is not None
    }
    if overrides:
        set_policy(**overrides)
    return args


class Printer:
    def __init__(self, digits, stream=None):
        self.digits = digits
        self.stream = stream or sys.stdout

    def num(self, z):
        z = complex(z)
        if z.imag == 0:
            return f"{z.real:.{self.digits}g}"
        return f"{z.real:.{self.digits}g}{z.imag:+.{self.digits}g}j"

    def __call__(self, *parts):
        print(*parts, file=self.stream)


def _params(args):
    return m.ModelParams(args.nu, args.omega, args.g)


def _sector(args):
    return m.SectorLabel(args.eps, args.eta)


def resolve_chain(args, params):
    """ChainParams for the requested chain, honouring explicit overrides."""
    stages = args.chain.split(",")
    delta, lam = args.delta, args.lam
    if args.branch is not None and "eta0" in stages:
        delta = m.delta_branches(lam, params.nu, params.omega)[0 if args.branch == "plus" else 1]
    kappa = xi = mu = tau = 0.0
    if "eta1" in stages:
        if args.kappa is None or args.xi is None:
            kappa, xi = m.hermitising_choices(params.nu, params.omega, delta, lam)
        kappa = kappa if args.kappa is None else args.kappa
        xi = xi if args.xi is None else args.xi
    if "eta2" in stages:
        if (args.mu is None or args.tau is None) and params.g != 0:
            con = m.eta2_constraints(params, delta, lam)
            mu, tau = con.mu, con.tau
        mu = mu if args.mu is None else args.mu
        tau = tau if args.tau is None else args.tau
    if "eta0" not in stages:
        delta = lam = 0.0
    return stages, m.ChainParams(delta=delta, lam=lam, kappa=kappa, xi=xi, mu=mu, tau=tau)


def chain_hamiltonians(params, stages, chain, maps=None):
    """[(name, H)] for h0 and every requested stage."""
    maps = maps or dict(zip(("eta0", "eta1", "eta2"), chain.maps()))
    names = {"eta0": "H1", "eta1": "H2", "eta2": "h3"}
    H = m.build_h0(params)
    out = [("h0", H)]
    for stage in stages[1:]:
        H = transform_quadratic(maps[stage], H)
        out.append((names[stage], H))
    return out


def cmd_frame(args, out):
    params, sector = _params(args), _sector(args)
    f = m.sector_params(params, sector)
    state = m.ground_state(f)
    qa, qb, qd = f.normalisability()
    verdict = "normalisable" if (f.is_real and state.is_normalisable()) else "non-normalisable"
    out(f"sector       {sector}")
    out(f"sigma        {out.num(f.sigma)}")
    out(f"Sigma        {out.num(f.Sigma)}")
    out(f"alpha        {out.num(f.alpha)}")
    out(f"beta         {out.num(f.beta)}")
    out(f"gamma        {out.num(f.gamma)}")
    out(f"real         {f.is_real}")
    out(f"conditions   alpha={out.num(qa)} beta={out.num(qb)} alpha*beta-gamma^2={out.num(qd)}")
    out(f"verdict      {verdict}")
    out(f"energy       {out.num(f.ground_energy)}")
    return 0


def _describe(out, name, H):
    out(f"[{name}]")
    for (a, b), c in H.terms().items():
        if c != 0:
            out(f"  {a}*{b:<3} {out.num(c)}")
    herm, residual = is_hermitian(H)
    out(f"  hermitian          {herm} (max |Im| = {residual:.3e})")
    out(f"  pt_symmetric       {is_pt_symmetric(H)}")
    if herm:
        d = classify_definiteness(H)
        out(f"  kinetic_signature  ({', '.join(d.kinetic_signature)})")
        out(f"  definiteness       {d.form}")
    else:
        out("  kinetic_signature  n/a (non-Hermitian)")
        out("  definiteness       n/a (non-Hermitian)")


def cmd_derive(args, out):
    params = _params(args)
    stages, chain = resolve_chain(args, params)
    out(f"chain {args.chain}: delta={out.num(chain.delta)} lambda={out.num(chain.lam)} "
        f"kappa={out.num(chain.kappa)} xi={out.num(chain.xi)} mu={out.num(chain.mu)} tau={out.num(chain.tau)}")
    name, H = chain_hamiltonians(params, stages, chain)[-1]
    _describe(out, name, H)
    return 0


def _generators(chain):
    return {
        "eta0": m.eta0_generator(chain.delta, chain.lam),
        "eta1": m.eta1_generator(chain.kappa, chain.xi),
        "eta2": m.eta2_generator(chain.mu, chain.tau),
    }


def verification_checks(params, sector, stages, chain, corrupt=False):
    """Yield (name, passed, detail) for every check of one chain."""
    pol = get_policy()
    maps = dict(zip(("eta0", "eta1", "eta2"), chain.maps()))
    if corrupt:
        S = np.array(maps["eta0"].S)
        S[0, 0] += 1e-3
        maps["eta0"] = CanonicalMap(S)
    gens = _generators(chain)
    for stage in stages[1:]:
        r = maps[stage].symplectic_residual()
        yield f"symplectic[{stage}]", r <= pol.construction, r
    for stage in stages[1:]:
        oracle = bch_adjoint_oracle(gens[stage], 30)
        d = float(np.abs(oracle.S - maps[stage].S).max())
        yield f"bch_oracle[{stage}]", d <= pol.derived, d
    if "eta2" in stages:
        f = m.gauss_decompose(chain.mu, chain.tau)
        pairs = (
            ("eta_minus", eta_minus_map(f.zeta_minus), s_minus(f.zeta_minus)),
            ("eta_z", eta_z_map(f.zeta_z), s_z(np.log(f.zeta_z))),
            ("eta_plus", eta_plus_map(f.zeta_plus), s_plus(f.zeta_plus)),
        )
        for name, closed, gen in pairs:
            d = float(np.abs(bch_adjoint_oracle(gen, 30).S - closed.S).max())
            yield f"bch_oracle[{name}]", d <= pol.derived, d
        d = float(np.abs(m.composed_eta2(chain.mu, chain.tau).S - maps["eta2"].S).max())
        yield "gauss_decomposition", d <= pol.construction, d
    try:
        hams = chain_hamiltonians(params, stages, chain, maps)
    except NonCanonicalMap as exc:
        yield "transform", False, str(exc)
        return
    closed = {
        "H1": lambda: m.closed_form_H1(params, chain.delta, chain.lam),
        "H2": lambda: m.closed_form_H2(params, chain.delta, chain.lam),
        "h3": lambda: m.closed_form_h3(params, chain.delta, chain.lam),
    }
    hermitising = (chain.kappa, chain.xi) == m.hermitising_choices(
        params.nu, params.omega, chain.delta, chain.lam
    ) if "eta1" in stages else False
    for name, H in hams[1:]:
        if name == "H1" or (hermitising and name == "H2") or (
            hermitising and name == "h3" and params.g != 0
        ):
            d = (H - closed[name]()).max_abs()
            yield f"closed_form[{name}]", d <= pol.derived, d
    frame = m.sector_params(params, sector)
    state = m.ground_state(frame)
    steps = m.state_chain(chain)
    for i, (name, H) in enumerate(hams):
        if i > 0:
            try:
                state = steps[i - 1](state)
            except GhostfreeError as exc:
                yield f"eigen_residual[{name}]", False, str(exc)
                return
        r = gs.eigen_residual(H, state, frame.ground_energy).size
        yield f"eigen_residual[{name}]", r <= pol.region, r


def cmd_verify(args, out):
    params, sector = _params(args), _sector(args)
    stages, chain = resolve_chain(args, params)
    first_failure = None
    for name, passed, detail in verification_checks(params, sector, stages, chain, bool(args.corrupt)):
        shown = f"{detail:.3e}" if isinstance(detail, float) else detail
        out(f"{'PASS' if passed else 'FAIL'}  {name:<28} {shown}")
        if not passed and first_failure is None:
            first_failure = name
    if first_failure is not None:
        out(f"verify failed: {first_failure}")
        return 1
    out("all checks passed")
    return 0


def cmd_spectrum(args, out):
    frame = m.sector_params(_params(args), _sector(args))
    levels = m.energy_levels(frame, args.nmax)
    out(f"{'N':>4} {'n':>5} {'sign':>4}  E")
    for lv in levels:
        out(f"{lv.N:>4} {str(lv.n):>5} {lv.sign:>+4d}  {out.num(lv.E)}")
    real = [lv.E.real for lv in levels if lv.is_real]
    if real:
        out(f"min real energy {out.num(min(real))}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("N,n,sign,E_re,E_im,real\n")
            for lv in levels:
                fh.write(f"{lv.N},{lv.n},{lv.sign},{lv.E.real:.17g},{lv.E.imag:.17g},{int(lv.is_real)}\n")
    return 0


def scan_config(args):
    nu, omega, g = FIGURE_PARAMS[args.figure]
    params = m.ModelParams(
        nu if args.nu is None else args.nu,
        omega if args.omega is None else args.omega,
        g if args.g is None else args.g,
    )
    if args.figure == 1:
        return sc.ScanConfig(
            params, delta_mode=args.branch or "fixed", delta=args.delta,
            lam_min=args.lam_min, lam_max=args.lam_max, step=args.step,
            sectors=sc.FIGURE1_SECTORS, quantity="hat",
        )
    return sc.ScanConfig(
        params, delta_mode=args.branch or "plus", delta=args.delta,
        lam_min=args.lam_min, lam_max=args.lam_max, step=args.step,
        sectors=m.SECTORS, quantity="check",
    )


def cmd_scan(args, out):
    try:
        cfg = scan_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = sc.format_csv(sc.sweep_lambda(cfg))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.stream.write(text)
    return 0


def cmd_boundary(args, out):
    if args.target == "theta":
        nu, omega, g = FIGURE_PARAMS[2]
        params = m.ModelParams(
            nu if args.nu is None else args.nu,
            omega if args.omega is None else args.omega,
            g if args.g is None else args.g,
        )
        f = sc.theta_margin(params, args.branch or "plus")
        bracket = args.bracket or (2.0, 2.3)
    else:
        nu, omega, g = FIGURE_PARAMS[1]
        params = m.ModelParams(
            nu if args.nu is None else args.nu,
            omega if args.omega is None else args.omega,
            g if args.g is None else args.g,
        )
        f = sc.normalisability_quantity(params, _sector(args), args.which, args.delta)
        bracket = args.bracket or (1.0, 2.0)
    root = sc.find_boundary(f, tuple(bracket), args.tol)
    out(f"lambda* = {out.num(root)}")
    return 0


COMMANDS = {
    "frame": cmd_frame,
    "derive": cmd_derive,
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "boundary": cmd_boundary,
}


def main(argv=None, stream=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = get_policy()
    try:
        merge_config(parser, args)
        out = Printer(args.digits or 17, stream)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ghostfree: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ghostfree: {exc}", file=sys.stderr)
        return 1
    except GhostfreeError as exc:
        print(f"ghostfree: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    finally:
        set_policy(**dataclasses.asdict(saved))


if __name__ == "__main__":
    sys.exit(main())
