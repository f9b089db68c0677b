"""Command-line front end: ``holophase <command> [options]``.

Commands: phase, sweep, simulate, schmidt, topology, verify.
Exit codes: 0 success, 1 configuration error, 2 undefined phase at a
requested point, 3 verification failure.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import fitting, optics, phases, topology
from .core import I2, SIGMA1, su2_exp, wrap_phase
from .errors import HolophaseError, NotMaximallyEntangled, PhaseUndetermined, UndefinedPhase
from .evolutions import DEFAULT_SAMPLES, experiment_trajectory, schmidt_evolution
from .states import prepared_state, schmidt_decompose

EXIT_OK, EXIT_CONFIG, EXIT_UNDEFINED, EXIT_VERIFY = 0, 1, 2, 3

REFERENCE_N, REFERENCE_N0 = 11911, 1616


class ConfigError(Exception):
    pass


def _default_alpha_grid():
    return [i * np.pi / 20 for i in range(21)]


def _default_s_grid():
    return [i * np.pi / 80 for i in range(41)]


@dataclass
class RunConfig:
    alpha_grid: list = field(default_factory=_default_alpha_grid)
    s_grid: list = field(default_factory=_default_s_grid)
    samples_per_segment: int = DEFAULT_SAMPLES
    n: float = REFERENCE_N
    n0: float = REFERENCE_N0
    phi_points: int = 21
    seed: int = 0
    reps: int = 1
    out: str = None
    format: str = "csv"
    noiseless: bool = False

    def validate(self):
        if not self.alpha_grid or not self.s_grid:
            raise ConfigError("alpha and s grids must be non-empty")
        eps = 1e-12
        if any(not -eps <= a <= np.pi + eps for a in self.alpha_grid):
            raise ConfigError("alpha values must lie in [0, pi]")
        if any(not -eps <= s <= np.pi / 2 + eps for s in self.s_grid):
            raise ConfigError("s values must lie in [0, pi/2]")
        if not 0 <= self.n0 <= self.n:
            raise ConfigError("need N >= N0 >= 0")
        if self.phi_points < 5:
            raise ConfigError("phi_points must be at least 5")
        if self.reps < 1:
            raise ConfigError("reps must be positive")
        if self.samples_per_segment < 2 or self.samples_per_segment % 2:
            raise ConfigError("samples_per_segment must be an even integer >= 2")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        return self


def derive_seed(master, *keys):
    """64-bit seed mixed from the master seed and grid/repetition indices."""
    ss = np.random.SeedSequence([int(master), *[int(k) for k in keys]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _emit(text, out):
    if out:
        Path(out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------


def phase_report(alpha, s, samples=DEFAULT_SAMPLES):
    """Numerical and closed-form phases at one (alpha, s) point."""
    traj = experiment_trajectory(prepared_state(alpha), s, samples)
    dec = phases.holonomic_phase(traj)
    closed = phases.experiment_phase_closed(alpha, s)
    report = asdict(dec)
    report.update(
        alpha=alpha, s=s,
        closed_form=closed,
        closed_minus_numeric=float(wrap_phase(closed - dec.holonomic_wrapped)),
        visibility=optics.visibility_theory(alpha, s),
    )
    return report


def cmd_phase(cfg, args):
    alpha = cfg.alpha_grid[0]
    s = cfg.s_grid[0]
    try:
        report = phase_report(alpha, s, cfg.samples_per_segment)
    except UndefinedPhase as exc:
        print(f"undefined phase: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    width = max(len(k) for k in report)
    for key in sorted(report):
        print(f"{key:<{width}}  {_fmt(report[key])}")
    text = json.dumps(report, sort_keys=True)
    print(text)
    if cfg.out:
        _emit(_json_text(report), cfg.out)
    return EXIT_OK


SWEEP_COLUMNS = ("alpha", "s", "phi_closed", "phi_numeric", "v_t", "dyn_residual", "status")


def sweep_rows(cfg):
    rows = []
    for alpha in cfg.alpha_grid:
        for s in cfg.s_grid:
            v_t = optics.visibility_theory(alpha, s)
            traj = experiment_trajectory(prepared_state(alpha), s, cfg.samples_per_segment)
            dyn = float(np.abs(phases.segment_dynamical_phases(traj)).max())
            try:
                closed = phases.experiment_phase_closed(alpha, s)
                num = phases.holonomic_phase(traj).holonomic_wrapped
                ok = abs(wrap_phase(num - closed)) <= 1e-6
                rows.append((alpha, s, closed, num, v_t, dyn, "ok" if ok else "mismatch"))
            except UndefinedPhase:
                rows.append((alpha, s, None, None, 0.0 if v_t < 1e-9 else v_t, dyn, "undefined"))
            except HolophaseError as exc:
                rows.append((alpha, s, None, None, v_t, dyn, f"error:{type(exc).__name__}"))
    return rows


def cmd_sweep(cfg, args):
    rows = sweep_rows(cfg)
    if cfg.format == "json":
        _emit(_json_text([dict(zip(SWEEP_COLUMNS, r)) for r in rows]), cfg.out)
    else:
        _emit(_csv_text(SWEEP_COLUMNS, rows), cfg.out)
    return EXIT_OK


FRINGE_COLUMNS = ("alpha", "s", "rep", "phi_rad", "counts")


def _fringe(model, phi, seed, noiseless, metadata):
    counts = optics.expected_counts(phi, model) if noiseless else optics.sample_counts(phi, model, seed)
    return fitting.FringeData(phi, counts, metadata), counts


def simulate(cfg):
    """Monte Carlo fringes, fits and calibrated phase extraction over the grid.

    Returns (summary dict, fringe rows).
    """
    phi = np.linspace(0.0, np.pi, cfg.phi_points, endpoint=False)

    ref_fits = []
    for j, alpha in enumerate(cfg.alpha_grid):
        model = optics.CoincidenceModel.from_settings(alpha, 0.0, cfg.n, cfg.n0)
        seed = derive_seed(cfg.seed, 1, j)
        data, _ = _fringe(model, phi, seed, cfg.noiseless, {"alpha": alpha, "s": 0.0, "seed": seed})
        ref_fits.append(fitting.fit_sinusoid(data))
    reference = fitting.calibrate_reference(ref_fits)

    points, fringe_rows = [], []
    index = 0
    for alpha in cfg.alpha_grid:
        for s in cfg.s_grid:
            model = optics.CoincidenceModel.from_settings(alpha, s, cfg.n, cfg.n0)
            try:
                truth = phases.experiment_phase_closed(alpha, s)
            except UndefinedPhase:
                truth = None
            fits, undetermined = [], 0
            for rep in range(cfg.reps):
                seed = derive_seed(cfg.seed, 0, index, rep)
                data, counts = _fringe(model, phi, seed, cfg.noiseless, {"alpha": alpha, "s": s, "seed": seed})
                fringe_rows.extend((alpha, s, rep, p, c) for p, c in zip(phi, counts))
                try:
                    fits.append(fitting.fit_sinusoid(data))
                except PhaseUndetermined:
                    undetermined += 1
            point = {
                "alpha": alpha, "s": s, "true_phase": truth,
                "plate_phase": model.plate_phase,
                "model_visibility": model.visibility,
                "reference_visibility": model.reference_visibility,
                "n_fits": len(fits), "n_undetermined": undetermined,
            }
            if fits:
                fitted = np.array([f.phase for f in fits]) - model.plate_phase
                stderr = np.array([f.phase_stderr for f in fits])
                extracted = [fitting.extract_holonomic(f, reference) - model.plate_phase for f in fits]
                point.update(
                    fitted_phase=fitting.circular_mean(fitted),
                    phase_stderr=float(np.mean(stderr)),
                    extracted_phase=float(wrap_phase(fitting.circular_mean(extracted))),
                    visibility=float(np.mean([f.visibility for f in fits])),
                )
                if truth is not None:
                    miss = np.abs(wrap_phase(fitted - truth))
                    point["coverage_3sigma"] = float(np.mean(miss < 3 * stderr))
                point["status"] = "ok"
            else:
                point["status"] = "undetermined"
            points.append(point)
            index += 1

    summary = {
        "reference_phase": reference,
        "n": cfg.n, "n0": cfg.n0, "seed": cfg.seed, "reps": cfg.reps,
        "phi_points": cfg.phi_points, "noiseless": cfg.noiseless,
        "reference_visibility": (cfg.n - cfg.n0) / (cfg.n + cfg.n0),
        "points": points,
    }
    return summary, fringe_rows


def cmd_simulate(cfg, args):
    summary, fringe_rows = simulate(cfg)
    if cfg.out and cfg.format == "csv":
        out = Path(cfg.out)
        _emit(_csv_text(FRINGE_COLUMNS, fringe_rows), out)
        _emit(_json_text(summary), out.with_suffix(".summary.json"))
    else:
        _emit(_json_text(summary), cfg.out)
    return EXIT_OK


SCHMIDT_COLUMNS = ("T", "phi_closed_eq2", "phi_numeric_unwrapped")


def schmidt_row(t, samples=DEFAULT_SAMPLES):
    alpha = float(np.arcsin(np.sqrt(t)))
    psi = prepared_state(alpha)
    form = schmidt_decompose(psi)
    eta = 1 if form.degenerate else None
    traj = schmidt_evolution(form, 2 * np.pi, eta=eta, initial=psi, samples_per_segment=samples)
    return t, phases.entanglement_phase_closed(t), phases.holonomic_phase(traj).holonomic_unwrapped


def cmd_schmidt(cfg, args):
    rows = [schmidt_row(t, cfg.samples_per_segment) for t in args.tangle]
    if cfg.format == "json":
        _emit(_json_text([dict(zip(SCHMIDT_COLUMNS, r)) for r in rows]), cfg.out)
    else:
        _emit(_csv_text(SCHMIDT_COLUMNS, rows), cfg.out)
    return EXIT_OK


def topology_record(alpha=np.pi / 2, s=None, schmidt=False, samples=DEFAULT_SAMPLES):
    psi = prepared_state(alpha)
    if schmidt:
        form = schmidt_decompose(psi)
        traj = schmidt_evolution(form, 2 * np.pi, eta=1 if form.degenerate else None,
                                 initial=psi, samples_per_segment=samples)
    else:
        traj = experiment_trajectory(psi, s, samples)
    return topology.trace_ball(traj)


def cmd_topology(cfg, args):
    s = None if args.schmidt else cfg.s_grid[0]
    try:
        rec = topology_record(cfg.alpha_grid[0], s, args.schmidt, cfg.samples_per_segment)
    except NotMaximallyEntangled as exc:
        print(f"not a maximally entangled evolution: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary = {"crossings": rec.crossings, "parity": rec.parity,
               "topological_phase": rec.topological_phase, "grazing": rec.grazing,
               "ends_on_border": rec.ends_on_border}
    if cfg.format == "json":
        summary["path"] = [dict(zip(topology.BALL_COLUMNS, r)) for r in topology.export_ball_path(rec)]
        _emit(_json_text(summary), cfg.out)
    else:
        _emit(_csv_text(topology.BALL_COLUMNS, topology.export_ball_path(rec)), cfg.out)
        print(json.dumps(summary, sort_keys=True), file=sys.stderr if not cfg.out else sys.stdout)
    return EXIT_OK


def verification_report(hwp_offset=0.0, n_s=50):
    """Self-checks: plate decompositions, vanishing dynamical phase, SU(2) double cover."""
    s_values = np.linspace(0.0, np.pi / 2, n_s)
    checks = []

    def add(name, value, limit):
        checks.append({"check": name, "value": float(value), "limit": limit,
                       "passed": bool(value <= limit)})

    plate = []
    for s in s_values:
        plate.append(optics.match_up_to_phase(optics.plate_unitary(s, hwp_offset),
                                              optics.experiment_unitary(s)).residual)
    add("plate_decomposition_residual", max(plate), 1e-10)
    arm = [optics.verify_arm_decomposition(s).residual for s in s_values]
    add("arm_decomposition_residual", max(arm), 1e-10)

    dyn = 0.0
    for alpha in np.linspace(0.0, np.pi, 11):
        for s in s_values[::5]:
            traj = experiment_trajectory(prepared_state(alpha), s, 256)
            dyn = max(dyn, float(np.abs(phases.segment_dynamical_phases(traj)).max()))
    add("dynamical_phase_max", dyn, 1e-8)

    axes = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (0.6, 0.0, 0.8)]
    cover = max(float(np.abs(su2_exp(n, 2 * np.pi) + I2).max()) for n in axes)
    add("su2_double_cover", cover, 1e-12)
    ident = float(np.abs(su2_exp((1.0, 0.0, 0.0), 4 * np.pi) - I2).max())
    add("su2_4pi_identity", ident, 1e-12)
    add("sigma1_diagonal", float(np.abs(SIGMA1 - np.diag([1, -1])).max()), 0.0)
    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def cmd_verify(cfg, args):
    report = verification_report(hwp_offset=args.inject_fault)
    _emit(_json_text(report), cfg.out)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# --- argument handling --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override its fields")
    common.add_argument("--alpha", type=float, nargs="+", help="entanglement parameter(s), radians")
    common.add_argument("--s", type=float, nargs="+", help="opening angle(s), radians")
    common.add_argument("--samples", type=int, help="samples per trajectory segment")
    common.add_argument("--n", type=float, help="reference maximum counts N")
    common.add_argument("--n0", type=float, help="reference background counts N0")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--reps", type=int, help="Monte Carlo repetitions per grid point")
    common.add_argument("--phi-points", type=int, help="points per fringe")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--degrees", action="store_true", help="angles given in degrees")
    common.add_argument("--noiseless", action="store_true", help="use expected counts, no Poisson noise")

    p = _Parser(prog="holophase", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("phase", parents=[common], help="phase decomposition at one (alpha, s)")
    sub.add_parser("sweep", parents=[common], help="closed-form vs numerical phase over a grid")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo fringes, fits and calibration")
    sp = sub.add_parser("schmidt", parents=[common], help="entanglement phase of Schmidt evolutions")
    sp.add_argument("--tangle", type=float, nargs="+",
                    default=[round(0.1 * k, 1) for k in range(11)])
    tp = sub.add_parser("topology", parents=[common], help="SO(3)-ball path of a maximally entangled evolution")
    tp.add_argument("--schmidt", action="store_true", help="full Schmidt evolution instead of U(s)")
    vp = sub.add_parser("verify", parents=[common], help="built-in self-test report")
    vp.add_argument("--inject-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    return p


def load_config(args):
    cfg = RunConfig()
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for k, v in raw.items():
            setattr(cfg, k, v)
        if args.degrees:
            cfg.alpha_grid = list(np.radians(cfg.alpha_grid))
            cfg.s_grid = list(np.radians(cfg.s_grid))
    conv = np.radians if args.degrees else (lambda x: x)
    if args.alpha is not None:
        cfg.alpha_grid = [float(conv(a)) for a in args.alpha]
    if args.s is not None:
        cfg.s_grid = [float(conv(s)) for s in args.s]
    overrides = {"samples_per_segment": args.samples, "n": args.n, "n0": args.n0,
                 "seed": args.seed, "reps": args.reps, "phi_points": args.phi_points,
                 "out": args.out, "format": args.format}
    for k, v in overrides.items():
        if v is not None:
            setattr(cfg, k, v)
    if args.noiseless:
        cfg.noiseless = True
    cfg.alpha_grid = [float(a) for a in cfg.alpha_grid]
    cfg.s_grid = [float(s) for s in cfg.s_grid]
    return cfg.validate()


COMMANDS = {"phase": cmd_phase, "sweep": cmd_sweep, "simulate": cmd_simulate,
            "schmidt": cmd_schmidt, "topology": cmd_topology, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors exit 1 (see _Parser.error)
        return exc.code
    if not args.command:
        parser.print_help()
        return EXIT_OK
    try:
        cfg = load_config(args)
        if args.command in ("phase", "topology"):
            if args.command == "phase" and args.alpha is None:
                raise ConfigError("phase needs --alpha")
            if args.s is None and not (args.command == "topology" and args.schmidt):
                raise ConfigError(f"{args.command} needs --s")
            if args.command == "topology" and args.alpha is None:
                cfg.alpha_grid = [np.pi / 2]
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
