"""``sipw`` command-line front end.

Exit codes: 0 every check passed, 1 a check failed or output could not be
written, 2 malformed usage, configuration or parameters.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__, catalog
from .catalog import FamilyId, FamilyParams
from .config import ConfigError, RunConfig, load_config, validate_config
from .deformation import (
    compatibility_residual,
    bernoulli_residual,
    derive_constants,
    solve_constants,
    strong_si_residual,
)
from .errors import (
    DegenerateDenominator,
    InvalidParams,
    NoNontrivialSolution,
    PoleOnGrid,
    SingularFamilyParams,
    TrivialOnlyFamily,
)
from .grid import Grid
from .potentials import (
    deformed_pair,
    full_superpotential,
    partner_identity_errors,
    partner_pair_from_w,
)
from .report import CheckRecord, VerificationReport, emit_report
from .spectral import ladder_check, partner_spectrum_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_POINTS = {"verify": 1000, "build": 200, "domain": 0, "spectrum": 8192, "ladder": 8192}
DEFAULT_THREADS = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one line, exit 2
        raise UsageError(message)


# ------------------------------------------------------------------ config plumbing


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--config", help="JSON run configuration; flags override its values")
    g.add_argument("--dump-config", action="store_true",
                   help="print the merged configuration as JSON and exit")
    g.add_argument("--family")
    for name in ("b", "c", "d", "m"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--sign", type=int, choices=(1, -1))
    g.add_argument("--x-min", type=float)
    g.add_argument("--x-max", type=float)
    g.add_argument("--n", type=int, help="number of interior grid points")
    g.add_argument("--k", type=int, help="number of eigenvalues")
    g.add_argument("--depth", type=int, help="ladder depth")
    g.add_argument("--residual-tol", type=float)
    g.add_argument("--spectral-tol", type=float)
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--output", "-o", help="output path, '-' for stdout")
    g.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp so identical runs give identical bytes")

    parser = _Parser(prog="sipw", description="Deformed shape-invariant superpotentials.")
    parser.add_argument("--version", action="version", version=f"sipw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", parents=[common], help="catalog of superpotential families")
    v = sub.add_parser("verify", parents=[common], help="residual suite")
    v.add_argument("--sweep-m", metavar="START:STOP:COUNT",
                   help="repeat the suite over evenly spaced m values")
    d = sub.add_parser("domain", parents=[common], help="singularity scan over an m range")
    d.add_argument("--m-min", type=float, default=-5.0)
    d.add_argument("--m-max", type=float, default=5.0)
    d.add_argument("--m-steps", type=int, default=41)
    sub.add_parser("build", parents=[common], help="emit W, W1+-, V, Vtilde samples")
    sub.add_parser("spectrum", parents=[common], help="partner spectra and isospectrality")
    sub.add_parser("ladder", parents=[common], help="shape-invariance ladder")
    return parser


def _merge(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.family is not None:
        try:
            cfg.family = FamilyId.parse(args.family).value
        except ValueError as exc:
            raise ConfigError(f"--family: {exc}") from None
    cfg.params = replace(cfg.params, **{k: getattr(args, k) for k in ("b", "c", "d", "sign", "m")
                                         if getattr(args, k) is not None})
    for flag, attr in (("x_min", "a"), ("x_max", "b"), ("n", "n")):
        if getattr(args, flag) is not None:
            setattr(cfg.grid, attr, getattr(args, flag))
    if args.k is not None:
        cfg.spectral.k = args.k
    if args.depth is not None:
        cfg.spectral.depth = args.depth
    if args.residual_tol is not None:
        cfg.tolerances.residual = args.residual_tol
    if args.spectral_tol is not None:
        cfg.tolerances.spectral = args.spectral_tol
    if args.format is not None:
        cfg.output.format = args.format
    if args.output is not None:
        cfg.output.path = args.output
    validate_config(cfg)
    return cfg


def _grid(cfg: RunConfig, family: FamilyId, params: FamilyParams, command: str) -> Grid:
    n = cfg.grid.n if cfg.grid.n is not None else DEFAULT_POINTS[command]
    length = 20.0 / params.c if family.info.uses_c else 20.0
    lo, hi = catalog.domain(family, params).truncated(length)
    a = cfg.grid.a if cfg.grid.a is not None else lo
    b = cfg.grid.b if cfg.grid.b is not None else hi
    try:
        return Grid(a, b, n)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _threads() -> int:
    raw = os.environ.get("SIPW_THREADS")
    if raw is None or raw == "":
        return min(DEFAULT_THREADS, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"SIPW_THREADS: expected an integer, got {raw!r}") from None
    if value < 0:
        raise ConfigError("SIPW_THREADS: must be non-negative")
    return value


# ------------------------------------------------------------------ verify


def _record(check_id: str, rel, x, tol: float) -> CheckRecord:
    rel = np.asarray(rel, dtype=float)
    finite = np.isfinite(rel)
    if not finite.any():
        return CheckRecord(check_id, None, False, None, tol, "no evaluable samples")
    idx = int(np.argmax(np.where(finite, rel, -np.inf)))
    worst = float(rel[idx])
    return CheckRecord(check_id, worst, worst < tol, float(np.asarray(x)[idx]), tol)


def _constant_check(family: FamilyId, params: FamilyParams, tol: float) -> CheckRecord | None:
    try:
        tabulated = derive_constants(family, params)
    except DegenerateDenominator:
        return None
    try:
        solved = solve_constants(family, params)
    except NoNontrivialSolution as exc:
        return CheckRecord("constant_relations", exc.residual, False, None, tol, str(exc))
    gaps = [abs(s - p) / max(1.0, abs(p)) if math.isfinite(abs(s)) else math.inf
            for s, p in ((solved.c2_over_c1, tabulated.c2_over_c1),
                         (solved.c4_over_c3, tabulated.c4_over_c3))]
    worst = max(gaps)
    return CheckRecord("constant_relations", worst, worst < tol, None, tol,
                       "generic solver against the closed-form relations")


def verify_checks(family: FamilyId, params: FamilyParams, grid: Grid,
                  tol: float) -> list[CheckRecord]:
    """Residual suite for one parameter point."""
    x = grid.points
    checks: list[CheckRecord] = []
    if family.info.trivial_only:
        try:
            solve_constants(family, params)
        except NoNontrivialSolution as exc:
            checks.append(CheckRecord("no_nontrivial_solution", exc.residual, True, None, None,
                                      str(exc)))
        else:
            checks.append(CheckRecord("no_nontrivial_solution", 0.0, False, None, None,
                                      "generic solver found nontrivial constants"))
        pair = partner_pair_from_w(full_superpotential(family, params, x), 0.0, grid, params.m)
        for name, err in partner_identity_errors(pair).items():
            checks.append(_record(name, err, x, tol))
        return checks

    with np.errstate(all="ignore"):
        for which in ("plus", "minus"):
            s = bernoulli_residual(family, params, x, which)
            checks.append(_record(f"bernoulli_{which}", s.relative, x, tol))
        for mode in ("algebraic", "full"):
            s = compatibility_residual(mode, family, params, x)
            checks.append(_record(f"compatibility_{mode}", s.relative, x, tol))
        si = strong_si_residual(family, params, x)
        checks.append(_record("strong_shape_invariance", si.relative3, x, tol))
        checks.append(_record("shape_invariance_derivative", si.relative2, x, tol))
    const = _constant_check(family, params, tol)
    if const is not None:
        checks.append(const)
    if family.info.hermitian:
        dp = deformed_pair(family, params, grid)
        for name, err in partner_identity_errors(dp.pair).items():
            checks.append(_record(name, err, x, tol))
        checks.append(_record("two_route_pair", dp.discrepancy, x, tol))
    return checks


def _parse_sweep(text: str) -> np.ndarray:
    parts = text.split(":")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise ConfigError(f"--sweep-m: expected START:STOP:COUNT, got {text!r}") from None
    if len(parts) != 3 or count < 1:
        raise ConfigError(f"--sweep-m: expected START:STOP:COUNT with COUNT >= 1, got {text!r}")
    return np.linspace(start, stop, count)


def _cmd_verify(cfg, args, family, params, report):
    grid = _grid(cfg, family, params, "verify")
    tol = cfg.tolerances.residual
    report.grid = grid.as_dict()
    if not args.sweep_m:
        report.checks = verify_checks(family, params, grid, tol)
        return
    ms = _parse_sweep(args.sweep_m)
    points = [params.with_m(float(m)) for m in ms]
    for p in points:
        catalog.validate(family, p)

    def job(p):
        return verify_checks(family, p, grid, tol)

    workers = _threads()
    if workers == 0:
        results = [job(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, points))  # map keeps input order
    sweep = []
    for p, checks in zip(points, results):
        sweep.append({"m": p.m, "pass": all(c.passed for c in checks),
                      "checks": [c.to_dict() for c in checks]})
        for c in checks:
            report.checks.append(replace(c, check_id=f"{c.check_id}@m={p.m!r}"))
    report.data["sweep"] = sweep


# ------------------------------------------------------------------ other commands


def _cmd_list(cfg, args, report):
    rows = catalog.reference_table()
    report.data["families"] = rows
    header = list(rows[0])
    report.table = header, [[r[h] for h in header] for r in rows]


def _text_table(rows: list[dict]) -> str:
    header = list(rows[0])
    widths = [max(len(h), *(len(str(r[h])) for r in rows)) for h in header]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(str(r[h]).ljust(w) for h, w in zip(header, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _cmd_domain(cfg, args, family, params, report):
    if args.m_steps < 1:
        raise ConfigError("--m-steps: must be positive")
    if family.info.trivial_only:
        raise ConfigError(f"family: {family.cli_name} has no deformation terms to scan")
    rows = []
    bad = []
    for m in np.linspace(args.m_min, args.m_max, args.m_steps):
        p = params.with_m(float(m))
        catalog.validate(family, p)
        verdict = catalog.singularity_verdict(family, p)
        published = catalog.published_free_condition(family, p)
        witness = None if verdict else verdict.witness
        rows.append({"m": p.m, "verdict": "free" if verdict else "singular",
                     "witness_x": witness, "published_free": published})
        if published and not verdict:
            bad.append(p.m)
    report.data["scan"] = rows
    report.checks.append(CheckRecord(
        "published_condition_sufficient", None, not bad, None, None,
        f"{len(bad)} m values meet the published condition yet scan singular" if bad
        else "every m meeting the published condition scans free",
    ))
    report.table = (["m", "verdict", "witness_x", "published_free"],
                    [[r["m"], r["verdict"], r["witness_x"], r["published_free"]] for r in rows])


def _cmd_build(cfg, args, family, params, report):
    grid = _grid(cfg, family, params, "build")
    x = grid.points
    report.grid = grid.as_dict()
    with np.errstate(all="ignore"):
        if family.info.trivial_only:
            pair = partner_pair_from_w(full_superpotential(family, params, x), 0.0, grid, params.m)
            wp = wm = np.zeros_like(x)
        else:
            pair = deformed_pair(family, params, grid).pair
            wp, _, wm, _ = catalog.deformation_derivatives(family, params, x)
    columns = {"x": x, "W": pair.w, "W1plus": wp, "W1minus": wm, "V": pair.v,
               "Vtilde": pair.v_tilde}
    # a pole of one term leaves the whole row non-evaluable
    row_bad = ~np.all([np.isfinite(v) for v in columns.values()], axis=0)
    samples = {k: np.where(row_bad, np.nan, v) if k != "x" else v for k, v in columns.items()}
    report.data["samples"] = samples
    report.data["non_evaluable"] = int(row_bad.sum())
    header = list(samples)
    report.table = header, [[samples[h][i] for h in header] for i in range(grid.n)]


def _cmd_spectrum(cfg, args, family, params, report):
    grid = _grid(cfg, family, params, "spectrum")
    report.grid = grid.as_dict()
    tol = cfg.tolerances.spectral
    sr = partner_spectrum_check(family, params, grid, k=cfg.spectral.k)
    report.data.update({
        "energies": sr.energies, "energies_tilde": sr.energies_tilde,
        "pairing_defects": sr.pairing_defects, "unbroken": sr.unbroken,
        "zero_mode_tail": sr.raw["zero_mode_tail"],
    })
    worst = float(np.max(sr.pairing_defects))
    report.checks.append(CheckRecord("isospectral_pairing", worst, worst < tol, None, tol,
                                     "shifted levels" if sr.unbroken else "level by level"))
    if sr.unbroken:
        e0 = abs(float(sr.energies[0]))
        report.checks.append(CheckRecord("ground_energy", e0, e0 < tol, None, tol,
                                         "normalizable zero mode at energy 0"))
    levels = range(len(sr.energies))
    report.table = (["level", "E", "Etilde"],
                    [[i, sr.energies[i], sr.energies_tilde[i]] for i in levels])


def _cmd_ladder(cfg, args, family, params, report):
    grid = _grid(cfg, family, params, "ladder")
    report.grid = grid.as_dict()
    entries = ladder_check(family, params, cfg.spectral.depth, grid, k=cfg.spectral.k)
    rtol, stol = cfg.tolerances.residual, cfg.tolerances.spectral
    rungs = []
    for j, e in enumerate(entries):
        rungs.append({"rung": j, "m": e.m, "R": e.R, "constancy": e.constancy,
                      "spectral_shift": e.spectral_shift, "spectral_defect": e.spectral_defect})
        rel = e.constancy / max(1.0, abs(e.R))
        report.checks.append(CheckRecord(f"ladder_constancy@rung={j}", rel, rel < rtol,
                                         None, rtol))
        report.checks.append(CheckRecord(f"ladder_spectral@rung={j}", e.spectral_defect,
                                         e.spectral_defect < stol, None, stol))
    report.data["rungs"] = rungs
    report.table = (["rung", "m", "R", "constancy", "spectral_shift", "spectral_defect"],
                    [[r[h] for h in ("rung", "m", "R", "constancy", "spectral_shift",
                                     "spectral_defect")] for r in rungs])


COMMANDS = {
    "verify": _cmd_verify,
    "domain": _cmd_domain,
    "build": _cmd_build,
    "spectrum": _cmd_spectrum,
    "ladder": _cmd_ladder,
}


# ------------------------------------------------------------------ entry points


def _execute(args) -> int:
    cfg = _merge(args)
    if args.dump_config:
        sys.stdout.write(cfg.dumps())
        return EXIT_OK
    report = VerificationReport(args.command, tolerances=vars(cfg.tolerances).copy())
    if args.command == "list":
        _cmd_list(cfg, args, report)
        if args.format is None:
            # plain text table unless a machine format was asked for
            text = _text_table(report.data["families"])
            if cfg.output.path in ("-", ""):
                sys.stdout.write(text)
            else:
                with open(cfg.output.path, "w") as fh:
                    fh.write(text)
            return EXIT_OK
    else:
        family = cfg.family_id()
        params = cfg.family_params()
        catalog.validate(family, params)
        report.family = family.cli_name
        report.params = params.as_dict()
        if family is FamilyId.COMPLEX_EXPONENTIAL and args.command in ("build", "spectrum",
                                                                       "ladder"):
            raise ConfigError(f"{args.command}: {family.cli_name} is non-Hermitian; "
                              "real potentials are undefined")
        COMMANDS[args.command](cfg, args, family, params, report)
    emit_report(report, cfg.output.format, cfg.output.path, timestamp=not args.no_timestamp)
    return EXIT_OK if report.passed else EXIT_FAIL


def run(argv=None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _execute(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, ConfigError, InvalidParams, TrivialOnlyFamily,
            SingularFamilyParams, PoleOnGrid) as exc:
        print(f"sipw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sipw: error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run(sys.argv[1:]))
