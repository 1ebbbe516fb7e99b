"""Command-line driver: config parsing, pipeline orchestration, artifacts.

Subcommands
-----------
``validate``
    Run the admissibility checks and report their margins.
``steady`` / ``spectrum`` / ``psi`` / ``evolve`` / ``lemma``
    Run one stage of the pipeline and write its CSV plus a small JSON
    report into the output directory.
``report``
    Run the whole pipeline, emit every artifact plus one consolidated
    JSON, and verify the cross-module consistency checks (fitted decay
    rate vs. resolvent gap vs. spectral abscissa, and the semigroup
    envelope along the recorded trajectory).

Exit codes: 0 success, 1 configuration error, 2 admissibility failure
(unless ``--allow-degenerate``), 3 numerical error from a module,
4 consistency-check failure in ``report``.

Identical configuration and seed produce byte-identical outputs; every
artifact carries the configuration hash, grid size and package version
in its leading comment line.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import ConfigurationError, TwoSpeedError
from .fields import FieldSpec, validate_cross_section_overlap, validate_transport_fields
from .generator import Grid, assemble, dissipativity_check, hermitian_abscissa
from .evolution import (
    component_imbalance,
    entropy_identity_residual,
    estimate_decay,
    evolve,
    steady_plus_mode,
)
from .space import StateVector
from .spectral import (
    COARSE_POINTS,
    REFINE_DEPTH,
    psi_sweep,
    semigroup_bound_check,
    spectrum,
)
from .stationary_phase import lemma_sweep
from .steady_state import solve_steady
from .textio import read_csv_columns, write_csv, write_json

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ASSUMPTION = 2
EXIT_NUMERICAL = 3
EXIT_CONSISTENCY = 4

#: Consistency tolerances for the report verdict.
ALPHA_TRIANGLE_TOL = 0.05
ABSCISSA_TRIANGLE_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated run configuration."""

    b1: FieldSpec
    b2: FieldSpec
    sigma: FieldSpec
    n: int
    evolve_T: float
    evolve_dt: float
    scheme: str
    observe_every: int
    snapshot_every: int
    initial: tuple
    lambda_max: float
    coarse_points: int
    refine_depth: int
    t_grid: tuple
    lemma_psi: object
    lemma_lambda_min: float
    lemma_lambda_max: float
    lemma_points: int
    out_dir: Path
    config_sha256: str

    def meta(self) -> dict:
        return {"config": self.config_sha256[:12], "n": self.n, "version": __version__}


def _fail(path: str, message: str) -> ConfigurationError:
    return ConfigurationError(f"{path}: {message}")


def _get_map(node, path: str) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise _fail(path, "expected a key-value mapping")
    return node


def _get_number(node: dict, key: str, path: str, default=None, positive=False, integer=False):
    if key not in node:
        if default is None:
            raise _fail(f"{path}.{key}", "missing required value")
        return default
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(f"{path}.{key}", f"expected a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise _fail(f"{path}.{key}", f"expected an integer, got {value!r}")
        value = int(value)
    if positive and value <= 0:
        raise _fail(f"{path}.{key}", f"must be positive, got {value!r}")
    return value


def _check_keys(node: dict, allowed, path: str) -> None:
    unknown = sorted(set(node) - set(allowed))
    if unknown:
        raise _fail(path, f"unknown keys {unknown}; allowed: {sorted(allowed)}")


def _field_from_node(node, path: str, base_dir: Path) -> FieldSpec:
    node = _get_map(node, path)
    if "kind" not in node:
        raise _fail(path, "field needs a 'kind'")
    kind = node["kind"]
    try:
        if kind == "constant":
            _check_keys(node, {"kind", "value"}, path)
            return FieldSpec.constant(_get_number(node, "value", path))
        if kind == "affine":
            _check_keys(node, {"kind", "a", "b"}, path)
            return FieldSpec.affine(_get_number(node, "a", path), _get_number(node, "b", path))
        if kind == "trigonometric":
            _check_keys(node, {"kind", "a", "b", "c"}, path)
            return FieldSpec.trigonometric(
                _get_number(node, "a", path),
                _get_number(node, "b", path),
                _get_number(node, "c", path, default=0.0),
            )
        if kind == "tabulated":
            _check_keys(node, {"kind", "x", "v", "csv"}, path)
            if "csv" in node:
                csv_path = base_dir / str(node["csv"])
                if not csv_path.is_file():
                    raise _fail(f"{path}.csv", f"file not found: {csv_path}")
                xs, vs = _read_table(csv_path)
                return FieldSpec.tabulated(xs, vs)
            if "x" not in node or "v" not in node:
                raise _fail(path, "tabulated field needs 'x' and 'v' lists (or 'csv')")
            return FieldSpec.tabulated(node["x"], node["v"])
    except ValueError as exc:
        raise _fail(path, str(exc)) from exc
    raise _fail(f"{path}.kind", f"unknown field kind {kind!r}")


def _read_table(path: Path):
    xs, vs = [], []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) < 2:
            raise ConfigurationError(f"{path}: expected two comma-separated columns")
        try:
            xs.append(float(parts[0]))
            vs.append(float(parts[1]))
        except ValueError:
            continue  # header row
    if len(xs) < 2:
        raise ConfigurationError(f"{path}: needs at least two numeric sample rows")
    return xs, vs


def _parse_initial(node, path: str, base_dir: Path) -> tuple:
    node = _get_map(node, path)
    if not node:
        return ("steady-plus-mode", 1, 0.01)
    kind = node.get("type")
    if kind == "steady-plus-mode":
        _check_keys(node, {"type", "k", "amplitude"}, path)
        return (
            kind,
            _get_number(node, "k", path, default=1, integer=True, positive=True),
            _get_number(node, "amplitude", path, default=0.01),
        )
    if kind == "component-imbalance":
        _check_keys(node, {"type", "amplitude"}, path)
        return (kind, _get_number(node, "amplitude", path, default=0.1))
    if kind == "from-csv":
        _check_keys(node, {"type", "path"}, path)
        if "path" not in node:
            raise _fail(f"{path}.path", "missing required value")
        csv_path = base_dir / str(node["path"])
        if not csv_path.is_file():
            raise _fail(f"{path}.path", f"file not found: {csv_path}")
        return (kind, csv_path)
    raise _fail(f"{path}.type", f"unknown initial-condition type {kind!r}")


def load_config(path, out_override=None) -> RunConfig:
    """Parse and validate a YAML run configuration."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    raw = path.read_bytes()
    try:
        tree = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{path}: not valid YAML: {exc}") from exc
    tree = _get_map(tree, str(path))
    _check_keys(tree, {"fields", "grid", "evolve", "spectral", "lemma", "output"}, "config")
    base_dir = path.parent

    fields_node = _get_map(tree.get("fields"), "fields")
    _check_keys(fields_node, {"b1", "b2", "sigma"}, "fields")
    if "b1" not in fields_node or "b2" not in fields_node:
        raise _fail("fields", "both 'b1' and 'b2' are required")
    b1 = _field_from_node(fields_node["b1"], "fields.b1", base_dir)
    b2 = _field_from_node(fields_node["b2"], "fields.b2", base_dir)
    sigma = (
        _field_from_node(fields_node["sigma"], "fields.sigma", base_dir)
        if "sigma" in fields_node
        else FieldSpec.constant(1.0)
    )

    grid_node = _get_map(tree.get("grid"), "grid")
    _check_keys(grid_node, {"n"}, "grid")
    n = _get_number(grid_node, "n", "grid", positive=True, integer=True)
    if n < 8:
        raise _fail("grid.n", "needs at least 8 cells")

    ev = _get_map(tree.get("evolve"), "evolve")
    _check_keys(
        ev,
        {"T", "dt", "scheme", "observe_every", "snapshot_every", "initial"},
        "evolve",
    )
    scheme = ev.get("scheme", "implicit-trapezoid")
    if scheme not in ("implicit-trapezoid", "explicit-rk4"):
        raise _fail("evolve.scheme", f"unknown scheme {scheme!r}")

    sp = _get_map(tree.get("spectral"), "spectral")
    _check_keys(sp, {"lambda_max", "coarse_points", "refine_depth", "t_grid"}, "spectral")
    t_grid = sp.get("t_grid", [0.5, 1.0, 2.0, 4.0])
    if not isinstance(t_grid, list) or not t_grid:
        raise _fail("spectral.t_grid", "expected a non-empty list of times")
    t_vals = []
    for i, item in enumerate(t_grid):
        if isinstance(item, bool) or not isinstance(item, (int, float)) or item < 0:
            raise _fail(f"spectral.t_grid[{i}]", f"expected a non-negative time, got {item!r}")
        t_vals.append(float(item))
    if any(b <= a for a, b in zip(t_vals, t_vals[1:])):
        raise _fail("spectral.t_grid", "times must be strictly increasing")

    lm = _get_map(tree.get("lemma"), "lemma")
    _check_keys(lm, {"psi", "lambda_min", "lambda_max", "points"}, "lemma")
    psi_node = lm.get("psi", "from-fields")
    if psi_node == "from-fields":
        lemma_psi = "from-fields"
    else:
        lemma_psi = _field_from_node(psi_node, "lemma.psi", base_dir)
    lemma_lo = _get_number(lm, "lambda_min", "lemma", default=math.pi, positive=True)
    lemma_hi = _get_number(lm, "lambda_max", "lemma", default=200.0 * math.pi, positive=True)
    if lemma_hi <= lemma_lo:
        raise _fail("lemma.lambda_max", "must exceed lemma.lambda_min")

    out_node = _get_map(tree.get("output"), "output")
    _check_keys(out_node, {"directory"}, "output")
    out_dir = Path(out_override) if out_override else Path(out_node.get("directory", "out"))

    return RunConfig(
        b1=b1,
        b2=b2,
        sigma=sigma,
        n=n,
        evolve_T=_get_number(ev, "T", "evolve", default=10.0, positive=True),
        evolve_dt=_get_number(ev, "dt", "evolve", default=1e-3, positive=True),
        scheme=scheme,
        observe_every=_get_number(ev, "observe_every", "evolve", default=10, positive=True, integer=True),
        snapshot_every=_get_number(ev, "snapshot_every", "evolve", default=0, integer=True),
        initial=_parse_initial(ev.get("initial"), "evolve.initial", base_dir),
        lambda_max=_get_number(sp, "lambda_max", "spectral", default=0.0),
        coarse_points=_get_number(sp, "coarse_points", "spectral", default=COARSE_POINTS, positive=True, integer=True),
        refine_depth=_get_number(sp, "refine_depth", "spectral", default=REFINE_DEPTH, integer=True),
        t_grid=tuple(t_vals),
        lemma_psi=lemma_psi,
        lemma_lambda_min=lemma_lo,
        lemma_lambda_max=lemma_hi,
        lemma_points=_get_number(lm, "points", "lemma", default=33, positive=True, integer=True),
        out_dir=out_dir,
        config_sha256=hashlib.sha256(raw).hexdigest(),
    )


def _run_validation(cfg: RunConfig):
    rep1 = validate_transport_fields(cfg.b1, cfg.b2)
    rep2 = validate_cross_section_overlap(cfg.b1, cfg.b2, cfg.sigma)
    return rep1, rep2


def _validation_gate(cfg: RunConfig, args) -> int:
    """Return 0 to proceed, EXIT_ASSUMPTION to stop."""
    rep1, rep2 = _run_validation(cfg)
    if rep1.passed and rep2.passed:
        return EXIT_OK
    for rep in (rep1, rep2):
        if not rep.passed:
            print(f"admissibility failure: {rep.detail}", file=sys.stderr)
    if args.allow_degenerate:
        print("continuing despite admissibility failure (--allow-degenerate)", file=sys.stderr)
        return EXIT_OK
    return EXIT_ASSUMPTION


def _report_dict(rep) -> dict:
    return {
        "passed": rep.passed,
        "min_abs_value": rep.min_abs_value,
        "sign": rep.sign,
        "witness_x": rep.witness_x,
        "detail": rep.detail,
    }


def _assemble(cfg: RunConfig, args):
    gen = assemble(cfg.b1, cfg.b2, cfg.sigma, Grid(cfg.n))
    if getattr(args, "dump_matrix", False):
        _ensure_out(cfg)
        rows = [
            ",".join(f"{v:.17g}" for v in row)  # row-major entry dump for debugging
            for row in gen.matrix
        ]
        (cfg.out_dir / "generator_matrix.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return gen


def _ensure_out(cfg: RunConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)


def _initial_state(cfg: RunConfig, gen) -> StateVector:
    kind = cfg.initial[0]
    if kind == "steady-plus-mode":
        return steady_plus_mode(gen, cfg.initial[1], cfg.initial[2])
    if kind == "component-imbalance":
        return component_imbalance(gen, cfg.initial[1])
    cols = read_csv_columns(cfg.initial[1])
    for name in ("x", "p1", "p2"):
        if name not in cols:
            raise ConfigurationError(f"{cfg.initial[1]}: initial-state CSV needs column {name!r}")
    n = gen.grid.n
    if len(cols["x"]) == n:
        return gen.state(cols["p1"], cols["p2"])
    if len(cols["x"]) == n + 1:
        # Node-based profile (steady-state CSV layout): average onto cells.
        return gen.state(
            0.5 * (cols["p1"][:-1] + cols["p1"][1:]),
            0.5 * (cols["p2"][:-1] + cols["p2"][1:]),
        )
    raise ConfigurationError(
        f"{cfg.initial[1]}: expected {n} cell rows or {n + 1} node rows, got {len(cols['x'])}"
    )


def cmd_validate(cfg: RunConfig, args) -> int:
    rep1, rep2 = _run_validation(cfg)
    print(f"velocities: {'PASS' if rep1.passed else 'FAIL'} ({rep1.detail})")
    print(f"cross-section overlap: {'PASS' if rep2.passed else 'FAIL'} ({rep2.detail})")
    if rep1.passed and rep2.passed:
        return EXIT_OK
    return EXIT_OK if args.allow_degenerate else EXIT_ASSUMPTION


def cmd_steady(cfg: RunConfig, args) -> int:
    gate = _validation_gate(cfg, args)
    if gate:
        return gate
    ss = solve_steady(cfg.b1, cfg.b2, cfg.sigma, cfg.n)
    _ensure_out(cfg)
    write_csv(
        cfg.out_dir / "steady.csv",
        [("x", ss.x), ("p1", ss.p1), ("p2", ss.p2), ("J1", ss.J1), ("J2", ss.J2)],
        cfg.meta(),
    )
    report = {
        "residual": ss.residual,
        "lower_bound": ss.lower_bound,
        "upper_bound": ss.upper_bound,
        "mass_p1": float(np.trapezoid(ss.p1, ss.x)),
        "mass_p2": float(np.trapezoid(ss.p2, ss.x)),
    }
    write_json(cfg.out_dir / "steady.report.json", report)
    print(
        f"steady: residual={ss.residual:.3e} bounds=[{ss.lower_bound:.6g}, {ss.upper_bound:.6g}]"
    )
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    gate = _validation_gate(cfg, args)
    if gate:
        return gate
    gen = _assemble(cfg, args)
    rep = spectrum(gen)
    _ensure_out(cfg)
    write_csv(
        cfg.out_dir / "spectrum.csv",
        [("re", rep.eigenvalues.real), ("im", rep.eigenvalues.imag)],
        cfg.meta(),
    )
    zero = rep.eigenvalues[rep.zero_mode_index]
    report = {
        "x0_abscissa": rep.x0_abscissa,
        "zero_eigenvalue_abs": float(abs(zero)),
        "nonneg_violation_count": int(len(rep.nonneg_violations)),
    }
    write_json(cfg.out_dir / "spectrum.report.json", report)
    print(f"spectrum: x0_abscissa={rep.x0_abscissa:.6g} |zero mode|={abs(zero):.3e}")
    return EXIT_OK


def cmd_psi(cfg: RunConfig, args) -> int:
    gate = _validation_gate(cfg, args)
    if gate:
        return gate
    gen = _assemble(cfg, args)
    est = psi_sweep(gen, cfg.lambda_max, cfg.coarse_points, cfg.refine_depth)
    _ensure_out(cfg)
    write_csv(
        cfg.out_dir / "psi_sweep.csv",
        [("lambda", est.lambda_grid), ("sigma_min", est.sigma_min_values)],
        cfg.meta(),
    )
    report = {
        "psi_hat": est.psi_hat,
        "argmin_lambda": est.argmin_lambda,
        "lambda_max": est.lambda_max,
        "refinement_depth": est.refinement_depth,
        "warnings": list(est.warnings),
    }
    write_json(cfg.out_dir / "psi.report.json", report)
    print(f"psi: psi_hat={est.psi_hat:.6g} at lambda={est.argmin_lambda:.6g}")
    return EXIT_OK


def _write_timeseries(cfg: RunConfig, series) -> None:
    _ensure_out(cfg)
    write_csv(
        cfg.out_dir / "timeseries.csv",
        [
            ("t", series.times),
            ("mass", series.mass),
            ("entropy", series.entropy),
            ("dissipation", series.dissipation),
            ("deviation", series.deviation),
        ],
        cfg.meta(),
    )
    for index, (_, snap) in enumerate(series.snapshots):
        write_csv(
            cfg.out_dir / f"snapshot_{index:04d}.csv",
            [
                ("x", snap.x),
                ("p1_re", snap.p1.real),
                ("p1_im", snap.p1.imag),
                ("p2_re", snap.p2.real),
                ("p2_im", snap.p2.imag),
            ],
            cfg.meta(),
        )


def cmd_evolve(cfg: RunConfig, args) -> int:
    gate = _validation_gate(cfg, args)
    if gate:
        return gate
    gen = _assemble(cfg, args)
    series = evolve(
        gen,
        _initial_state(cfg, gen),
        cfg.evolve_T,
        cfg.evolve_dt,
        scheme=cfg.scheme,
        observe_every=cfg.observe_every,
        snapshot_every=cfg.snapshot_every,
    )
    _write_timeseries(cfg, series)
    mass_drift = float(np.abs(series.mass - series.mass[0]).max())
    report = {
        "mass_drift": mass_drift,
        "final_deviation": float(series.deviation[-1]),
        "entropy_identity_residual": entropy_identity_residual(series),
    }
    try:
        fit = estimate_decay(series)
        report["alpha_hat"] = fit.alpha_hat
        report["prefactor"] = fit.prefactor
    except TwoSpeedError:
        report["alpha_hat"] = None
        report["prefactor"] = None
    write_json(cfg.out_dir / "evolve.report.json", report)
    alpha = report["alpha_hat"]
    print(
        f"evolve: mass_drift={mass_drift:.3e} "
        f"alpha_hat={alpha if alpha is None else f'{alpha:.6g}'}"
    )
    return EXIT_OK


def _lemma_psi_function(cfg: RunConfig):
    if cfg.lemma_psi == "from-fields":
        b1, b2 = cfg.b1, cfg.b2
        return lambda x: 1.0 / np.asarray(b1(x)) - 1.0 / np.asarray(b2(x))
    return cfg.lemma_psi


def cmd_lemma(cfg: RunConfig, args) -> int:
    gate = _validation_gate(cfg, args)
    if gate:
        return gate
    sweep = lemma_sweep(
        _lemma_psi_function(cfg),
        cfg.lemma_lambda_min,
        cfg.lemma_lambda_max,
        cfg.lemma_points,
    )
    _ensure_out(cfg)
    write_csv(
        cfg.out_dir / "lemma.csv",
        [
            ("lambda", sweep.lambdas),
            ("modulus", sweep.moduli),
            ("re", sweep.values.real),
            ("im", sweep.values.imag),
        ],
        cfg.meta(),
    )
    report = {
        "limsup_estimate": sweep.limsup_estimate,
        "lemma_consistent": sweep.lemma_consistent,
        "margin": sweep.margin,
        "warnings": list(sweep.warnings),
    }
    write_json(cfg.out_dir / "lemma.report.json", report)
    print(
        f"lemma: limsup_estimate={sweep.limsup_estimate:.6g} "
        f"({'consistent' if sweep.lemma_consistent else 'inconclusive'})"
    )
    return EXIT_OK


def cmd_report(cfg: RunConfig, args) -> int:
    rep1, rep2 = _run_validation(cfg)
    assumptions_ok = rep1.passed and rep2.passed
    if not assumptions_ok and not args.allow_degenerate:
        for rep in (rep1, rep2):
            if not rep.passed:
                print(f"admissibility failure: {rep.detail}", file=sys.stderr)
        return EXIT_ASSUMPTION

    ss = solve_steady(cfg.b1, cfg.b2, cfg.sigma, cfg.n)
    gen = _assemble(cfg, args)
    spec_rep = spectrum(gen)
    psi_est = psi_sweep(gen, cfg.lambda_max, cfg.coarse_points, cfg.refine_depth)
    series = evolve(
        gen,
        _initial_state(cfg, gen),
        cfg.evolve_T,
        cfg.evolve_dt,
        scheme=cfg.scheme,
        observe_every=cfg.observe_every,
        snapshot_every=cfg.snapshot_every,
    )
    fit = estimate_decay(series)
    semigroup = semigroup_bound_check(gen, psi_est, np.asarray(cfg.t_grid))
    sweep = lemma_sweep(
        _lemma_psi_function(cfg),
        cfg.lemma_lambda_min,
        cfg.lemma_lambda_max,
        cfg.lemma_points,
    )

    # Artifacts of every stage, same layout as the single commands.
    _ensure_out(cfg)
    write_csv(
        cfg.out_dir / "steady.csv",
        [("x", ss.x), ("p1", ss.p1), ("p2", ss.p2), ("J1", ss.J1), ("J2", ss.J2)],
        cfg.meta(),
    )
    write_csv(
        cfg.out_dir / "spectrum.csv",
        [("re", spec_rep.eigenvalues.real), ("im", spec_rep.eigenvalues.imag)],
        cfg.meta(),
    )
    write_csv(
        cfg.out_dir / "psi_sweep.csv",
        [("lambda", psi_est.lambda_grid), ("sigma_min", psi_est.sigma_min_values)],
        cfg.meta(),
    )
    _write_timeseries(cfg, series)
    write_csv(
        cfg.out_dir / "lemma.csv",
        [
            ("lambda", sweep.lambdas),
            ("modulus", sweep.moduli),
            ("re", sweep.values.real),
            ("im", sweep.values.imag),
        ],
        cfg.meta(),
    )

    dev0 = series.deviation[0]
    envelope_bounds = np.exp(0.5 * math.pi - psi_est.psi_hat * series.times) * dev0
    envelope_margin = float((envelope_bounds - series.deviation).min())
    mass_drift = float(np.abs(series.mass - series.mass[0]).max())
    entropy_steps = np.diff(series.entropy)
    monotone_violation = float(max(entropy_steps.max(), 0.0)) if len(entropy_steps) else 0.0

    checks = {
        "assumptions": assumptions_ok,
        "decay_rate_vs_gap": fit.alpha_hat >= psi_est.psi_hat - ALPHA_TRIANGLE_TOL,
        "abscissa_vs_gap": abs(spec_rep.x0_abscissa) >= psi_est.psi_hat - ABSCISSA_TRIANGLE_TOL,
        "trajectory_envelope": envelope_margin >= 0.0,
        "semigroup_envelope": semigroup.passed,
    }
    violated = sorted(name for name, ok in checks.items() if not ok)

    report = {
        "version": __version__,
        "config_sha256": cfg.config_sha256,
        "n": cfg.n,
        "assumptions": {
            "velocities": _report_dict(rep1),
            "cross_section_overlap": _report_dict(rep2),
        },
        "steady": {
            "residual": ss.residual,
            "lower_bound": ss.lower_bound,
            "upper_bound": ss.upper_bound,
        },
        "generator": {
            "dissipativity_max_rayleigh": dissipativity_check(gen, 200, args.seed),
            "hermitian_abscissa": hermitian_abscissa(gen),
        },
        "spectrum": {
            "x0_abscissa": spec_rep.x0_abscissa,
            "zero_eigenvalue_abs": float(abs(spec_rep.eigenvalues[spec_rep.zero_mode_index])),
            "nonneg_violation_count": int(len(spec_rep.nonneg_violations)),
        },
        "psi": {
            "psi_hat": psi_est.psi_hat,
            "argmin_lambda": psi_est.argmin_lambda,
            "lambda_max": psi_est.lambda_max,
            "warnings": list(psi_est.warnings),
        },
        "decay": {
            "alpha_hat": fit.alpha_hat,
            "prefactor": fit.prefactor,
            "window": list(fit.window),
            "fit_residual": fit.fit_residual,
        },
        "entropy": {
            "identity_residual": entropy_identity_residual(series),
            "mass_drift": mass_drift,
            "monotone_violation": monotone_violation,
        },
        "envelope": {
            "trajectory_margin": envelope_margin,
            "semigroup_margins": [float(v) for v in semigroup.margins],
        },
        "lemma": {
            "limsup_estimate": sweep.limsup_estimate,
            "lemma_consistent": sweep.lemma_consistent,
        },
        "checks": checks,
        "violated": violated,
        "passed": not violated,
    }
    write_json(cfg.out_dir / "report.json", report)
    status = "CONSISTENT" if not violated else f"VIOLATED: {', '.join(violated)}"
    print(
        f"report: psi_hat={psi_est.psi_hat:.6g} alpha_hat={fit.alpha_hat:.6g} "
        f"abscissa={spec_rep.x0_abscissa:.6g} [{status}]"
    )
    return EXIT_OK if not violated else EXIT_CONSISTENCY


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twospeed",
        description="Numerical laboratory for the two-speed transport-reaction model.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the YAML run configuration")
    common.add_argument("--out", default=None, help="override the output directory")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised diagnostics")
    common.add_argument(
        "--allow-degenerate",
        action="store_true",
        help="run even when the admissibility checks fail",
    )
    common.add_argument(
        "--dump-matrix",
        action="store_true",
        help="also write the assembled generator matrix (row-major CSV)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in [
        ("validate", cmd_validate),
        ("steady", cmd_steady),
        ("spectrum", cmd_spectrum),
        ("psi", cmd_psi),
        ("evolve", cmd_evolve),
        ("lemma", cmd_lemma),
        ("report", cmd_report),
    ]:
        sp = sub.add_parser(name, parents=[common])
        sp.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, out_override=args.out)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.handler(cfg, args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TwoSpeedError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
