"""Command-line front end.

Subcommands: verify, witness, scan, invariance, simulate. Settings come from
an optional JSON config file (flat object, keys as in :class:`RunConfig`) and
are overridden by flags. Exit codes: 0 success, 1 check failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields
from typing import Any, Callable

import numpy as np

from . import __version__, config
from .algebra import build_operator_set, commutator_residual
from .catalog import FAMILIES, StateSpec, random_guarded_state, realize, two_photon_theta
from .criteria import (
    CriterionReport,
    covariance_record,
    evaluate,
    verify_pt_covariance,
    verify_pt_moments,
    witness_w9,
    witness_w14,
)
from .errors import SuWitnessError
from .fock import build_space
from .measurement import PROTOCOL_PHASES, estimated_report, exact_moment_check, reconstruct, simulate_protocol
from .transforms import beamsplitter_unitary, mode_map_residual, phase_shift, rotate_record

SCHEMA_VERSION = 1
SCAN_HEADER = ["theta", "w9", "w12", "w14", "mean_n", "var_jx", "var_jy", "cov_xy", "verdict_w12"]
PARAM_KEYS = ("theta", "r", "n", "n_a", "n_b", "alpha", "beta", "weights", "components")

COMMUTATOR_TOL = 1e-12
IDENTITY_TOL = 1e-10


class ConfigError(Exception):
    pass


def _default_theta_grid() -> list[float]:
    return [k * math.pi / 32 for k in range(64)]


def _default_phi_grid() -> list[float]:
    return [2 * math.pi * k / 32 for k in range(32)]


@dataclass
class RunConfig:
    cutoff_a: int = config.DEFAULT_CUTOFF
    cutoff_b: int = config.DEFAULT_CUTOFF
    guard: int = config.DEFAULT_GUARD
    tol: float = config.EQUALITY_TOL
    z_threshold: float = config.Z_THRESHOLD
    family: str = "two-photon-theta"
    theta: float | None = None
    r: float | None = None
    n: int | None = None
    n_a: int | None = None
    n_b: int | None = None
    alpha: Any = None
    beta: Any = None
    weights: list[float] | None = None
    components: list[Any] | None = None
    theta_grid: list[float] = field(default_factory=_default_theta_grid)
    phi_grid: list[float] = field(default_factory=_default_phi_grid)
    shots: int = 100_000
    seed: int = 0
    out: str | None = None
    format: str | None = None

    def validate(self) -> None:
        if self.tol <= 0 or self.z_threshold <= 0:
            raise ConfigError("tolerances must be positive")
        if self.cutoff_a < 1 or self.cutoff_b < 1:
            raise ConfigError("cutoffs must be positive")
        if not 0 <= self.guard < min(self.cutoff_a, self.cutoff_b):
            raise ConfigError(f"guard {self.guard} must lie in [0, min cutoff)")
        if not self.theta_grid or not self.phi_grid:
            raise ConfigError("theta_grid and phi_grid must be non-empty")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.out is not None:
            _check_writable(self.out)

    def state_spec(self) -> StateSpec:
        params = {k: getattr(self, k) for k in PARAM_KEYS if getattr(self, k) is not None}
        return StateSpec(self.family, params, (self.cutoff_a, self.cutoff_b))


def _check_writable(path: str) -> None:
    target = os.path.abspath(path)
    if os.path.isdir(target):
        raise ConfigError(f"output path {path} is a directory")
    if os.path.exists(target):
        ok = os.access(target, os.W_OK)
    else:
        parent = os.path.dirname(target)
        ok = os.path.isdir(parent) and os.access(parent, os.W_OK)
    if not ok:
        raise ConfigError(f"output path {path} is not writable")


# --- serialization -----------------------------------------------------------


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def fmt(x: float) -> str:
    return f"{x:.12g}"


def dump_json(doc: dict) -> str:
    return json.dumps(_clean({"schema_version": SCHEMA_VERSION, **doc}), indent=2) + "\n"


def dump_kv_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(value, list) and any(isinstance(v, dict) for v in value):
            for i, v in enumerate(value):
                walk(f"{prefix}.{i}", v)
        elif isinstance(value, float):
            writer.writerow([prefix, fmt(value)])
        elif isinstance(value, str):
            writer.writerow([prefix, value])
        else:
            writer.writerow([prefix, json.dumps(value)])

    walk("", _clean({"schema_version": SCHEMA_VERSION, **doc}))
    return buf.getvalue()


def report_doc(report: CriterionReport) -> dict:
    doc = {
        "w9": report.w9,
        "w12": report.w12,
        "w14": report.w14,
        "verdicts": report.verdicts,
        "record": {k: getattr(report.record, k) for k in ("mean_jx", "mean_jy", "var_jx", "var_jy", "cov_xy", "mean_n")},
        "provenance": report.record.provenance,
        "guard": {"status": "clean" if report.guard_clean else "tainted", "tail_mass": report.tail_mass},
        "tolerances": {"equality": report.tol},
    }
    if report.stderr is not None:
        doc["stderr"] = report.stderr
        doc["record_stderr"] = report.record.stderr()
        doc["zscore"] = report.zscore
        doc["tolerances"]["z_threshold"] = report.z_threshold
    return doc


# --- subcommands -------------------------------------------------------------


def _test_states(cfg: RunConfig, count: int = 3):
    space = build_space(cfg.cutoff_a, cfg.cutoff_b)
    rng = np.random.default_rng(cfg.seed)
    return [random_guarded_state(rng, space, cfg.guard) for _ in range(count)]


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    space = build_space(cfg.cutoff_a, cfg.cutoff_b)
    ops = build_operator_set(space)
    states = _test_states(cfg)
    checks = []

    def add(name, residual, tol, tainted=False):
        checks.append({"name": name, "residual": residual, "tol": tol,
                       "passed": bool(residual <= tol and not tainted), "tainted": tainted})

    for name, res in commutator_residual(ops, cfg.guard).items():
        add(f"commutator {name}", res, COMMUTATOR_TOL)
    for i, st in enumerate(states):
        pm = verify_pt_moments(st, 4)
        add(f"pt_moments state{i}", pm.residual, IDENTITY_TOL, pm.tainted)
        pc = verify_pt_covariance(st, ops)
        add(f"pt_covariance state{i}", pc.residual, IDENTITY_TOL, pc.tainted)
        rec = covariance_record(st, ops)
        worst = 0.0
        for phi in np.random.default_rng(cfg.seed + i).uniform(0, 2 * math.pi, 4):
            direct = covariance_record(phase_shift(st, phi), ops).values()
            worst = max(worst, float(np.max(np.abs(direct - rotate_record(rec, phi).values()))))
        add(f"rotation_consistency state{i}", worst, IDENTITY_TOL, rec.tainted)
        moment = max(exact_moment_check(st, phi) for phi in PROTOCOL_PHASES)
        add(f"detection_moments state{i}", moment, IDENTITY_TOL, rec.tainted)
    for phi in PROTOCOL_PHASES:
        add(f"beamsplitter_mode_map phi={fmt(phi)}", mode_map_residual(space, phi, guard=1), IDENTITY_TOL)
    u = beamsplitter_unitary(space, PROTOCOL_PHASES[2]).matrix
    add("beamsplitter_unitarity", float(np.max(np.abs(u.conj().T @ u - np.eye(space.dim)))), COMMUTATOR_TOL)

    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        taint = " (tainted)" if c["tainted"] else ""
        print(f"{status} {c['name']}: residual={c['residual']:.3e} tol={c['tol']:.0e}{taint}", file=sys.stderr)
    ok = all(c["passed"] for c in checks)
    doc = {
        "command": "verify",
        "cutoffs": [cfg.cutoff_a, cfg.cutoff_b],
        "guard": cfg.guard,
        "passed": ok,
        "checks": checks,
        "version": __version__,
    }
    return (0 if ok else 1), doc


def cmd_witness(cfg: RunConfig) -> tuple[int, dict]:
    spec = cfg.state_spec()
    state = realize(spec)
    report = evaluate(state, build_operator_set(state.space), cfg.tol)
    doc = {
        "command": "witness",
        "family": spec.family,
        "parameters": spec.resolved_params(),
        "cutoffs": list(spec.cutoffs),
        **report_doc(report),
        "discarded_mass": state.discarded_mass,
        "version": __version__,
    }
    return 0, doc


def scan_rows(cfg: RunConfig) -> list[dict]:
    space = build_space(cfg.cutoff_a, cfg.cutoff_b)
    ops = build_operator_set(space)
    rows = []
    for theta in cfg.theta_grid:
        report = evaluate(two_photon_theta(theta, space), ops, cfg.tol)
        rec = report.record
        rows.append({
            "theta": theta,
            "w9": report.w9,
            "w12": report.w12,
            "w14": report.w14,
            "mean_n": rec.mean_n,
            "var_jx": rec.var_jx,
            "var_jy": rec.var_jy,
            "cov_xy": rec.cov_xy,
            "verdict_w12": report.verdicts["w12"],
        })
    return rows


def scan_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCAN_HEADER)
    for row in rows:
        writer.writerow([fmt(row[k]) if isinstance(row[k], float) else row[k] for k in SCAN_HEADER])
    return buf.getvalue()


def cmd_scan(cfg: RunConfig) -> tuple[int, dict]:
    return 0, {"command": "scan", "family": "two-photon-theta", "rows": scan_rows(cfg), "version": __version__}


def cmd_invariance(cfg: RunConfig) -> tuple[int, dict]:
    spec = cfg.state_spec()
    state = realize(spec)
    ops = build_operator_set(state.space)
    ref = covariance_record(state, ops)
    per_phase = []
    for phi in cfg.phi_grid:
        rec = covariance_record(phase_shift(state, phi), ops)
        per_phase.append({"phi": phi, "w14": witness_w14(rec), "w9": witness_w9(rec)})
    max_dw14 = max(abs(p["w14"] - witness_w14(ref)) for p in per_phase)
    w9s = [p["w9"] for p in per_phase]
    passed = max_dw14 <= cfg.tol
    doc = {
        "command": "invariance",
        "family": spec.family,
        "parameters": spec.resolved_params(),
        "max_abs_delta_w14": max_dw14,
        "w9_range": max(w9s) - min(w9s),
        "tol": cfg.tol,
        "passed": passed,
        "per_phase": per_phase,
        "version": __version__,
    }
    return (0 if passed else 1), doc


def cmd_simulate(cfg: RunConfig) -> tuple[int, dict]:
    spec = cfg.state_spec()
    state = realize(spec)
    records = simulate_protocol(state, cfg.shots, cfg.seed)
    report = estimated_report(reconstruct(records), cfg.tol, cfg.z_threshold)
    settings = [
        {
            "phi": r.phi,
            "seed": r.seed,
            "shots": r.n_shots,
            "mean_minus": r.mean_minus,
            "mean_minus_sq": r.mean_minus_sq,
            "mean_plus": r.mean_plus,
            "stderr": r.stderr,
        }
        for r in records
    ]
    doc = {
        "command": "simulate",
        "family": spec.family,
        "parameters": spec.resolved_params(),
        "cutoffs": list(spec.cutoffs),
        "shots_per_setting": cfg.shots,
        "seed": cfg.seed,
        "settings": settings,
        **report_doc(report),
        "version": __version__,
    }
    return 0, doc


COMMANDS: dict[str, Callable[[RunConfig], tuple[int, dict]]] = {
    "verify": cmd_verify,
    "witness": cmd_witness,
    "scan": cmd_scan,
    "invariance": cmd_invariance,
    "simulate": cmd_simulate,
}


def render(command: str, doc: dict, fmt_name: str | None) -> str:
    if command == "scan" and fmt_name in (None, "csv"):
        return scan_csv(doc["rows"])
    if fmt_name == "csv":
        return dump_kv_csv(doc)
    return dump_json(doc)


# --- argument handling -------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig keys")
    common.add_argument("--cutoff-a", type=int)
    common.add_argument("--cutoff-b", type=int)
    common.add_argument("--guard", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--z-threshold", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--shots", type=int)
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--theta", type=_float_list, help="value or comma-separated grid")
    common.add_argument("--phi", type=_float_list, help="comma-separated phase grid")
    common.add_argument("--r", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="suwitness", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)

    for key in ("cutoff_a", "cutoff_b", "guard", "tol", "z_threshold", "seed", "shots", "family", "r", "n", "out", "format"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if args.theta is not None:
        if args.command == "scan":
            values["theta_grid"] = args.theta
        elif len(args.theta) != 1:
            raise ConfigError("--theta takes a single value for this command")
        else:
            values["theta"] = args.theta[0]
    if args.phi is not None:
        values["phi_grid"] = args.phi
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        code, doc = COMMANDS[args.command](cfg)
    except SuWitnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(args.command, doc, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
