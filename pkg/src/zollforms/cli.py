"""Deterministic experiment CLI: constants, verify, invariants.

Configuration comes from a JSON file plus flag overrides; reports are
schema-versioned JSON with a content digest, and the invariants command
additionally writes plot-ready CSV rows (one per geodesic).

Exit codes: 0 pass, 1 check failure, 2 config error, 3 numerical failure.
"""

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .expansion import constants_report
from .geodesic import canonical_initial_conditions, sample_initial_conditions, trace_geodesic
from .identities import DEFAULT_TOLERANCE, run_all_checks
from .jacobi import solve_fundamental
from .normalform import FirstObstructionError, assemble_p1
from .surface import IntegrationError, MetricModel

__all__ = ["main", "RunConfig", "build_report", "metric_from_spec"]

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated run configuration (unknown keys rejected)."""

    metric: dict = field(default_factory=lambda: {"kind": "round"})
    geodesics: int = 32
    grid: int = 2048
    tol: float = DEFAULT_TOLERANCE
    seed: int = 0
    out: str = None
    csv: str = None

    KEYS = ("metric", "geodesics", "grid", "tol", "seed", "out", "csv")

    @classmethod
    def load(cls, config_path=None, overrides=None):
        data = {}
        if config_path:
            try:
                with open(config_path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {config_path}: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(data) - set(cls.KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        cfg = cls(**{k: v for k, v in data.items() if v is not None})
        if cfg.geodesics < 1:
            raise ConfigError("geodesics must be >= 1")
        if cfg.grid < 256 or (cfg.grid & (cfg.grid - 1)) != 0:
            raise ConfigError("grid must be a power of two >= 256")
        if not (0.0 < cfg.tol < 1.0):
            raise ConfigError("tol must be in (0, 1)")
        cfg.metric_model = metric_from_spec(cfg.metric)
        return cfg

    def echo(self):
        return {"metric": self.metric, "geodesics": self.geodesics,
                "grid": self.grid, "tol": self.tol, "seed": self.seed}


def metric_from_spec(spec):
    """MetricModel from a config dict; unknown keys rejected."""
    if not isinstance(spec, dict):
        raise ConfigError("metric spec must be an object")
    kind = spec.get("kind")
    if kind == "round":
        extra = set(spec) - {"kind"}
        if extra:
            raise ConfigError(f"round metric takes no keys {sorted(extra)}")
        return MetricModel.round()
    if kind == "zoll_revolution":
        extra = set(spec) - {"kind", "h_odd_coeffs", "h_even_coeffs"}
        if extra:
            raise ConfigError(f"unknown metric keys {sorted(extra)}")
        try:
            return MetricModel.zoll_revolution(
                spec.get("h_odd_coeffs", ()), spec.get("h_even_coeffs", ()))
        except ValueError as exc:
            raise ConfigError(str(exc))
    raise ConfigError(f"unknown metric kind {kind!r}")


def parse_metric_flag(text):
    """--metric value: 'round' or 'zoll:a1,a2,...' (odd profile coefficients)."""
    if text == "round":
        return {"kind": "round"}
    if text.startswith("zoll:"):
        try:
            coeffs = [float(x) for x in text[5:].split(",") if x]
        except ValueError:
            raise ConfigError(f"bad metric flag {text!r}")
        return {"kind": "zoll_revolution", "h_odd_coeffs": coeffs}
    raise ConfigError(f"bad metric flag {text!r} (use round or zoll:a1,a2,...)")


def _initial_conditions(cfg):
    named = canonical_initial_conditions()
    count = cfg.geodesics
    out = [(name, ic) for name, ic in named[:count]]
    extra = sample_initial_conditions(max(count - len(out), 0), seed=cfg.seed)
    out.extend((f"random-{i:03d}", ic) for i, ic in enumerate(extra))
    return out[:count]


def _digest(obj):
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def _header(cfg):
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "constants_digest": _digest(constants_report()),
        "config": cfg.echo(),
    }


def _init_fields(ic):
    point, tangent = ic
    return {"r0": point.r, "phi0": point.phi,
            "theta0": math.atan2(tangent[1], tangent[0]) % (2.0 * math.pi)}


def build_report(cfg, mode):
    """Run `verify` or `invariants` over the geodesic sample; returns (report, exit_code)."""
    records = []
    failures = []
    for name, ic in _initial_conditions(cfg):
        record = {"geodesic_id": name, **_init_fields(ic)}
        try:
            path = trace_geodesic(cfg.metric_model, ic, cfg.grid, enforce_closure=False)
            record["closure_defect"] = path.closure_defect
            frame = solve_fundamental(path)
            record["poincare_defect"] = float(
                max(abs(frame.poincare[i, j] - (1.0 if i == j else 0.0))
                    for i in range(2) for j in range(2)))
            if mode == "verify":
                checks = run_all_checks(path, frame)
                record["checks"] = [c.as_dict() for c in checks]
                for c in checks:
                    if not c.passed(cfg.tol):
                        failures.append((name, c.name, c.normalized))
            else:
                rec = assemble_p1(cfg.metric_model, ic, cfg.grid,
                                  geodesic_id=name, path=path, frame=frame)
                record["invariants"] = rec.as_dict()
        except FirstObstructionError as exc:
            record["first_obstruction_failure"] = str(exc)
            failures.append((name, "first_obstruction", abs(exc.value)))
        except IntegrationError as exc:
            record["integration_failure"] = str(exc)
            failures.append((name, "integration", float("nan")))
            records.append(record)
            report = _assemble_report(cfg, mode, records, failures)
            return report, EXIT_NUMERICAL_FAILURE
        records.append(record)
    report = _assemble_report(cfg, mode, records, failures)
    return report, (EXIT_CHECK_FAILURE if failures else EXIT_PASS)


CHECK_PRIORITY = ["check_cube", "check_tau_s", "check_quartic", "check_4id_im",
                  "check_4id_relation", "check_commutator_reduction",
                  "check_commutator_reduction_im", "check_commutator_special_case",
                  "first_obstruction", "integration"]


def _assemble_report(cfg, mode, records, failures):
    # the cube integral is the first obstruction; report failures in check
    # priority order so the most basic broken identity is named first
    def priority(item):
        _, check, _ = item
        return (CHECK_PRIORITY.index(check) if check in CHECK_PRIORITY else 99)

    failures = sorted(failures, key=priority)
    summary = {"mode": mode, "geodesic_count": len(records),
               "failures": [{"geodesic": g, "check": c, "value": v}
                            for g, c, v in failures]}
    closures = [r["closure_defect"] for r in records if "closure_defect" in r]
    if closures:
        summary["max_closure_defect"] = max(closures)
    if mode == "verify":
        worst = {}
        for r in records:
            for c in r.get("checks", ()):
                worst[c["name"]] = max(worst.get(c["name"], 0.0), c["normalized"])
        summary["max_normalized_residuals"] = worst
    else:
        invs = [r["invariants"] for r in records if "invariants" in r]
        if invs:
            c0s = [i["c0"] for i in invs]
            summary["c0_spread"] = max(c0s) - min(c0s)
            summary["c2_max"] = max(abs(i["c2"]) for i in invs)
            summary["c01_max"] = max(abs(i["c01"]) for i in invs)
            summary["offdiag_max"] = max(i["offdiag_max"] for i in invs)
    report = {"header": _header(cfg), "geodesics": records, "summary": summary}
    report["digest"] = _digest(report)
    return report


def _write_report(report, out_path):
    text = json.dumps(report, sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


CSV_HEADER = ["geodesic_id", "r0", "phi0", "theta0", "closure_defect",
              "c0", "c01", "c2", "offdiag_max", "H_reading_a", "H_reading_b"]


def _write_csv(report, csv_path):
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in report["geodesics"]:
            inv = rec.get("invariants", {})
            writer.writerow([
                rec["geodesic_id"], rec.get("r0"), rec.get("phi0"), rec.get("theta0"),
                rec.get("closure_defect"),
                inv.get("c0"), inv.get("c01"), inv.get("c2"),
                inv.get("offdiag_max"), inv.get("H_a"), inv.get("H_b"),
            ])


def cmd_constants(args):
    report = constants_report()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")
    print(json.dumps(report, sort_keys=True, indent=2))
    print()
    print("derived constants (aligned)")
    for section in ("metric_jets", "graded", "assertions"):
        print(f"  [{section}]")
        for key, value in report[section].items():
            print(f"    {key:32s} {value}")
    return EXIT_PASS


def _run_config(args):
    overrides = {
        "geodesics": args.geodesics, "grid": args.grid, "tol": args.tol,
        "seed": args.seed, "out": args.out,
        "csv": getattr(args, "csv", None),
    }
    if args.metric:
        overrides["metric"] = parse_metric_flag(args.metric)
    return RunConfig.load(args.config, overrides)


def cmd_verify(args):
    cfg = _run_config(args)
    report, code = build_report(cfg, "verify")
    _write_report(report, cfg.out)
    if code != EXIT_PASS:
        failures = report["summary"]["failures"]
        if failures:
            first = failures[0]
            print(f"FAIL: geodesic {first['geodesic']} check {first['check']} "
                  f"value {first['value']:.3e}", file=sys.stderr)
    return code


def cmd_invariants(args):
    cfg = _run_config(args)
    report, code = build_report(cfg, "invariants")
    _write_report(report, cfg.out)
    if cfg.csv:
        _write_csv(report, cfg.csv)
    if code != EXIT_PASS:
        failures = report["summary"]["failures"]
        if failures:
            first = failures[0]
            print(f"FAIL: geodesic {first['geodesic']} check {first['check']}",
                  file=sys.stderr)
    return code


def _add_run_flags(parser, with_csv=False):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--metric", help="round or zoll:a1,a2,... (odd profile)")
    parser.add_argument("--geodesics", type=int, help="number of geodesics")
    parser.add_argument("--grid", type=int, help="grid size (power of two >= 256)")
    parser.add_argument("--tol", type=float, help="normalized residual tolerance")
    parser.add_argument("--seed", type=int, help="random seed for initial conditions")
    parser.add_argument("--out", help="write the JSON report here")
    if with_csv:
        parser.add_argument("--csv", help="write per-geodesic CSV rows here")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="zollforms",
        description="Degree-2 quantum Birkhoff normal form invariants on Zoll surfaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser("constants", help="print the derived universal constants")
    p_const.add_argument("--out", help="write the JSON table here")
    p_const.set_defaults(fn=cmd_constants)

    p_verify = sub.add_parser("verify", help="run the integral-identity suite")
    _add_run_flags(p_verify)
    p_verify.set_defaults(fn=cmd_verify)

    p_inv = sub.add_parser("invariants", help="assemble the p1 invariant per geodesic")
    _add_run_flags(p_inv, with_csv=True)
    p_inv.set_defaults(fn=cmd_invariants)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
