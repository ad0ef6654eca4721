"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

from . import chsh, ensemble, singlet, verify
from .spin import Direction, X, Y, Z

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
DIRECTION_PRESETS = {"z": Z, "x": X, "y": Y}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # one-line diagnostic instead of usage + message
        raise UsageError(message)


def parse_direction(text: str) -> Direction:
    key = text.strip().lower()
    if key in DIRECTION_PRESETS:
        return DIRECTION_PRESETS[key]
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"direction {text!r} must be 'theta,phi' in radians or one of {sorted(DIRECTION_PRESETS)}")
    try:
        theta, phi = (float(p) for p in parts)
        return Direction(theta, phi)
    except ValueError as exc:
        raise UsageError(f"bad direction {text!r}: {exc}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spinhalf", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        return sp

    v = common(sub.add_parser("verify", help="run the identity suite"))
    v.add_argument("--tolerance", type=_positive_float, default=None, help="override every error tolerance")
    v.add_argument("--seed", type=_seed, default=verify.DEFAULT_SEED)
    v.add_argument("--count", type=_positive_int, default=verify.DEFAULT_COUNT)

    c = common(sub.add_parser("correlate", help="correlation and its decompositions"))
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--r", default="z", help="reference direction of the r-aligned basis")

    pr = common(sub.add_parser("probs", help="joint, marginal and conditional tables"))
    pr.add_argument("--a", required=True)
    pr.add_argument("--b", required=True)

    s = common(sub.add_parser("sample", help="seeded partitioned sampling for one setting pair"))
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--samples", type=_positive_int, required=True)
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--chunk-size", type=_positive_int, default=ensemble.DEFAULT_CHUNK_SIZE)
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--out", default=None, help="write per-sample records as CSV to this path")

    h = common(sub.add_parser("chsh", help="quantum and sampled CHSH values"))
    h.add_argument("--preset", choices=sorted(chsh.PRESETS), default=None)
    for name in ("a", "a-prime", "b", "b-prime"):
        h.add_argument(f"--{name}", default=None)
    h.add_argument("--samples", type=_positive_int, default=None, help="samples per setting pair")
    h.add_argument("--seed", type=_seed, default=None)
    h.add_argument("--chunk-size", type=_positive_int, default=ensemble.DEFAULT_CHUNK_SIZE)
    h.add_argument("--workers", type=_positive_int, default=1)

    w = common(sub.add_parser("sweep", help="coplanar S(b, b') grid"))
    w.add_argument("--step", type=_positive_float, default=math.pi / 180)
    w.add_argument("--a-angle", type=float, default=0.0)
    w.add_argument("--a-prime-angle", type=float, default=math.pi / 2)
    w.add_argument("--out", default=None, help="CSV path for the full table")
    return p


def _direction_json(d: Direction) -> dict[str, Any]:
    return {"theta": d.theta, "phi": d.phi, "xyz": [float(x) for x in d.cartesian]}


def _complex_json(z: complex) -> dict[str, float]:
    return {"re": z.real, "im": z.imag}


def _finite(x: float) -> float | None:
    return x if math.isfinite(x) else None


def cmd_verify(args) -> tuple[dict[str, Any], int]:
    results = verify.run_checks(seed=args.seed, count=args.count, tolerance=args.tolerance)
    passed = all(r.passed for r in results)
    report = {
        "command": "verify",
        "seed": args.seed,
        "count": args.count,
        "passed": passed,
        "checks": [
            {
                "name": r.name,
                "identity": r.identity,
                "kind": r.kind,
                "measured": r.measured,
                "tolerance": r.tolerance,
                "passed": r.passed,
            }
            for r in results
        ],
    }
    return report, EXIT_OK if passed else EXIT_FAILED


def cmd_correlate(args) -> tuple[dict[str, Any], int]:
    a, b, r = parse_direction(args.a), parse_direction(args.b), parse_direction(args.r)
    fk = singlet.fk_decomposition(r, a, b)
    report = {
        "command": "correlate",
        "a": _direction_json(a),
        "b": _direction_json(b),
        "r": _direction_json(r),
        "correlation": singlet.correlation(a, b),
        "minus_a_dot_b": -a.dot(b),
        "fk": {
            "f1": _complex_json(fk.f1),
            "f2": _complex_json(fk.f2),
            "f3": _complex_json(fk.f3),
            "f4": _complex_json(fk.f4),
            "antiparallel": fk.antiparallel.real,
            "parallel": fk.parallel.real,
            "total": fk.total,
        },
        "weighted_eigenvalue_sum": singlet.joint_distribution(a, b).expectation(),
    }
    return report, EXIT_OK


def cmd_probs(args) -> tuple[dict[str, Any], int]:
    a, b = parse_direction(args.a), parse_direction(args.b)
    dist = singlet.joint_distribution(a, b)
    closed = singlet.joint_weights_closed_form(a, b)
    report = {
        "command": "probs",
        "a": _direction_json(a),
        "b": _direction_json(b),
        "joint": [
            {"k": k, "alpha": al, "beta": be, "eigenvalue": A, "probability": c, "closed_form": cf}
            for k, ((al, be), A, c, cf) in enumerate(zip(dist.labels, dist.eigenvalues, dist.weights, closed), start=1)
        ],
        "sum": math.fsum(dist.weights),
        "marginals": [
            {"side": side, "outcome": o, "probability": singlet.marginal(a, b, side, o)}
            for side in (1, 2)
            for o in (1, -1)
        ],
        "conditional": [
            {"alpha": al, "given_beta": be, "probability": singlet.conditional(a, b, al, be)}
            for al in (1, -1)
            for be in (1, -1)
        ],
    }
    return report, EXIT_OK


def cmd_sample(args) -> tuple[dict[str, Any], int]:
    a, b = parse_direction(args.a), parse_direction(args.b)
    run = ensemble.sample_run(a, b, args.samples, args.seed, chunk_size=args.chunk_size, workers=args.workers)
    part = ensemble.build_partition(a, b)
    check = ensemble.empirical_vs_exact(run, part)
    if args.out is not None:
        with open(args.out, "w", newline="") as fh:
            ensemble.write_records_csv(
                fh, ensemble.iter_records(a, b, args.samples, args.seed, chunk_size=args.chunk_size)
            )
    report = {
        "command": "sample",
        "a": _direction_json(a),
        "b": _direction_json(b),
        "n": run.n,
        "seed": run.seed,
        "chunk_size": run.chunk_size,
        "generator": "numpy Philox, SeedSequence(seed, spawn_key=(chunk,))",
        "mean_product": run.mean_product,
        "std_err": run.std_err,
        "exact": singlet.correlation(a, b),
        "boundaries": list(part.boundaries),
        "counts": list(run.counts),
        "empirical_weights": list(run.empirical_weights),
        "exact_weights": list(part.weights),
        "z_scores": [_finite(z) for z in check.z_scores],
        "flagged": list(check.flagged),
        "records_path": args.out,
    }
    return report, EXIT_OK


def _chsh_setting(args) -> tuple[str | None, chsh.ChshSetting]:
    explicit = [args.a, args.a_prime, args.b, args.b_prime]
    if args.preset is not None:
        if any(x is not None for x in explicit):
            raise UsageError("--preset cannot be combined with explicit directions")
        return args.preset, chsh.PRESETS[args.preset]
    if any(x is None for x in explicit):
        if all(x is None for x in explicit):
            return "optimal", chsh.PRESETS["optimal"]
        raise UsageError("give all of --a, --a-prime, --b, --b-prime or a --preset")
    return None, chsh.ChshSetting(*(parse_direction(x) for x in explicit))


def cmd_chsh(args) -> tuple[dict[str, Any], int]:
    preset, setting = _chsh_setting(args)
    if args.samples is not None and args.seed is None:
        raise UsageError("--seed is required with --samples")
    if args.samples is None:
        res = chsh.chsh_quantum(setting)
    else:
        res = chsh.chsh_sampled(setting, args.samples, args.seed, chunk_size=args.chunk_size, workers=args.workers)
    sampled = None
    if res.s_sampled is not None:
        sm = res.s_sampled
        sampled = {
            "value": sm.value,
            "std_err": sm.std_err,
            "n_per_pair": sm.n,
            "seed": sm.seed,
            "chunk_size": args.chunk_size,
            "sub_seeds": list(sm.sub_seeds),
            "per_pair_mean": [r.mean_product for r in sm.runs],
            "per_pair_std_err": [r.std_err for r in sm.runs],
            "within_4_sigma_of_quantum": abs(sm.value - res.s_quantum) <= 4.0 * sm.std_err,
            "violation_demonstrated": sm.violation_demonstrated,
        }
    bound = chsh.noncontextual_bound_check()
    report = {
        "command": "chsh",
        "preset": preset,
        "settings": {
            "a": _direction_json(setting.a),
            "a_prime": _direction_json(setting.a_prime),
            "b": _direction_json(setting.b),
            "b_prime": _direction_json(setting.b_prime),
        },
        "per_pair": list(res.per_pair),
        "s_quantum": res.s_quantum,
        "tsirelson": chsh.TSIRELSON,
        "noncontextual_max": bound.max_abs,
        "sampled": sampled,
    }
    return report, EXIT_OK


def cmd_sweep(args) -> tuple[dict[str, Any], int]:
    try:
        res = chsh.sweep_planar(args.step, args.a_angle, args.a_prime_angle)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out is not None:
        with open(args.out, "w", newline="") as fh:
            chsh.write_sweep_csv(fh, res)
    report = {
        "command": "sweep",
        "step": args.step,
        "a_angle": args.a_angle,
        "a_prime_angle": args.a_prime_angle,
        "grid_size": int(res.angles.size),
        "best": {"b_angle": res.best_b, "b_prime_angle": res.best_b_prime, "S": res.best_s},
        "out": args.out,
        "_result": res,
    }
    return report, EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "correlate": cmd_correlate,
    "probs": cmd_probs,
    "sample": cmd_sample,
    "chsh": cmd_chsh,
    "sweep": cmd_sweep,
}


def _g(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return "" if x is None else str(x)


def _csv_rows(report: dict[str, Any]) -> tuple[list[str], list[list[Any]]]:
    cmd = report["command"]
    if cmd == "verify":
        keys = ["name", "measured", "tolerance", "kind", "passed"]
        return keys, [[c[k] for k in keys] for c in report["checks"]]
    if cmd == "probs":
        keys = ["k", "alpha", "beta", "eigenvalue", "probability", "closed_form"]
        return keys, [[j[k] for k in keys] for j in report["joint"]]
    if cmd == "correlate":
        fk = report["fk"]
        rows = [["correlation", report["correlation"], 0.0], ["minus_a_dot_b", report["minus_a_dot_b"], 0.0]]
        rows += [[f, fk[f]["re"], fk[f]["im"]] for f in ("f1", "f2", "f3", "f4")]
        rows.append(["weighted_eigenvalue_sum", report["weighted_eigenvalue_sum"], 0.0])
        return ["quantity", "re", "im"], rows
    if cmd == "sample":
        keys = ["n", "seed", "chunk_size", "mean_product", "std_err", "exact"]
        return keys, [[report[k] for k in keys]]
    if cmd == "chsh":
        rows = [["ab", report["per_pair"][0]], ["ab'", report["per_pair"][1]],
                ["a'b", report["per_pair"][2]], ["a'b'", report["per_pair"][3]], ["S", report["s_quantum"]]]
        if report["sampled"] is not None:
            rows += [["S_sampled", report["sampled"]["value"]], ["S_sampled_std_err", report["sampled"]["std_err"]]]
        return ["quantity", "value"], rows
    res = report["_result"]
    rows = [[b, bp, res.table[i, j]] for i, b in enumerate(res.angles) for j, bp in enumerate(res.angles)]
    return ["b_angle", "b_prime_angle", "S"], [[float(x) for x in r] for r in rows]


def _text(report: dict[str, Any]) -> str:
    cmd = report["command"]
    lines = [f"[{cmd}]"]
    if cmd == "verify":
        for c in report["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            rel = ">=" if c["kind"] == "min_value" else "<="
            lines.append(f"{mark}  {c['name']:<26} {c['measured']:.3e} {rel} {c['tolerance']:.1e}  {c['identity']}")
        lines.append("all passed" if report["passed"] else "FAILURES present")
        return "\n".join(lines)
    for key, value in report.items():
        if key in ("command", "_result"):
            continue
        lines.append(f"{key}: {json.dumps(value) if not isinstance(value, float) else _g(value)}")
    return "\n".join(lines)


def render(report: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        public = {k: v for k, v in report.items() if not k.startswith("_")}
        return json.dumps(public, indent=2, allow_nan=False)
    if fmt == "csv":
        header, rows = _csv_rows(report)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([[_g(x) for x in row] for row in rows])
        return buf.getvalue().rstrip("\n")
    return _text(report)


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        report, code = COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"spinhalf: error: {exc}", file=err)
        return EXIT_USAGE
    print(render(report, args.format), file=out)
    return code


def main() -> None:
    sys.exit(run())
