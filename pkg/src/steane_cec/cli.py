"""Command-line front end.

    steane-cec simulate  --circuit fig2 --model full --p 3e-4 --shots 1000000 --seed 7
    steane-cec census    --circuit fig1 --model full
    steane-cec threshold --circuit fig1 --model bitflip-ancilla
    steane-cec trace     --circuit fig1 --fault 35:Z8
    steane-cec circuit   export --circuit fig2

Exit codes: 0 success, 1 runtime failure (unwritable output, degenerate
fit), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import analysis
from .circuit import build, enumerate_locations, export_text
from .engine import format_trace, run_round, trace_round
from .noise import ErrorModel, FaultEvent
from .pauli import PauliString

MODELS = {"full": "full", "bitflip-ancilla": "bitflip"}
CSV_HEADER = ["circuit", "model", "p", "shots", "failures", "p_log", "ci_low", "ci_high", "seed"]
DEFAULT_GRID = (1e-4, 2e-4, 3e-4, 5e-4, 7e-4, 1e-3)


class UsageError(Exception):
    pass


def _grid(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad p value list {text!r}") from None
    if not vals or any(v < 0 or v > 1 for v in vals):
        raise argparse.ArgumentTypeError("p values must lie in [0, 1]")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise argparse.ArgumentTypeError("p values must be strictly ascending")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _model(args, p: float = 0.0) -> ErrorModel:
    return ErrorModel(p, MODELS[args.model], args.multiqubit)


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _rate_row(args, r: analysis.RateEstimate) -> dict:
    return {"circuit": args.circuit, "model": args.model, "p": repr(r.p), "shots": r.shots,
            "failures": r.failures, "p_log": repr(r.p_log), "ci_low": repr(r.ci_low),
            "ci_high": repr(r.ci_high), "seed": args.seed}


def _run_grid(args, grid) -> list[analysis.RateEstimate]:
    c = build(args.circuit)
    m = _model(args)
    return [analysis.estimate_rate(c, m, p, args.shots, args.seed, args.workers) for p in grid]


def cmd_simulate(args) -> int:
    points = _run_grid(args, args.p)
    rows = [_rate_row(args, r) for r in points]
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        text = _rows_csv(rows)
    _emit(text, args.output)
    return 0


def census_report(args) -> dict:
    c = build(args.circuit)
    m = _model(args)
    census = analysis.fault_census(c, m)
    locs = enumerate_locations(c)
    per_loc = []
    for lid in sorted(census.per_location):
        k, tot, share = census.per_location[lid]
        loc = locs[lid]
        per_loc.append({"id": lid, "kind": loc.kind, "gate": loc.gate_kind,
                        "timestep": loc.timestep, "qubits": [q + 1 for q in loc.support],
                        "malignant": k, "admissible": tot, "fraction": k / tot, "share": share})
    windows = [{"ancilla": a + 1, "half": half, "gate_share": v["gate"], "idle_share": v["idle"]}
               for (a, half), v in sorted(census.windows.items())]
    return {
        "circuit": args.circuit, "model": args.model, "multiqubit": args.multiqubit,
        "A": census.A, "N_m": census.N_m, "N_g": census.N_g, "N_other": census.N_other,
        "shortcut_A": census.shortcut_A, "fault_sites": census.n_sites,
        "per_location": per_loc, "windows": windows,
        "malignant": [{"location": f.location, "pauli": f.pauli.to_literal()}
                      for f in census.malignant],
    }


def cmd_census(args) -> int:
    _emit(json.dumps(census_report(args), indent=2) + "\n", args.output)
    return 0


def cmd_threshold(args) -> int:
    if len(args.grid) < 3:
        raise UsageError("threshold needs a grid of at least 3 points")
    points = _run_grid(args, args.grid)
    try:
        fit = analysis.fit_and_threshold(points)
    except analysis.FitError as err:
        print(f"error: fit failed: {err}", file=sys.stderr)
        return 1
    rows = [_rate_row(args, r) for r in points]
    thr = "none" if fit.threshold is None else repr(fit.threshold)
    if args.format == "json":
        text = json.dumps({"circuit": args.circuit, "model": args.model, "A": fit.A,
                           "B": fit.B, "threshold": fit.threshold, "points": rows},
                          indent=2) + "\n"
    else:
        text = f"# A={fit.A!r} B={fit.B!r} threshold={thr}\n" + _rows_csv(rows)
    _emit(text, args.output)
    return 0


def _parse_fault(text: str, n_locations: int) -> FaultEvent:
    loc_text, sep, pauli_text = text.partition(":")
    if not sep:
        raise UsageError(f"fault {text!r} must look like <location-id>:<pauli>")
    try:
        lid = int(loc_text)
        pauli = PauliString.from_literal(pauli_text)
    except ValueError as err:
        raise UsageError(f"bad fault {text!r}: {err}") from None
    if not 0 <= lid < n_locations:
        raise UsageError(f"unknown location id {lid}; valid ids are 0..{n_locations - 1}"
                         " (see `steane-cec circuit locations`)")
    return FaultEvent(lid, pauli)


def cmd_trace(args) -> int:
    c = build(args.circuit)
    locs = enumerate_locations(c)
    faults = [_parse_fault(s, len(locs)) for s in args.fault]
    for f in faults:
        if not set(f.pauli.support) <= set(locs[f.location].support):
            raise UsageError(f"fault {f} acts outside location {f.location} "
                             f"(qubits {[q + 1 for q in locs[f.location].support]})")
    try:
        inject = PauliString.from_literal(args.inject) if args.inject else None
        snaps = trace_round(c, faults, inject, locs)
        outcome = run_round(c, faults, inject, locs)
    except ValueError as err:
        raise UsageError(str(err)) from None
    _emit(format_trace(snaps) + f"class={outcome.cls}\n", args.output)
    return 0


def cmd_circuit(args) -> int:
    c = build(args.circuit)
    if args.action == "export":
        text = export_text(c)
    elif args.action == "locations":
        lines = ["id,kind,timestep,gate,qubits"]
        for loc in enumerate_locations(c):
            qs = " ".join(str(q + 1) for q in loc.support)
            lines.append(f"{loc.id},{loc.kind},{loc.timestep},{loc.gate_kind or ''},{qs}")
        text = "\n".join(lines) + "\n"
    else:
        locs = enumerate_locations(c)
        stats = {"circuit": args.circuit, "depth": c.depth, "gates": len(c.gates)}
        for kind in ("PREP0", "H", "CNOT", "CPSTRING", "CKX_CLASSICAL", "RESET"):
            stats[kind] = c.count(kind)
        stats["gate_locations"] = sum(loc.kind == "GATE" for loc in locs)
        stats["idle_locations"] = sum(loc.kind == "IDLE" for loc in locs)
        text = "".join(f"{k}={v}\n" for k, v in stats.items())
    _emit(text, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="steane-cec", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        p.add_argument("--circuit", choices=("fig1", "fig2"), default="fig1")
        if model:
            p.add_argument("--model", choices=tuple(MODELS), default="full")
            p.add_argument("--multiqubit", choices=("perqubit", "uniform", "local"),
                           default="perqubit",
                           help="noise on gates with more than two qubits")
        p.add_argument("--output", "-o", default=None)

    def mc(p):
        p.add_argument("--shots", type=_positive_int, default=10**6)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=_positive_int, default=None,
                       help="worker processes (default: $STEANE_CEC_WORKERS or 1)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("simulate", help="Monte Carlo logical error rate")
    common(p)
    mc(p)
    p.add_argument("--p", type=_grid, default=list(DEFAULT_GRID),
                   help="physical rate or comma-separated ascending list")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("census", help="exhaustive single-fault census (JSON)")
    common(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("threshold", help="simulate a grid, fit A p + B p^2, invert")
    common(p)
    mc(p)
    p.add_argument("--grid", type=_grid, default=list(DEFAULT_GRID))
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("trace", help="frame after every timestep for given faults")
    common(p, model=False)
    p.add_argument("--fault", action="append", default=[],
                   help="<location-id>:<pauli>, e.g. 35:Z12 (repeatable)")
    p.add_argument("--inject", default=None, help="data error before the round, e.g. X3")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("circuit", help="export, list locations, or count gates")
    p.add_argument("action", choices=("export", "locations", "stats"))
    common(p, model=False)
    p.set_defaults(func=cmd_circuit)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        parser.error(str(err))  # exits with status 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
