"""Command-line interface.

    brainmaps gen toy|erf ...   write a synthetic dataset plus truth sidecar
    brainmaps select ...        grid search, CSV/JSON (and SVG) reports
    brainmaps table1 ...        toy-data table of delta / eta / zeta vs lambda
    brainmaps report ...        metrics for one lambda

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import datasets
from .decoders import DEFAULT_GRID, fit_lasso
from .errors import BrainMapError
from .geometry import is_zero, normalize
from .metrics import EXACT, HEURISTIC, full_report
from .performance import bias_variance
from .resampling import fit_ensembles, make_plan
from .selection import (
    TABLE1_GRID,
    SelectionConfig,
    decoding_space,
    select,
    table1_config,
)
from .svg import emit_svg_curves, emit_svg_map

SCHEMA = 1


def truth_path(data_path):
    p = Path(data_path)
    return p.with_name(p.name + ".truth.json")


def _grid(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return tuple(values)


def _unit(text):
    x = float(text)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"{x} is outside [0, 1]")
    return x


def _nonneg(text):
    x = float(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"{x} is negative")
    return x


def _positive_int(text):
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError(f"{k} must be >= 1")
    return k


def build_parser():
    ap = argparse.ArgumentParser(prog="brainmaps", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gsub = gen.add_subparsers(dest="kind", required=True)
    toy = gsub.add_parser("toy", help="2-D toy problem")
    toy.add_argument("--n", type=_positive_int, default=1000, help="trials per class")
    toy.add_argument("--seed", type=int, default=0)
    toy.add_argument("--out", required=True, help="output path (.csv or binary)")
    erf = gsub.add_parser("erf", help="evoked-response-like channel x time trials")
    erf.add_argument("--channels", type=_positive_int, default=10)
    erf.add_argument("--timepoints", type=_positive_int, default=50)
    erf.add_argument("--n", type=_positive_int, default=200, help="trials per class")
    erf.add_argument("--snr", type=float, default=1.0)
    erf.add_argument("--seed", type=int, default=0)
    erf.add_argument("--out", required=True)

    def selection_args(p, single_lambda=False):
        p.add_argument("--data", required=True)
        p.add_argument("--truth", help="ground-truth sidecar (default: DATA.truth.json)")
        p.add_argument("--mode", choices=(EXACT, HEURISTIC), default=EXACT)
        if single_lambda:
            p.add_argument("--lambda", dest="lam", type=_nonneg, required=True)
        else:
            p.add_argument("--grid", type=_grid, default=DEFAULT_GRID)
            p.add_argument("--lambda", dest="lam", type=_nonneg,
                           help="single penalty (overrides --grid)")
            p.add_argument("--omega1", type=_nonneg, default=1.0)
            p.add_argument("--omega2", type=_nonneg, default=1.0)
            p.add_argument("--kappa", type=_unit, default=0.6)
        p.add_argument("--m", type=_positive_int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--svg", action="store_true")
        p.add_argument("--no-stratify", action="store_true")
        p.add_argument("--no-standardize", action="store_true",
                       help="fit on raw features (as in the 2-D toy experiment)")

    selection_args(sub.add_parser("select", help="grid search over lambda"))
    selection_args(sub.add_parser("report", help="metrics for a single lambda"), single_lambda=True)

    t1 = sub.add_parser("table1", help="toy-data table of scores against lambda")
    t1.add_argument("--n", type=_positive_int, default=1000, help="trials per class")
    t1.add_argument("--seed", type=int, default=0)
    t1.add_argument("--m", type=_positive_int, default=50)
    t1.add_argument("--out", help="also write the table as CSV here")
    return ap


# -- helpers -----------------------------------------------------------------

def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _load_inputs(args):
    data = datasets.load(args.data)
    tpath = Path(args.truth) if args.truth else truth_path(args.data)
    truth = None
    if tpath.exists():
        truth = datasets.GroundTruth.from_json(json.loads(tpath.read_text(encoding="utf-8")))
        if data.layout is None and truth.layout is not None:
            data = datasets.Dataset(data.X, data.Y, truth.layout, data.name)
    elif args.truth:
        raise FileNotFoundError(f"truth file {tpath} not found")
    if args.mode == EXACT and (truth is None or truth.theta_star is None):
        raise ValueError("exact mode needs a truth sidecar with theta_star")
    return data, truth


def _config(args, grid):
    return SelectionConfig(
        omega1=getattr(args, "omega1", 1.0), omega2=getattr(args, "omega2", 1.0),
        kappa=getattr(args, "kappa", 0.6), grid=grid, m=args.m, seed=args.seed,
        mode=args.mode, stratify=not args.no_stratify, standardize=not args.no_standardize,
    )


def selection_table(result):
    """CSV text of the per-lambda results; heuristic columns carry a ``_tilde`` suffix."""
    suffix = "_tilde" if result.mode == HEURISTIC else ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "delta", "eta" + suffix, "zeta", "psi", "beta" + suffix,
                "bias", "variance_net", "flags"])
    for r in result.per_lambda:
        w.writerow([repr(r.lam), repr(r.delta), repr(r.eta), repr(r.zeta), repr(r.psi),
                    repr(r.beta), repr(r.bias), repr(r.variance_net), ";".join(r.flags)])
    return buf.getvalue()


def selection_json(result):
    rows = []
    for r in result.per_lambda:
        d = asdict(r)
        d.pop("main_map")
        d["lambda"] = d.pop("lam")
        rows.append(d)
    cfg = asdict(result.config)
    cfg.pop("threads")
    best = next(r for r in result.per_lambda if r.lam == result.best_by_zeta)
    return _jsonable({
        "schema": SCHEMA,
        "mode": result.mode,
        "config": cfg,
        "best_by_delta": result.best_by_delta,
        "best_by_zeta": result.best_by_zeta,
        "pareto_front": result.pareto_front,
        "flags": list(result.flags),
        "per_lambda": rows,
        "best_by_zeta_main_map": best.main_map,
    })


# -- commands ----------------------------------------------------------------

def cmd_gen(args):
    if args.kind == "toy":
        d, truth = datasets.generate_toy(args.n, args.seed)
    else:
        if not args.snr > 0:
            raise ValueError("--snr must be positive")
        d, truth = datasets.generate_erf(args.channels, args.timepoints, args.n,
                                         args.snr, seed=args.seed)
    out = Path(args.out)
    datasets.save(d, out)
    _write_json(truth_path(out), truth.to_json())
    print(f"wrote {out} (n={d.n}, p={d.p}) and {truth_path(out)}")
    return 0


def cmd_select(args):
    data, truth = _load_inputs(args)
    grid = (args.lam,) if args.lam is not None else args.grid
    result = select(data, truth, _config(args, grid))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "selection.csv").write_text(selection_table(result), encoding="utf-8")
    _write_json(out / "selection.json", selection_json(result))
    if args.svg:
        label = "eta_tilde" if result.mode == HEURISTIC else "eta"
        emit_svg_curves(result.per_lambda, out / "curves.svg", eta_label=label)
        best = result.row(result.best_by_zeta)
        if best.main_map is not None:
            emit_svg_map(best.main_map, data.layout, out / "best_zeta_map.svg")
    print(f"best_by_delta={result.best_by_delta:g} best_by_zeta={result.best_by_zeta:g}")
    return 0


def cmd_report(args):
    data, truth = _load_inputs(args)
    cfg = _config(args, (args.lam,))
    d_dec, ref = decoding_space(data, truth, cfg)
    plan = make_plan(data.n, cfg.m, cfg.seed, labels=data.Y, stratify=cfg.stratify)
    ens = fit_ensembles(d_dec, plan, cfg.grid, standardize_features=cfg.standardize)[0]
    perf = bias_variance(ens, data.Y)
    obj = {"schema": SCHEMA, "lambda": args.lam, "mode": args.mode,
           "performance": perf.to_dict(), "metrics": None}
    if not ens.degenerate:
        rep = full_report(ens, ref, mode=args.mode)
        obj["metrics"] = rep.to_dict()
        obj["main_map"] = normalize(np.sum(ens.valid_maps, axis=0))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", _jsonable(obj))
    if args.svg and "main_map" in obj:
        emit_svg_map(obj["main_map"], data.layout, out / "main_map.svg")
    print(f"wrote {out / 'report.json'}")
    return 0


def table1_rows(n_per_class=1000, seed=0, m=50, threads=None):
    """Toy experiment over the small-penalty grid, with full-data directions."""
    d, truth = datasets.generate_toy(n_per_class, seed)
    result = select(d, truth, table1_config(seed=seed, m=m, threads=threads))
    rows = []
    for r in result.per_lambda:
        theta = fit_lasso(d, r.lam).theta
        direction = None if is_zero(theta) else normalize(theta)
        rows.append((r, direction))
    return result, rows


def format_table1(result, rows):
    lines = [f"{'lambda':>8} {'delta':>8} {'eta':>8} {'zeta':>8}   direction"]
    for r, direction in rows:
        mark_d = "*" if r.lam == result.best_by_delta else " "
        mark_z = "*" if r.lam == result.best_by_zeta else " "
        dir_txt = "0" if direction is None else f"[{direction[0]:.4f} {direction[1]:.4f}]"
        lines.append(f"{r.lam:>8g} {r.delta:8.4f}{mark_d}{r.eta:8.4f} {r.zeta:8.4f}{mark_z}  {dir_txt}")
    lines.append("* marks the best delta and the best zeta")
    return "\n".join(lines)


def cmd_table1(args):
    result, rows = table1_rows(args.n, args.seed, args.m)
    print(format_table1(result, rows))
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "delta", "eta", "zeta", "theta_1", "theta_2"])
        for r, direction in rows:
            dx = ("", "") if direction is None else (repr(float(direction[0])), repr(float(direction[1])))
            w.writerow([repr(r.lam), repr(r.delta), repr(r.eta), repr(r.zeta), *dx])
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    return 0


COMMANDS = {"gen": cmd_gen, "select": cmd_select, "report": cmd_report, "table1": cmd_table1}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (BrainMapError, ValueError, OSError, KeyError) as exc:
        print(f"brainmaps: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
