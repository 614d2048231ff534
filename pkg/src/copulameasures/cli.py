"""Batch command line: CSV in, one JSON report to stdout, logs to stderr.

Subcommands
-----------
measure    closed-form or cubature measure of a parametric copula
cckl       divergence between two parametric copulas
empirical  plug-in measures of a CSV dataset
gof        bootstrap goodness-of-fit test (exit code 1 on rejection)
calibrate  null percentile of the test statistic
power      rejection percentage of a null family against a true model
select     rank candidate families by divergence from the data

Every randomized run is controlled by explicit ``--seed`` and
``--tie-seed`` flags with fixed defaults; reports echo the full argv and
all derived seeds so a replay is byte-identical.  ``COPULAMEASURES_THREADS``
overrides the worker count used for bootstrap replicates.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import closed_forms, empirical, fit, gof, measures
from .copulas import FAMILIES, CopulaModel
from .cubature import IntegrationConfig
from .errors import ColumnMissing, CopulaError, NoClosedForm, NoCompleteRows

log = logging.getLogger("copulameasures")

DEFAULT_SEED = 20240
DEFAULT_TIE_SEED = 20241

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2


@dataclass(frozen=True)
class Dataset:
    columns: tuple
    values: np.ndarray
    rows_dropped: int


def load_csv(path: str, columns, na_policy: str = "drop_row") -> Dataset:
    """Read named numeric columns; rows with any bad cell are dropped."""
    if na_policy != "drop_row":
        raise ValueError(f"unsupported na_policy {na_policy!r}")
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise ColumnMissing(
                f"columns {missing} not in file; available: {header}")
        rows, dropped = [], 0
        for record in reader:
            try:
                vals = [float(record[c]) for c in columns]
            except (TypeError, ValueError):
                dropped += 1
                continue
            if not all(np.isfinite(v) for v in vals):
                dropped += 1
                continue
            rows.append(vals)
    if not rows:
        raise NoCompleteRows(f"no complete rows in {path}")
    return Dataset(tuple(columns), np.asarray(rows, dtype=float), dropped)


def _parse_params(text: str | None) -> tuple:
    if not text:
        return ()
    return tuple(float(tok) for tok in text.replace(" ", "").split(",") if tok)


def _parse_stat(text: str) -> tuple[str, float | None]:
    """'cce' | 'fcce:R' | 'ccigf:S' | 'rho' | 'bk' -> (name, order)."""
    name, _, arg = text.partition(":")
    if name not in ("cce", "fcce", "ccigf", "rho", "bk"):
        raise ValueError(f"unknown stat {text!r}")
    if name in ("fcce", "ccigf"):
        if not arg:
            raise ValueError(f"{name} needs an order, e.g. {name}:0.5")
        return name, float(arg)
    if arg:
        raise ValueError(f"stat {name} takes no order")
    return name, None


def _integration_cfg(args) -> IntegrationConfig:
    return IntegrationConfig(method=getattr(args, "method", "auto"),
                             abs_tol=getattr(args, "tol", None),
                             qmc_seed=getattr(args, "qmc_seed", 0))


def _model_from_args(family: str, dim: int, params: str | None) -> CopulaModel:
    return CopulaModel(family, dim, _parse_params(params))


def _workers(args) -> int:
    env = os.environ.get("COPULAMEASURES_THREADS")
    if args.workers is not None:
        return max(1, args.workers)
    return max(1, int(env)) if env else 1


def _emit(report: dict, exit_code: int) -> int:
    print(json.dumps(report, indent=2))
    return exit_code


def _measure_value(model, stat, order, cfg):
    if stat == "cce":
        est = measures.cce(model, cfg)
    elif stat == "fcce":
        est = measures.fcce(model, order, cfg)
    elif stat == "ccigf":
        est = measures.ccigf(model, order, cfg)
    elif stat == "rho":
        est = measures.spearman_rho_minus(model, cfg)
    else:
        est = measures.b_k(model, cfg)
    return est


def _notes_for(stat: str, model) -> list:
    key = {"cce": "cce", "fcce": "fcce", "ccigf": "ccigf", "bk": "bk"}.get(stat)
    note = closed_forms.FORMULA_NOTES.get((key, model.family)) if key else None
    return [note] if note else []


def cmd_measure(args, argv) -> int:
    model = _model_from_args(args.family, args.dim, args.params)
    stat, order = _parse_stat(args.stat)
    cfg = _integration_cfg(args)
    est = _measure_value(model, stat, order, cfg)
    closed = None
    try:
        if stat == "cce":
            closed = closed_forms.closed_form_cce(model)
        elif stat == "fcce":
            closed = closed_forms.closed_form_fcce(model, order)
        elif stat == "ccigf":
            closed = closed_forms.closed_form_ccigf(model, order)
        elif stat == "bk":
            closed = closed_forms.closed_form_bk(model)
    except NoClosedForm:
        pass
    report = {
        "command": "measure",
        "argv": argv,
        "inputs": {"family": model.family, "dim": model.dim,
                   "params": list(model.params), "stat": args.stat},
        "outputs": {"value": est.value, "error": est.error,
                    "method": est.method, "closed_form": closed},
        "formula_notes": _notes_for(stat, model),
    }
    return _emit(report, EXIT_OK)


def cmd_cckl(args, argv) -> int:
    a = _model_from_args(args.family_a, args.dim, args.params_a)
    b = _model_from_args(args.family_b, args.dim, args.params_b)
    est = measures.cckl(a, b, _integration_cfg(args))
    closed = None
    try:
        closed = closed_forms.closed_form_cckl(a, b)
    except NoClosedForm:
        pass
    note = closed_forms.FORMULA_NOTES.get(("cckl", f"{a.family}:{b.family}"))
    report = {
        "command": "cckl",
        "argv": argv,
        "inputs": {"family_a": a.family, "params_a": list(a.params),
                   "family_b": b.family, "params_b": list(b.params),
                   "dim": args.dim},
        "outputs": {"value": est.value, "error": est.error,
                    "closed_form": closed},
        "formula_notes": [note] if note else [],
    }
    return _emit(report, EXIT_OK)


def cmd_empirical(args, argv) -> int:
    ds = load_csv(args.data, args.cols.split(","))
    rs = empirical.rank_with_random_ties(ds.values, args.tie_seed)
    stat, order = _parse_stat(args.stat)
    cfg = _integration_cfg(args)
    beta = empirical.EmpiricalBetaCopula(rs)
    est = _measure_value(beta, stat, order, cfg)
    outputs = {"value": est.value, "error": est.error, "n": rs.n, "k": rs.k}
    if args.dump_curve:
        sizes = [int(s) for s in args.dump_curve.split(",")]
        curve = []
        for m in sizes:
            if m > rs.n:
                raise ValueError(f"curve size {m} exceeds N={rs.n}")
            sub = empirical.rank_with_random_ties(ds.values[:m], args.tie_seed)
            sub_est = _measure_value(empirical.EmpiricalBetaCopula(sub),
                                     stat, order, cfg)
            curve.append([m, sub_est.value])
        outputs["curve"] = curve
    report = {
        "command": "empirical",
        "argv": argv,
        "inputs": {"data": args.data, "columns": list(ds.columns),
                   "stat": args.stat, "rows_dropped": ds.rows_dropped},
        "seeds": {"tie_seed": rs.tie_seed},
        "outputs": outputs,
        "formula_notes": [],
    }
    return _emit(report, EXIT_OK)


def cmd_gof(args, argv) -> int:
    ds = load_csv(args.data, args.cols.split(","))
    cfg = gof.GofConfig(reps=args.reps, alpha=args.alpha, seed=args.seed,
                        param_mode=args.param_mode, workers=_workers(args))
    report_obj = gof.bootstrap_test(ds.values, args.family, cfg,
                                    params=_parse_params(args.params) or None)
    report = {
        "command": "gof",
        "argv": argv,
        "inputs": {"data": args.data, "columns": list(ds.columns),
                   "family": args.family, "reps": cfg.reps,
                   "alpha": cfg.alpha, "param_mode": cfg.param_mode,
                   "rows_dropped": ds.rows_dropped},
        "seeds": {"seed": cfg.seed, "tie_seed": report_obj.tie_seed,
                  "replicate_base": "substream(seed, 1)"},
        "outputs": {
            "fitted_params": list(report_obj.fitted.model.params),
            "observed_t": report_obj.observed_t,
            "percentile": report_obj.percentile,
            "p_value": report_obj.p_value,
            "reject": report_obj.reject,
        },
        "formula_notes": [],
    }
    return _emit(report, EXIT_REJECT if report_obj.reject else EXIT_OK)


def cmd_calibrate(args, argv) -> int:
    model = _model_from_args(args.family, args.dim, args.params)
    cfg = gof.GofConfig(reps=args.reps, alpha=args.alpha, seed=args.seed,
                        param_mode="known_params", workers=_workers(args))
    pct = gof.calibrate_percentile(model, args.n, cfg)
    report = {
        "command": "calibrate",
        "argv": argv,
        "inputs": {"family": model.family, "dim": model.dim,
                   "params": list(model.params), "n": args.n,
                   "reps": cfg.reps, "alpha": cfg.alpha},
        "seeds": {"seed": cfg.seed},
        "outputs": {"percentile": pct},
        "formula_notes": [],
    }
    return _emit(report, EXIT_OK)


def cmd_power(args, argv) -> int:
    null_model = _model_from_args(args.null_family, args.dim, args.null_params)
    true_model = _model_from_args(args.true_family, args.dim, args.true_params)
    cfg = gof.GofConfig(reps=args.reps, alpha=args.alpha, seed=args.seed,
                        param_mode=args.param_mode, workers=_workers(args))
    pct = gof.power_study(null_model, true_model, args.n, cfg)
    report = {
        "command": "power",
        "argv": argv,
        "inputs": {"null_family": null_model.family,
                   "null_params": list(null_model.params),
                   "true_family": true_model.family,
                   "true_params": list(true_model.params),
                   "dim": args.dim, "n": args.n, "reps": cfg.reps,
                   "alpha": cfg.alpha, "param_mode": cfg.param_mode},
        "seeds": {"seed": cfg.seed},
        "outputs": {"rejection_percent": pct},
        "formula_notes": [],
    }
    return _emit(report, EXIT_OK)


def cmd_select(args, argv) -> int:
    ds = load_csv(args.data, args.cols.split(","))
    cfg = gof.GofConfig(reps=args.reps, alpha=args.alpha, seed=args.seed,
                        workers=_workers(args))
    entries = gof.select_copula(ds.values, args.families.split(","), cfg)
    ranking = []
    for e in entries:
        ranking.append({
            "family": e.family,
            "params": list(e.fitted.model.params) if e.fitted else None,
            "cckl_to_empirical": e.cckl_to_empirical,
            "p_value": e.p_value,
            "error": e.error,
        })
    report = {
        "command": "select",
        "argv": argv,
        "inputs": {"data": args.data, "columns": list(ds.columns),
                   "families": args.families.split(","), "reps": cfg.reps,
                   "alpha": cfg.alpha, "rows_dropped": ds.rows_dropped},
        "seeds": {"seed": cfg.seed},
        "outputs": {"ranking": ranking,
                    "recommended": ranking[0]["family"] if ranking else None},
        "formula_notes": [],
    }
    return _emit(report, EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="copulameasures", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add_common_measure(sp):
        sp.add_argument("--tol", type=float, default=None,
                        help="absolute integration tolerance")
        sp.add_argument("--method", choices=("auto", "adaptive", "qmc"),
                        default="auto")
        sp.add_argument("--qmc-seed", type=int, default=0, dest="qmc_seed")

    sp = sub.add_parser("measure", help="measure of a parametric copula")
    sp.add_argument("--family", required=True, choices=FAMILIES)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--params", default=None,
                    help="comma-separated, positional per family")
    sp.add_argument("--stat", required=True,
                    help="cce | fcce:R | ccigf:S | rho | bk")
    add_common_measure(sp)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("cckl", help="divergence between two copulas")
    sp.add_argument("--family-a", required=True, choices=FAMILIES)
    sp.add_argument("--params-a", default=None)
    sp.add_argument("--family-b", required=True, choices=FAMILIES)
    sp.add_argument("--params-b", default=None)
    sp.add_argument("--dim", type=int, required=True)
    add_common_measure(sp)
    sp.set_defaults(func=cmd_cckl)

    sp = sub.add_parser("empirical", help="plug-in measures of a dataset")
    sp.add_argument("--data", required=True)
    sp.add_argument("--cols", required=True, help="comma-separated names")
    sp.add_argument("--stat", required=True)
    sp.add_argument("--tie-seed", type=int, default=DEFAULT_TIE_SEED,
                    dest="tie_seed")
    sp.add_argument("--dump-curve", default=None, dest="dump_curve",
                    help="comma-separated prefix sizes for (N, value) pairs")
    add_common_measure(sp)
    sp.set_defaults(func=cmd_empirical)

    sp = sub.add_parser("gof", help="bootstrap goodness-of-fit test")
    sp.add_argument("--data", required=True)
    sp.add_argument("--cols", required=True)
    sp.add_argument("--family", required=True, choices=fit.FITTABLE_FAMILIES)
    sp.add_argument("--params", default=None,
                    help="required in known_params mode")
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--param-mode", dest="param_mode",
                    choices=("estimate_each_rep", "known_params"),
                    default="estimate_each_rep")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_gof)

    sp = sub.add_parser("calibrate", help="null percentile of the statistic")
    sp.add_argument("--family", required=True, choices=FAMILIES)
    sp.add_argument("--params", default=None)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=10000)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("power", help="rejection percentage under a true model")
    sp.add_argument("--null-family", required=True, dest="null_family",
                    choices=FAMILIES)
    sp.add_argument("--null-params", default=None, dest="null_params")
    sp.add_argument("--true-family", required=True, dest="true_family",
                    choices=FAMILIES)
    sp.add_argument("--true-params", default=None, dest="true_params")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=10000)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--param-mode", dest="param_mode",
                    choices=("estimate_each_rep", "known_params"),
                    default="known_params")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_power)

    sp = sub.add_parser("select", help="rank candidate families")
    sp.add_argument("--data", required=True)
    sp.add_argument("--cols", required=True)
    sp.add_argument("--families", required=True,
                    help="comma-separated candidates")
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_select)

    return p


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the offending flag
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args, argv)
    except (CopulaError, FileNotFoundError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
