"""Command-line front end.

::

    sfnrec theory curve --beta 2.5 --p-grid 0:1:0.01
    sfnrec theory critical --beta 2.5,3.0,3.3
    sfnrec graph generate --alpha 2.3 --beta 1.2 --seed 7
    sfnrec graph percolate --beta 2.5 --n 100000 --p 0.6 --seeds 10
    sfnrec graph sweep --beta 2.5 --n 100000 --p 0:0.95:0.05 --seeds 10
    sfnrec drs run --scenario ref.scn --protocol mailing_list --seeds 200
    sfnrec drs compare --scenario ref.scn --protocols baseline,mailing_list --seeds 100

Every command writes CSV to stdout or ``--out``. Exit status: 0 success,
2 usage error, 3 infeasible graph generation, 4 unreadable scenario.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import graph as sg
from . import theory
from .predictors import predict
from .protocols import COLUMNS, ProtocolConfig, measure_sig_connectivity, run_protocol, write_message_log
from .scenario import InfeasibleScenarioError, ScenarioParseError, load_scenario

EXIT_USAGE, EXIT_GENERATION, EXIT_SCENARIO = 2, 3, 4


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (endpoints inclusive) or a comma list of values."""
    if ":" not in text:
        return [float(x) for x in text.split(",")]
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not start:stop:step")
    start, stop, step = map(float, parts)
    if step <= 0 or stop < start:
        raise UsageError(f"grid {text!r} is empty")
    count = int(math.floor((stop - start) / step + 1e-12)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return "" if x is None else str(x)


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def emit(header, rows, out):
    with _output(out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in header])


def seed_list(args) -> list[int]:
    if getattr(args, "seed", None) is not None:
        return [args.seed]
    return list(range(args.seeds))


def _params(beta, alpha=None, n=None) -> theory.PowerLawParams:
    if alpha is not None:
        return theory.PowerLawParams(alpha, beta)
    return theory.PowerLawParams.for_size(n, beta)


# theory ---------------------------------------------------------------------

THEORY_COLUMNS = [
    "beta", "alpha", "p", "chi", "xi", "orphan_fraction", "degree1_fraction",
    "beta_prime", "nonorphan_fraction", "critical", "truncated",
]


def cmd_theory_curve(args):
    ps = parse_grid(args.p_grid) if args.p_grid else parse_floats(args.p)
    rows = []
    for beta in parse_floats(args.beta):
        params = _params(beta, args.alpha, args.n)
        zk = theory.truncated_zeta(beta, params.max_degree())
        for p in ps:
            r = theory.subgraph_report(params, p)
            rows.append({
                "beta": beta, "alpha": params.alpha, "p": p, "chi": r.chi, "xi": r.xi,
                "orphan_fraction": r.orphan_fraction, "degree1_fraction": r.xi / zk,
                "beta_prime": r.beta_prime, "nonorphan_fraction": r.nonorphan_fraction,
                "critical": r.critical, "truncated": r.truncated,
            })
    emit(THEORY_COLUMNS, rows, args.out)


def cmd_theory_critical(args):
    rows = []
    for beta in parse_floats(args.beta):
        params = _params(beta, args.alpha, args.n)
        rows.append({"beta": beta, "alpha": params.alpha, "max_degree": params.max_degree(),
                     "p_c": theory.critical_failure_rate(params)})
    emit(["beta", "alpha", "max_degree", "p_c"], rows, args.out)


# graph ----------------------------------------------------------------------

PERC_COLUMNS = [
    "row", "p", "seed", "node_count", "survivors", "orphans", "degree1", "largest_component",
    "largest_fraction_of_survivors", "orphan_fraction", "fitted_beta",
]
_AGG = ["survivors", "orphans", "degree1", "largest_component", "largest_fraction_of_survivors",
        "orphan_fraction", "fitted_beta"]


def _perc_row(r: sg.PercolationReport) -> dict:
    return {"row": "seed", "p": r.p, "seed": r.seed, "node_count": r.node_count, "survivors": r.survivors,
            "orphans": r.orphans, "degree1": r.degree1, "largest_component": r.largest_component,
            "largest_fraction_of_survivors": r.largest_fraction_of_survivors,
            "orphan_fraction": r.orphan_fraction, "fitted_beta": r.fitted_beta}


def _aggregate(p, rows):
    mean = {"row": "mean", "p": p, "seed": None, "node_count": rows[0]["node_count"]}
    err = {"row": "stderr", "p": p, "seed": None, "node_count": rows[0]["node_count"]}
    for c in _AGG:
        v = np.array([r[c] for r in rows], dtype=float)
        mean[c] = float(np.mean(v))
        err[c] = float(np.std(v, ddof=1) / np.sqrt(len(v))) if len(v) > 1 else math.nan
    return [mean, err]


def cmd_graph_generate(args):
    params = _params(args.beta, args.alpha, None if args.alpha is not None else args.n)
    g = sg.generate(params, args.seed, n=args.n if args.sampled else None)
    with _output(args.out) as fh:
        sg.write_edge_list(g, fh)


def percolation_rows(beta, n, alpha, ps, seeds):
    params = _params(beta, alpha, n)
    rows = []
    for seed in seeds:
        g = sg.generate(params, seed)
        for i, p in enumerate(ps):
            r = sg.percolate_report(g, p, np.random.default_rng([seed, 1, i]), seed=seed)
            rows.append(_perc_row(r))
    return rows


def cmd_graph_percolate(args):
    rows = percolation_rows(args.beta, args.n, args.alpha, [args.p], seed_list(args))
    emit(PERC_COLUMNS, rows, args.out)


def cmd_graph_sweep(args):
    ps = parse_grid(args.p)
    seeds = seed_list(args)
    runs = percolation_rows(args.beta, args.n, args.alpha, ps, seeds)
    out = []
    for p in ps:
        at_p = [r for r in runs if r["p"] == p]
        out += at_p + _aggregate(p, at_p)
    emit(PERC_COLUMNS, out, args.out)


# drs ------------------------------------------------------------------------

def _wom_inputs(args, scenario, seed):
    if args.edge_list:
        g = sg.read_edge_list(args.edge_list)
    elif args.graph_beta is not None:
        n = args.graph_n or scenario.mu
        if n != scenario.mu:
            raise UsageError(f"--graph-n {n} differs from the scenario's mu={scenario.mu}")
        params = theory.PowerLawParams.for_size(n, args.graph_beta)
        g = sg.generate(params, seed, n=n)
    else:
        raise UsageError("word_of_mouth needs --graph-beta or --edge-list")
    placement = np.random.default_rng([seed, 2]).permutation(np.flatnonzero(g.alive))
    if len(placement) != scenario.mu:
        raise UsageError(f"graph has {len(placement)} alive nodes, scenario has mu={scenario.mu}")
    return g, placement


def _run(args, scenario, kind, seed, log=False):
    cfg = ProtocolConfig(kind, args.forward_prob, args.max_rounds, seed)
    if kind == "word_of_mouth":
        g, placement = _wom_inputs(args, scenario, seed)
        m = run_protocol(scenario, cfg, g, placement, log=log)
        gamma = float(np.mean([measure_sig_connectivity(g, s, placement)[2] for s in scenario.sigs]))
        return m, (g, placement, gamma)
    return run_protocol(scenario, cfg, log=log), None


def cmd_drs_run(args):
    scenario = load_scenario(args.scenario)
    rows = []
    for seed in seed_list(args):
        m, _ = _run(args, scenario, args.protocol, seed, log=bool(args.message_log))
        if args.message_log:
            write_message_log(m, args.message_log.replace("{seed}", str(seed)))
        rows.append(m.as_row())
    emit(COLUMNS, rows, args.out)


COMPARE_METRICS = ["samples_random", "samples_recommended", "total_samples", "messages", "spam",
                   "broadcasts", "trace_length", "rounds", "satisfied_sig_fraction"]
_PREDICTED = {"total_samples": "samples", "messages": "messages", "spam": "spam"}


def cmd_drs_compare(args):
    scenario = load_scenario(args.scenario)
    seeds = seed_list(args)
    rows = []
    for kind in args.protocols.split(","):
        kind = kind.strip()
        results, gammas, extra = [], [], None
        for seed in seeds:
            m, extra = _run(args, scenario, kind, seed)
            results.append(m.as_row())
            if extra is not None:
                gammas.append(extra[2])
        gamma = float(np.mean(gammas)) if gammas else 0.0
        pred = predict(kind, scenario, gamma, *(extra[:2] if extra else (None, None)))
        for metric in COMPARE_METRICS:
            v = np.array([r[metric] for r in results], dtype=float)
            p = getattr(pred, _PREDICTED[metric]) if metric in _PREDICTED else None
            mean = float(v.mean())
            rows.append({
                "protocol": kind, "metric": metric, "seeds": len(v), "mean": mean,
                "stderr": float(v.std(ddof=1) / np.sqrt(len(v))) if len(v) > 1 else math.nan,
                "predicted": p, "ratio": mean / p if p else None,
                "gamma": gamma if kind == "word_of_mouth" else None,
            })
    emit(["protocol", "metric", "seeds", "mean", "stderr", "predicted", "ratio", "gamma"], rows, args.out)


# parser ---------------------------------------------------------------------

def _seed_opts(p, default_seeds=1):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--seed", type=int, help="run this single seed")
    g.add_argument("--seeds", type=int, default=default_seeds, help="run seeds 0..N-1")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sfnrec", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="group", required=True)

    th = sub.add_parser("theory", help="analytical subgraph predictions").add_subparsers(dest="cmd", required=True)
    for name, fn in (("curve", cmd_theory_curve), ("critical", cmd_theory_critical)):
        p = th.add_parser(name)
        p.add_argument("--beta", required=True, help="slope or comma list of slopes")
        p.add_argument("--alpha", type=float, help="size parameter (default: fit to --n nodes)")
        p.add_argument("--n", type=int, default=100_000)
        p.add_argument("--out")
        if name == "curve":
            grp = p.add_mutually_exclusive_group(required=True)
            grp.add_argument("--p", help="failure rate or comma list")
            grp.add_argument("--p-grid", help="start:stop:step")
        p.set_defaults(func=fn)

    gr = sub.add_parser("graph", help="configuration-model graphs and percolation").add_subparsers(dest="cmd", required=True)
    p = gr.add_parser("generate")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--sampled", action="store_true", help="draw --n i.i.d. degrees instead of rounded counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph_generate)
    for name, fn in (("percolate", cmd_graph_percolate), ("sweep", cmd_graph_sweep)):
        p = gr.add_parser(name)
        p.add_argument("--beta", type=float, required=True)
        p.add_argument("--alpha", type=float)
        p.add_argument("--n", type=int, default=100_000)
        p.add_argument("--p", required=True, type=float if name == "percolate" else str)
        _seed_opts(p)
        p.add_argument("--out")
        p.set_defaults(func=fn)

    drs = sub.add_parser("drs", help="recommender protocol simulations").add_subparsers(dest="cmd", required=True)
    for name, fn in (("run", cmd_drs_run), ("compare", cmd_drs_compare)):
        p = drs.add_parser(name)
        p.add_argument("--scenario", required=True)
        if name == "run":
            p.add_argument("--protocol", required=True, choices=["baseline", "mailing_list", "word_of_mouth"])
            p.add_argument("--message-log", help="CSV path; '{seed}' is replaced by the seed")
        else:
            p.add_argument("--protocols", default="baseline,mailing_list")
        _seed_opts(p)
        p.add_argument("--forward-prob", type=float, default=0.0)
        p.add_argument("--max-rounds", type=int, default=10_000)
        p.add_argument("--graph-beta", type=float)
        p.add_argument("--graph-n", type=int)
        p.add_argument("--edge-list")
        p.add_argument("--out")
        p.set_defaults(func=fn)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except (UsageError, InfeasibleScenarioError) as exc:
        ap.exit(EXIT_USAGE, f"sfnrec: error: {exc}\n")
    except sg.GenerationError as exc:
        ap.exit(EXIT_GENERATION, f"sfnrec: generation failed: {exc}\n")
    except ScenarioParseError as exc:
        ap.exit(EXIT_SCENARIO, f"sfnrec: bad scenario: {exc}\n")
    except ValueError as exc:
        ap.exit(EXIT_USAGE, f"sfnrec: error: {exc}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
