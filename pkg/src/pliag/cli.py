"""Command-line front end: ``run``, ``rates`` and ``verify``.

Run configurations are flat ``key = value`` files. Matrices are written
inline with ``;`` between rows (``A = 1 0; 0 1``) or as a path to a
header-free CSV file, resolved relative to the configuration file.
"""

import argparse
import configparser
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from . import problems as pb
from . import stepsizes as st
from .errors import ConfigError, PliagError
from .solver import named_method, run
from .suites import SUITES, run_suite

EXIT_PASS, EXIT_ERROR, EXIT_CERT_FAIL = 0, 1, 2

PROBLEM_KEYS = {
    "lasso": {"A", "b", "lam", "radius"},
    "poisson": {"a", "b", "beta", "mu_l1"},
    "quartic": {"E", "A", "C", "b", "d", "split"},
    "dual_cs": {"A", "b", "cs_alpha", "cs_mu"},
    "holder_toy": {"eps", "lipschitz"},
}
COMMON_KEYS = {"problem", "method", "tau", "delay_kind", "seed", "step_mode",
               "alpha_manual", "iterations", "x0", "mu", "box_lower", "box_upper",
               "certificate", "divergence_factor", "trace_csv", "report_json"}


# -- configuration parsing ---------------------------------------------------

def read_config(path):
    path = Path(path)
    text = path.read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    record = dict(parser["run"])
    name = record.get("problem")
    if name not in PROBLEM_KEYS:
        raise ConfigError(f"unknown or missing problem {name!r}")
    unknown = set(record) - COMMON_KEYS - PROBLEM_KEYS[name]
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    record["_dir"] = path.parent
    return record


def _matrix(record, key):
    raw = record[key].strip()
    if raw.endswith(".csv"):
        return pb.load_matrix(record["_dir"] / raw)
    try:
        rows = [[float(v) for v in row.replace(",", " ").split()] for row in raw.split(";")]
        return np.array(rows, dtype=float)
    except ValueError:
        raise ConfigError(f"cannot parse matrix {key!r}") from None


def _vector(record, key):
    raw = record[key].strip()
    if raw.endswith(".csv"):
        return pb.load_vector(record["_dir"] / raw)
    try:
        return np.array([float(v) for v in raw.replace(",", " ").replace(";", " ").split()])
    except ValueError:
        raise ConfigError(f"cannot parse vector {key!r}") from None


def _float(record, key, default=None):
    if key not in record:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        return float(record[key])
    except ValueError:
        raise ConfigError(f"{key!r} must be a number") from None


def _int(record, key, default):
    try:
        return int(record.get(key, default))
    except ValueError:
        raise ConfigError(f"{key!r} must be an integer") from None


def build_problem(record, seed):
    name = record["problem"]
    box = None
    if "box_lower" in record or "box_upper" in record:
        box = (_vector(record, "box_lower"), _vector(record, "box_upper"))
    if name == "lasso":
        return pb.make_lasso(_matrix(record, "A"), _vector(record, "b"),
                             _float(record, "lam"), _float(record, "radius"), seed=seed)
    if name == "poisson":
        return pb.make_poisson_elastic_net(_matrix(record, "a"), _vector(record, "b"),
                                           beta=_float(record, "beta", 0.0),
                                           mu_l1=_float(record, "mu_l1", 0.0), box=box)
    if name == "quartic":
        split = record.get("split", "false").lower() in ("1", "true", "yes")
        return pb.make_quartic_problem(_matrix(record, "E"), _matrix(record, "A"),
                                       _matrix(record, "C"), _vector(record, "b"),
                                       _vector(record, "d"), box=box, split=split, seed=seed)
    if name == "dual_cs":
        return pb.make_dual_cs(_matrix(record, "A"), _vector(record, "b"),
                               _float(record, "cs_alpha"), _float(record, "cs_mu"), seed=seed)
    lip = _float(record, "lipschitz", 0.0) or None
    return pb.make_holder_toy(_float(record, "eps"), lipschitz=lip)


# -- output ----------------------------------------------------------------------

def _g(v):
    return "%.17g" % v


def write_trace_csv(trace, path):
    dmax = trace.delay_max()
    lines = ["k,phi,bregman_step,delay_max,alpha"]
    for k in range(trace.K + 1):
        step = _g(trace.bregman_steps[k]) if k < trace.K else "nan"
        delay = str(int(dmax[k])) if k < trace.K else "nan"
        lines.append(f"{k},{_g(trace.phi[k])},{step},{delay},{_g(trace.alpha)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _certificate_for(kind, trace, mu):
    if kind == "sublinear":
        return dg.certify_sublinear(trace)
    if kind == "linear":
        return dg.certify_linear(trace, mu=mu)
    if kind == "holder":
        return dg.certify_holder(trace, mu=mu)
    raise ConfigError(f"unknown certificate {kind!r}")


def cmd_run(config_path, trace_path=None, report_path=None):
    record = read_config(config_path)
    seed = _int(record, "seed", 0)
    if os.environ.get("RNG_SEED"):
        seed = int(os.environ["RNG_SEED"])
    problem = build_problem(record, seed)
    step = record.get("step_mode", "sublinear")
    mu = _float(record, "mu", 0.0) or None
    x0 = _vector(record, "x0") if "x0" in record else None
    config = named_method(record.get("method", "pg"), problem, tau=_int(record, "tau", 0),
                          K=_int(record, "iterations", 100),
                          delay_kind=record.get("delay_kind", "constant"), seed=seed,
                          step=step, alpha=_float(record, "alpha_manual", 0.0) or None,
                          x0=x0, mu=mu)
    config.divergence_factor = _float(record, "divergence_factor", 1e3)
    trace = run(config)
    kind = record.get("certificate", "auto")
    if kind == "auto":
        kind = {"linear": "linear", "piag_holder": "holder"}.get(step, "sublinear")
    cert = _certificate_for(kind, trace, mu)
    report = cert.to_json()
    report.update(method=config.tag, L=float(config.L), tau=int(config.tau),
                  step_mode=config.step_mode, trace_notes=list(trace.notes),
                  divergence=trace.divergence)
    if problem.solutions is not None and trace.K:
        report["descent_max_residual"] = max(
            float(np.max(dg.descent_lemma_residuals(trace))),
            float(np.max(dg.descent_lemma_residuals(trace, problem.solutions[0]))))

    # command-line paths are taken as given; config paths are relative to the config file
    stem = Path(config_path).with_suffix("")
    base = record["_dir"]
    trace_path = Path(trace_path) if trace_path else base / record.get(
        "trace_csv", f"{stem.name}.trace.csv")
    report_path = Path(report_path) if report_path else base / record.get(
        "report_json", f"{stem.name}.report.json")
    write_trace_csv(trace, trace_path)
    Path(report_path).write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")
    return EXIT_PASS if cert.passed else EXIT_CERT_FAIL


def rates_table(qs, taus):
    lines = ["Q,tau,rate_result04,rate_best,better"]
    for q in qs:
        if q < 1:
            raise ConfigError("condition numbers must be at least 1")
        for tau in taus:
            r04 = st.rate_bound_result04(q, tau)
            best = st.rate_bound_best(q, tau)
            # compare the gaps: the factors themselves round together for large Q
            wins = st.rate_gap_result04(q, tau) >= st.rate_gap_best(q, tau)
            better = "result04" if wins else "best"
            lines.append(f"{_g(q)},{tau},{_g(r04)},{_g(best)},{better}")
    return "\n".join(lines) + "\n"


def _parse_taus(tokens):
    taus = []
    for tok in tokens:
        if ":" in tok:
            lo, hi = tok.split(":")
            taus.extend(range(int(lo), int(hi) + 1))
        else:
            taus.append(int(tok))
    return taus


def cmd_verify(name):
    checks = run_suite(name)
    ok = all(passed for _, passed, _ in checks)
    summary = {"suite": name, "pass": ok,
               "checks": [{"name": n, "pass": p, "value": v} for n, p, v in checks]}
    print(json.dumps(summary, indent=1))
    return EXIT_PASS if ok else EXIT_CERT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="pliag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a configured experiment and certify it")
    p_run.add_argument("config")
    p_run.add_argument("--trace", help="trace CSV path")
    p_run.add_argument("--report", help="certificate JSON path")
    p_rates = sub.add_parser("rates", help="compare the two linear rate factors")
    p_rates.add_argument("--q", nargs="+", type=float, required=True)
    p_rates.add_argument("--tau", nargs="+", required=True, help="integers or lo:hi ranges")
    p_rates.add_argument("--out", help="write the CSV here instead of stdout")
    p_verify = sub.add_parser("verify", help="run a bundled invariant suite")
    p_verify.add_argument("suite")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, args.trace, args.report)
        if args.command == "rates":
            table = rates_table(args.q, _parse_taus(args.tau))
            if args.out:
                Path(args.out).write_text(table)
            else:
                sys.stdout.write(table)
            return EXIT_PASS
        if args.suite not in SUITES:
            print(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}",
                  file=sys.stderr)
            return EXIT_ERROR
        return cmd_verify(args.suite)
    except (PliagError, OSError, ValueError) as exc:
        print(f"pliag: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
