"""Command-line front end for the discovery pipeline.

Subcommands mirror the library stages: dimensional inspection, pi-group
derivation, Ipsen planning, dataset generation, UPINN training, symbolic
regression, and the three benchmark reproductions.  Every command honors
--seed and produces identical artifacts for identical invocations.

Exit codes: 0 success, 1 domain error (bad data, failed precondition),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench, plotting, upinn
from .data import (
    DataError,
    Dataset,
    ODESystem,
    csv_read,
    csv_write,
    nondim_dataset,
    rk4_integrate,
    sample_algebraic,
)
from .dimensions import (
    DimensionError,
    VariableSpec,
    build_matrix,
    load_variables,
    parse_dimension,
    rank,
)
from .expr import DimensionMismatch, EvalError, eval_expr, parse_expr, print_expr
from .pi_engine import (
    NondimError,
    derive_pi_groups,
    ipsen_plan,
    plan_from_json,
    plan_to_json,
)
from .symreg import CandidateRejected, Grammar, SearchBudget, regress

DEFAULT_SEED = 0

_DOMAIN_ERRORS = (
    DimensionError,
    DataError,
    NondimError,
    EvalError,
    DimensionMismatch,
    CandidateRejected,
    bench.BenchError,
    upinn.TrainingError,
    FileNotFoundError,
    json.JSONDecodeError,
    KeyError,
    ValueError,
)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def cmd_dims_matrix(args) -> int:
    variables = load_variables(args.vars)
    if not variables:
        print("dims matrix: variable set is empty", file=sys.stderr)
        return 2
    matrix = build_matrix(variables)
    print(matrix)
    print(f"rank: {rank(matrix)}")
    return 0


def cmd_pi_derive(args) -> int:
    variables = load_variables(args.vars)
    if not variables:
        print("pi derive: variable set is empty", file=sys.stderr)
        return 2
    for g in derive_pi_groups(variables):
        print(f"{g.name} = {g}")
    return 0


def cmd_ipsen_plan(args) -> int:
    variables = load_variables(args.vars)
    if not variables:
        print("ipsen plan: variable set is empty", file=sys.stderr)
        return 2
    plan = ipsen_plan(variables, time_var=args.time)
    doc = plan_to_json(plan)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        print(doc)
    for name, g in plan.variable_map:
        print(f"{name} -> {g.name} = {g}", file=sys.stderr)
    print(f"hidden args: {', '.join(plan.hidden_args) or '(none)'}", file=sys.stderr)
    return 0


def cmd_data_gen(args) -> int:
    variables = load_variables(args.vars)
    target = parse_expr(args.target)
    d = sample_algebraic(target, variables, n=args.points, seed=args.seed,
                         noise=args.noise)
    csv_write(d, args.out)
    return 0


def cmd_data_ode(args) -> int:
    doc = _load_json(args.config)
    hidden_text = doc.pop("hidden", None)
    sys_ = ODESystem(
        state_names=doc["state_names"],
        known_rhs=[parse_expr(e) for e in doc["known_rhs"]],
        initial_state=doc["initial_state"],
        t_span=tuple(doc["t_span"]),
        parameters=doc.get("parameters", {}),
        hidden_placeholder=doc.get("hidden_placeholder"),
        hidden_args=doc.get("hidden_args", []),
        time_name=doc.get("time_name", "t"),
    )
    hidden = None
    if hidden_text is not None:
        hidden_expr = parse_expr(hidden_text)
        names = list(sys_.hidden_args)

        def hidden(*vals):
            return eval_expr(hidden_expr, dict(zip(names, vals)))

    d = rk4_integrate(sys_, hidden=hidden, steps=args.steps)
    csv_write(d, args.out)
    return 0


def cmd_data_nondim(args) -> int:
    plan = plan_from_json(open(args.plan, "r", encoding="utf-8").read())
    d = csv_read(args.data)
    params = _load_json(args.params) if args.params else None
    out = nondim_dataset(d, plan, params=params)
    csv_write(out, args.out)
    return 0


def cmd_upinn_train(args) -> int:
    doc = _load_json(args.config)
    known = parse_expr(doc.pop("known_rhs"))
    for key in ("surrogate_widths", "hidden_widths", "hidden_states", "hidden_extra"):
        if key in doc:
            doc[key] = tuple(doc[key])
    cfg = upinn.UPINNConfig(seed=args.seed, **doc)
    d = csv_read(args.data)
    t = d.rows[:, 0]
    colloc = np.linspace(float(t.min()), float(t.max()), cfg.collocation)
    state_names = d.columns[1:]
    time_name = d.columns[0]

    def known_rhs(u, du, tt):
        bindings = {time_name: tt[:, 0] if hasattr(tt, "ndim") else tt}
        for j, name in enumerate(state_names):
            bindings[name] = u[:, j]
            bindings["d" + name] = du[:, j]
        return eval_expr(known, bindings).reshape(u.shape)

    model = upinn.train(cfg, d, known_rhs, colloc)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(upinn.model_to_json(model))
    if args.verbose:
        l_mse, l_ode = model.loss_history[-1]
        print(f"final loss: mse={l_mse:.3e} ode={l_ode:.3e}", file=sys.stderr)
    return 0


def cmd_symreg_run(args) -> int:
    doc = _load_json(args.config)
    variables = tuple(
        VariableSpec(name=v["name"],
                     dimension=parse_dimension(v.get("dimension", "")))
        for v in doc["variables"]
    )
    gram = Grammar(
        variables=variables,
        unary_ops=tuple(doc.get("unary_ops", ("neg",))),
        binary_ops=tuple(doc.get("binary_ops", ("add", "sub", "mul", "div"))),
        powint_exponents=tuple(doc.get("powint_exponents", (2,))),
        int_literals=tuple(doc.get("int_literals", (1,))),
        max_constants=doc.get("max_constants", 1),
    )
    bud_doc = doc.get("budget", {})
    if args.budget is not None:
        bud_doc["max_candidates"] = args.budget
    bud = SearchBudget(
        max_complexity=bud_doc.get("max_complexity", 12),
        max_candidates=bud_doc.get("max_candidates", 200_000),
        target_error=bud_doc.get("target_error", 1e-9),
    )
    target_dim = parse_dimension(doc.get("target_dimension", ""))
    d = csv_read(args.data)
    front, stats = regress(d, gram, bud, seed=args.seed, target_dim=target_dim)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("complexity,mae,expression\n")
        for e in front:
            fh.write(f"{e.complexity:.17g},{e.error:.17g},\"{print_expr(e.expr)}\"\n")
    if args.verbose:
        print(f"candidates={stats['candidates_examined']} "
              f"complete={stats['complete']}", file=sys.stderr)
    return 0


def cmd_bench_table1(args) -> int:
    kwargs = {}
    if args.budget is not None:
        kwargs["max_candidates"] = args.budget
    bench.table1_suite(seed=args.seed, out_dir=args.out, **kwargs)
    plotting.plot_table1(args.out)
    return 0


def cmd_bench_logistic(args) -> int:
    cfg = None
    if args.config:
        doc = _load_json(args.config)
        for key in ("surrogate_widths", "hidden_widths", "hidden_states", "hidden_extra"):
            if key in doc:
                doc[key] = tuple(doc[key])
        cfg = upinn.UPINNConfig(seed=args.seed, **doc)
    bench.logistic_case(cfg=cfg, seed=args.seed, out_dir=args.out)
    plotting.plot_logistic(args.out)
    return 0


def cmd_bench_bead(args) -> int:
    omegas = None
    if args.omegas:
        omegas = [float(x) for x in args.omegas.split(",")]
    bench.bead_case(omegas=omegas, seed=args.seed, out_dir=args.out,
                    use_upinn=not args.analytic)
    plotting.plot_bead(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dimreg",
                                description="equation discovery pipeline")
    sub = p.add_subparsers(dest="command", required=True)

    dims = sub.add_parser("dims", help="dimensional inspection")
    dims_sub = dims.add_subparsers(dest="subcommand", required=True)
    dm = dims_sub.add_parser("matrix", help="print dimensional matrix and rank")
    dm.add_argument("vars")
    dm.set_defaults(func=cmd_dims_matrix)

    pi = sub.add_parser("pi", help="pi-group derivation")
    pi_sub = pi.add_subparsers(dest="subcommand", required=True)
    pd = pi_sub.add_parser("derive", help="derive pi groups from a variable set")
    pd.add_argument("vars")
    pd.set_defaults(func=cmd_pi_derive)

    ipsen = sub.add_parser("ipsen", help="nondimensionalization planning")
    ipsen_sub = ipsen.add_subparsers(dest="subcommand", required=True)
    ip = ipsen_sub.add_parser("plan", help="plan eliminations minimizing hidden args")
    ip.add_argument("vars")
    ip.add_argument("--time", default="t")
    ip.add_argument("--out")
    ip.set_defaults(func=cmd_ipsen_plan)

    data = sub.add_parser("data", help="dataset generation")
    data_sub = data.add_subparsers(dest="subcommand", required=True)
    dg = data_sub.add_parser("gen", help="sample an algebraic target")
    dg.add_argument("--vars", required=True)
    dg.add_argument("--target", required=True)
    dg.add_argument("--points", type=int, default=100)
    dg.add_argument("--seed", type=int, default=DEFAULT_SEED)
    dg.add_argument("--noise", type=float, default=0.0)
    dg.add_argument("--out", required=True)
    dg.set_defaults(func=cmd_data_gen)
    do = data_sub.add_parser("ode", help="integrate an ODE system")
    do.add_argument("--config", required=True)
    do.add_argument("--steps", type=int, default=100)
    do.add_argument("--out", required=True)
    do.set_defaults(func=cmd_data_ode)
    dn = data_sub.add_parser("nondim", help="apply a nondimensionalization plan")
    dn.add_argument("--plan", required=True)
    dn.add_argument("--data", required=True)
    dn.add_argument("--params")
    dn.add_argument("--out", required=True)
    dn.set_defaults(func=cmd_data_nondim)

    up = sub.add_parser("upinn", help="hidden-term network training")
    up_sub = up.add_subparsers(dest="subcommand", required=True)
    ut = up_sub.add_parser("train", help="train surrogate and hidden networks")
    ut.add_argument("--data", required=True)
    ut.add_argument("--config", required=True)
    ut.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ut.add_argument("--out", required=True)
    ut.add_argument("--verbose", action="store_true")
    ut.set_defaults(func=cmd_upinn_train)

    sr = sub.add_parser("symreg", help="symbolic regression")
    sr_sub = sr.add_subparsers(dest="subcommand", required=True)
    srr = sr_sub.add_parser("run", help="regress a dataset against a grammar")
    srr.add_argument("--data", required=True)
    srr.add_argument("--config", required=True)
    srr.add_argument("--seed", type=int, default=DEFAULT_SEED)
    srr.add_argument("--budget", type=int)
    srr.add_argument("--out", required=True)
    srr.add_argument("--verbose", action="store_true")
    srr.set_defaults(func=cmd_symreg_run)

    be = sub.add_parser("bench", help="benchmark reproductions")
    be_sub = be.add_subparsers(dest="subcommand", required=True)
    b1 = be_sub.add_parser("table1", help="six-equation comparison")
    b1.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b1.add_argument("--budget", type=int)
    b1.add_argument("--out", required=True)
    b1.set_defaults(func=cmd_bench_table1)
    bl = be_sub.add_parser("logistic", help="logistic hidden-term recovery")
    bl.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bl.add_argument("--config")
    bl.add_argument("--out", required=True)
    bl.set_defaults(func=cmd_bench_logistic)
    bb = be_sub.add_parser("bead", help="rotating-bead hidden-term recovery")
    bb.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bb.add_argument("--omegas", help="comma-separated omega values")
    bb.add_argument("--analytic", action="store_true",
                    help="regress exact hidden samples instead of training")
    bb.add_argument("--out", required=True)
    bb.set_defaults(func=cmd_bench_bead)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as err:
        name = type(err).__name__
        print(f"{args.command}: {name}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
