"""Dimensionally-constrained symbolic regression.

Expression skeletons are enumerated exhaustively in nondecreasing
complexity order (deduplicated up to commutativity of add/mul), pruned
against a target dimension, fitted (Nelder-Mead over fitted constants),
and collected into a complexity/error Pareto front.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy.optimize import minimize

from .data import Dataset
from .dimensions import DIMENSIONLESS, Dimension, VariableSpec
from .expr import (
    Binary,
    Const,
    DimensionMismatch,
    EvalError,
    Expr,
    ParetoEntry,
    PowInt,
    Unary,
    Var,
    complexity,
    infer_dimension,
    print_expr,
)


class CandidateRejected(ValueError):
    """Candidate violates operator domains on the dataset at every start."""


@dataclass(frozen=True)
class Grammar:
    variables: tuple[VariableSpec, ...]
    unary_ops: tuple[str, ...] = ("neg",)
    binary_ops: tuple[str, ...] = ("add", "sub", "mul", "div")
    powint_exponents: tuple[int, ...] = (2,)
    int_literals: tuple[int, ...] = (1,)
    max_constants: int = 1

    def dims(self) -> dict[str, Dimension]:
        return {v.name: v.dimension for v in self.variables}


@dataclass(frozen=True)
class SearchBudget:
    max_complexity: int = 12
    max_candidates: int = 200_000
    target_error: float = 1e-9

    def __post_init__(self):
        if self.max_complexity <= 0 or self.max_candidates <= 0 or self.target_error <= 0:
            raise ValueError("budget fields must be positive")


_TRANSCENDENTAL = {"sin", "cos", "tan", "exp", "log", "arcsin"}


def _generate(grammar: Grammar, budget: SearchBudget, typed: bool):
    """Yield (expr, dimension, n_fitted) in nondecreasing complexity order.

    In typed mode, dimensionally invalid subtrees are never built and each
    entry carries its exact dimension; untyped mode yields every grammar
    tree (dimension reported as None).
    """
    dims = grammar.dims() if typed else None
    max_c = int(budget.max_complexity)
    # entry: (expr, dim, n_const, idx); idx orders entries globally.
    classes: dict[int, list] = {c: [] for c in range(1, max_c + 1)}
    counter = 0

    def emit(c, expr, dim, n_const):
        nonlocal counter
        entry = (expr, dim, n_const, counter)
        counter += 1
        classes[c].append(entry)
        return entry

    for c in range(1, max_c + 1):
        if c == 1:
            for v in grammar.variables:
                yield emit(c, Var(v.name), dims[v.name] if typed else None, 0)[:3]
            for lit in grammar.int_literals:
                yield emit(c, Const(float(lit)), DIMENSIONLESS if typed else None, 0)[:3]
        if c == 3 and grammar.max_constants >= 1:
            yield emit(c, Const(1.0, fitted=True), DIMENSIONLESS if typed else None, 1)[:3]
        if c >= 3:
            for child, cdim, n_const, _ in classes[c - 2]:
                for op in grammar.unary_ops:
                    if typed:
                        if op in _TRANSCENDENTAL and not cdim.is_dimensionless():
                            continue
                        if op == "neg":
                            dim = cdim
                        elif op == "inv":
                            dim = cdim ** -1
                        elif op == "sqrt":
                            dim = cdim ** Fraction(1, 2)
                        else:
                            dim = DIMENSIONLESS
                    else:
                        dim = None
                    yield emit(c, Unary(op, child), dim, n_const)[:3]
                for p in grammar.powint_exponents:
                    dim = cdim ** p if typed else None
                    yield emit(c, PowInt(child, p), dim, n_const)[:3]
        # Binary nodes: complexity 2 + left + right.
        for ca in range(1, c - 2):
            cb = c - 2 - ca
            if cb < 1:
                continue
            for left, ldim, ln, lidx in classes[ca]:
                for right, rdim, rn, ridx in classes[cb]:
                    n_const = ln + rn
                    if n_const > grammar.max_constants:
                        continue
                    for op in grammar.binary_ops:
                        if op in ("add", "mul") and lidx > ridx:
                            continue  # commutative dedup
                        if typed:
                            if op in ("add", "sub"):
                                if ldim != rdim:
                                    continue
                                dim = ldim
                            elif op == "mul":
                                dim = ldim * rdim
                            else:
                                dim = ldim * rdim ** -1
                        else:
                            dim = None
                        yield emit(c, Binary(op, left, right), dim, n_const)[:3]


def enumerate_skeletons(grammar: Grammar, budget: SearchBudget) -> Iterator[Expr]:
    """All grammar skeletons in nondecreasing complexity order.

    Duplicates are removed up to commutativity of add/mul only; the order
    is deterministic given the grammar.
    """
    for expr, _, _ in _generate(grammar, budget, typed=False):
        yield expr


def dimensional_prune(e: Expr, grammar: Grammar, target_dim: Dimension):
    """('keep', None) or ('discard', reason) against the target dimension."""
    try:
        dim = infer_dimension(e, grammar.dims())
    except DimensionMismatch as err:
        return ("discard", f"inconsistent: {err}")
    if dim != target_dim:
        return ("discard", f"dimension [{dim}] != target [{target_dim}]")
    return ("keep", None)


def _subsample(n_rows: int, cap: int) -> np.ndarray:
    if n_rows <= cap:
        return np.arange(n_rows)
    return np.linspace(0, n_rows - 1, cap).round().astype(int)


def _eval_consts(e: Expr, bindings, vals, pos):
    """Evaluate with fitted-constant nodes bound positionally from ``vals``."""
    if isinstance(e, Const):
        if e.fitted:
            v = vals[pos[0]]
            pos[0] += 1
            return v
        return e.value
    if isinstance(e, Var):
        return bindings[e.name]
    if isinstance(e, Unary):
        x = _eval_consts(e.child, bindings, vals, pos)
        if e.op == "neg":
            return -x
        if e.op == "inv":
            return np.divide(1.0, x)
        return getattr(np, e.op)(x)
    if isinstance(e, Binary):
        a = _eval_consts(e.left, bindings, vals, pos)
        b = _eval_consts(e.right, bindings, vals, pos)
        if e.op == "add":
            return a + b
        if e.op == "sub":
            return a - b
        if e.op == "mul":
            return a * b
        return np.divide(a, b)
    if isinstance(e, PowInt):
        x = _eval_consts(e.child, bindings, vals, pos)
        return np.power(np.asarray(x, dtype=float), float(e.power))
    raise TypeError(f"not an expression node: {e!r}")


def _predict(e: Expr, bindings, const_values) -> np.ndarray:
    with np.errstate(all="ignore"):
        pred = _eval_consts(e, bindings, const_values, [0])
    return np.asarray(pred, dtype=float)


def _bind_consts(e: Expr, values, pos=None) -> Expr:
    if pos is None:
        pos = [0]
    if isinstance(e, Const) and e.fitted:
        v = float(values[pos[0]])
        pos[0] += 1
        return Const(v, fitted=True)
    if isinstance(e, Unary):
        return Unary(e.op, _bind_consts(e.child, values, pos))
    if isinstance(e, Binary):
        left = _bind_consts(e.left, values, pos)
        right = _bind_consts(e.right, values, pos)
        return Binary(e.op, left, right)
    if isinstance(e, PowInt):
        return PowInt(_bind_consts(e.child, values, pos), e.power)
    return e


def fit_constants(
    skeleton: Expr,
    d: Dataset,
    seed: int = 0,
    restarts: int = 8,
    max_iter: int = 500,
    fit_row_cap: int = 512,
    good_enough: float = 0.0,
) -> tuple[Expr, float]:
    """Fit the skeleton's free constants to the dataset; return (expr, mae).

    The last dataset column is the target.  Constants are fitted by
    multi-start Nelder-Mead on a deterministic row subsample; the reported
    mean absolute error is over all rows.  Raises
    :class:`CandidateRejected` if every start violates operator domains.
    """
    if len(d) < 1:
        raise ValueError("dataset is empty")
    y = d.rows[:, -1]
    bindings = {c: d.rows[:, i] for i, c in enumerate(d.columns[:-1])}
    n_const = sum(1 for _ in _iter_fitted(skeleton))

    def mae_full(vals) -> float:
        pred = _predict(skeleton, bindings, vals)
        if not np.all(np.isfinite(pred)):
            raise CandidateRejected(f"domain violation for {print_expr(skeleton)}")
        return float(np.mean(np.abs(pred - y)))

    if n_const == 0:
        return skeleton, mae_full([])

    idx = _subsample(len(d), fit_row_cap)
    fit_bindings = {k: v[idx] for k, v in bindings.items()}
    y_fit = y[idx]

    def objective(vals):
        pred = _predict(skeleton, fit_bindings, vals)
        if not np.all(np.isfinite(pred)):
            return np.inf
        return float(np.mean(np.abs(pred - y_fit)))

    rng = np.random.default_rng(seed)
    starts = [np.full(n_const, 1.0), np.full(n_const, -1.0),
              np.full(n_const, 0.5), np.full(n_const, 2.0)]
    while len(starts) < restarts:
        starts.append(rng.normal(0.0, 2.0, size=n_const))
    best_vals, best_obj = None, np.inf
    for start in starts[:restarts]:
        if not np.isfinite(objective(start)):
            continue
        res = minimize(objective, start, method="Nelder-Mead",
                       options={"maxiter": max_iter, "xatol": 1e-12, "fatol": 1e-14})
        if res.fun < best_obj:
            best_obj, best_vals = res.fun, res.x
        if best_obj <= good_enough:
            break
    if best_vals is None:
        raise CandidateRejected(f"domain violation for {print_expr(skeleton)}")
    fitted = _bind_consts(skeleton, best_vals)
    return fitted, mae_full(best_vals)


def _iter_fitted(e: Expr):
    if isinstance(e, Const):
        if e.fitted:
            yield e
    elif isinstance(e, Unary):
        yield from _iter_fitted(e.child)
    elif isinstance(e, Binary):
        yield from _iter_fitted(e.left)
        yield from _iter_fitted(e.right)
    elif isinstance(e, PowInt):
        yield from _iter_fitted(e.child)


def merge_front(front: list[ParetoEntry], entry: ParetoEntry) -> list[ParetoEntry]:
    """Insert an entry, keeping complexity strictly increasing and error
    strictly decreasing.  Equal (complexity, error) ties keep the
    lexicographically smaller printed form.  Associative and commutative in
    the entries merged."""
    for existing in front:
        if existing.complexity <= entry.complexity and existing.error < entry.error:
            return front
        if existing.complexity < entry.complexity and existing.error <= entry.error:
            return front
        if (existing.complexity == entry.complexity and existing.error == entry.error
                and print_expr(existing.expr) <= print_expr(entry.expr)):
            return front
    out = [
        ex for ex in front
        if not (ex.complexity >= entry.complexity and ex.error >= entry.error)
    ]
    out.append(entry)
    out.sort(key=lambda p: (p.complexity, p.error))
    return out


def regress(
    d: Dataset,
    grammar: Grammar,
    budget: SearchBudget,
    seed: int = 0,
    target_dim: Dimension = DIMENSIONLESS,
) -> tuple[list[ParetoEntry], dict]:
    """Pareto front over (complexity, mae), plus search statistics.

    Enumerates skeletons in complexity order, discards candidates whose
    dimension differs from ``target_dim`` (never fitting them), fits the
    rest, and stops early once the target error is reached.  Deterministic
    given (dataset, grammar, budget, seed).
    """
    if len(d) < 1:
        raise ValueError("dataset must have at least one row")
    front: list[ParetoEntry] = []
    examined = 0
    admissible = 0
    fits = 0
    converged = False
    complete = True
    start_time = time.perf_counter()
    for skeleton, dim, _ in _generate(grammar, budget, typed=True):
        if examined >= budget.max_candidates:
            complete = False
            break
        examined += 1
        if dim != target_dim:
            continue
        admissible += 1
        try:
            fitted, mae = fit_constants(skeleton, d, seed=seed,
                                        good_enough=budget.target_error)
            fits += 1
        except CandidateRejected:
            fits += 1
            continue
        if not np.isfinite(mae):
            continue
        front = merge_front(front, ParetoEntry(complexity(fitted), mae, fitted))
        if mae <= budget.target_error:
            converged = True
            break
    stats = {
        "candidates_examined": examined,
        "admissible": admissible,
        "fit_calls": fits,
        "seconds": time.perf_counter() - start_time,
        "converged": converged,
        "complete": complete or converged,
    }
    return front, stats
