"""Dataset generation, nondimensionalization, and CSV persistence.

Datasets are rectangular float64 tables with named columns and a metadata
dict (seed, generator description, per-column units, parameter values).
Generated datasets are exactly reproducible from (generator, seed).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .dimensions import Dimension, VariableSpec, parse_dimension
from .expr import EvalError, Expr, eval_expr
from .pi_engine import NondimPlan, mono_eval


class DataError(ValueError):
    """Malformed dataset, file, or generation failure."""


@dataclass
class Dataset:
    columns: list[str]
    rows: np.ndarray  # shape (n, len(columns))
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, len(self.columns))
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise DataError("rows must be rectangular with one entry per column")
        if self.rows.size and not np.all(np.isfinite(self.rows)):
            raise DataError("dataset contains non-finite values")

    def __len__(self):
        return self.rows.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.columns.index(name)]
        except ValueError:
            raise DataError(f"no column {name!r}") from None

    def bindings(self) -> dict[str, np.ndarray]:
        return {c: self.rows[:, i] for i, c in enumerate(self.columns)}


@dataclass
class ODESystem:
    """First-order system du/dt = known(u, t) + hidden(args), per state.

    ``known_rhs`` expressions may reference state names, parameter names,
    the independent variable ``t``, and the hidden placeholder name.
    """

    state_names: list[str]
    known_rhs: list[Expr]
    initial_state: list[float]
    t_span: tuple[float, float]
    parameters: dict[str, float] = field(default_factory=dict)
    hidden_placeholder: str | None = None
    hidden_args: list[str] = field(default_factory=list)
    time_name: str = "t"

    def __post_init__(self):
        if len(self.known_rhs) != len(self.state_names):
            raise DataError("need one right-hand side per state")
        if len(self.initial_state) != len(self.state_names):
            raise DataError("need one initial value per state")


def sample_algebraic(
    target: Expr,
    variables: list[VariableSpec],
    n: int,
    seed: int,
    noise: float = 0.0,
    target_name: str = "y",
) -> Dataset:
    """Uniform input sampling on each variable's range plus a target column.

    Rows whose target evaluation violates an operator domain are resampled
    with bounded retries.  Optional Gaussian noise (std ``noise``) perturbs
    the target column.
    """
    for v in variables:
        if v.sample_range is None:
            raise DataError(f"variable {v.name!r} has no sample range")
    rng = np.random.default_rng(seed)
    names = [v.name for v in variables]
    cols = {}
    for v in variables:
        cols[v.name] = rng.uniform(v.sample_range[0], v.sample_range[1], size=n)
    if n:
        y = _eval_rows_with_resample(target, cols, variables, rng)
    else:
        y = np.zeros(0)
    if noise > 0 and n:
        y = y + rng.normal(0.0, noise, size=n)
    rows = np.column_stack([cols[c] for c in names] + [y]) if n else np.zeros((0, len(names) + 1))
    meta = {
        "seed": seed,
        "generator": f"sample_algebraic({target})",
        "noise": noise,
        "units": {v.name: str(v.dimension) for v in variables},
        "params": {},
    }
    return Dataset(columns=names + [target_name], rows=rows, meta=meta)


def _eval_rows_with_resample(target, cols, variables, rng, max_retries=100):
    try:
        return np.asarray(eval_expr(target, cols), dtype=float) * np.ones(len(next(iter(cols.values()))))
    except EvalError:
        pass
    # Salvage row by row: redraw offending rows a bounded number of times.
    n = len(next(iter(cols.values())))
    y = np.empty(n)
    for i in range(n):
        for attempt in range(max_retries + 1):
            point = {c: cols[c][i] for c in cols}
            try:
                y[i] = eval_expr(target, point)
                break
            except EvalError:
                if attempt == max_retries:
                    raise DataError(f"could not sample an admissible row (row {i})")
                for v in variables:
                    cols[v.name][i] = rng.uniform(*v.sample_range)
    return y


def rk4_integrate(sys: ODESystem, hidden=None, steps: int = 100) -> Dataset:
    """Classical fixed-step 4th-order Runge-Kutta on a uniform grid.

    ``hidden`` is a callable taking the values of ``sys.hidden_args`` and
    returning the hidden term's contribution; it must be supplied iff the
    system declares a placeholder.  Returns ``steps + 1`` rows of
    (t, states).
    """
    if steps < 1:
        raise DataError("need at least one step")
    if (sys.hidden_placeholder is not None) != (hidden is not None):
        raise DataError("hidden term must be supplied iff the system declares one")

    t0, t1 = sys.t_span
    h = (t1 - t0) / steps
    names = sys.state_names

    def rhs(t, state):
        bindings = dict(sys.parameters)
        bindings[sys.time_name] = t
        for name, val in zip(names, state):
            bindings[name] = val
        if hidden is not None:
            args = [bindings[a] for a in sys.hidden_args]
            bindings[sys.hidden_placeholder] = float(hidden(*args))
        return np.array([eval_expr(rhs_e, bindings) for rhs_e in sys.known_rhs])

    out = np.empty((steps + 1, 1 + len(names)))
    state = np.array(sys.initial_state, dtype=float)
    out[0] = [t0, *state]
    t = t0
    for i in range(1, steps + 1):
        k1 = rhs(t, state)
        k2 = rhs(t + h / 2, state + h / 2 * k1)
        k3 = rhs(t + h / 2, state + h / 2 * k2)
        k4 = rhs(t + h, state + h * k3)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + i * h
        if not np.all(np.isfinite(state)):
            raise DataError(f"non-finite state at step {i}")
        out[i] = [t, *state]
    meta = {
        "generator": f"rk4({', '.join(str(e) for e in sys.known_rhs)})",
        "params": dict(sys.parameters),
        "t_span": list(sys.t_span),
        "steps": steps,
    }
    return Dataset(columns=[sys.time_name] + list(names), rows=out, meta=meta)


def nondim_dataset(d: Dataset, plan: NondimPlan, params: dict[str, float] | None = None) -> Dataset:
    """Rename columns to their pi groups and map every row through the plan.

    Values for variables that do not vary per row (parameters) come from
    ``params`` or ``d.meta['params']``.  Groups built purely from parameters
    become scalars recorded in the output meta instead of columns.
    """
    params = dict(d.meta.get("params", {})) if params is None else dict(params)
    col_groups = []  # (column index, group)
    const_groups = {}
    for var, g in plan.variable_map:
        mono = g.as_monomial()
        used_cols = [n for n in mono if n in d.columns]
        missing = [n for n in mono if n not in d.columns and n not in params]
        if missing:
            raise DataError(f"no column or parameter for {missing[0]!r}")
        if var in d.columns:
            col_groups.append((var, g))
        elif not used_cols:
            const_groups[g.name] = mono_eval(mono, params)
    groups_by_var = dict(col_groups)
    new_cols = []
    new_data = []
    # Keep the input column order: mapped columns are renamed in place,
    # untouched columns (e.g. extra outputs) carried through.
    for i, c in enumerate(d.columns):
        g = groups_by_var.get(c)
        if g is None:
            new_cols.append(c)
            new_data.append(d.rows[:, i])
            continue
        vals = np.ones(len(d))
        for name, e in g.as_monomial().items():
            base = d.column(name) if name in d.columns else float(params[name])
            vals = vals * np.asarray(base, dtype=float) ** float(e)
        new_cols.append(g.name)
        new_data.append(vals)
    rows = np.column_stack(new_data) if new_data else np.zeros((len(d), 0))
    meta = dict(d.meta)
    meta["plan"] = {v: g.name for v, g in plan.variable_map}
    meta["pi_constants"] = const_groups
    return Dataset(columns=new_cols, rows=rows, meta=meta)


def csv_write(d: Dataset, path: str) -> None:
    """Write header + rows; floats at 17 significant digits (round-trip exact).

    Metadata goes to a sidecar JSON file with the same basename.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(d.columns) + "\n")
        for row in d.rows:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
    meta_path = _meta_path(path)
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(d.meta), fh, indent=2, ensure_ascii=False)


def csv_read(path: str) -> Dataset:
    """Read a dataset written by :func:`csv_write` (or any numeric CSV)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise DataError(f"{path}: empty file")
    columns = lines[0].split(",")
    rows = np.zeros((len(lines) - 1, len(columns)))
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise DataError(f"{path}: ragged row at line {i}")
        try:
            rows[i - 2] = [float(c) for c in cells]
        except ValueError as err:
            raise DataError(f"{path}: non-numeric cell at line {i}") from err
    meta = {}
    meta_path = _meta_path(path)
    if os.path.exists(meta_path):
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    return Dataset(columns=columns, rows=rows, meta=meta)


def _meta_path(path: str) -> str:
    base, _ = os.path.splitext(path)
    return base + ".meta.json"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj
