"""Buckingham pi groups and Ipsen nondimensionalization plans.

A pi group is a dimensionless monomial over problem variables.  An Ipsen
plan is an ordered sequence of elimination steps, each removing one base
dimension from every variable by rescaling with powers of a chosen scale
variable.  Scales are drawn from the hidden term's arguments first so the
hidden function ends up with as few dimensionless inputs as possible.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .dimensions import (
    BASE_DIMENSIONS,
    DIMENSIONLESS,
    Dimension,
    DimensionError,
    VariableSpec,
    build_matrix,
    null_space,
)
from .expr import Binary, Const, Expr, PowInt, Unary, Var, simplify, substitute


class NondimError(ValueError):
    """Nondimensionalization impossible or plan misuse."""


Monomial = dict[str, Fraction]  # variable name -> rational exponent


def mono_mul(a: Monomial, b: Monomial, p: Fraction = Fraction(1)) -> Monomial:
    out = dict(a)
    for k, e in b.items():
        out[k] = out.get(k, Fraction(0)) + e * p
        if out[k] == 0:
            del out[k]
    return out


def mono_dimension(mono: Monomial, dims: dict[str, Dimension]) -> Dimension:
    d = DIMENSIONLESS
    for name, e in mono.items():
        if name not in dims:
            raise NondimError(f"unknown variable {name!r} in monomial")
        d = d * dims[name] ** e
    return d


def mono_str(mono: Monomial, order: list[str] | None = None) -> str:
    """Textbook-style monomial rendering, e.g. ``U r2 / (G m1^2)``."""
    if not mono:
        return "1"
    names = order if order is not None else sorted(mono)
    num, den = [], []
    for name in names:
        e = mono.get(name, Fraction(0))
        if e == 0:
            continue
        target = num if e > 0 else den
        mag = abs(e)
        target.append(name if mag == 1 else f"{name}^{mag}")
    num_s = " ".join(num) if num else "1"
    if not den:
        return num_s
    den_s = " ".join(den)
    if len(den) > 1 or "^" in den_s:
        den_s = f"({den_s})"
    return f"{num_s} / {den_s}"


def mono_expr(mono: Monomial) -> Expr:
    """Monomial as an expression tree; half-integer exponents use sqrt."""
    factors: list[Expr] = []
    for name in sorted(mono):
        e = mono[name]
        if e.denominator == 1:
            p = int(e)
            factors.append(Var(name) if p == 1 else PowInt(Var(name), p))
        elif (2 * e).denominator == 1:
            factors.append(Unary("sqrt", PowInt(Var(name), int(2 * e))))
        else:
            raise NondimError(f"cannot express exponent {e} of {name!r} as a tree")
    if not factors:
        return Const(1.0)
    out = factors[0]
    for f in factors[1:]:
        out = Binary("mul", out, f)
    return out


def mono_eval(mono: Monomial, row: dict[str, float]) -> float:
    val = 1.0
    for name, e in mono.items():
        if name not in row:
            raise NondimError(f"row does not bind variable {name!r}")
        x = row[name]
        if e.denominator != 1:
            if x < 0:
                raise NondimError(f"negative value of {name!r} raised to fractional power")
            if x == 0 and e < 0:
                raise NondimError(f"zero value of {name!r} raised to negative power")
            val *= float(x) ** float(e)
        else:
            if x == 0 and e < 0:
                raise NondimError(f"zero value of {name!r} raised to negative power")
            val *= float(x) ** int(e)
    return val


@dataclass(frozen=True)
class PiGroup:
    """A dimensionless monomial over problem variables."""

    name: str
    exponents: tuple[tuple[str, Fraction], ...]  # nonzero entries, fixed order

    @staticmethod
    def from_monomial(name: str, mono: Monomial, order: list[str] | None = None) -> "PiGroup":
        names = order if order is not None else sorted(mono)
        items = tuple((n, mono[n]) for n in names if mono.get(n, Fraction(0)) != 0)
        return PiGroup(name=name, exponents=items)

    def as_monomial(self) -> Monomial:
        return {n: e for n, e in self.exponents}

    def __str__(self) -> str:
        return mono_str(self.as_monomial(), [n for n, _ in self.exponents])


@dataclass(frozen=True)
class EliminationStep:
    scale_variable: str  # printable monomial form of the scale at use time
    scale_monomial: tuple[tuple[str, Fraction], ...]
    eliminated_dimension: str
    rescale_map: tuple[tuple[str, Fraction], ...]  # variable -> power of scale applied


@dataclass(frozen=True)
class NondimPlan:
    steps: tuple[EliminationStep, ...]
    variable_map: tuple[tuple[str, PiGroup], ...]  # original var -> group it becomes
    dependent: str
    time: str | None
    dependent_scale: tuple[tuple[str, Fraction], ...]  # u = scale * pi_u
    time_scale: tuple[tuple[str, Fraction], ...]  # t = scale * pi_t
    hidden_args: tuple[str, ...]  # group names feeding the hidden term

    def groups(self) -> dict[str, PiGroup]:
        return dict(self.variable_map)

    def group_of(self, var: str) -> PiGroup:
        for name, g in self.variable_map:
            if name == var:
                return g
        raise NondimError(f"variable {var!r} has no group in plan")


def derive_pi_groups(variables: list[VariableSpec]) -> list[PiGroup]:
    """Pi groups from the null space of the dimensional matrix.

    Returns exactly ``n - rank`` groups, each dimensionless by construction
    (verified).  A fully dimensionless set yields one group per variable.
    """
    if not variables:
        raise NondimError("need at least one variable")
    matrix = build_matrix(variables)
    basis = null_space(matrix)
    order = [v.name for v in variables]
    groups = []
    for i, vec in enumerate(basis):
        mono = {name: e for name, e in zip(order, vec) if e != 0}
        group = PiGroup.from_monomial(f"pi{i + 1}", mono, order)
        if not verify_dimensionless(group, variables):
            raise NondimError(f"internal error: group {group} is not dimensionless")
        groups.append(group)
    return groups


def verify_dimensionless(group: PiGroup, variables: list[VariableSpec]) -> bool:
    """True iff the combined dimension of the group is exactly zero."""
    dims = {v.name: v.dimension for v in variables}
    return mono_dimension(group.as_monomial(), dims).is_dimensionless()


def ipsen_plan(variables: list[VariableSpec], time_var: str = "t") -> NondimPlan:
    """Plan eliminations that minimize the hidden term's argument count.

    Hidden-side parameters (roles ``hidden_arg`` and ``shared``) are used as
    scales first; remaining base dimensions are finished with ``known_arg``
    scales.  All hidden-first orderings are tried when there are at most six
    hidden parameters; among plans with the fewest hidden arguments, plans
    whose groups have integer exponents are preferred, then input order.
    The dependent variable and the independent (time) variable are never
    used as scales.
    """
    names = [v.name for v in variables]
    by_name = {v.name: v for v in variables}
    dependents = [v.name for v in variables if v.role == "dependent"]
    if len(dependents) != 1:
        raise NondimError("need exactly one dependent variable")
    dependent = dependents[0]
    time = time_var if time_var in by_name else None

    hidden_params = [
        v.name
        for v in variables
        if v.role in ("hidden_arg", "shared") and v.name not in (dependent, time)
    ]
    known_params = [
        v.name
        for v in variables
        if v.role == "known_arg" and v.name not in (dependent, time)
    ]

    if len(hidden_params) <= 6:
        orderings = list(itertools.permutations(hidden_params))
    else:
        orderings = [tuple(hidden_params)]
    if not orderings:
        orderings = [()]

    best = None
    for idx, perm in enumerate(orderings):
        try:
            plan = _simulate(variables, names, by_name, dependent, time,
                             list(perm), known_params)
        except NondimError:
            continue
        fractional = any(
            e.denominator != 1
            for _, g in plan.variable_map
            for _, e in g.exponents
        )
        key = (len(plan.hidden_args), fractional, idx)
        if best is None or key < best[0]:
            best = (key, plan)
    if best is None:
        raise NondimError("no elimination ordering nondimensionalizes this variable set")
    return best[1]


def _simulate(variables, names, by_name, dependent, time, hidden_order, known_params):
    dims = {v.name: v.dimension for v in variables}
    current: dict[str, Monomial] = {n: {n: Fraction(1)} for n in names}
    consumed: set[str] = set()
    steps: list[EliminationStep] = []

    def cur_dim(name: str) -> Dimension:
        return mono_dimension(current[name], dims)

    def eliminate(scale: str, label: str) -> None:
        p = cur_dim(scale).exponent(label)
        if p == 0:
            raise NondimError(f"scale {scale!r} does not carry dimension {label}")
        smono = dict(current[scale])
        rescale = []
        for v in names:
            if v == scale or v in consumed:
                continue
            e = cur_dim(v).exponent(label)
            if e != 0:
                q = -e / p
                current[v] = mono_mul(current[v], smono, q)
                rescale.append((v, q))
        consumed.add(scale)
        steps.append(
            EliminationStep(
                scale_variable=mono_str(smono, names),
                scale_monomial=tuple((n, smono[n]) for n in names if n in smono),
                eliminated_dimension=label,
                rescale_map=tuple(rescale),
            )
        )

    def first_dim(name: str) -> str | None:
        d = cur_dim(name)
        for label in BASE_DIMENSIONS:
            if d.exponent(label) != 0:
                return label
        return None

    # Phase 1: consume hidden-side scales while they are dimensional.
    for scale in hidden_order:
        if scale in consumed:
            continue
        label = first_dim(scale)
        if label is None:
            continue
        eliminate(scale, label)

    # Phase 2: finish remaining dimensions with known-side scales.
    while True:
        label = None
        for v in names:
            if v in consumed:
                continue
            label = first_dim(v)
            if label is not None:
                break
        if label is None:
            break
        scale = next(
            (k for k in known_params
             if k not in consumed and cur_dim(k).exponent(label) != 0),
            None,
        )
        if scale is None:
            raise NondimError(f"dimension {label} is not spanned by any usable scale")
        eliminate(scale, label)

    variable_map = []
    for v in names:
        if v in consumed:
            continue
        group = PiGroup.from_monomial(f"pi_{v}", current[v], names)
        variable_map.append((v, group))

    hidden_args = tuple(
        f"pi_{v}"
        for v in names
        if v not in consumed
        and (by_name[v].role in ("hidden_arg", "shared") or v == dependent)
        and not by_name[v].dimension.is_dimensionless()
    )

    def scale_of(var: str | None) -> tuple[tuple[str, Fraction], ...]:
        if var is None or var in consumed:
            return ()
        mono = dict(current[var])
        if mono.get(var) != Fraction(1):
            raise NondimError(f"group of {var!r} is not linear in {var!r}")
        del mono[var]
        return tuple((n, -e) for n, e in mono.items())

    return NondimPlan(
        steps=tuple(steps),
        variable_map=tuple(variable_map),
        dependent=dependent,
        time=time,
        dependent_scale=scale_of(dependent),
        time_scale=scale_of(time),
        hidden_args=hidden_args,
    )


def nondim_transform(plan: NondimPlan, row: dict[str, float]) -> dict[str, float]:
    """Evaluate each group monomial numerically on a row of variable values."""
    return {g.name: mono_eval(g.as_monomial(), row) for _, g in plan.variable_map}


def dimensional_transform(
    plan: NondimPlan, pi_row: dict[str, float], params: dict[str, float]
) -> dict[str, float]:
    """Invert :func:`nondim_transform` given the (consumed) parameter values."""
    out = {}
    for var, g in plan.variable_map:
        mono = g.as_monomial()
        if mono.get(var) != Fraction(1):
            raise NondimError(f"group of {var!r} is not invertible for {var!r}")
        rest = {k: e for k, e in mono.items() if k != var}
        out[var] = pi_row[g.name] / mono_eval(rest, params)
    return out


def redimensionalize(e: Expr, plan: NondimPlan) -> Expr:
    """Map a hidden-term expression over pi variables back to original variables.

    Substitutes each group by its monomial and multiplies by the chain-rule
    factor (dependent scale over time scale), so the result is the hidden
    term of the original first-order equation.
    """
    mapping = {g.name: mono_expr(g.as_monomial()) for _, g in plan.variable_map}
    substituted = substitute(e, mapping)
    factor_mono = mono_mul(dict(plan.dependent_scale), dict(plan.time_scale), Fraction(-1))
    if not factor_mono:
        return simplify(substituted)
    return simplify(Binary("mul", mono_expr(factor_mono), substituted))


def plan_to_json(plan: NondimPlan) -> str:
    doc = {
        "steps": [
            {
                "scale_variable": s.scale_variable,
                "scale_monomial": {n: str(e) for n, e in s.scale_monomial},
                "eliminated_dimension": s.eliminated_dimension,
                "rescale_map": {n: str(e) for n, e in s.rescale_map},
            }
            for s in plan.steps
        ],
        "variable_map": {
            v: {"name": g.name, "exponents": {n: str(e) for n, e in g.exponents}}
            for v, g in plan.variable_map
        },
        "dependent": plan.dependent,
        "time": plan.time,
        "dependent_scale": {n: str(e) for n, e in plan.dependent_scale},
        "time_scale": {n: str(e) for n, e in plan.time_scale},
        "hidden_args": list(plan.hidden_args),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False)


def plan_from_json(text: str) -> NondimPlan:
    doc = json.loads(text)

    def fracs(d):
        return tuple((n, Fraction(e)) for n, e in d.items())

    return NondimPlan(
        steps=tuple(
            EliminationStep(
                scale_variable=s["scale_variable"],
                scale_monomial=fracs(s["scale_monomial"]),
                eliminated_dimension=s["eliminated_dimension"],
                rescale_map=fracs(s["rescale_map"]),
            )
            for s in doc["steps"]
        ),
        variable_map=tuple(
            (v, PiGroup(name=g["name"], exponents=fracs(g["exponents"])))
            for v, g in doc["variable_map"].items()
        ),
        dependent=doc["dependent"],
        time=doc["time"],
        dependent_scale=fracs(doc["dependent_scale"]),
        time_scale=fracs(doc["time_scale"]),
        hidden_args=tuple(doc["hidden_args"]),
    )
