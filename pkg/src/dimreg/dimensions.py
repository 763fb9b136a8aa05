"""Exact dimensional algebra over the SI base dimensions.

Dimensions are vectors of rational exponents over the seven SI base
dimensions (mass, length, time, temperature, current, amount, luminosity).
All arithmetic uses ``fractions.Fraction``, so products, powers, matrix
ranks and null spaces are exact: a zero exponent is exactly zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

# Fixed label order: determines matrix row order deterministically.
BASE_DIMENSIONS = ("M", "L", "T", "Θ", "I", "N", "J")
_BASE_INDEX = {label: i for i, label in enumerate(BASE_DIMENSIONS)}
# ASCII spellings accepted on input (temperature).
_BASE_INDEX["Th"] = _BASE_INDEX["Θ"]
_BASE_INDEX["Theta"] = _BASE_INDEX["Θ"]

VARIABLE_ROLES = ("dependent", "known_arg", "hidden_arg", "shared")


class DimensionError(ValueError):
    """Malformed dimension text or inconsistent dimensional input."""


@dataclass(frozen=True)
class Dimension:
    """Rational exponent vector over the base dimensions, e.g. [M L^2 T^-2]."""

    exps: tuple[Fraction, ...] = (Fraction(0),) * 7

    def __post_init__(self):
        if len(self.exps) != len(BASE_DIMENSIONS):
            raise DimensionError("dimension needs one exponent per base dimension")

    @staticmethod
    def from_map(mapping: dict[str, Fraction | int | str]) -> "Dimension":
        exps = [Fraction(0)] * len(BASE_DIMENSIONS)
        for label, e in mapping.items():
            if label not in _BASE_INDEX:
                raise DimensionError(f"unknown base dimension {label!r}")
            exps[_BASE_INDEX[label]] = Fraction(e)
        return Dimension(tuple(exps))

    def exponent(self, label: str) -> Fraction:
        try:
            return self.exps[_BASE_INDEX[label]]
        except KeyError:
            raise DimensionError(f"unknown base dimension {label!r}") from None

    def is_dimensionless(self) -> bool:
        return all(e == 0 for e in self.exps)

    def __mul__(self, other: "Dimension") -> "Dimension":
        return Dimension(tuple(a + b for a, b in zip(self.exps, other.exps)))

    def __pow__(self, p) -> "Dimension":
        p = Fraction(p)
        return Dimension(tuple(e * p for e in self.exps))

    def __str__(self) -> str:
        parts = []
        for label, e in zip(BASE_DIMENSIONS, self.exps):
            if e == 0:
                continue
            parts.append(label if e == 1 else f"{label}^{e}")
        return " ".join(parts)


DIMENSIONLESS = Dimension()


def parse_dimension(text: str) -> Dimension:
    """Parse whitespace-separated factors ``<label>`` or ``<label>^<rational>``.

    The empty string is the dimensionless value.  Raises
    :class:`DimensionError` for unknown labels, malformed exponents, or a
    label that appears twice.
    """
    exps = [Fraction(0)] * len(BASE_DIMENSIONS)
    seen: set[int] = set()
    for factor in text.split():
        label, sep, exp_text = factor.partition("^")
        if label not in _BASE_INDEX:
            raise DimensionError(f"unknown base dimension {label!r} in {text!r}")
        if _BASE_INDEX[label] in seen:
            raise DimensionError(f"repeated base dimension {label!r} in {text!r}")
        seen.add(_BASE_INDEX[label])
        if sep:
            try:
                exp = Fraction(exp_text)
            except (ValueError, ZeroDivisionError) as err:
                raise DimensionError(f"malformed exponent {exp_text!r} in {text!r}") from err
        else:
            exp = Fraction(1)
        exps[_BASE_INDEX[label]] = exp
    return Dimension(tuple(exps))


def dimension_combine(a: Dimension, b: Dimension, p=1) -> Dimension:
    """Return ``a * b**p`` with exact exponent arithmetic."""
    return a * (b ** Fraction(p))


@dataclass(frozen=True)
class VariableSpec:
    """A named physical variable with its dimension and pipeline role."""

    name: str
    dimension: Dimension = DIMENSIONLESS
    role: str = "known_arg"
    sample_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.role not in VARIABLE_ROLES:
            raise DimensionError(f"unknown role {self.role!r} for variable {self.name!r}")
        if self.sample_range is not None:
            lo, hi = self.sample_range
            if not lo < hi:
                raise DimensionError(f"empty sample range for variable {self.name!r}")


def load_variables(source) -> list[VariableSpec]:
    """Load a variable set from a JSON document (path, file object, or list).

    Expected form: ``[{"name": ..., "dimension": "M L^2", "role": ...,
    "range": [lo, hi]}, ...]`` with ``role`` and ``range`` optional.
    """
    if isinstance(source, (str, bytes)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        doc = source
    out = []
    for entry in doc:
        rng = entry.get("range")
        out.append(
            VariableSpec(
                name=entry["name"],
                dimension=parse_dimension(entry.get("dimension", "")),
                role=entry.get("role", "known_arg"),
                sample_range=tuple(rng) if rng is not None else None,
            )
        )
    names = [v.name for v in out]
    if len(set(names)) != len(names):
        raise DimensionError("duplicate variable names in variable set")
    return out


@dataclass(frozen=True)
class DimensionalMatrix:
    """Exponent matrix: rows are base dimensions present, columns variables."""

    rows: tuple[str, ...]
    columns: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]  # shape (len(rows), len(columns))

    def entry(self, label: str, var: str) -> Fraction:
        return self.entries[self.rows.index(label)][self.columns.index(var)]

    def __str__(self) -> str:
        width = max([len(c) for c in self.columns] + [4])
        head = " " * 4 + " ".join(f"{c:>{width}}" for c in self.columns)
        lines = [head]
        for label, row in zip(self.rows, self.entries):
            lines.append(f"{label:>3} " + " ".join(f"{str(e):>{width}}" for e in row))
        return "\n".join(lines)


def build_matrix(variables: Sequence[VariableSpec]) -> DimensionalMatrix:
    """Dimensional matrix of a variable set.

    Base dimensions absent from every variable are dropped rather than kept
    as zero rows; rank and null space are unaffected.
    """
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise DimensionError("duplicate variable names")
    rows = [
        label
        for i, label in enumerate(BASE_DIMENSIONS)
        if any(v.dimension.exps[i] != 0 for v in variables)
    ]
    entries = tuple(
        tuple(v.dimension.exps[_BASE_INDEX[label]] for v in variables) for label in rows
    )
    return DimensionalMatrix(rows=tuple(rows), columns=tuple(names), entries=entries)


def _rref(entries: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form with leftmost pivot selection.

    Returns the reduced matrix and the pivot column indices.
    """
    m = [row[:] for row in entries]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def rank(matrix: DimensionalMatrix) -> int:
    """Rank by exact rational Gaussian elimination."""
    if not matrix.rows or not matrix.columns:
        return 0
    _, pivots = _rref([list(row) for row in matrix.entries])
    return len(pivots)


def null_space(matrix: DimensionalMatrix) -> list[tuple[Fraction, ...]]:
    """Integer-scaled basis of the right null space.

    Returns exactly ``columns - rank`` vectors.  Non-pivot columns (the
    rightmost ones under leftmost pivot selection) are the free variables;
    each basis vector sets one free variable to 1.  Vectors are scaled to
    smallest integer entries with a positive leading nonzero entry.
    """
    n_cols = len(matrix.columns)
    if not matrix.rows:
        return [
            tuple(Fraction(1) if j == i else Fraction(0) for j in range(n_cols))
            for i in range(n_cols)
        ]
    reduced, pivots = _rref([list(row) for row in matrix.entries])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n_cols
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -reduced[r][f]
        basis.append(_normalize_integer(vec))
    return basis


def _normalize_integer(vec: list[Fraction]) -> tuple[Fraction, ...]:
    """Clear denominators to smallest integers; leading nonzero entry positive."""
    denoms = [x.denominator for x in vec if x != 0]
    if not denoms:
        return tuple(vec)
    lcm = math.lcm(*denoms)
    scaled = [x * lcm for x in vec]
    g = math.gcd(*(abs(x.numerator) for x in scaled))
    if g > 1:
        scaled = [x / g for x in scaled]
    leading = next(x for x in scaled if x != 0)
    if leading < 0:
        scaled = [-x for x in scaled]
    return tuple(scaled)
