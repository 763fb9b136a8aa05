"""Independent oracles shared by the unit and acceptance suites.

Everything here is implemented from scratch against the mathematical
definition, never by calling the code under test, so agreement is evidence
rather than tautology.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np


def oracle_rank(entries: list[list[Fraction]]) -> int:
    """Rank by brute force: largest r with an r x r submatrix of nonzero det."""
    n_rows = len(entries)
    n_cols = len(entries[0]) if n_rows else 0
    for r in range(min(n_rows, n_cols), 0, -1):
        for rows in itertools.combinations(range(n_rows), r):
            for cols in itertools.combinations(range(n_cols), r):
                sub = [[entries[i][j] for j in cols] for i in rows]
                if _det(sub) != 0:
                    return r
    return 0


def _det(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        sign = Fraction(-1) ** j
        total += sign * m[0][j] * _det(minor)
    return total


def random_fraction_matrix(rng: random.Random, max_rows=4, max_cols=6):
    rows = rng.randint(1, max_rows)
    cols = rng.randint(1, max_cols)
    return [
        [Fraction(rng.randint(-3, 3), rng.choice([1, 2, 3])) for _ in range(cols)]
        for _ in range(rows)
    ]


def matvec(entries: list[list[Fraction]], vec) -> list[Fraction]:
    return [sum(a * b for a, b in zip(row, vec)) for row in entries]


def in_rational_span(basis: list[tuple[Fraction, ...]], target: list[Fraction]) -> bool:
    """Exact membership test: solve sum_i c_i basis_i = target over Q."""
    if not basis:
        return all(x == 0 for x in target)
    n = len(target)
    # Augmented system with unknowns c_i: columns are basis vectors.
    aug = [[basis[j][i] for j in range(len(basis))] + [target[i]] for i in range(n)]
    r = 0
    for c in range(len(basis)):
        piv = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        r += 1
    # Consistent iff no row reduces to [0 ... 0 | nonzero].
    return all(row[-1] == 0 for row in aug[r:])


def count_trees(n_leaves: int, n_unary: int, n_binary: int, max_c: int) -> dict[int, int]:
    """Tree counts per complexity for an unrestricted grammar (no dedup).

    Leaves cost 1, unary ops 2, binary ops 2.  Used against the untyped
    enumerator with commutativity disabled (only non-commutative ops).
    """
    counts = {c: 0 for c in range(1, max_c + 1)}
    if max_c >= 1:
        counts[1] = n_leaves
    for c in range(2, max_c + 1):
        total = 0
        if c - 2 >= 1:
            total += n_unary * counts[c - 2]
        for cl in range(1, c - 2):
            cr = c - 2 - cl
            if cr >= 1:
                total += n_binary * counts[cl] * counts[cr]
        counts[c] = total
    return counts


def rk4_observed_order(integrate, exact, steps_coarse=40) -> float:
    """Observed convergence order from errors at N and 2N steps."""
    e1 = integrate(steps_coarse)
    e2 = integrate(2 * steps_coarse)
    err1 = abs(e1 - exact)
    err2 = abs(e2 - exact)
    return float(np.log2(err1 / err2))


def central_difference(f, x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2 * h)


def pareto_is_valid(front) -> bool:
    """Strictly increasing complexity, strictly decreasing error."""
    for a, b in zip(front, front[1:]):
        if not (a.complexity < b.complexity and b.error < a.error):
            return False
    return True
