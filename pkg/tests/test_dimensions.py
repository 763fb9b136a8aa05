"""Exact dimensional algebra, matrix rank, and null space."""

import random
from fractions import Fraction

import pytest

from dimreg.dimensions import (
    BASE_DIMENSIONS,
    DIMENSIONLESS,
    Dimension,
    DimensionError,
    DimensionalMatrix,
    VariableSpec,
    build_matrix,
    dimension_combine,
    load_variables,
    null_space,
    parse_dimension,
    rank,
)

from oracles import in_rational_span, matvec, oracle_rank, random_fraction_matrix


def test_parse_and_str_round_trip():
    for text in ["M L^2 T^-2", "L T^-1", "M^-1 L^3 T^-2", "Θ", "N", ""]:
        d = parse_dimension(text)
        assert parse_dimension(str(d)) == d


def test_parse_rational_exponent():
    d = parse_dimension("L^1/2 T^-3/2")
    assert d.exponent("L") == Fraction(1, 2)
    assert d.exponent("T") == Fraction(-3, 2)


def test_parse_ascii_temperature_aliases():
    assert parse_dimension("Th") == parse_dimension("Θ")
    assert parse_dimension("Theta^-1") == parse_dimension("Θ^-1")
    with pytest.raises(DimensionError):
        parse_dimension("Th Θ")  # same dimension twice


def test_parse_errors():
    with pytest.raises(DimensionError):
        parse_dimension("Q")
    with pytest.raises(DimensionError):
        parse_dimension("L L")
    with pytest.raises(DimensionError):
        parse_dimension("L^x")
    with pytest.raises(DimensionError):
        parse_dimension("L^1/0")


def test_algebra():
    energy = parse_dimension("M L^2 T^-2")
    velocity = parse_dimension("L T^-1")
    assert energy * velocity == parse_dimension("M L^3 T^-3")
    assert velocity ** 2 == parse_dimension("L^2 T^-2")
    assert velocity ** Fraction(1, 2) == parse_dimension("L^1/2 T^-1/2")
    assert (energy * energy ** -1).is_dimensionless()
    assert dimension_combine(energy, velocity, -2) == parse_dimension("M T^0") * parse_dimension("M^0")
    assert dimension_combine(energy, velocity, -2) == parse_dimension("M")


def test_variable_spec_validation():
    with pytest.raises(DimensionError):
        VariableSpec("x", DIMENSIONLESS, role="mystery")
    with pytest.raises(DimensionError):
        VariableSpec("x", DIMENSIONLESS, sample_range=(2.0, 1.0))
    v = VariableSpec("x", parse_dimension("L"), "dependent", (0.0, 1.0))
    assert v.dimension.exponent("L") == 1


def test_load_variables_and_duplicates(tmp_path):
    doc = [
        {"name": "U", "dimension": "M L^2 T^-2", "role": "dependent"},
        {"name": "r", "dimension": "L", "range": [1, 2]},
    ]
    vs = load_variables(doc)
    assert [v.name for v in vs] == ["U", "r"]
    assert vs[1].sample_range == (1.0, 2.0)
    path = tmp_path / "vars.json"
    path.write_text('[{"name": "a"}, {"name": "a"}]')
    with pytest.raises(DimensionError):
        load_variables(str(path))


def test_build_matrix_drops_absent_dimensions():
    vs = [
        VariableSpec("F", parse_dimension("M L T^-2")),
        VariableSpec("r", parse_dimension("L")),
    ]
    m = build_matrix(vs)
    assert m.rows == ("M", "L", "T")
    assert m.columns == ("F", "r")
    assert m.entry("T", "F") == Fraction(-2)
    assert "F" in str(m) and "-2" in str(m)


def _matrix_from(entries):
    rows = tuple(f"d{i}" for i in range(len(entries)))
    cols = tuple(f"v{j}" for j in range(len(entries[0])))
    return DimensionalMatrix(rows=rows, columns=cols,
                             entries=tuple(tuple(r) for r in entries))


def test_rank_and_null_space_fuzz_200():
    rng = random.Random(1234)
    for trial in range(200):
        entries = random_fraction_matrix(rng)
        m = _matrix_from(entries)
        r = rank(m)
        assert r == oracle_rank(entries), f"trial {trial}"
        basis = null_space(m)
        assert len(basis) == len(entries[0]) - r, f"trial {trial}"
        for vec in basis:
            # Exactly in the kernel, integer-normalized, leading entry positive.
            assert all(x == 0 for x in matvec(entries, vec)), f"trial {trial}"
            assert all(x.denominator == 1 for x in vec)
            lead = next((x for x in vec if x != 0), None)
            assert lead is not None and lead > 0


def test_null_space_gravitational_example():
    vs = [
        VariableSpec("U", parse_dimension("M L^2 T^-2")),
        VariableSpec("G", parse_dimension("M^-1 L^3 T^-2")),
        VariableSpec("m1", parse_dimension("M")),
        VariableSpec("m2", parse_dimension("M")),
        VariableSpec("r1", parse_dimension("L")),
        VariableSpec("r2", parse_dimension("L")),
    ]
    m = build_matrix(vs)
    assert rank(m) == 3
    basis = null_space(m)
    assert len(basis) == 3
    # Known groups lie in the rational span of the basis.
    targets = {
        "U r2 / (G m1^2)": [1, -1, -2, 0, 0, 1],
        "m2 / m1": [0, 0, -1, 1, 0, 0],
        "r1 / r2": [0, 0, 0, 0, 1, -1],
    }
    for label, t in targets.items():
        assert in_rational_span(basis, [Fraction(x) for x in t]), label
