import numpy as np
import pytest

from posiplant.exceptions import ContractError, DimensionError, SizeCapError
from posiplant.model import Literal as L
from posiplant.model import Posiform
from posiplant.twosat import (
    Clause,
    TwoSatFormula,
    brute_force_count,
    from_dimacs,
    is_uniquely_satisfiable,
    posiform_to_twosat,
    solve,
    to_dimacs,
)

# (~x1 v ~x2)(x0 v ~x1)(x0 v ~x2)(x0 v x1)(~x1 v x2)(~x0 v x2)
EXAMPLE = TwoSatFormula(3, (
    Clause(L(1, True), L(2, True)),
    Clause(L(0), L(1, True)),
    Clause(L(0), L(2, True)),
    Clause(L(0), L(1)),
    Clause(L(1, True), L(2)),
    Clause(L(0, True), L(2)),
))


def random_formula(rng, n, m):
    clauses = []
    for _ in range(m):
        i, j = rng.integers(0, n, size=2)
        clauses.append(Clause(L(int(i), bool(rng.integers(2))), L(int(j), bool(rng.integers(2)))))
    return TwoSatFormula(n, tuple(clauses))


def test_worked_example_unique():
    assert solve(EXAMPLE) == (1, 0, 1)
    assert is_uniquely_satisfiable(EXAMPLE, (1, 0, 1))
    assert is_uniquely_satisfiable(EXAMPLE, (1, 0, 1), method="forcing")
    assert brute_force_count(EXAMPLE) == (1, [(1, 0, 1)])


def test_empty_formula():
    f = TwoSatFormula(3)
    assert solve(f) == (0, 0, 0)
    assert not is_uniquely_satisfiable(f, (0, 0, 0))
    assert brute_force_count(f)[0] == 8


def test_unsat():
    f = TwoSatFormula(1, (Clause(L(0), L(0)), Clause(L(0, True), L(0, True))))
    assert solve(f) is None
    g = TwoSatFormula(2, (Clause(L(0), L(1)), Clause(L(0), L(1, True)),
                          Clause(L(0, True), L(1)), Clause(L(0, True), L(1, True))))
    assert solve(g) is None
    assert brute_force_count(g)[0] == 0


def test_witness_must_satisfy():
    with pytest.raises(ContractError):
        is_uniquely_satisfiable(EXAMPLE, (0, 0, 0))


def test_variable_range_checked():
    with pytest.raises(DimensionError):
        TwoSatFormula(2, (Clause(L(0), L(2)),))


def test_count_cap():
    with pytest.raises(SizeCapError):
        brute_force_count(TwoSatFormula(30))


def test_against_enumeration(rng):
    for _ in range(400):
        n = int(rng.integers(1, 9))
        f = random_formula(rng, n, int(rng.integers(0, 25)))
        count, sols = brute_force_count(f)
        x = solve(f)
        if count == 0:
            assert x is None
            continue
        assert f.satisfied_by(x)
        for method in ("backbone", "forcing"):
            assert is_uniquely_satisfiable(f, x, method) == (count == 1)


def test_posiform_zeros_are_models(rng):
    p = Posiform.from_terms(3, [(L(1), 1)], [((L(0, True), L(2)), 2)])
    f = posiform_to_twosat(p)
    count, sols = brute_force_count(f)
    zeros = [x for x in np.ndindex(2, 2, 2) if p.value(x) == 0]
    assert sols == [tuple(z) for z in zeros] and count == 3


def test_dimacs_roundtrip():
    f = EXAMPLE.and_([Clause(L(2), L(2))])
    text = to_dimacs(f)
    assert text.splitlines()[0] == "p cnf 3 7"
    assert text.splitlines()[-1] == "3 0"
    assert from_dimacs(text) == f


def test_dimacs_rejects_long_clauses():
    with pytest.raises(ContractError):
        from_dimacs("p cnf 3 1\n1 2 3 0\n")
