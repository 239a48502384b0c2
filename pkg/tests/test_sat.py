"""CDCL solver: answers vs brute force, incrementality, clause retention."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from semiform.sat import (Cnf, Solver, export_dimacs, import_dimacs, solve)

import oracles


def _random_clauses(rng, num_vars, n_clauses, max_len=4):
    out = []
    for _ in range(n_clauses):
        k = rng.randrange(1, max_len + 1)
        vs = rng.sample(range(1, num_vars + 1), min(k, num_vars))
        out.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return out


def _check_model(s: Solver, clauses):
    for c in clauses:
        assert any(s.model_value(l) for l in c), f"clause {c} unsatisfied"


def test_trivial():
    s = Solver()
    s.ensure_vars(2)
    assert s.add_clause([1])
    assert s.add_clause([-1, 2])
    assert s.solve() == "sat"
    assert s.model_value(1) and s.model_value(2)
    # contradicting the root-level trail reports unsat straight away
    assert not s.add_clause([-2])
    assert s.solve() == "unsat"


def test_empty_clause_unsat():
    s = Solver()
    assert not s.add_clause([])
    assert s.solve() == "unsat"


def test_random_cnfs_match_brute_force():
    rng = random.Random(5)
    for trial in range(300):
        nv = rng.randrange(1, 11)
        clauses = _random_clauses(rng, nv, rng.randrange(1, 30))
        s = Solver()
        s.ensure_vars(nv)
        ok = True
        for c in clauses:
            ok = s.add_clause(list(c)) and ok
        got = s.solve() if ok else "unsat"
        want = oracles.brute_force_sat(nv, clauses)
        assert got == ("sat" if want else "unsat"), (trial, clauses)
        if got == "sat":
            _check_model(s, clauses)


def test_incremental_segments_match_brute_force():
    # interleave add_clause and solve; earlier answers must stay sound as
    # the clause set grows and learnt clauses/restarts accumulate
    rng = random.Random(9)
    for trial in range(60):
        nv = rng.randrange(2, 11)
        s = Solver()
        s.ensure_vars(nv)
        so_far = []
        ok = True
        for seg in range(rng.randrange(2, 5)):
            fresh = _random_clauses(rng, nv, rng.randrange(1, 12))
            so_far.extend(fresh)
            for c in fresh:
                ok = s.add_clause(list(c)) and ok
            got = s.solve() if ok else "unsat"
            want = oracles.brute_force_sat(nv, so_far)
            assert got == ("sat" if want else "unsat"), (trial, seg, so_far)
            if got == "sat":
                _check_model(s, so_far)
            if got == "unsat":
                break


def test_assumptions_match_brute_force():
    rng = random.Random(13)
    for trial in range(80):
        nv = rng.randrange(2, 10)
        clauses = _random_clauses(rng, nv, rng.randrange(1, 20))
        s = Solver()
        s.ensure_vars(nv)
        ok = True
        for c in clauses:
            ok = s.add_clause(list(c)) and ok
        for _ in range(3):
            n_a = rng.randrange(0, 3)
            vs = rng.sample(range(1, nv + 1), min(n_a, nv))
            assume = [v if rng.random() < 0.5 else -v for v in vs]
            if not ok:
                got = "unsat"
            else:
                got = s.solve(assumptions=assume)
            want = oracles.brute_force_sat(
                nv, clauses + [(a,) for a in assume])
            assert got == ("sat" if want else "unsat"), (trial, assume)
            if got == "sat":
                _check_model(s, clauses + [(a,) for a in assume])


def test_unsat_under_assumption_recovers():
    s = Solver()
    s.ensure_vars(3)
    s.add_clause([1, 2])
    s.add_clause([-1, 3])
    assert s.solve(assumptions=[-2, -3]) == "unsat"  # forces 1 and -3 clash
    assert s.solve() == "sat"
    assert s.solve(assumptions=[-2]) == "sat"
    assert s.model_value(1) and s.model_value(3)


def test_originals_added_after_learning_are_never_deleted():
    # clauses added between solve calls must not be classified as learnt
    # (deletable); regression for incremental soundness
    s = Solver()
    s.ensure_vars(4)
    s.add_clause([1, 2])
    s.add_clause([1, -2])
    s.add_clause([-1, 3])
    s.add_clause([-1, -3, 4])
    assert s.solve(assumptions=[-4]) == "unsat"  # produces learnt clauses
    n_before = len(s.clauses)
    s.add_clause([2, 3, 4])  # original, lands above any learnt index
    assert n_before not in s.cla_act  # not registered as deletable
    s._bump_clause(n_before)
    assert n_before not in s.cla_act
    assert all(ci < n_before for ci in s.cla_act)


def test_luby_restart_sequence_shape():
    from semiform.sat import _luby
    assert [_luby(i) for i in range(15)] == \
        [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_deadline_timeout():
    rng = random.Random(1)
    # a hard random 3-sat instance near the phase transition
    nv = 140
    clauses = []
    for _ in range(int(nv * 4.26)):
        vs = rng.sample(range(1, nv + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    out = solve(Cnf(nv, tuple(clauses)), budget=0.0)
    assert out.status == "TIMEOUT"
    assert out.model is None


def test_solve_wrapper_and_outcome():
    out = solve(Cnf(2, ((1,), (-1, 2))))
    assert out.status == "SAT" and out.model == {1: True, 2: True}
    out = solve(Cnf(2, ((1,), (-1, 2))), assumptions=(-2,))
    assert out.status == "UNSAT"
    with pytest.raises(ValueError):
        Cnf(1, ((2,),))


def test_dimacs_round_trip():
    cnf = Cnf(3, ((1, -2), (2, 3), (-1, -3)))
    text = export_dimacs(cnf)
    assert text.startswith("p cnf 3 3")
    again = import_dimacs(text)
    assert again == cnf


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.data())
def test_hypothesis_random_instances(nv, data):
    clauses = data.draw(st.lists(
        st.lists(st.integers(-nv, nv).filter(lambda x: x != 0),
                 min_size=1, max_size=4).map(tuple),
        min_size=1, max_size=20))
    s = Solver()
    s.ensure_vars(nv)
    ok = True
    for c in clauses:
        ok = s.add_clause(list(c)) and ok
    got = s.solve() if ok else "unsat"
    want = oracles.brute_force_sat(nv, clauses)
    assert got == ("sat" if want else "unsat")
    if got == "sat":
        _check_model(s, clauses)
