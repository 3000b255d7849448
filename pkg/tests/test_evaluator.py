"""Lazy evaluation: short-circuiting, choices, witnesses, counters, deadlines."""

import pytest
from hypothesis import given, settings, strategies as st

from fdl.core import (
    Add, And, Atom, Choose, Exists, FalseF, Forall, FuncDecl, Iff, Implies,
    Ite, Lit, Mul, Not, Or, TrueF, Var, nat, resolve_model,
)
from fdl.evaluator import EvalTimeout, Evaluator, EvalStats, Verdict, check_validity
from fdl.parser import parse_model

from conftest import CHOOSE_SRC


def _lt(a, b):
    return Atom('<', a, b)


def _status(goal, funcs=None, mode='nondeterministic'):
    v, _ = check_validity(goal, funcs, mode)
    return v.status


# -- ground semantics -------------------------------------------------------------


def test_connective_truth_tables():
    ev = Evaluator()
    t, f = TrueF(), FalseF()
    assert ev.eval_formula(And(t, f), {}) is False
    assert ev.eval_formula(Or(f, t), {}) is True
    assert ev.eval_formula(Implies(f, f), {}) is True
    assert ev.eval_formula(Iff(f, f), {}) is True
    assert ev.eval_formula(Not(f), {}) is True


def test_arithmetic_is_total_over_widened_bounds():
    ev = Evaluator()
    t = Add(Mul(Lit(3), Lit(3)), Lit(3))
    assert ev.eval_term(t, {}) == 12
    ite = Ite(_lt(Lit(1), Lit(0)), Lit(0), Lit(7))
    assert ev.eval_term(ite, {}) == 7


def test_quantifiers_over_small_domains():
    assert _status(Forall('x', nat(3), Atom('<=', Var('x'), Lit(3)))) == 'valid'
    assert _status(Exists('x', nat(3), Atom('=', Var('x'), Lit(3)))) == 'valid'
    assert _status(Exists('x', nat(3), _lt(Var('x'), Lit(0)))) == 'invalid'
    assert _status(Forall('b', nat(0), Atom('=', Var('b'), Lit(0)))) == 'valid'


@given(st.integers(0, 3), st.integers(0, 3))
def test_atom_relations_match_python(a, b):
    ev = Evaluator()
    assert ev.eval_formula(_lt(Lit(a), Lit(b)), {}) == (a < b)
    assert ev.eval_formula(Atom('<=', Lit(a), Lit(b)), {}) == (a <= b)
    assert ev.eval_formula(Atom('=', Lit(a), Lit(b)), {}) == (a == b)


# -- short-circuiting and counters --------------------------------------------------


def test_exists_stops_at_first_witness():
    goal = Exists('x', nat(7), Atom('=', Var('x'), Lit(2)))
    v, stats = check_validity(goal)
    assert v.status == 'valid'
    assert stats.body_evals == 3


def test_forall_stops_at_first_counterexample():
    goal = Forall('x', nat(7), _lt(Var('x'), Lit(5)))
    v, stats = check_validity(goal)
    assert v.status == 'invalid'
    assert stats.body_evals == 6
    assert v.witness == {'x': 5}


def test_body_evals_count_only_innermost_bodies():
    inner = Atom('<=', Add(Var('x'), Var('y')), Lit(6))
    goal = Forall('x', nat(3), Forall('y', nat(3), inner))
    v, stats = check_validity(goal)
    assert v.status == 'valid'
    assert stats.body_evals == 16


def test_nested_short_circuit_prunes_inner_sweeps():
    # exists x. forall y. x <= y holds at x = 0 after one inner sweep
    goal = Exists('x', nat(3), Forall('y', nat(3), Atom('<=', Var('x'), Var('y'))))
    v, stats = check_validity(goal)
    assert v.status == 'valid'
    assert stats.body_evals == 4


# -- witnesses ----------------------------------------------------------------------


def test_witness_covers_leading_universal_block():
    import pathlib
    m = resolve_model(parse_model(pathlib.Path('models/cycle4.fdl').read_text()),
                      {'N': 2})
    v, _ = check_validity(m.theorems['noSlackCycle'], m.funcs)
    assert v.status == 'invalid'
    assert v.witness == {'x1': 0, 'x2': 1, 'x3': 2, 'x4': 3}
    assert str(v) == 'invalid [x1 = 0, x2 = 1, x3 = 2, x4 = 3]'


def test_witness_empty_without_leading_universals():
    goal = Not(Exists('x', nat(1), Atom('=', Var('x'), Lit(0))))
    v, _ = check_validity(goal)
    assert v.status == 'invalid'
    assert v.witness == {}
    assert str(v) == 'invalid'


# -- choice semantics ---------------------------------------------------------------


def _choose_model():
    return resolve_model(parse_model(CHOOSE_SRC))


def test_choose_bounded_holds_in_both_modes():
    m = _choose_model()
    for mode in ('nondeterministic', 'deterministic'):
        v, stats = check_validity(m.theorems['pickBounded'], m.funcs, mode)
        assert v.status == 'valid'
        assert stats.body_evals == 3
    # nd explores every admissible value, det takes the first
    _, nd = check_validity(m.theorems['pickBounded'], m.funcs)
    _, det = check_validity(m.theorems['pickBounded'], m.funcs, 'deterministic')
    assert nd.choose_yields == 6
    assert det.choose_yields == 3


def test_choose_equal_fails_on_second_value():
    m = _choose_model()
    for mode in ('nondeterministic', 'deterministic'):
        v, _ = check_validity(m.theorems['pickEqual'], m.funcs, mode)
        assert v.status == 'invalid'
        assert v.witness == {'x': 1}


def test_modes_diverge_when_only_first_choice_satisfies():
    goal = Atom('=', Choose('y', nat(1), TrueF()), Lit(0))
    assert _status(goal, mode='deterministic') == 'valid'
    assert _status(goal, mode='nondeterministic') == 'invalid'


def test_empty_choice_is_an_error_in_both_modes():
    goal = Atom('=', Choose('y', nat(1), FalseF()), Lit(0))
    for mode in ('nondeterministic', 'deterministic'):
        v, _ = check_validity(goal, mode=mode)
        assert v.status == 'error'
        assert v.reason == 'no admissible choice'


def test_contract_function_streams_all_admissible_results():
    from fdl.core import Apply
    fd = FuncDecl('pick01', [], nat(1),
                  ensures=Atom('<=', Var('result'), Lit(1)))
    funcs = {'pick01': fd}
    bounded = Atom('<=', Apply('pick01', []), Lit(1))
    assert _status(bounded, funcs) == 'valid'
    eq0 = Atom('=', Apply('pick01', []), Lit(0))
    assert _status(eq0, funcs) == 'invalid'
    assert _status(eq0, funcs, 'deterministic') == 'valid'


# -- deadlines ----------------------------------------------------------------------


def test_deadline_raises_eval_timeout():
    import pathlib
    m = resolve_model(parse_model(pathlib.Path('models/cycle4.fdl').read_text()))
    with pytest.raises(EvalTimeout):
        check_validity(m.theorems['noCycle'], m.funcs, limit_ms=5)


def test_no_deadline_finishes_large_sweep():
    goal = Forall('x', nat(255), Atom('<=', Var('x'), Lit(255)))
    v, stats = check_validity(goal)
    assert v.status == 'valid'
    assert stats.body_evals == 256


# -- differential against the brute-force oracle -------------------------------------


def test_matches_oracle_on_random_goals():
    from fdl.oracle import oracle_check
    from fdl.randgen import random_goal
    for seed in range(150):
        goal = random_goal(seed)
        v, _ = check_validity(goal)
        assert v.status == oracle_check(goal), 'seed %d' % seed
