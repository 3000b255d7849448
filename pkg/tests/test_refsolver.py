"""Reference solver: parsing, blocked-cell search, budget, CLI entry."""

import subprocess
import sys

import pytest

from fdl.refsolver import (
    RefsolverError, Script, Solver, check_script, parse_sexprs, tokenize,
)


def _script(*asserts, decls=(), logic='QF_UFBV'):
    lines = ['(set-logic %s)' % logic]
    lines += list(decls)
    lines += ['(assert %s)' % a for a in asserts]
    lines.append('(check-sat)')
    return '\n'.join(lines)


# -- front end ----------------------------------------------------------------


def test_tokenize_strips_comments():
    toks = tokenize('(assert true) ; negated-goal\n(check-sat)')
    assert ';' not in ''.join(toks)
    assert toks[0] == '(' and 'assert' in toks


def test_parse_sexprs_nests():
    (e,) = parse_sexprs('(a (b c) #b01)')
    assert e == ['a', ['b', 'c'], '#b01']


def test_script_parse_collects_sections():
    s = Script.parse(_script('(= x #b1)', decls=['(declare-fun x () (_ BitVec 1))']))
    assert 'x' in s.decls and len(s.asserts) == 1


def test_unbalanced_input_is_an_error():
    with pytest.raises(RefsolverError):
        parse_sexprs('(assert (= x')


# -- evaluation ---------------------------------------------------------------


def test_ground_sat_and_unsat():
    assert check_script(_script('true')) == 'sat'
    assert check_script(_script('false')) == 'unsat'
    assert check_script(_script('(bvult #b00 #b10)')) == 'sat'
    assert check_script(_script('(= #b01 #b10)')) == 'unsat'


def test_bitvector_arithmetic_wraps():
    assert check_script(_script('(= (bvadd #b11 #b01) #b00)')) == 'sat'
    assert check_script(_script('(= (bvmul #b10 #b10) #b00)')) == 'sat'


def test_zero_extend_and_ite():
    a = '(= ((_ zero_extend 1) #b1) #b01)'
    assert check_script(_script(a)) == 'sat'
    assert check_script(_script('(= (ite true #b1 #b0) #b1)')) == 'sat'


def test_extract_takes_a_bit_range():
    assert check_script(_script('(= ((_ extract 1 0) #b110) #b10)')) == 'sat'
    assert check_script(_script('(= ((_ extract 2 1) #b110) #b11)')) == 'sat'


def test_define_fun_is_inlined():
    d = '(define-fun inc ((x (_ BitVec 2))) (_ BitVec 2) (bvadd x #b01))'
    assert check_script(_script('(= (inc #b01) #b10)', decls=[d])) == 'sat'


def test_quantified_asserts_enumerate():
    f = '(forall ((x (_ BitVec 2))) (bvule x #b11))'
    assert check_script(_script(f, logic='UFBV')) == 'sat'
    g = '(exists ((x (_ BitVec 2))) (bvult #b11 x))'
    assert check_script(_script(g, logic='UFBV')) == 'unsat'


# -- uninterpreted functions ----------------------------------------------------


def test_search_finds_model_cell_by_cell():
    decls = ['(declare-fun f ((_ BitVec 1)) (_ BitVec 1))']
    asserts = ['(= (f #b0) #b1)', '(bvult (f #b1) (f #b0))']
    assert check_script(_script(*asserts, decls=decls)) == 'sat'
    asserts.append('(= (f #b1) #b1)')
    assert check_script(_script(*asserts, decls=decls)) == 'unsat'


def test_constants_are_zero_arity_cells():
    decls = ['(declare-fun c () (_ BitVec 2))']
    assert check_script(_script('(= c #b10)', decls=decls)) == 'sat'
    assert check_script(_script('(bvult c c)', decls=decls)) == 'unsat'


def test_unknown_symbol_is_an_error():
    with pytest.raises(RefsolverError):
        check_script(_script('(= mystery #b1)'))


def test_budget_exhaustion_returns_unknown():
    decls = ['(declare-fun f ((_ BitVec 8)) (_ BitVec 8))']
    asserts = ['(forall ((x (_ BitVec 8))) (bvule (f x) x))',
               '(exists ((x (_ BitVec 8))) (bvult x (f x)))']
    assert check_script(_script(*asserts, logic='UFBV', decls=decls),
                        budget=50) == 'unknown'


def test_node_count_grows_with_search():
    decls = ['(declare-fun c () (_ BitVec 4))']
    s = Solver(Script.parse(_script('(= c #b1111)', decls=decls)))
    assert s.check() == 'sat'
    assert s.nodes > 16


def test_ground_subtrees_fold_before_search():
    decls = ['(declare-fun c () (_ BitVec 1))']
    s = Solver(Script.parse(_script(
        '(and (bvule #b00 #b11) (= c (ite false #b0 #b1)))', decls=decls)))
    assert s.check() == 'sat'
    assert s.units == [['=', 'c', '#b1']]


def test_irrelevant_cells_are_backjumped():
    # the falsified unit mentions only c, so the search must not revisit
    # the 4^16 assignments of g on the way out
    decls = ['(declare-fun g ((_ BitVec 2) (_ BitVec 2)) (_ BitVec 2))',
             '(declare-fun c () (_ BitVec 1))']
    vals = ('#b00', '#b01', '#b10', '#b11')
    asserts = ['(bvule #b00 (g %s %s))' % (a, b) for a in vals for b in vals]
    asserts.append('(bvult c c)')
    s = Solver(Script.parse(_script(*asserts, decls=decls)))
    assert s.check() == 'unsat'
    assert s.nodes < 100


# -- console entry ---------------------------------------------------------------


def test_cli_prints_answer(tmp_path):
    p = tmp_path / 'probe.smt2'
    p.write_text(_script('(bvule #b0 #b1)'))
    out = subprocess.run([sys.executable, '-m', 'fdl.refsolver', str(p)],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == 'sat'


def test_cli_reports_missing_file():
    out = subprocess.run([sys.executable, '-m', 'fdl.refsolver', '/no/such'],
                         capture_output=True, text=True)
    assert out.returncode == 1
    assert 'error' in out.stderr
