"""Shared fixtures: throwaway shell-script backends and model sources."""

import stat

import pytest

from fdl.solvers import SolverConfig


CYCLE4_SRC = """
val N: nat = 2;
type D = nat[2^N - 1];
theorem noCycle <=>
  forall x1: D, x2: D, x3: D, x4: D.
    !(x1 < x2 /\\ x2 < x3 /\\ x3 < x4 /\\ x4 < x1);
"""

CONTRACT_SRC = """
val N: nat = 1;
type D = nat[2^N - 1];
fun f(x1: D, x2: D): nat[1]
  ensures result = (if x1 < x2 then 0 else 1);
theorem fTotal <=> forall x1: D, x2: D. f(x1, x2) <= 1;
"""

CHOOSE_SRC = """
val N: nat = 2;
type D = nat[N];
fun pick(x: D): D = choose y: D with y <= x;
theorem pickBounded <=> forall x: D. pick(x) <= x;
theorem pickEqual <=> forall x: D. pick(x) = x;
"""


@pytest.fixture
def fake_solver(tmp_path):
    """Factory building a SolverConfig around an ad-hoc shell script."""

    def make(body, name='fake'):
        exe = tmp_path / name
        exe.write_text('#!/bin/sh\n' + body + '\n')
        exe.chmod(exe.stat().st_mode | stat.S_IEXEC)
        return SolverConfig(name=name, command=[str(exe), '{file}'])

    return make
