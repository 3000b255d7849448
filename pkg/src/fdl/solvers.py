"""Running external SMT solvers on translated goals.

Backends are configured as argv templates ('{file}' is replaced by the
script path), either from the built-in table below or from an INI file
(--solvers-config or $FDL_SOLVERS_CONFIG):

    [z3]
    command = z3 -smt2 {file}
    quantifiers = true

A backend whose executable is not on PATH reports 'unavailable' instead of
failing. Solvers run in their own session; on timeout the whole process
group is killed, so children of wrapper scripts die too.
"""

import configparser
import os
import shlex
import shutil
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

from .evaluator import Verdict
from .translate import SmtOptions, TranslateError, emit_smtlib, translate

DEFAULT_TIMEOUT_MS = 60_000

_BUILTIN = """
[refsolve]
command = fdl-refsolve {file}
quantifiers = true

[z3]
command = z3 -smt2 {file}
quantifiers = true

[cvc4]
command = cvc4 --lang smt2 {file}
quantifiers = true

[cvc5]
command = cvc5 --lang smt2 {file}
quantifiers = true

[yices]
command = yices-smt2 {file}
quantifiers = false

[boolector]
command = boolector --smt2 {file}
quantifiers = false
"""


@dataclass
class SolverConfig:
    name: str
    command: list
    quantifiers: bool = True

    def available(self) -> bool:
        return shutil.which(self.command[0]) is not None


@dataclass
class SolverOutcome:
    answer: str  # 'sat' | 'unsat' | 'unknown' | 'timeout' | 'error' | 'unavailable'
    wall_ms: float = 0.0
    detail: str = ''


def load_solver_configs(path: Optional[str] = None) -> dict:
    """Built-in backends, overlaid with the INI file if one is given (or
    named by $FDL_SOLVERS_CONFIG)."""
    cp = configparser.ConfigParser()
    cp.read_string(_BUILTIN)
    if path is None:
        path = os.environ.get('FDL_SOLVERS_CONFIG')
    if path:
        with open(path) as fh:
            cp.read_file(fh)
    out = {}
    for name in cp.sections():
        sec = cp[name]
        out[name] = SolverConfig(
            name=name,
            command=shlex.split(sec['command']),
            quantifiers=sec.getboolean('quantifiers', fallback=True))
    return out


def run_solver(cfg: SolverConfig, script_text: str,
               limit_ms: int = DEFAULT_TIMEOUT_MS) -> SolverOutcome:
    """Run one backend on one script and classify its answer.

    Output is read line-wise; everything before the first line that is
    exactly sat/unsat/unknown is ignored.
    """
    if not cfg.available():
        return SolverOutcome('unavailable', 0.0,
                             '%s not on PATH' % cfg.command[0])
    fd, path = tempfile.mkstemp(suffix='.smt2', prefix='fdl-')
    try:
        with os.fdopen(fd, 'w') as fh:
            fh.write(script_text)
        argv = [a.replace('{file}', path) for a in cfg.command]
        t0 = time.monotonic()
        proc = subprocess.Popen(argv, stdout=subprocess.PIPE,
                                stderr=subprocess.PIPE, text=True,
                                start_new_session=True)
        try:
            stdout, stderr = proc.communicate(timeout=limit_ms / 1000.0)
            timed_out = False
        except subprocess.TimeoutExpired:
            timed_out = True
            try:
                os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
            except (ProcessLookupError, PermissionError):
                proc.kill()
            stdout, stderr = proc.communicate()
        wall_ms = (time.monotonic() - t0) * 1000.0
        if timed_out:
            return SolverOutcome('timeout', wall_ms)
        for line in (stdout or '').splitlines():
            line = line.strip()
            if line in ('sat', 'unsat', 'unknown'):
                return SolverOutcome(line, wall_ms)
        detail = (stderr or stdout or '').strip().splitlines()
        return SolverOutcome('error', wall_ms,
                             detail[0] if detail else 'no answer')
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass


def decide(goal, funcs, cfg: SolverConfig, opts: Optional[SmtOptions] = None,
           limit_ms: int = DEFAULT_TIMEOUT_MS):
    """Translate a goal and discharge it with one backend.

    Returns (Verdict, SolverOutcome, translate_ms). The goal is valid iff
    its negation is unsat, so: unsat -> valid, sat -> invalid,
    unknown/timeout -> undecided.
    """
    t0 = time.monotonic()
    try:
        script = translate(goal, funcs, opts)
        text = emit_smtlib(script)
    except TranslateError as e:
        return (Verdict('error', reason=str(e)),
                SolverOutcome('error', 0.0, str(e)),
                (time.monotonic() - t0) * 1000.0)
    translate_ms = (time.monotonic() - t0) * 1000.0
    outcome = run_solver(cfg, text, limit_ms)
    if outcome.answer == 'unsat':
        v = Verdict('valid')
    elif outcome.answer == 'sat':
        v = Verdict('invalid')
    elif outcome.answer in ('unknown', 'timeout'):
        v = Verdict('undecided', reason=outcome.answer)
    else:
        v = Verdict('error', reason=outcome.detail or outcome.answer)
    return v, outcome, translate_ms
