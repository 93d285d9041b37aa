"""Exact weighted partial MaxSAT: embedded branch and bound, RC2 backend and external solvers."""

from __future__ import annotations

import enum
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encoder import DEFAULT_SCALE, WcnfFormula, quantize_weights
from .errors import InvalidParameter, ProcessFailure, UnparsableOutput, VerificationFailure
from .wcnf import write_wcnf

OBJ_TOL = 1e-9
_PRUNE_EPS = 1e-12


class Status(str, enum.Enum):
    OPTIMUM = "optimum"
    BOUND = "satisfiable-bound"
    HARD_UNSAT = "hard-unsat"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class SolverBudget:
    seconds: float = None
    nodes: int = None

    def __post_init__(self):
        if (self.seconds is not None and self.seconds < 0) or (self.nodes is not None and self.nodes < 0):
            raise InvalidParameter("budget limits must be non-negative")


@dataclass
class Assignment:
    """Solver answer. ``values[v]`` is the truth value of variable v; index 0 is unused."""

    values: np.ndarray
    objective: float
    status: Status
    nodes: int = 0
    diagnostics: str = ""

    def literal_true(self, lit: int) -> bool:
        v = bool(self.values[abs(lit)])
        return v if lit > 0 else not v


def check_assignment(formula: WcnfFormula, values):
    """Recompute (all hard clauses satisfied, violated soft weight) from scratch."""
    vals = np.asarray(values, dtype=bool)
    if vals.size < formula.num_vars + 1:
        raise InvalidParameter("assignment does not cover every variable")

    def sat(clause):
        return any(vals[l] if l > 0 else not vals[-l] for l in clause)

    hard_ok = all(sat(c) for c in formula.hard)
    objective = float(sum(w for w, c in formula.soft if not sat(c)))
    return hard_ok, objective


# --- preprocessing ----------------------------------------------------------


def _eliminate_padding(formula: WcnfFormula):
    """Resolve away variables that occur only in pairs ``(C | x), (C | -x)`` of equal weight.

    Such a pair costs exactly its weight iff ``C`` is false, whatever ``x`` is,
    so replacing it by ``C`` preserves every optimum. Returns
    ``(hard, soft, constant_cost, eliminated, unsat)``.
    """
    clauses = {}
    occ = {}
    for idx, c in enumerate(formula.hard):
        clauses[idx] = (None, tuple(c))
    base = len(formula.hard)
    for idx, (w, c) in enumerate(formula.soft):
        clauses[base + idx] = (w, tuple(c))
    for idx, (_, c) in clauses.items():
        for l in c:
            occ.setdefault(abs(l), set()).add(idx)
    next_idx = len(clauses)
    eliminated = set()
    constant = 0.0
    unsat = False
    pending = sorted(occ)
    while pending:
        again = []
        for v in pending:
            ids = occ.get(v)
            if not ids or len(ids) % 2:
                continue
            pos, neg = {}, {}
            for idx in ids:
                w, c = clauses[idx]
                lit = v if v in c else -v
                rest = tuple(l for l in c if l != lit)
                key = (w, tuple(sorted(rest)))
                (pos if lit > 0 else neg).setdefault(key, []).append((idx, rest))
            if {k: len(x) for k, x in pos.items()} != {k: len(x) for k, x in neg.items()}:
                continue
            occ.pop(v)
            eliminated.add(v)
            touched = set()
            for key, items in pos.items():
                for (pi, rest), (ni, _) in zip(items, neg[key]):
                    for idx in (pi, ni):
                        _, c = clauses.pop(idx)
                        for l in c:
                            if abs(l) != v:
                                occ[abs(l)].discard(idx)
                    w = key[0]
                    if not rest:
                        if w is None:
                            unsat = True
                        else:
                            constant += w
                        continue
                    clauses[next_idx] = (w, rest)
                    for l in rest:
                        occ[abs(l)].add(next_idx)
                        touched.add(abs(l))
                    next_idx += 1
            again.extend(touched)
        pending = sorted(set(again) - eliminated)
    hard = [c for w, c in clauses.values() if w is None]
    soft = [(w, c) for w, c in clauses.values() if w is not None]
    return hard, soft, constant, eliminated, unsat


# --- branch and bound -------------------------------------------------------


class _BranchAndBound:
    """DPLL-style search: watched-literal propagation on hard clauses, bound = violated soft weight."""

    def __init__(self, num_vars, hard, soft, constant, skip):
        self.nv = num_vars
        self.val = [0] * (num_vars + 1)
        self.skip = skip
        self.hard = [list(c) for c in hard]
        self.watches = {}
        self.units = []
        for i, c in enumerate(self.hard):
            if len(c) == 1:
                self.units.append(c[0])
            else:
                self.watches.setdefault(c[0], []).append(i)
                self.watches.setdefault(c[1], []).append(i)
        self.soft_w = [w for w, _ in soft]
        self.soft_len = [len(c) for _, c in soft]
        self.soft_false = [0] * len(soft)
        self.soft_occ = {}
        for i, (_, c) in enumerate(soft):
            for l in c:
                self.soft_occ.setdefault(l, []).append(i)
        self.cost = constant
        self.trail = []
        self.qhead = 0

    def _value(self, lit):
        v = self.val[abs(lit)]
        return v if lit > 0 else -v

    def _assign(self, lit):
        self.val[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)
        for i in self.soft_occ.get(-lit, ()):
            self.soft_false[i] += 1
            if self.soft_false[i] == self.soft_len[i]:
                self.cost += self.soft_w[i]

    def _undo_to(self, size):
        trail = self.trail
        while len(trail) > size:
            lit = trail.pop()
            self.val[abs(lit)] = 0
            for i in self.soft_occ.get(-lit, ()):
                if self.soft_false[i] == self.soft_len[i]:
                    self.cost -= self.soft_w[i]
                self.soft_false[i] -= 1
        self.qhead = min(self.qhead, size)

    def _propagate(self) -> bool:
        val = self.val
        trail = self.trail
        while self.qhead < len(trail):
            false_lit = -trail[self.qhead]
            self.qhead += 1
            watching = self.watches.get(false_lit)
            if not watching:
                continue
            keep = []
            conflict = False
            for k, ci in enumerate(watching):
                if conflict:
                    keep.append(ci)
                    continue
                c = self.hard[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = val[abs(first)]
                if (fv if first > 0 else -fv) == 1:
                    keep.append(ci)
                    continue
                for j in range(2, len(c)):
                    l = c[j]
                    lv = val[abs(l)]
                    if (lv if l > 0 else -lv) != -1:
                        c[1], c[j] = l, false_lit
                        self.watches.setdefault(l, []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if (fv if first > 0 else -fv) == -1:
                        conflict = True
                    else:
                        self._assign(first)
            self.watches[false_lit] = keep
            if conflict:
                return False
        return True

    def solve(self, budget: SolverBudget):
        deadline = None if budget.seconds is None else time.monotonic() + budget.seconds
        node_limit = budget.nodes
        for lit in self.units:
            v = self._value(lit)
            if v == -1:
                return None, Status.HARD_UNSAT, 0
            if v == 0:
                self._assign(lit)
        best_cost = float("inf")
        best = None
        nodes = 0
        decisions = []  # [var, trail size before decision, flipped]
        exhausted = False
        while True:
            ok = self._propagate()
            if ok and self.cost < best_cost - _PRUNE_EPS:
                start = decisions[-1][0] + 1 if decisions else 1
                var = next((v for v in range(start, self.nv + 1) if self.val[v] == 0 and v not in self.skip), None)
                if var is None:
                    best_cost = self.cost
                    best = list(self.val)
                else:
                    nodes += 1
                    if (node_limit is not None and nodes > node_limit) or (
                        deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline
                    ):
                        break
                    decisions.append([var, len(self.trail), False])
                    self._assign(-var)
                    continue
            while decisions:
                var, size, flipped = decisions[-1]
                self._undo_to(size)
                if not flipped:
                    decisions[-1][2] = True
                    self._assign(var)
                    break
                decisions.pop()
            else:
                exhausted = True
                break
        if best is None:
            return None, (Status.HARD_UNSAT if exhausted else Status.TIMEOUT), nodes
        return best, (Status.OPTIMUM if exhausted else Status.BOUND), nodes


def solve_exact(formula: WcnfFormula, budget: SolverBudget = SolverBudget()) -> Assignment:
    """Minimum violated soft weight over all models of the hard clauses.

    Variables are branched in ascending id order, false first. A timeout
    returns the incumbent with status ``satisfiable-bound`` (or ``timeout``
    when none was found).
    """
    hard, soft, constant, eliminated, unsat = _eliminate_padding(formula)
    values = np.zeros(formula.num_vars + 1, dtype=bool)
    if unsat:
        return Assignment(values, float("inf"), Status.HARD_UNSAT)
    search = _BranchAndBound(formula.num_vars, hard, soft, constant, eliminated)
    best, status, nodes = search.solve(budget)
    if best is None:
        return Assignment(values, float("inf"), status, nodes)
    values = np.array([v == 1 for v in best], dtype=bool)
    hard_ok, objective = check_assignment(formula, values)
    assert hard_ok, "branch and bound returned a model violating a hard clause"
    return Assignment(values, objective, status, nodes)


def solve_rc2(formula: WcnfFormula, budget: SolverBudget = SolverBudget(), scale: int = 10**6) -> Assignment:
    """Solve with the RC2 core-guided MaxSAT solver from python-sat on quantized weights.

    The returned objective is recomputed on the real-valued formula.
    """
    from pysat.examples.rc2 import RC2
    from pysat.formula import WCNF

    q = quantize_weights(formula, scale)
    wcnf = WCNF()
    for c in q.hard:
        wcnf.append(list(c))
    for w, c in q.soft:
        wcnf.append(list(c), weight=w)
    values = np.zeros(formula.num_vars + 1, dtype=bool)
    with RC2(wcnf) as rc2:
        model = rc2.compute()
    if model is None:
        return Assignment(values, float("inf"), Status.HARD_UNSAT)
    for lit in model:
        if 0 < abs(lit) <= formula.num_vars:
            values[abs(lit)] = lit > 0
    hard_ok, objective = check_assignment(formula, values)
    if not hard_ok:
        raise VerificationFailure("RC2 returned a model violating a hard clause")
    return Assignment(values, objective, Status.OPTIMUM)


# --- external solvers ---------------------------------------------------------

_STATUS_LINES = {
    "OPTIMUM FOUND": Status.OPTIMUM,
    "OPTIMUM": Status.OPTIMUM,
    "SATISFIABLE": Status.BOUND,
    "UNSATISFIABLE": Status.HARD_UNSAT,
    "UNKNOWN": Status.TIMEOUT,
}


def parse_solver_output(text: str, num_vars: int):
    """Read the ``s`` status and ``v`` model lines of a MaxSAT solver transcript.

    ``v`` lines may list signed literals (optionally 0-terminated, possibly
    over several lines) or hold one contiguous 0/1 string.
    """
    status = None
    tokens = []
    for line in text.splitlines():
        fields = line.split()
        if not fields:
            continue
        if fields[0] == "s":
            key = " ".join(fields[1:]).upper()
            if key not in _STATUS_LINES:
                raise UnparsableOutput(f"unknown status line {line!r}")
            status = _STATUS_LINES[key]
        elif fields[0] == "v":
            tokens.extend(fields[1:])
    if status is None:
        raise UnparsableOutput("solver printed no 's' status line")
    values = np.zeros(num_vars + 1, dtype=bool)
    if status == Status.HARD_UNSAT or not tokens:
        if status in (Status.OPTIMUM, Status.BOUND):
            raise UnparsableOutput("solver reported a model but printed no 'v' line")
        return status, None
    if len(tokens) == 1 and set(tokens[0]) <= {"0", "1"} and len(tokens[0]) == num_vars:
        bits = tokens[0]
        values[1:] = [b == "1" for b in bits]
        return status, values
    try:
        lits = [int(t) for t in tokens]
    except ValueError:
        raise UnparsableOutput(f"cannot read model tokens {tokens[:5]}") from None
    for lit in lits:
        if lit == 0:
            continue
        if abs(lit) > num_vars:
            raise UnparsableOutput(f"literal {lit} exceeds {num_vars} variables")
        values[abs(lit)] = lit > 0
    return status, values


def default_solver_command():
    return os.environ.get("MAXSAT_SOLVER_CMD")


def run_external(
    formula: WcnfFormula,
    command: str = None,
    budget: SolverBudget = SolverBudget(),
    scale: int = DEFAULT_SCALE,
    dialect: str = "wcnf",
) -> Assignment:
    """Write quantized WCNF, run ``command`` (``{wcnf}`` is the file path) and verify its model.

    The exit status is ignored; only the ``s``/``v`` protocol counts. The
    objective is reported in the units of the unquantized ``formula``.
    """
    command = command or default_solver_command()
    if not command or "{wcnf}" not in command:
        raise InvalidParameter("solver command must contain a '{wcnf}' placeholder")
    quantized = quantize_weights(formula, scale)
    with tempfile.TemporaryDirectory(prefix="cssmaxsat-") as tmp:
        path = Path(tmp) / "instance.wcnf"
        write_wcnf(quantized, path, dialect)
        argv = [a.replace("{wcnf}", str(path)) for a in shlex.split(command)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=budget.seconds)
        except subprocess.TimeoutExpired as exc:
            values = np.zeros(formula.num_vars + 1, dtype=bool)
            return Assignment(values, float("inf"), Status.TIMEOUT, diagnostics=str(exc.stderr or ""))
        except OSError as exc:
            raise ProcessFailure(f"cannot launch {argv[0]!r}: {exc}") from None
    try:
        status, values = parse_solver_output(proc.stdout, formula.num_vars)
    except UnparsableOutput as exc:
        if proc.returncode != 0 and not proc.stdout.strip():
            raise ProcessFailure(f"solver exited with {proc.returncode}", proc.stderr) from None
        raise UnparsableOutput(str(exc), proc.stderr) from None
    if values is None:
        return Assignment(np.zeros(formula.num_vars + 1, dtype=bool), float("inf"), status, diagnostics=proc.stderr)
    hard_ok, objective = check_assignment(formula, values)
    if not hard_ok:
        raise VerificationFailure("external solver returned a model violating a hard clause", proc.stderr)
    return Assignment(values, objective, status, diagnostics=proc.stderr)


ENGINES = ("embedded", "rc2", "external")


def solve(formula: WcnfFormula, engine: str = "embedded", budget: SolverBudget = SolverBudget(), solver_cmd=None, scale=DEFAULT_SCALE):
    if engine == "embedded":
        return solve_exact(formula, budget)
    if engine == "rc2":
        return solve_rc2(formula, budget)
    if engine == "external":
        return run_external(formula, solver_cmd, budget, scale)
    raise InvalidParameter(f"engine must be one of {ENGINES}")
