"""WCNF text interchange: the classic ``p wcnf`` dialect and the 2022 ``h``-prefixed one."""

from __future__ import annotations

import io
import math
from pathlib import Path

from .encoder import VariableMap, WcnfFormula
from .errors import ParseError

DIALECTS = ("wcnf", "wcnf2022")


def _weight_text(w) -> str:
    if isinstance(w, int) or float(w).is_integer() and abs(w) < 2**53:
        return str(int(w))
    return repr(float(w))


def _lits(clause) -> str:
    return " ".join(str(l) for l in clause) + " 0"


def dumps(formula: WcnfFormula, dialect: str = "wcnf") -> str:
    """Serialize ``formula``; non-integer weights are written with full float precision."""
    if dialect not in DIALECTS:
        raise ValueError(f"dialect must be one of {DIALECTS}")
    out = io.StringIO()
    if formula.var_map is not None:
        out.write(f"c {formula.var_map.to_comment()}\n")
    if dialect == "wcnf":
        top = math.floor(formula.soft_weight_sum) + 1
        out.write(f"p wcnf {formula.num_vars} {formula.num_clauses} {top}\n")
        hard_prefix = str(top)
    else:
        hard_prefix = "h"
    for clause in formula.hard:
        out.write(f"{hard_prefix} {_lits(clause)}\n")
    for w, clause in formula.soft:
        out.write(f"{_weight_text(w)} {_lits(clause)}\n")
    return out.getvalue()


def write_wcnf(formula: WcnfFormula, path, dialect: str = "wcnf") -> None:
    Path(path).write_text(dumps(formula, dialect), encoding="ascii")


def _parse_weight(tok: str):
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def loads(text: str) -> WcnfFormula:
    """Parse either dialect; the dialect is detected from the presence of a ``p`` line."""
    num_vars = None
    top = None
    var_map = None
    hard, soft = [], []
    max_var = 0
    declared_clauses = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields:
            continue
        head = fields[0]
        if head == "c":
            if len(fields) > 1 and fields[1] == "varmap":
                try:
                    var_map = VariableMap.from_comment(" ".join(fields[1:]))
                except (ValueError, TypeError) as exc:
                    raise ParseError(f"line {lineno}: bad varmap comment ({exc})") from None
            continue
        if head == "p":
            if len(fields) != 5 or fields[1] != "wcnf":
                raise ParseError(f"line {lineno}: expected 'p wcnf <vars> <clauses> <top>'")
            num_vars, declared_clauses = int(fields[2]), int(fields[3])
            top = _parse_weight(fields[4])
            continue
        if fields[-1] != "0":
            raise ParseError(f"line {lineno}: clause must end with 0")
        try:
            lits = tuple(int(x) for x in fields[1:-1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer literal") from None
        if lits:
            max_var = max(max_var, max(abs(l) for l in lits))
        if head == "h":
            hard.append(lits)
            continue
        try:
            w = _parse_weight(head)
        except ValueError:
            raise ParseError(f"line {lineno}: bad weight {head!r}") from None
        if top is not None and w >= top:
            hard.append(lits)
        else:
            soft.append((w, lits))
    if declared_clauses is not None and declared_clauses != len(hard) + len(soft):
        raise ParseError(f"header declares {declared_clauses} clauses, found {len(hard) + len(soft)}")
    if num_vars is None:
        num_vars = var_map.num_vars if var_map is not None else max_var
    try:
        return WcnfFormula(num_vars, hard, soft, var_map)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_wcnf(path) -> WcnfFormula:
    return loads(Path(path).read_text(encoding="ascii"))
