"""Weighted partial Max-3-SAT encoding of syndrome decoding problems.

Syndrome equations become hard clauses through a linear chain of XOR
definitions, each expressed as four 3-literal clauses. Log-likelihood costs
become soft clauses padded to three literals with two fresh variables.

Variable ids are laid out in contiguous ranges: data-error literals ``e``
(round-major), measurement-error literals ``r``, chain auxiliaries ``a`` (one
block per check, checks in row order) and soft padding auxiliaries ``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .codes import BitMatrix, CssCode
from .errors import InvalidCheck, InvalidParameter, InvalidPrior, UnsupportedWeight, WeightOverflow

P_MIN = 1e-12
ALPHA_CRITICAL = 4.2
DEFAULT_SCALE = 10_000
# largest weight sum a classic WCNF top value can carry
MAX_TOP = 2**63 - 1


@dataclass(frozen=True)
class EncoderOptions:
    strict3: bool = True


@dataclass(frozen=True)
class VariableMap:
    n: int
    m: int
    L: int
    num_e: int
    num_r: int
    num_a: int
    num_b: int
    strict3: bool = True

    @property
    def e_start(self) -> int:
        return 1

    @property
    def r_start(self) -> int:
        return 1 + self.num_e

    @property
    def a_start(self) -> int:
        return self.r_start + self.num_r

    @property
    def b_start(self) -> int:
        return self.a_start + self.num_a

    @property
    def num_vars(self) -> int:
        return self.num_e + self.num_r + self.num_a + self.num_b

    @property
    def num_decode_vars(self) -> int:
        return self.num_e + self.num_r

    def e_id(self, t: int, j: int) -> int:
        """Variable of data error on qubit ``j`` in round ``t`` (both 0-based)."""
        return self.e_start + t * self.n + j

    def r_id(self, t: int, i: int) -> int:
        """Variable of measurement error on check ``i`` in round ``t`` (0-based, t < L-1)."""
        return self.r_start + t * self.m + i

    def column_ids(self) -> list:
        """Variable id of every column of the space-time matrix, in column order."""
        ids = []
        for t in range(self.L):
            ids.extend(self.e_id(t, j) for j in range(self.n))
            if t < self.L - 1:
                ids.extend(self.r_id(t, i) for i in range(self.m))
        return ids

    def to_comment(self) -> str:
        fields = ("n", "m", "L", "num_e", "num_r", "num_a", "num_b")
        body = " ".join(f"{f}={getattr(self, f)}" for f in fields)
        return f"varmap {body} strict3={int(self.strict3)}"

    @classmethod
    def from_comment(cls, text: str) -> VariableMap:
        parts = dict(tok.split("=", 1) for tok in text.split()[1:])
        ints = {k: int(v) for k, v in parts.items() if k != "strict3"}
        return cls(strict3=parts.get("strict3", "1") == "1", **ints)


@dataclass
class WcnfFormula:
    """Hard clauses plus weighted soft clauses over variables 1..num_vars."""

    num_vars: int
    hard: list
    soft: list
    var_map: VariableMap = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for clause in self.hard:
            _check_clause(clause, self.num_vars)
        for w, clause in self.soft:
            if not w > 0:
                raise InvalidParameter("soft clause weights must be positive")
            _check_clause(clause, self.num_vars)

    @property
    def num_clauses(self) -> int:
        return len(self.hard) + len(self.soft)

    @property
    def soft_weight_sum(self) -> float:
        return sum(w for w, _ in self.soft)

    def is_strict3(self) -> bool:
        return all(len(c) == 3 for c in self.hard) and all(len(c) == 3 for _, c in self.soft)

    def density(self) -> float:
        return self.num_clauses / self.num_vars if self.num_vars else 0.0


def _check_clause(clause, num_vars):
    seen = set()
    for lit in clause:
        v = abs(lit)
        if lit == 0 or v > num_vars:
            raise InvalidParameter(f"literal {lit} outside 1..{num_vars}")
        if v in seen:
            raise InvalidParameter(f"clause {clause} repeats variable {v}")
        seen.add(v)


class VarAllocator:
    """Hands out consecutive variable ids starting at ``start``."""

    def __init__(self, start: int):
        self.next_id = start

    def __call__(self) -> int:
        v = self.next_id
        self.next_id += 1
        return v


def _xor3(x: int, y: int, z: int) -> list:
    """Clauses for z = x XOR y."""
    return [(-x, -y, -z), (x, y, -z), (-x, y, z), (x, -y, z)]


def _equal_padded(x: int, y: int, s: int, pad: int) -> list:
    """Clauses for x XOR y = s, each padded with both signs of ``pad``."""
    if s == 0:
        return [(-x, y, pad), (-x, y, -pad), (x, -y, pad), (x, -y, -pad)]
    return [(x, y, pad), (x, y, -pad), (-x, -y, pad), (-x, -y, -pad)]


def _padded_unit(lit: int, b1: int, b2: int) -> list:
    return [(lit, b1, b2), (lit, -b1, b2), (lit, b1, -b2), (lit, -b1, -b2)]


def chain_aux_count(weight: int, strict3: bool = True) -> int:
    if weight < 1:
        raise InvalidCheck("a check needs non-empty support")
    if strict3:
        return 2 if weight == 1 else weight - 1
    return max(weight - 2, 0)


def encode_xor_chain(support: Sequence[int], s_bit: int, alloc: Callable[[], int], strict3: bool = True) -> list:
    """Hard clauses forcing the XOR of ``support`` variables to equal ``s_bit``.

    ``a_1 = x_1 ^ x_2``, ``a_k = a_{k-1} ^ x_{k+1}`` and finally
    ``s = a_{w-2} ^ x_w``; the final equation carries one padding variable in
    strict mode so every clause has three literals.
    """
    support = list(support)
    if not support:
        raise InvalidCheck("a check needs non-empty support")
    if s_bit not in (0, 1):
        raise InvalidParameter("syndrome bit must be 0 or 1")
    w = len(support)
    if w == 1:
        lit = support[0] if s_bit else -support[0]
        if not strict3:
            return [(lit,)]
        return _padded_unit(lit, alloc(), alloc())
    clauses = []
    acc = support[0]
    for x in support[1:-1]:
        a = alloc()
        clauses.extend(_xor3(acc, x, a))
        acc = a
    last = support[-1]
    if strict3:
        clauses.extend(_equal_padded(acc, last, s_bit, alloc()))
    elif s_bit == 0:
        clauses.extend([(-acc, last), (acc, -last)])
    else:
        clauses.extend([(acc, last), (-acc, -last)])
    return clauses


def log_likelihood_weight(p) -> np.ndarray:
    """w = ln((1-p)/p) after clamping p into [1e-12, 1-1e-12]."""
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise InvalidPrior("priors must lie in [0, 1]")
    p = np.clip(p, P_MIN, 1 - P_MIN)
    return np.log1p(-p) - np.log(p)


def encode_soft(priors, var_ids: Sequence[int], alloc: Callable[[], int], strict3: bool = True) -> list:
    """Soft clauses charging ``|w_j|`` whenever ``var_ids[j]`` takes its unlikely value.

    Positive weights penalise a true literal, negative weights a false one,
    zero weights emit nothing.
    """
    weights = log_likelihood_weight(priors)
    if len(weights) != len(var_ids):
        raise InvalidParameter("one prior per decode variable is required")
    soft = []
    for w, v in zip(weights.tolist(), var_ids):
        if w == 0:
            continue
        lit = -v if w > 0 else v
        if strict3:
            b1, b2 = alloc(), alloc()
            soft.extend((abs(w), c) for c in _padded_unit(lit, b1, b2))
        else:
            soft.append((abs(w), (lit,)))
    return soft


def build_spacetime_matrix(h: BitMatrix, L: int) -> BitMatrix:
    """The mL x (nL + m(L-1)) matrix with columns ordered e^1, r^1, e^2, ..., e^L."""
    if L < 1:
        raise InvalidParameter("L must be >= 1")
    if L == 1:
        return h
    m, n = h.shape
    block = n + m
    rows = []
    for t in range(L):
        for i, row in enumerate(h.rows):
            cols = []
            if t > 0:
                cols.append((t - 1) * block + n + i)
            cols.extend(t * block + j for j in row)
            if t < L - 1:
                cols.append(t * block + n + i)
            rows.append(sorted(cols))
    return BitMatrix.from_rows(rows, n * L + m * (L - 1))


def _build(h: BitMatrix, target, flip_priors, meas_priors, L: int, options: EncoderOptions) -> WcnfFormula:
    m, n = h.shape
    target = np.asarray(target, dtype=np.int64).reshape(-1)
    if target.size != m * L:
        raise InvalidParameter(f"syndrome has length {target.size}, expected {m * L}")
    if np.any((target != 0) & (target != 1)):
        raise InvalidParameter("syndrome entries must be 0 or 1")
    flip_priors = np.broadcast_to(np.asarray(flip_priors, dtype=float), (n,))
    meas_priors = np.broadcast_to(np.asarray(0.0 if meas_priors is None else meas_priors, dtype=float), (m,))
    for w in h.row_weights():
        if w == 0:
            raise InvalidCheck("zero-weight parity check")
    big = build_spacetime_matrix(h, L)
    strict3 = options.strict3
    num_e, num_r = n * L, m * (L - 1)
    num_a = sum(chain_aux_count(w, strict3) for w in big.row_weights())
    vm0 = VariableMap(n, m, L, num_e, num_r, num_a, 0, strict3)
    col_ids = vm0.column_ids()

    alloc = VarAllocator(vm0.a_start)
    hard = []
    for row, bit in zip(big.rows, target.tolist()):
        hard.extend(encode_xor_chain([col_ids[c] for c in row], bit, alloc, strict3))
    assert alloc.next_id == vm0.b_start

    decode_ids = list(range(1, vm0.num_decode_vars + 1))
    priors = np.concatenate([np.tile(flip_priors, L), np.tile(meas_priors, L - 1)])
    soft = encode_soft(priors, decode_ids, alloc, strict3)
    vm = replace(vm0, num_b=alloc.next_id - vm0.b_start)
    return WcnfFormula(vm.num_vars, hard, soft, vm)


def build_capacity_wcnf(h: BitMatrix, s, flip_priors, options: EncoderOptions = EncoderOptions()) -> WcnfFormula:
    """Formula whose optimum is the most likely e with H e = s."""
    return _build(h, s, flip_priors, None, 1, options)


def build_spacetime_wcnf(
    h: BitMatrix, diff, flip_priors, meas_priors, L: int, options: EncoderOptions = EncoderOptions()
) -> WcnfFormula:
    """Formula over (e^1, r^1, ..., e^L) for L rounds of noisy syndrome differences."""
    if L < 1:
        raise InvalidParameter("L must be >= 1")
    return _build(h, diff, flip_priors, meas_priors, L, options)


def quantize_weights(formula: WcnfFormula, scale: int = DEFAULT_SCALE) -> WcnfFormula:
    """Integer weights ``round(w * scale)``, never below 1 for a positive weight.

    ``meta["distortion_bound"]`` bounds, in original units, how far any
    assignment's quantized objective divided by ``scale`` can sit from its true
    objective.
    """
    if int(scale) != scale or scale < 1:
        raise InvalidParameter("scale must be a positive integer")
    clamped = False
    worst = 0.5
    soft = []
    for w, c in formula.soft:
        q = int(round(w * scale))
        if q < 1:
            q, clamped = 1, True
            worst = max(worst, q - w * scale)
        soft.append((q, c))
    top = 1 + sum(q for q, _ in soft)
    if top > MAX_TOP:
        raise WeightOverflow(f"quantized weight sum {top} exceeds the hard-clause sentinel range")
    vm = formula.var_map
    soft_vars = vm.num_decode_vars if vm is not None else len({abs(l) for _, c in formula.soft for l in c})
    meta = dict(formula.meta)
    meta.update(scale=int(scale), distortion_bound=soft_vars * worst / scale, clamped=clamped)
    return WcnfFormula(formula.num_vars, list(formula.hard), soft, vm, meta)


# --- clause density ---------------------------------------------------------


@dataclass
class DensityReport:
    alpha: float
    mode: str
    actual_alpha: float = None
    alpha_hard: float = None
    alpha_maxsat: float = None
    spacetime_alpha_hard: float = None
    spacetime_alpha_maxsat: float = None
    hard_clauses_chain: int = None
    hard_clauses_aggregate: int = None
    L: int = 1

    @property
    def easy_phase(self) -> bool:
        value = self.actual_alpha if self.actual_alpha is not None else self.alpha
        return value < ALPHA_CRITICAL


def alpha_3sat(weights, n: int) -> float:
    w = np.asarray(weights, dtype=float)
    return float(np.sum(4 * (w - 2)) / (n + np.sum(w - 1)))


def alpha_max3sat(weights, n: int) -> float:
    w = np.asarray(weights, dtype=float)
    return float((4 * n + np.sum(4 * (w - 2))) / (3 * n + np.sum(w - 1)))


def alpha_spacetime_3sat(weights, n: int, L: int) -> float:
    w = np.tile(np.asarray(weights, dtype=float), L)
    m = len(weights)
    return float(np.sum(4 * w) / (n * L + m * (L - 1) + np.sum(w + 1)))


def alpha_spacetime_max3sat(weights, n: int, L: int) -> float:
    w = np.tile(np.asarray(weights, dtype=float), L)
    m = len(weights)
    return float((4 * n * L + 4 * m * (L - 1) + np.sum(4 * w)) / (3 * n * L + 3 * m * (L - 1) + np.sum(w + 1)))


MODES = ("hard-analytic", "maxsat-analytic", "spacetime-hard", "spacetime-maxsat", "actual")


def clause_density(source, mode: str = "actual", L: int = 1, options: EncoderOptions = EncoderOptions()) -> DensityReport:
    """Clause-to-variable ratios of a code sector or an emitted formula.

    ``source`` may be a WcnfFormula (only ``actual`` is available), a
    BitMatrix, or a CssCode (its Hz sector). For matrices every analytic
    expression is evaluated and ``actual`` counts a zero-syndrome instance
    with uniform priors 0.1.
    """
    if mode not in MODES:
        raise InvalidParameter(f"mode must be one of {MODES}")
    if isinstance(source, WcnfFormula):
        if mode != "actual":
            raise InvalidParameter("a formula only supports mode 'actual'")
        a = source.density()
        return DensityReport(alpha=a, mode=mode, actual_alpha=a, L=source.var_map.L if source.var_map else 1)
    h = source.hz if isinstance(source, CssCode) else source
    weights = h.row_weights()
    if any(w < 2 for w in weights) and mode != "actual":
        raise UnsupportedWeight("analytic densities assume every check has weight >= 2")
    m, n = h.shape
    report = DensityReport(alpha=0.0, mode=mode, L=L)
    if all(w >= 2 for w in weights):
        report.alpha_hard = alpha_3sat(weights, n)
        report.alpha_maxsat = alpha_max3sat(weights, n)
        report.spacetime_alpha_hard = alpha_spacetime_3sat(weights, n, L)
        report.spacetime_alpha_maxsat = alpha_spacetime_max3sat(weights, n, L)
        report.hard_clauses_aggregate = sum(4 * (w - 2) for w in weights)
    report.hard_clauses_chain = sum(4 * (w - 1) for w in weights)
    formula = build_spacetime_wcnf(h, np.zeros(m * L, dtype=np.uint8), 0.1, 0.1, L, options)
    report.actual_alpha = formula.density()
    report.alpha = {
        "hard-analytic": report.alpha_hard,
        "maxsat-analytic": report.alpha_maxsat,
        "spacetime-hard": report.spacetime_alpha_hard,
        "spacetime-maxsat": report.spacetime_alpha_maxsat,
        "actual": report.actual_alpha,
    }[mode]
    return report
