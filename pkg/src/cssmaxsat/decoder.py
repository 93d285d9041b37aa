"""End-to-end most-likely-error decoding of CSS codes through MaxSAT.

Each sector is decoded on its own: bit flips from the Hz syndrome with
priors px + py, phase flips from the Hx syndrome with priors pz + py. The
decoder returns the single most probable error, not the most probable
logical coset.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .codes import BitMatrix, CssCode, logical_failure
from .encoder import EncoderOptions, build_spacetime_matrix, build_spacetime_wcnf, log_likelihood_weight
from .errors import CssMaxsatError, HardUnsat, InvalidParameter
from .noise import NoiseModel, sample_pauli, spacetime_from_errors, syndrome, trial_rng
from .solver import SolverBudget, Status, solve


class DecodeError(CssMaxsatError):
    """A solver answer that breaks the syndrome contract."""


@dataclass
class DecodeResult:
    e_dec: np.ndarray
    r_dec: np.ndarray
    objective: float
    status: Status
    seconds: float
    num_vars: int = 0
    num_clauses: int = 0

    @property
    def ok(self) -> bool:
        return self.status in (Status.OPTIMUM, Status.BOUND)


def decode_sector(
    h: BitMatrix,
    syndrome_bits,
    priors,
    L: int = 1,
    meas_priors=None,
    engine: str = "embedded",
    options: EncoderOptions = EncoderOptions(),
    budget: SolverBudget = SolverBudget(),
    solver_cmd: str = None,
) -> DecodeResult:
    """Most likely error for one sector.

    ``syndrome_bits`` is the syndrome (L = 1) or the L*m concatenated syndrome
    differences. ``e_dec`` is folded over rounds. A budget overrun returns a
    result with status ``timeout`` or ``satisfiable-bound`` instead of raising.
    """
    m, n = h.shape
    target = np.asarray(syndrome_bits, dtype=np.uint8).reshape(-1)
    if target.size != m * L:
        raise InvalidParameter(f"syndrome has length {target.size}, expected {m * L}")
    priors = np.broadcast_to(np.asarray(priors, dtype=float), (n,))
    t0 = time.perf_counter()
    weights_pos = np.all(log_likelihood_weight(priors) > 0) and (
        L == 1 or np.all(log_likelihood_weight(np.broadcast_to(meas_priors if meas_priors is not None else 0.0, (m,))) > 0)
    )
    if weights_pos and not target.any():
        # the zero error is feasible at zero cost
        return DecodeResult(np.zeros(n, np.uint8), np.zeros((max(L - 1, 0), m), np.uint8), 0.0, Status.OPTIMUM, time.perf_counter() - t0)
    formula = build_spacetime_wcnf(h, target, priors, meas_priors, L, options)
    answer = solve(formula, engine, budget, solver_cmd)
    elapsed = time.perf_counter() - t0
    vm = formula.var_map
    if answer.status == Status.HARD_UNSAT:
        raise HardUnsat("decoder instance has no model; the syndrome equations must be solvable")
    vals = answer.values
    e_rounds = vals[vm.e_start : vm.e_start + vm.num_e].reshape(L, n).astype(np.uint8)
    r_rounds = vals[vm.r_start : vm.r_start + vm.num_r].reshape(L - 1, m).astype(np.uint8)
    result = DecodeResult(
        np.bitwise_xor.reduce(e_rounds, axis=0),
        r_rounds,
        answer.objective,
        answer.status,
        elapsed,
        formula.num_vars,
        formula.num_clauses,
    )
    if answer.status == Status.TIMEOUT:
        return result
    v = _interleave(e_rounds, r_rounds)
    if np.any(build_spacetime_matrix(h, L) @ v != target):
        raise DecodeError("decoded error does not reproduce the syndrome")
    return result


def _interleave(e_rounds, r_rounds) -> np.ndarray:
    parts = []
    for t in range(e_rounds.shape[0]):
        parts.append(e_rounds[t])
        if t < r_rounds.shape[0]:
            parts.append(r_rounds[t])
    return np.concatenate(parts)


def exhaustive_decode(h: BitMatrix, syndrome_bits, priors, max_kernel_dim: int = 22):
    """Minimum-cost solution of H e = s by enumerating the whole coset.

    Returns ``(e, cost)``; the first minimiser in enumeration order wins.
    Cost is the violated soft weight, so negative log-likelihood weights are
    charged when the bit stays 0.
    """
    s = np.asarray(syndrome_bits, dtype=np.uint8).reshape(-1)
    w = log_likelihood_weight(np.broadcast_to(np.asarray(priors, dtype=float), (h.cols,)))
    particular = gf2.solve(h.dense, s)
    if particular is None:
        raise HardUnsat("syndrome is not in the column space of H")
    kernel = gf2.nullspace(h.dense)
    if kernel.shape[0] > max_kernel_dim:
        raise InvalidParameter(f"kernel dimension {kernel.shape[0]} too large to enumerate")
    coeffs = np.array(list(itertools.product([0, 1], repeat=kernel.shape[0])), dtype=np.int64).reshape(-1, kernel.shape[0])
    candidates = (coeffs @ kernel.astype(np.int64) + particular) % 2
    costs = candidates @ np.where(w > 0, w, 0.0) + (1 - candidates) @ np.where(w < 0, -w, 0.0)
    best = int(np.argmin(costs))
    return candidates[best].astype(np.uint8), float(costs[best])


@dataclass
class TrialOutcome:
    failed_x: bool
    failed_z: bool
    residual_x: np.ndarray
    residual_z: np.ndarray
    objective_x: float
    objective_z: float
    status_x: Status
    status_z: Status
    seconds: float
    num_vars: int = 0
    num_clauses: int = 0
    tags: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.failed_x or self.failed_z

    @property
    def timed_out(self) -> bool:
        return "timeout" in self.tags


def sample_trial(code: CssCode, noise: NoiseModel, L: int, seed: int, key=()):
    """Per-sector space-time histories for one trial, reproducible from (seed, key)."""
    rng = trial_rng(seed, *key)
    rounds = [sample_pauli(noise, rng) for _ in range(L)]
    rx = (rng.random((L - 1, code.hz.num_rows)) < noise.qz).astype(np.uint8)
    rz = (rng.random((L - 1, code.hx.num_rows)) < noise.qx).astype(np.uint8)
    x_hist = spacetime_from_errors(code.hz, [r.ex for r in rounds], rx)
    z_hist = spacetime_from_errors(code.hx, [r.ez for r in rounds], rz)
    return x_hist, z_hist


def run_trial(
    code: CssCode,
    noise: NoiseModel,
    L: int = 1,
    seed: int = 0,
    key=(),
    engine: str = "embedded",
    options: EncoderOptions = EncoderOptions(),
    budget: SolverBudget = SolverBudget(),
    solver_cmd: str = None,
    decode=None,
) -> TrialOutcome:
    """Sample, decode both sectors and judge logical failure on the final-round residual.

    ``decode`` overrides the sector decoder; it is called as
    ``decode(h, diff, priors, meas_priors)`` and must return a DecodeResult.
    """
    x_hist, z_hist = sample_trial(code, noise, L, seed, key)
    if decode is None:

        def decode(h, diff, priors, meas):
            return decode_sector(h, diff, priors, L, meas, engine, options, budget, solver_cmd)

    tags = []
    dx = decode(code.hz, x_hist.diff.reshape(-1), noise.p_flip, noise.qz)
    dz = decode(code.hx, z_hist.diff.reshape(-1), noise.p_phase, noise.qx)
    res_x = x_hist.cumulative_error ^ dx.e_dec
    res_z = z_hist.cumulative_error ^ dz.e_dec
    # budget overruns count as failures and are tagged so they can be reported apart
    if dx.status != Status.OPTIMUM or dz.status != Status.OPTIMUM:
        tags.append("timeout")
    failed_x = dx.status != Status.OPTIMUM or _sector_failure(code, res_x, "x")
    failed_z = dz.status != Status.OPTIMUM or _sector_failure(code, res_z, "z")
    return TrialOutcome(
        failed_x,
        failed_z,
        res_x,
        res_z,
        dx.objective,
        dz.objective,
        dx.status,
        dz.status,
        dx.seconds + dz.seconds,
        dx.num_vars + dz.num_vars,
        dx.num_clauses + dz.num_clauses,
        tags,
    )


def _sector_failure(code: CssCode, residual, sector: str) -> bool:
    zero = np.zeros(code.n, dtype=np.uint8)
    if sector == "x":
        if np.any(code.hz @ residual):
            return True
        return logical_failure(code, residual, zero)
    if np.any(code.hx @ residual):
        return True
    return logical_failure(code, zero, residual)


def exhaustive_sector_decoder(h: BitMatrix, diff, priors, meas):
    """Drop-in ``decode`` for run_trial using coset enumeration (capacity setting only)."""
    t0 = time.perf_counter()
    e, cost = exhaustive_decode(h, diff, priors)
    return DecodeResult(e, np.zeros((0, h.num_rows), np.uint8), cost, Status.OPTIMUM, time.perf_counter() - t0)
