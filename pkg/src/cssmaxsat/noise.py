"""Pauli and measurement noise: priors, sampling, syndromes and syndrome differences."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gf2
from .codes import BitMatrix, CssCode
from .errors import InvalidParameter


def _prob_array(x, size, label):
    a = np.broadcast_to(np.asarray(x, dtype=float), (size,)).copy()
    if np.any(a < 0) or np.any(a >= 1) or not np.all(np.isfinite(a)):
        raise InvalidParameter(f"{label} probabilities must lie in [0, 1)")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NoiseModel:
    """Independent single-qubit Pauli priors plus per-check measurement flip priors.

    ``qx`` applies to the rows of Hx (Z-error sector), ``qz`` to the rows of Hz.
    """

    px: np.ndarray
    py: np.ndarray
    pz: np.ndarray
    qx: np.ndarray
    qz: np.ndarray

    def __post_init__(self):
        n = np.size(self.px)
        for label in ("px", "py", "pz"):
            object.__setattr__(self, label, _prob_array(getattr(self, label), n, label))
        for label in ("qx", "qz"):
            value = getattr(self, label)
            object.__setattr__(self, label, _prob_array(value, np.size(value), label))
        if np.any(self.px + self.py + self.pz > 1 + 1e-12):
            raise InvalidParameter("px + py + pz must not exceed 1")

    @property
    def n(self) -> int:
        return self.px.size

    @property
    def p_flip(self) -> np.ndarray:
        """Prior of a bit flip (X or Y) per qubit."""
        return self.px + self.py

    @property
    def p_phase(self) -> np.ndarray:
        """Prior of a phase flip (Z or Y) per qubit."""
        return self.pz + self.py

    @classmethod
    def for_code(cls, code: CssCode, px, py, pz, q=0.0) -> NoiseModel:
        n = code.n
        return cls(
            px=np.broadcast_to(px, (n,)),
            py=np.broadcast_to(py, (n,)),
            pz=np.broadcast_to(pz, (n,)),
            qx=np.broadcast_to(q, (code.hx.num_rows,)),
            qz=np.broadcast_to(q, (code.hz.num_rows,)),
        )


def uniform_depolarizing(n: int, p: float, q: float = 0.0, mx: int = 0, mz: int = 0) -> NoiseModel:
    """px = py = pz = p/3 on every qubit; ``q`` on every check."""
    if not 0 <= p < 1:
        raise InvalidParameter("p must lie in [0, 1)")
    if not 0 <= q < 1:
        raise InvalidParameter("q must lie in [0, 1)")
    third = np.full(n, p / 3)
    return NoiseModel(third, third, third, np.full(mx, float(q)), np.full(mz, float(q)))


def depolarizing_for_code(code: CssCode, p: float, q: float = 0.0) -> NoiseModel:
    return uniform_depolarizing(code.n, p, q, code.hx.num_rows, code.hz.num_rows)


def load_noise(path, code: CssCode) -> NoiseModel:
    """Read a JSON noise spec.

    Either ``{"p": 0.1, "q": 0.0}`` (depolarizing) or per-qubit arrays
    ``{"px": [...], "py": [...], "pz": [...], "qx": [...], "qz": [...]}``.
    """
    spec = json.loads(Path(path).read_text(encoding="utf-8"))
    return noise_from_dict(spec, code)


def noise_from_dict(spec: dict, code: CssCode) -> NoiseModel:
    if "p" in spec:
        return depolarizing_for_code(code, float(spec["p"]), float(spec.get("q", 0.0)))
    n, mx, mz = code.n, code.hx.num_rows, code.hz.num_rows
    sizes = {"px": n, "py": n, "pz": n, "qx": mx, "qz": mz}
    arrays = {}
    for key, size in sizes.items():
        value = spec.get(key, spec.get("q", 0.0) if key in ("qx", "qz") else 0.0)
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 1 and arr.size != size:
            raise InvalidParameter(f"{key} has length {arr.size}, code needs {size}")
        arrays[key] = np.broadcast_to(arr, (size,))
    return NoiseModel(**arrays)


@dataclass(frozen=True)
class PauliSample:
    ex: np.ndarray
    ez: np.ndarray


def sample_pauli(noise: NoiseModel, rng: np.random.Generator) -> PauliSample:
    u = rng.random(noise.n)
    is_x = u < noise.px
    is_y = (u >= noise.px) & (u < noise.px + noise.py)
    is_z = (u >= noise.px + noise.py) & (u < noise.px + noise.py + noise.pz)
    return PauliSample((is_x | is_y).astype(np.uint8), (is_z | is_y).astype(np.uint8))


def syndrome(h: BitMatrix, e) -> np.ndarray:
    e = np.asarray(e)
    if e.shape != (h.cols,):
        raise InvalidParameter(f"error vector has shape {e.shape}, expected ({h.cols},)")
    return (h @ e).astype(np.uint8)


@dataclass(frozen=True)
class SpaceTimeSample:
    """One sector's history over L rounds.

    ``e`` is (L, n) fresh data errors, ``r`` is (L-1, m) measurement flips,
    ``s`` the (L, m) noisy syndromes and ``diff`` the (L, m) differences.
    """

    e: np.ndarray
    r: np.ndarray
    s: np.ndarray
    diff: np.ndarray

    @property
    def rounds(self) -> int:
        return self.e.shape[0]

    @property
    def cumulative_error(self) -> np.ndarray:
        return np.bitwise_xor.reduce(self.e, axis=0)


def syndrome_differences(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.uint8)
    diff = s.copy()
    diff[1:] ^= s[:-1]
    return diff


def spacetime_from_errors(h: BitMatrix, e_rounds, r_rounds) -> SpaceTimeSample:
    """Noisy syndromes and differences for given per-round errors; last round is noise-free."""
    e = np.asarray(e_rounds, dtype=np.uint8).reshape(-1, h.cols)
    L = e.shape[0]
    r = np.asarray(r_rounds, dtype=np.uint8).reshape(L - 1, h.num_rows)
    cumulative = np.bitwise_xor.accumulate(e, axis=0)
    s = gf2.matmul(cumulative, h.dense.T)
    s[: L - 1] ^= r
    return SpaceTimeSample(e, r, s, syndrome_differences(s))


def sample_spacetime(h: BitMatrix, p_flip, q, L: int, rng: np.random.Generator) -> SpaceTimeSample:
    """Fresh data errors every round accumulate; measurement flips on rounds 1..L-1."""
    if L < 1:
        raise InvalidParameter("L must be >= 1")
    p_flip = _prob_array(p_flip, h.cols, "data")
    q = _prob_array(q, h.num_rows, "measurement")
    e = (rng.random((L, h.cols)) < p_flip).astype(np.uint8)
    r = (rng.random((L - 1, h.num_rows)) < q).astype(np.uint8)
    return spacetime_from_errors(h, e, r)


def trial_rng(seed: int, *key) -> np.random.Generator:
    """Independent stream per (seed, key...) regardless of scheduling order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(k) for k in key]]))
