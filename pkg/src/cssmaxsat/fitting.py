"""Curve fits for logical error rates: heuristic low-p form, pseudo-threshold, scaling collapse."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DegenerateFit, InvalidParameter, NoCrossing


@dataclass(frozen=True)
class HeuristicFit:
    """p_L(p) = p**(d_fit/2) * exp(c0 + c1 p + c2 p**2)."""

    d_fit: float
    c0: float
    c1: float
    c2: float
    residual_norm: float

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        return p ** (self.d_fit / 2) * np.exp(self.c0 + self.c1 * p + self.c2 * p**2)

    def params(self):
        return np.array([self.d_fit, self.c0, self.c1, self.c2])


def heuristic_design(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.column_stack([0.5 * np.log(p), np.ones_like(p), p, p**2])


def fit_heuristic(p, p_logical, weights=None) -> HeuristicFit:
    """Linear least squares of ln p_L on (ln(p)/2, 1, p, p^2).

    ``weights`` multiplies each squared residual, e.g. the inverse variance
    of ln p_L.
    """
    p = np.asarray(p, dtype=float)
    y = np.asarray(p_logical, dtype=float)
    if p.shape != y.shape or p.ndim != 1:
        raise InvalidParameter("p and p_L must be 1-d arrays of equal length")
    if p.size < 4:
        raise DegenerateFit("the heuristic fit has 4 parameters and needs at least 4 points")
    if np.any(y <= 0) or np.any(p <= 0):
        raise InvalidParameter("p and p_L must be positive")
    A = heuristic_design(p)
    b = np.log(y)
    if weights is not None:
        sw = np.sqrt(np.asarray(weights, dtype=float))
        A, b = A * sw[:, None], b * sw
    if np.linalg.matrix_rank(A) < 4:
        raise DegenerateFit("design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = b - A @ coef
    return HeuristicFit(*coef.tolist(), float(np.linalg.norm(resid)))


def pseudo_threshold(curve, k: int = 1, lo: float = 1e-6, hi: float = 0.5, xtol: float = 1e-12, grid: int = 2000) -> float:
    """Smallest p in (lo, hi) with p_L(p) = 1 - (1 - p)**k, by bracketing then bisection.

    ``curve`` is any callable p -> p_L, typically a HeuristicFit.
    """
    if k < 1:
        raise InvalidParameter("k must be >= 1")

    def gap(x):
        return float(curve(x)) - (1 - (1 - x) ** k)

    xs = np.geomspace(lo, hi, grid)
    vals = np.array([gap(x) for x in xs])
    scale = np.maximum(np.abs([1 - (1 - x) ** k for x in xs]), 1e-300)
    # gaps within rounding of zero carry no sign information
    signs = np.where(np.abs(vals) <= 1e-9 * scale, 0, np.sign(vals))
    for i in range(len(xs) - 1):
        if signs[i] * signs[i + 1] < 0:
            return float(optimize.bisect(gap, xs[i], xs[i + 1], xtol=xtol, maxiter=200))
    raise NoCrossing(f"p_L(p) never crosses 1-(1-p)^{k} in ({lo}, {hi})")


@dataclass(frozen=True)
class CollapseFit:
    """p_L = f((p - p_th) * d**nu) with f a quadratic a + b x + c x**2."""

    p_th: float
    nu: float
    coeffs: tuple
    residual_norm: float
    converged: bool

    def rescale(self, p, d):
        return (np.asarray(p, dtype=float) - self.p_th) * np.asarray(d, dtype=float) ** self.nu

    def __call__(self, p, d):
        x = self.rescale(p, d)
        a, b, c = self.coeffs
        return a + b * x + c * x**2


def _collapse_arrays(curves):
    ps, ds, ys = [], [], []
    for d, (p, y) in curves.items():
        p = np.asarray(p, dtype=float)
        y = np.asarray(y, dtype=float)
        if p.shape != y.shape:
            raise InvalidParameter(f"curve d={d}: p and p_L differ in length")
        ps.append(p)
        ys.append(y)
        ds.append(np.full(p.size, float(d)))
    return np.concatenate(ps), np.concatenate(ds), np.concatenate(ys)


def _inner(p_th, nu, p, d, y):
    x = (p - p_th) * d**nu
    A = np.column_stack([np.ones_like(x), x, x**2])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    r = y - A @ coef
    return float(r @ r), coef


def fit_collapse(curves: dict, p_th_guess: float = None, nu_guess: float = 1.0, window: float = None, max_iter: int = 4000) -> CollapseFit:
    """Fit the critical scaling ansatz to ``{d: (p, p_L)}`` curves.

    The quadratic is solved exactly for each (p_th, nu); Nelder-Mead searches
    (p_th, nu) from several starts and the best basin is returned. With
    ``window`` only points with |p - p_th_guess| <= window are used.
    """
    if len(curves) < 2:
        raise InvalidParameter("at least two distances are needed to identify nu")
    for d, (p, _) in curves.items():
        if len(p) < 4:
            raise InvalidParameter(f"curve d={d} has fewer than 4 points")
    p, d, y = _collapse_arrays(curves)
    if window is not None:
        if p_th_guess is None:
            raise InvalidParameter("a window needs p_th_guess")
        keep = np.abs(p - p_th_guess) <= window
        p, d, y = p[keep], d[keep], y[keep]
    lo, hi = float(p.min()), float(p.max())
    guesses = [p_th_guess] if p_th_guess is not None else []
    guesses += list(np.linspace(lo, hi, 5))
    nus = [nu_guess, 0.5, 1.0, 1.5]

    def objective(theta):
        if theta[1] <= 0:
            return np.inf
        return _inner(theta[0], theta[1], p, d, y)[0]

    best = None
    for pt in guesses:
        for nu in nus:
            res = optimize.minimize(
                objective,
                x0=[pt, nu],
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-30, "maxiter": max_iter, "maxfev": 2 * max_iter},
            )
            if best is None or res.fun < best.fun:
                best = res
    sse, coef = _inner(best.x[0], best.x[1], p, d, y)
    return CollapseFit(float(best.x[0]), float(best.x[1]), tuple(coef.tolist()), float(np.sqrt(sse)), bool(best.success))


def crossing_count(p, y_small, y_large) -> int:
    """Sign changes of p_L(d_large) - p_L(d_small) along a common p grid."""
    diff = np.asarray(y_large, dtype=float) - np.asarray(y_small, dtype=float)
    signs = np.sign(diff)
    signs = signs[signs != 0]
    return int(np.sum(signs[1:] != signs[:-1]))


def fit_exponential_decay(d, p_logical) -> float:
    """gamma in p_L ~ exp(-gamma d) by least squares on ln p_L."""
    d = np.asarray(d, dtype=float)
    y = np.log(np.asarray(p_logical, dtype=float))
    slope, _ = np.polyfit(d, y, 1)
    return float(-slope)
