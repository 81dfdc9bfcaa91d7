"""Comparison forecasters for the experts setting.

* exponentially weighted average (Hedge)
* FPL with fresh i.i.d. two-sided exponential perturbations every round
* FPL with one two-sided exponential perturbation reused for the whole game
* Shrinking Dartboard: Hedge that keeps its incumbent with probability
  equal to the incumbent's weight ratio, resampling otherwise

Per-round draw layout (so the batch kernels replay the sequential path):
Hedge uses one word per round, i.i.d. FPL uses ``N`` words per round, static
FPL uses ``N`` words once, Shrinking Dartboard uses two words per round (keep
coin, then resample).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from ._accel import njit, prange, resolve_backend
from .core import (
    BatchResult,
    ContractError,
    CumulativeLoss,
    Forecaster,
    LossMatrix,
    check_grid,
    sticky_argmin,
)


def default_eta(N: int, n: int) -> float:
    """sqrt(ln N / n); the constant in front is a free choice."""
    if N < 2 or n < 1:
        raise ContractError("default learning rate needs N >= 2 and n >= 1")
    return math.sqrt(math.log(N) / n)


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not eta > 0.0 or not math.isfinite(eta):
        raise ContractError(f"eta must be a positive finite number, got {eta}")
    return eta


def hedge_probabilities(cumulative: np.ndarray, eta: float) -> np.ndarray:
    """Exponential weights normalized after shifting by the largest log-weight."""
    lw = -eta * np.asarray(cumulative, dtype=np.float64)
    w = np.exp(lw - lw.max())
    return w / w.sum()


def _sample_index(weights: np.ndarray, u: float) -> int:
    # first index whose running total exceeds u * total; total is the last running sum
    c = np.cumsum(weights)
    i = int(np.searchsorted(c, u * c[-1], side="right"))
    return min(i, weights.shape[0] - 1)


@dataclass
class HedgeState:
    log_weights: np.ndarray
    eta: float

    @classmethod
    def initial(cls, N: int, eta: float) -> "HedgeState":
        return cls(np.zeros(N), _check_eta(eta))

    def probabilities(self) -> np.ndarray:
        w = np.exp(self.log_weights - self.log_weights.max())
        return w / w.sum()


def hedge_step(state: HedgeState, cumulative: CumulativeLoss, rng: _rng.RngStream) -> int:
    """Sample an action from the exponential weights of ``cumulative``."""
    _check_eta(state.eta)
    state.log_weights = -state.eta * cumulative.values
    w = np.exp(state.log_weights - state.log_weights.max())
    return _sample_index(w, rng.uniform())


@dataclass(frozen=True)
class StaticPerturbation:
    Z1: np.ndarray
    eta: float

    @classmethod
    def draw(cls, N: int, eta: float, rng: _rng.RngStream) -> "StaticPerturbation":
        eta = _check_eta(eta)
        return cls(rng.laplace(N, eta), eta)


def fpl_iid_step(
    cumulative: CumulativeLoss,
    eta: float,
    rng: _rng.RngStream,
    incumbent: int | None = None,
) -> int:
    """Fresh perturbation with density (eta/2)^N exp(-eta |z|_1), then arg min."""
    Z = rng.laplace(cumulative.N, _check_eta(eta))
    return sticky_argmin(cumulative.values + Z, incumbent)


def fpl_static_step(
    cumulative: CumulativeLoss,
    pert: StaticPerturbation,
    incumbent: int | None = None,
) -> int:
    if pert.Z1.shape != cumulative.values.shape:
        raise ContractError("perturbation and cumulative loss disagree on the number of actions")
    return sticky_argmin(cumulative.values + pert.Z1, incumbent)


def shrinking_dartboard_step(
    state: HedgeState,
    incumbent: int | None,
    cumulative: CumulativeLoss,
    rng: _rng.RngStream,
) -> int:
    """Keep ``incumbent`` with probability w_t(inc) / w_{t-1}(inc), else resample.

    ``state.log_weights`` must hold the previous round's log-weights; it is
    replaced by the current ones.  The returned action is distributed
    according to the current exponential weights whenever the incumbent was.
    """
    _check_eta(state.eta)
    u_keep, u_pick = _rng.to_unit(rng.words(2))
    new_lw = -state.eta * cumulative.values
    old_lw = state.log_weights
    state.log_weights = new_lw
    if incumbent is not None:
        ratio = math.exp(new_lw[incumbent] - old_lw[incumbent])
        if u_keep < ratio:
            return int(incumbent)
    w = np.exp(new_lw - new_lw.max())
    return _sample_index(w, u_pick)


class Hedge(Forecaster):
    name = "hedge"

    def __init__(self, eta: float | None = None):
        self.eta = eta

    def start(self, N, n, rng):
        super().start(N, n, rng)
        self.state = HedgeState.initial(N, self.eta if self.eta is not None else default_eta(N, n))

    def step(self, cumulative, rng):
        return hedge_step(self.state, cumulative, rng)


class IIDFPL(Forecaster):
    name = "fpl_iid"

    def __init__(self, eta: float | None = None):
        self.eta = eta

    def start(self, N, n, rng):
        super().start(N, n, rng)
        self._eta = self.eta if self.eta is not None else default_eta(N, n)

    def step(self, cumulative, rng):
        return fpl_iid_step(cumulative, self._eta, rng, self.incumbent)


class StaticFPL(Forecaster):
    name = "fpl_static"

    def __init__(self, eta: float | None = None):
        self.eta = eta

    def start(self, N, n, rng):
        super().start(N, n, rng)
        self.pert = StaticPerturbation.draw(N, self.eta if self.eta is not None else default_eta(N, n), rng)

    def step(self, cumulative, rng):
        return fpl_static_step(cumulative, self.pert, self.incumbent)


class ShrinkingDartboard(Forecaster):
    name = "shrinking_dartboard"

    def __init__(self, eta: float | None = None):
        self.eta = eta

    def start(self, N, n, rng):
        super().start(N, n, rng)
        self.state = HedgeState.initial(N, self.eta if self.eta is not None else default_eta(N, n))

    def step(self, cumulative, rng):
        return shrinking_dartboard_step(self.state, self.incumbent, cumulative, rng)


# batch kernels ---------------------------------------------------------------
#
# Kernel ids: 0 hedge, 1 fpl_iid, 2 fpl_static, 3 shrinking_dartboard.

KERNEL_IDS = {"hedge": 0, "fpl_iid": 1, "fpl_static": 2, "shrinking_dartboard": 3}


@njit(inline="always")
def _sample_nb(lw, N, u):
    mx = -np.inf
    for i in range(N):
        if lw[i] > mx:
            mx = lw[i]
    s = 0.0
    for i in range(N):
        s += math.exp(lw[i] - mx)
    thr = u * s
    acc = 0.0
    for i in range(N):
        acc += math.exp(lw[i] - mx)
        if acc > thr:
            return i
    return N - 1


@njit(inline="always")
def _sticky_argmin_nb(vals, N, inc):
    best = np.inf
    a = 0
    for i in range(N):
        if vals[i] < best:
            best = vals[i]
            a = i
    if inc >= 0 and vals[inc] == best:
        a = inc
    return a


@njit(parallel=True)
def _baseline_batch_nb(kind, losses, keys, grid, eta, cum_out, sw_out):
    n, N = losses.shape
    R = keys.shape[0]
    G = grid.shape[0]
    for r in prange(R):
        key = keys[r]
        L = np.zeros(N)
        lw = np.zeros(N)
        old = np.zeros(N)
        pert = np.zeros(N)
        vals = np.empty(N)
        counter = 0
        if kind == 2:
            for i in range(N):
                pert[i] = _rng.laplace_nb(_rng.word_nb(key, counter), eta)
                counter += 1
        inc = -1
        switches = 0
        cum = 0.0
        gi = 0
        for t in range(1, n + 1):
            if kind == 0:
                for i in range(N):
                    lw[i] = -eta * L[i]
                u = _rng.unit_nb(_rng.word_nb(key, counter))
                counter += 1
                a = _sample_nb(lw, N, u)
            elif kind == 1:
                for i in range(N):
                    vals[i] = L[i] + _rng.laplace_nb(_rng.word_nb(key, counter), eta)
                    counter += 1
                a = _sticky_argmin_nb(vals, N, inc)
            elif kind == 2:
                for i in range(N):
                    vals[i] = L[i] + pert[i]
                a = _sticky_argmin_nb(vals, N, inc)
            else:
                u_keep = _rng.unit_nb(_rng.word_nb(key, counter))
                u_pick = _rng.unit_nb(_rng.word_nb(key, counter + 1))
                counter += 2
                for i in range(N):
                    old[i] = lw[i]
                    lw[i] = -eta * L[i]
                a = -1
                if inc >= 0 and u_keep < math.exp(lw[inc] - old[inc]):
                    a = inc
                if a < 0:
                    a = _sample_nb(lw, N, u_pick)
            if inc >= 0 and a != inc:
                switches += 1
            inc = a
            cum += losses[t - 1, a]
            for i in range(N):
                L[i] += losses[t - 1, i]
            if gi < G and grid[gi] == t:
                cum_out[r, gi] = cum
                sw_out[r, gi] = switches
                gi += 1


def _sample_np(lw: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise inverse-CDF sampling; ``lw`` is (N,) or (R, N), ``u`` is (R,)."""
    lw = np.atleast_2d(lw)
    w = np.exp(lw - lw.max(axis=1, keepdims=True))
    c = np.cumsum(w, axis=1)
    thr = u * c[:, -1]
    idx = np.argmax(c > thr[:, None], axis=1)
    hit = np.any(c > thr[:, None], axis=1)
    return np.where(hit, idx, lw.shape[1] - 1)


def _sticky_argmin_np(vals: np.ndarray, inc: np.ndarray) -> np.ndarray:
    R = vals.shape[0]
    best = vals.min(axis=1)
    is_min = vals == best[:, None]
    first = is_min.argmax(axis=1)
    has_inc = inc >= 0
    keep = has_inc & is_min[np.arange(R), np.where(has_inc, inc, 0)]
    return np.where(keep, inc, first)


def _baseline_batch_np(kind, losses, keys, grid, eta, cum_out, sw_out):
    n, N = losses.shape
    R = keys.shape[0]
    G = grid.shape[0]
    ar = np.arange(R)
    L = np.zeros(N)
    lw = np.zeros(N)
    counter = 0
    pert = None
    if kind == 2:
        pert = _rng.laplace_from_words(_rng.words_block(keys, 0, N), eta)
        counter = N
    inc = np.full(R, -1, dtype=np.int64)
    switches = np.zeros(R, dtype=np.int64)
    cum = np.zeros(R)
    gi = 0
    for t in range(1, n + 1):
        if kind == 0:
            lw = -eta * L
            u = _rng.to_unit(_rng.words_array(keys, counter))
            counter += 1
            a = _sample_np(np.broadcast_to(lw, (R, N)), u)
        elif kind == 1:
            Z = _rng.laplace_from_words(_rng.words_block(keys, counter, N), eta)
            counter += N
            a = _sticky_argmin_np(L[None, :] + Z, inc)
        elif kind == 2:
            a = _sticky_argmin_np(L[None, :] + pert, inc)
        else:
            w = _rng.words_block(keys, counter, 2)
            counter += 2
            u_keep = _rng.to_unit(w[:, 0])
            u_pick = _rng.to_unit(w[:, 1])
            old = lw
            lw = -eta * L
            has_inc = inc >= 0
            safe = np.where(has_inc, inc, 0)
            keep = has_inc & (u_keep < np.exp(lw[safe] - old[safe]))
            a = np.where(keep, inc, _sample_np(np.broadcast_to(lw, (R, N)), u_pick))
        switches += (inc >= 0) & (a != inc)
        inc = a
        cum += losses[t - 1, a]
        L = L + losses[t - 1]
        if gi < G and grid[gi] == t:
            cum_out[:, gi] = cum
            sw_out[:, gi] = switches
            gi += 1


def run_baseline_batch(
    kind: str,
    losses: LossMatrix,
    keys: np.ndarray,
    grid,
    eta: float | None = None,
    backend: str | None = None,
) -> BatchResult:
    """Monte Carlo replications of one baseline; replication ``r`` uses ``keys[r]``."""
    if kind not in KERNEL_IDS:
        raise ContractError(f"unknown baseline {kind!r}; expected one of {sorted(KERNEL_IDS)}")
    backend = resolve_backend(backend)
    eta = _check_eta(eta if eta is not None else default_eta(max(losses.N, 2), losses.n))
    grid = check_grid(grid, losses.n)
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    R, G = keys.shape[0], grid.shape[0]
    cum = np.zeros((R, G))
    sw = np.zeros((R, G), dtype=np.int64)
    kernel = _baseline_batch_nb if backend == "numba" else _baseline_batch_np
    kernel(KERNEL_IDS[kind], np.ascontiguousarray(losses.losses), keys, grid, eta, cum, sw)
    best = losses.cumulative()[grid].min(axis=1)
    return BatchResult(grid=grid, cum_loss=cum, best_loss=best, switches=sw)


FORECASTERS = {
    "hedge": Hedge,
    "fpl_iid": IIDFPL,
    "fpl_static": StaticFPL,
    "shrinking_dartboard": ShrinkingDartboard,
}
