"""Domain types and the sequential forecaster protocol.

Actions are 0-based everywhere in the Python API; CSV output and replay
traces print them 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream


class ContractError(ValueError):
    """A caller broke a documented precondition (dimensions, ranges, missing data)."""


class DomainError(ContractError):
    """A closed-form evaluator was called outside its mathematical domain."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


class LossMatrix:
    """Losses ``l[t, i]`` in [0, 1] for ``n`` rounds and ``N`` actions, fixed before play."""

    def __init__(self, losses, n: int | None = None, N: int | None = None):
        arr = np.asarray(losses, dtype=np.float64)
        if arr.ndim != 2:
            raise ContractError(f"losses must be 2-D, got shape {arr.shape}")
        if n is not None and arr.shape[0] != n or N is not None and arr.shape[1] != N:
            raise ContractError(f"losses have shape {arr.shape}, declared ({n}, {N})")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ContractError("need at least one round and one action")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ContractError("every loss must lie in [0, 1]")
        self.losses = _frozen(arr)

    @property
    def n(self) -> int:
        return self.losses.shape[0]

    @property
    def N(self) -> int:
        return self.losses.shape[1]

    def cumulative(self) -> np.ndarray:
        """Cumulative losses ``L[t, i]`` for t = 0..n (row 0 is all zeros)."""
        out = np.zeros((self.n + 1, self.N))
        np.cumsum(self.losses, axis=0, out=out[1:])
        return out

    def __repr__(self) -> str:
        return f"LossMatrix(n={self.n}, N={self.N})"


@dataclass
class CumulativeLoss:
    """Running totals ``L_{i,t}`` after ``t`` absorbed rounds."""

    values: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, N: int) -> "CumulativeLoss":
        return cls(np.zeros(N), 0)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    def absorb(self, row: np.ndarray) -> None:
        self.values = self.values + row
        self.t += 1


@dataclass
class RunRecord:
    """Per-round log of one trajectory.

    ``extension`` is only filled by random-walk runs: it carries the extra
    perturbation column needed for the pathwise regret checks.
    """

    actions: np.ndarray
    losses_suffered: np.ndarray
    regret_vs: np.ndarray
    lead_pack_sizes: np.ndarray | None = None
    extension: "WalkExtension | None" = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.actions.shape[0]

    @property
    def switch_flags(self) -> np.ndarray:
        a = self.actions
        if a.ndim == 1:
            return a[:-1] != a[1:]
        return np.any(a[:-1] != a[1:], axis=1)

    @property
    def switches(self) -> int:
        return int(np.count_nonzero(self.switch_flags))

    @property
    def cumulative_loss(self) -> float:
        return float(self.losses_suffered.sum())

    @property
    def regret(self) -> float:
        return float(self.regret_vs.max())


@dataclass
class WalkExtension:
    """Data from the unplayed round n+1 of a random-walk run.

    ``Z_next``  walk values Z_{i,n+1}
    ``x_prev``  series X_{I_{t-1},t} for t = 1..n+1, with I_0 := I_1
    ``action_next``  the minimizer I_{n+1} of L_n + Z_{n+1}
    ``x_chosen``  series X_{I_t,t} for t = 1..n+1
    """

    Z_next: np.ndarray
    x_prev: np.ndarray
    action_next: int
    x_chosen: np.ndarray


def sticky_argmin(values: np.ndarray, incumbent: int | None = None) -> int:
    """Index of the minimum, keeping ``incumbent`` when it ties; else lowest index."""
    best = values.min()
    if incumbent is not None and incumbent >= 0 and values[incumbent] == best:
        return int(incumbent)
    return int(np.flatnonzero(values == best)[0])


class Forecaster:
    """Sequential forecaster: ``start`` once per game, then one ``step`` per round."""

    name = "forecaster"

    def start(self, N: int, n: int, rng: RngStream) -> None:
        self.N = N
        self.n = n
        self.incumbent: int | None = None

    def step(self, cumulative: CumulativeLoss, rng: RngStream) -> int:
        raise NotImplementedError

    def observe(self, loss_row: np.ndarray) -> None:
        """Hook after the round's losses are revealed (most forecasters ignore it)."""


def forecaster_round(state: Forecaster, cumulative: CumulativeLoss, rng: RngStream) -> int:
    """Play one round: check dimensions, then delegate to the forecaster."""
    if cumulative.N != state.N:
        raise ContractError(f"forecaster built for N={state.N}, cumulative has N={cumulative.N}")
    action = state.step(cumulative, rng)
    state.incumbent = action
    return action


def play(forecaster: Forecaster, losses: LossMatrix, rng: RngStream) -> RunRecord:
    """Run one full game with the sequential protocol."""
    n, N = losses.n, losses.N
    forecaster.start(N, n, rng)
    cum = CumulativeLoss.zeros(N)
    actions = np.empty(n, dtype=np.int64)
    for t in range(n):
        a = forecaster_round(forecaster, cum, rng)
        actions[t] = a
        forecaster.observe(losses.losses[t])
        cum.absorb(losses.losses[t])
    return make_record(actions, losses)


def make_record(actions: np.ndarray, losses: LossMatrix, **kwargs) -> RunRecord:
    rows = np.arange(losses.n)
    suffered = losses.losses[rows, actions]
    regret_vs = suffered.sum() - losses.losses.sum(axis=0)
    return RunRecord(actions=actions, losses_suffered=suffered, regret_vs=regret_vs, **kwargs)


def regret(record: RunRecord, losses: LossMatrix) -> float:
    """Forecaster's cumulative loss minus the best action's, recomputed from ``losses``.

    Not clamped at zero: a lucky trajectory can beat every fixed action.
    """
    if record.actions.ndim != 1 or record.n != losses.n:
        raise ContractError(f"record has {record.n} rounds, losses have {losses.n}")
    if record.actions.min() < 0 or record.actions.max() >= losses.N:
        raise ContractError("record contains an action outside the loss matrix")
    suffered = losses.losses[np.arange(losses.n), record.actions].sum()
    return float(suffered - losses.losses.sum(axis=0).min())


def switch_count(actions: np.ndarray) -> int:
    actions = np.asarray(actions)
    if actions.ndim == 1:
        return int(np.count_nonzero(actions[:-1] != actions[1:]))
    return int(np.count_nonzero(np.any(actions[:-1] != actions[1:], axis=1)))


@dataclass
class BatchResult:
    """Metrics of ``R`` replications sampled on a grid of rounds.

    Arrays indexed ``[r, g]`` refer to round ``grid[g]`` (1-based) of
    replication ``r``.  Random-walk-only fields are ``None`` for other
    forecasters.
    """

    grid: np.ndarray
    cum_loss: np.ndarray
    best_loss: np.ndarray
    switches: np.ndarray
    lead_gt1: np.ndarray | None = None
    switch_next: np.ndarray | None = None
    lemma1_margin: np.ndarray | None = None
    btl_margin: np.ndarray | None = None
    ext_switch: np.ndarray | None = None

    @property
    def replications(self) -> int:
        return self.cum_loss.shape[0]

    @property
    def regret(self) -> np.ndarray:
        return self.cum_loss - self.best_loss[None, :]

    def final_regret(self) -> np.ndarray:
        return self.regret[:, -1]

    def final_switches(self) -> np.ndarray:
        return self.switches[:, -1]


def geometric_grid(n: int) -> np.ndarray:
    """Rounds 1, 2, 4, ... up to ``n``, plus ``n`` itself."""
    pts = []
    t = 1
    while t < n:
        pts.append(t)
        t *= 2
    pts.append(n)
    return np.array(pts, dtype=np.int64)


def check_grid(grid, n: int) -> np.ndarray:
    g = np.asarray(grid, dtype=np.int64)
    if g.ndim != 1 or g.size == 0 or g[0] < 1 or g[-1] > n or np.any(np.diff(g) <= 0):
        raise ContractError(f"grid must be strictly increasing within [1, {n}]")
    return g
