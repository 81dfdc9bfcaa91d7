"""Closed-form bounds for the random-walk forecasters (natural log throughout)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .combinatorial import default_eta
from .core import DomainError

# beyond this the harmonic-type sums switch to their integral upper bounds
DIRECT_SUM_LIMIT = 10_000_000


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def thm1_bound(n: int, N: int) -> float:
    """Expected-regret bound 8 sqrt(2n ln N) + 16 ln n + 16.

    At least twice :func:`thm1_switch_bound`; the logarithmic terms carry a
    factor 4 of slack rather than 2.
    """
    _need(n >= 1, f"n must be >= 1, got {n}")
    _need(N >= 2, f"N must be >= 2, got {N}")
    return 8.0 * math.sqrt(2.0 * n * math.log(N)) + 16.0 * math.log(n) + 16.0


def thm1_switch_bound(n: int, N: int) -> float:
    """Expected switch-count bound 4 sqrt(2n ln N) + 4 ln n + 4."""
    _need(n >= 1, f"n must be >= 1, got {n}")
    _need(N >= 2, f"N must be >= 2, got {N}")
    return 4.0 * math.sqrt(2.0 * n * math.log(N)) + 4.0 * math.log(n) + 4.0


def lemma2_bound(t: int, N: int) -> float:
    """P(|lead pack| > 1) <= 4 sqrt(2 ln N / t) + 8/t; returned even when above 1."""
    _need(t >= 1, f"t must be >= 1, got {t}")
    _need(N >= 2, f"N must be >= 2, got {N}")
    return 4.0 * math.sqrt(2.0 * math.log(N) / t) + 8.0 / t


def _check_pmf_args(t: int, k: int) -> None:
    _need(t >= 1, f"t must be >= 1, got {t}")
    _need(-t + 4 <= k <= t, f"k={k} outside [{-t + 4}, {t}]")
    _need((k - t) % 2 == 0, f"k={k} and t={t} must have the same parity")


def pmf_ratio(t: int, k: int) -> float:
    """p_t(k-4) / p_t(k) for the walk pmf p_t(k) = P(Z_t = k/2), closed form.

    Equals 1 + 4(t+1)(k-2) / ((t-k+2)(t-k+4)).
    """
    _check_pmf_args(t, k)
    return 1.0 + 4.0 * (t + 1) * (k - 2) / ((t - k + 2) * (t - k + 4))


def pmf_ratio_factorial(t: int, k: int) -> float:
    """Same ratio as C(t, (t+k-4)/2) / C(t, (t+k)/2), in exact integer arithmetic."""
    _check_pmf_args(t, k)
    num = math.comb(t, (t + k - 4) // 2)
    den = math.comb(t, (t + k) // 2)
    return num / den


def _check_thm2(n: int, d: int, m: int) -> None:
    _need(n >= 1, f"n must be >= 1, got {n}")
    _need(d >= 2, f"d must be >= 2, got {d}")
    _need(m >= 0, f"m must be >= 0, got {m}")


def thm2_regret_bound(n: int, d: int, m: int, eta: float) -> float:
    """m sqrt(n) (2d/eta + eta sqrt(2 ln d)) + m d (ln n + 1) / eta^2."""
    _check_thm2(n, d, m)
    _need(eta > 0, f"eta must be > 0, got {eta}")
    ld = math.log(d)
    return m * math.sqrt(n) * (2.0 * d / eta + eta * math.sqrt(2.0 * ld)) + m * d * (math.log(n) + 1.0) / eta**2


def thm2_regret_bound_tuned(n: int, d: int, m: int) -> float:
    """4 m sqrt(dn) (ln d)^(1/4) + m (ln n + 1) sqrt(ln d).

    This is the simplified display for the tuned step size; it dominates
    ``thm2_regret_bound(n, d, m, default_eta(d))``, by about 19% at d = 10.
    """
    _check_thm2(n, d, m)
    ld = math.log(d)
    return 4.0 * m * math.sqrt(d * n) * ld**0.25 + m * (math.log(n) + 1.0) * math.sqrt(ld)


def harmonic(n: int) -> float:
    """sum_{t<=n} 1/t; direct up to DIRECT_SUM_LIMIT, else the bound ln n + 1."""
    if n < 1:
        return 0.0
    if n > DIRECT_SUM_LIMIT:
        return math.log(n) + 1.0
    return math.fsum(1.0 / np.arange(1, n + 1, dtype=np.float64))


def inv_sqrt_sum(n: int) -> float:
    """sum_{t<=n} 1/sqrt(t); direct up to DIRECT_SUM_LIMIT, else the bound 2 sqrt(n)."""
    if n < 1:
        return 0.0
    if n > DIRECT_SUM_LIMIT:
        return 2.0 * math.sqrt(n)
    return math.fsum(1.0 / np.sqrt(np.arange(1, n + 1, dtype=np.float64)))


def thm2_switch_bound(n: int, d: int, m: int, eta: float) -> float:
    """Expected switch bound of the Gaussian forecaster, both sums evaluated.

    With a = 2 ln d + sqrt(2 ln d) + 1 (a bound on E max of d squared
    standard normals) the per-round terms are
    m (1 + 2 eta a + eta^2 a^2) / (4 eta^2 t)  and  m (1 + eta a) sqrt(2 ln d) / (eta sqrt t).
    """
    _check_thm2(n, d, m)
    _need(eta > 0, f"eta must be > 0, got {eta}")
    s = math.sqrt(2.0 * math.log(d))
    a = 2.0 * math.log(d) + s + 1.0
    first = m * (1.0 + 2.0 * eta * a + eta**2 * a**2) / (4.0 * eta**2)
    second = m * (1.0 + eta * a) * s / eta
    return first * harmonic(n) + second * inv_sqrt_sum(n)


def lower_bound(n: int, N: int) -> float:
    """sqrt((n/2) ln N): asymptotic minimax regret scale, for context only."""
    _need(n >= 0, f"n must be >= 0, got {n}")
    _need(N >= 2, f"N must be >= 2, got {N}")
    return math.sqrt(n / 2.0 * math.log(N))


def report(which: str, n: int, N: int | None = None, d: int | None = None,
           m: int | None = None, eta: float | None = None, t: int | None = None) -> BoundReport:
    """Evaluate one named bound; the CLI ``bounds`` subcommand prints this."""
    if which in ("thm1", "thm1_switches", "lower"):
        _need(N is not None, f"{which} needs N")
        fn = {"thm1": thm1_bound, "thm1_switches": thm1_switch_bound, "lower": lower_bound}[which]
        return BoundReport(which, fn(n, N), {"n": n, "N": N})
    if which == "lemma2":
        _need(N is not None, "lemma2 needs N")
        t = n if t is None else t
        return BoundReport(which, lemma2_bound(t, N), {"t": t, "N": N})
    if which in ("thm2", "thm2_switches"):
        _need(d is not None and m is not None, f"{which} needs d and m")
        if which == "thm2":
            if eta is None:
                return BoundReport(which, thm2_regret_bound_tuned(n, d, m),
                                   {"n": n, "d": d, "m": m, "eta": default_eta(d), "tuned": True})
            return BoundReport(which, thm2_regret_bound(n, d, m, eta), {"n": n, "d": d, "m": m, "eta": eta})
        eta = default_eta(d) if eta is None else eta
        return BoundReport(which, thm2_switch_bound(n, d, m, eta), {"n": n, "d": d, "m": m, "eta": eta})
    raise DomainError(f"unknown bound {which!r}")


BOUND_NAMES = ("thm1", "thm1_switches", "lemma2", "thm2", "thm2_switches", "lower")
