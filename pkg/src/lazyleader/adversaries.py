"""Oblivious loss generators: the whole loss table exists before play starts."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as _rng
from .combinatorial import LossVectorSequence
from .core import ContractError, LossMatrix

KINDS = ("zeros", "bernoulli", "drifting_leader", "alternating", "uniform_vectors", "custom_file")


class AdversaryConfigError(ContractError):
    pass


@dataclass(frozen=True)
class AdversarySpec:
    """Which loss table to build.

    ``params`` per kind: ``bernoulli`` takes ``p`` (default 0.5),
    ``drifting_leader`` takes ``gap_period`` (default 100), ``custom_file``
    takes ``path``.  Stochastic kinds draw from the adversary stream family
    seeded by ``seed``, never from forecaster streams.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise AdversaryConfigError(f"unknown adversary kind {self.kind!r}; expected one of {KINDS}")

    @classmethod
    def from_dict(cls, doc: dict) -> "AdversarySpec":
        doc = dict(doc)
        try:
            kind = doc.pop("kind")
        except KeyError:
            raise AdversaryConfigError("adversary spec needs a 'kind'") from None
        seed = int(doc.pop("seed", 0))
        params = doc.pop("params", {})
        params = {**params, **doc}
        return cls(kind=kind, params=params, seed=seed)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "seed": self.seed}

    @property
    def label(self) -> str:
        if self.kind == "bernoulli":
            return f"bernoulli({self.params.get('p', 0.5)})"
        if self.kind == "drifting_leader":
            return f"drifting_leader({self.params.get('gap_period', 100)})"
        return self.kind


def _uniforms(seed: int, count: int) -> np.ndarray:
    key = np.array([_rng.stream_key(seed, 0, _rng.ADVERSARY)], dtype=np.uint64)
    return _rng.to_unit(_rng.words_block(key, 0, count)[0])


def read_loss_csv(path) -> np.ndarray:
    """Numeric CSV of losses; a non-numeric first row is treated as a header."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise AdversaryConfigError(f"{path}: no loss rows")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        arr = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise AdversaryConfigError(f"{path}: non-numeric loss entry ({exc})") from None
    if arr.ndim != 2:
        raise AdversaryConfigError(f"{path}: rows have differing lengths")
    return arr


def generate_array(spec: AdversarySpec, n: int, width: int) -> np.ndarray:
    if n < 1 or width < 1:
        raise AdversaryConfigError(f"need n >= 1 and width >= 1, got n={n}, width={width}")
    kind, p = spec.kind, spec.params
    if kind == "zeros":
        return np.zeros((n, width))
    if kind == "bernoulli":
        prob = float(p.get("p", 0.5))
        if not 0.0 <= prob <= 1.0:
            raise AdversaryConfigError(f"bernoulli p must lie in [0, 1], got {prob}")
        return (_uniforms(spec.seed, n * width).reshape(n, width) < prob).astype(np.float64)
    if kind == "uniform_vectors":
        return _uniforms(spec.seed, n * width).reshape(n, width)
    if kind == "alternating":
        if width != 2:
            raise AdversaryConfigError(f"alternating adversary needs exactly 2 columns, got {width}")
        out = np.zeros((n, 2))
        out[0::2, 1] = 1.0
        out[1::2, 0] = 1.0
        return out
    if kind == "drifting_leader":
        period = int(p.get("gap_period", 100))
        if period < 1:
            raise AdversaryConfigError(f"gap_period must be >= 1, got {period}")
        # block b: action b mod width is free, everyone else pays 1
        leader = (np.arange(n) // period) % width
        out = np.ones((n, width))
        out[np.arange(n), leader] = 0.0
        return out
    if kind == "custom_file":
        if "path" not in p:
            raise AdversaryConfigError("custom_file adversary needs a 'path'")
        arr = read_loss_csv(p["path"])
        if arr.shape != (n, width):
            raise AdversaryConfigError(f"{p['path']}: shape {arr.shape}, expected ({n}, {width})")
        return arr
    raise AdversaryConfigError(f"unhandled adversary kind {kind!r}")  # pragma: no cover


def generate(spec: AdversarySpec, n: int, width: int, vectors: bool = False) -> LossMatrix:
    """Loss table for ``n`` rounds and ``width`` actions (or ``d`` components).

    Returns a :class:`LossVectorSequence` when ``vectors`` is true.
    """
    arr = generate_array(spec, n, width)
    try:
        return LossVectorSequence(arr) if vectors else LossMatrix(arr)
    except ContractError as exc:
        raise AdversaryConfigError(str(exc)) from None
