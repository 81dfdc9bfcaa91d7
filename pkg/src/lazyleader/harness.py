"""Monte Carlo experiment runner: configs, statistics, assertions and output files."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import bounds as B
from . import rng as _rng
from .adversaries import AdversaryConfigError, AdversarySpec, generate
from .baselines import FORECASTERS, KERNEL_IDS, run_baseline_batch
from .baselines import default_eta as expert_eta
from .combinatorial import (
    DecisionSet,
    ExplicitSet,
    MSetFamily,
    load_dag,
    run_combinatorial,
    run_combinatorial_batch,
)
from .combinatorial import default_eta as walk_eta
from .core import BatchResult, ContractError, LossMatrix, geometric_grid, play
from .rwfpl import DEFAULT_TIE_BREAK, TIE_BREAKS, run_rwfpl, run_rwfpl_batch

EXPERT_FORECASTERS = ("rwfpl",) + tuple(KERNEL_IDS)
COMBINATORIAL_FORECASTERS = ("gaussian_rwfpl",)
FORECASTER_IDS = EXPERT_FORECASTERS + COMBINATORIAL_FORECASTERS

CSV_COLUMNS = (
    "replication", "t", "forecaster", "adversary", "cumulative_loss",
    "best_action_loss", "regret", "switches", "lead_pack_gt1",
)
COMBINATORIAL_COLUMNS = CSV_COLUMNS + ("d", "m")

PATHWISE_TOL = 1e-9


class ConfigError(ContractError):
    """Malformed or inconsistent experiment configuration."""


# configuration -----------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """One experiment, mirrored field-for-field by the JSON config file.

    ``decision_set`` is used by combinatorial forecasters only:
    ``{"kind": "msets"}``, ``{"kind": "dag", "path": ...}`` or
    ``{"kind": "explicit", "vectors": [[...], ...]}``.  Assertions are names
    or ``{"name": ..., "params": {...}}`` objects.
    """

    forecaster: dict
    adversary: dict
    n: int
    replications: int
    master_seed: int = 0
    N: int | None = None
    d: int | None = None
    m: int | None = None
    decision_set: dict | None = None
    grid: list | None = None
    backend: str | None = None
    outputs: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.forecaster, str):
            self.forecaster = {"id": self.forecaster}
        fid = self.forecaster.get("id")
        if fid not in FORECASTER_IDS:
            raise ConfigError(f"unknown forecaster {fid!r}; expected one of {FORECASTER_IDS}")
        self.forecaster.setdefault("params", {})
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications!r}")
        if not 0 <= int(self.master_seed) <= _rng.MASK64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        try:
            self.adversary_spec
        except AdversaryConfigError as exc:
            raise ConfigError(str(exc)) from None
        if self.combinatorial:
            if self.d is None or self.decision_set is None:
                raise ConfigError("combinatorial forecasters need d and decision_set")
            kind = self.decision_set.get("kind")
            if kind not in ("msets", "dag", "explicit"):
                raise ConfigError(f"unknown decision_set kind {kind!r}")
            if kind == "msets" and self.m is None:
                raise ConfigError("msets decision set needs m")
        else:
            if self.N is None or self.N < 1:
                raise ConfigError("expert forecasters need N >= 1")
        tb = self.forecaster["params"].get("tie_break", DEFAULT_TIE_BREAK)
        if tb not in TIE_BREAKS:
            raise ConfigError(f"tie_break must be one of {TIE_BREAKS}, got {tb!r}")
        if self.backend not in (None, "numba", "numpy"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        for a in self.assertions:
            name = a if isinstance(a, str) else a.get("name")
            if name not in ASSERTIONS:
                raise ConfigError(f"unknown assertion {name!r}; expected one of {sorted(ASSERTIONS)}")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be an object")
        base = path.parent
        ds = doc.get("decision_set")
        if isinstance(ds, dict) and ds.get("kind") == "dag" and "path" in ds:
            ds["path"] = str((base / ds["path"]).resolve()) if not Path(ds["path"]).is_absolute() else ds["path"]
        adv = doc.get("adversary")
        if isinstance(adv, dict):
            params = adv.get("params", adv)
            if "path" in params and not Path(params["path"]).is_absolute():
                params["path"] = str((base / params["path"]).resolve())
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        doc = self.to_dict()
        doc.update(changes)
        return ExperimentConfig.from_dict(doc)

    @property
    def forecaster_id(self) -> str:
        return self.forecaster["id"]

    @property
    def params(self) -> dict:
        return self.forecaster["params"]

    @property
    def combinatorial(self) -> bool:
        return self.forecaster_id in COMBINATORIAL_FORECASTERS

    @property
    def adversary_spec(self) -> AdversarySpec:
        if isinstance(self.adversary, str):
            return AdversarySpec(self.adversary)
        return AdversarySpec.from_dict(self.adversary)

    def width(self) -> int:
        return self.d if self.combinatorial else self.N

    def build_grid(self) -> np.ndarray:
        if self.grid is None:
            return geometric_grid(self.n)
        g = sorted({int(t) for t in self.grid})
        if not g or g[0] < 1 or g[-1] > self.n:
            raise ConfigError(f"grid entries must lie in [1, {self.n}]")
        return np.array(g, dtype=np.int64)

    @property
    def m_value(self) -> int:
        return self.m if self.m is not None else self.dset.m

    @cached_property
    def dset(self) -> DecisionSet:
        return self.build_decision_set()

    def build_decision_set(self) -> DecisionSet:
        ds = self.decision_set
        kind = ds["kind"]
        try:
            if kind == "msets":
                out = MSetFamily(self.d, self.m)
            elif kind == "dag":
                out = load_dag(ds["path"])
            else:
                out = ExplicitSet(ds["vectors"])
        except KeyError as exc:
            raise ConfigError(f"decision_set is missing {exc}") from None
        except ContractError as exc:
            raise ConfigError(str(exc)) from None
        if out.d != self.d:
            raise ConfigError(f"decision set has d={out.d}, config says d={self.d}")
        if self.m is not None and out.m != self.m:
            raise ConfigError(f"decision set has m={out.m}, config says m={self.m}")
        return out

    def build_losses(self) -> LossMatrix:
        try:
            return generate(self.adversary_spec, self.n, self.width(), vectors=self.combinatorial)
        except AdversaryConfigError as exc:
            raise ConfigError(str(exc)) from None

    def eta(self, dset: DecisionSet | None = None) -> float | None:
        """Step size in use: explicit ``params.eta`` or the forecaster's default."""
        eta = self.params.get("eta")
        if eta is not None:
            return float(eta)
        if self.combinatorial:
            return walk_eta(self.d)
        if self.forecaster_id == "rwfpl":
            return None
        return expert_eta(max(self.N, 2), self.n)


# statistics --------------------------------------------------------------------


@dataclass(frozen=True)
class StatSummary:
    """Mean, standard error (sample stdev / sqrt(R)), range and quantiles of one metric."""

    mean: float
    se: float
    min: float
    max: float
    q50: float
    q90: float
    q99: float
    count: int

    @classmethod
    def of(cls, values) -> "StatSummary":
        x = np.asarray(values, dtype=np.float64).ravel()
        if x.size == 0:
            raise ValueError("cannot summarize an empty sample")
        # fsum keeps the mean independent of replication order
        mean = math.fsum(x) / x.size
        if x.size > 1:
            var = math.fsum((x - mean) ** 2) / (x.size - 1)
            se = math.sqrt(var / x.size)
        else:
            se = 0.0
        q50, q90, q99 = np.quantile(x, [0.5, 0.9, 0.99])
        return cls(mean, se, float(x.min()), float(x.max()), float(q50), float(q90), float(q99), int(x.size))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class AssertionResult:
    name: str
    passed: bool
    detail: str
    params: dict = field(default_factory=dict)
    failing: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    batch: BatchResult
    metrics: dict
    assertions: list
    bounds: dict

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def summary_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "metrics": self.metrics,
            "assertions": [a.to_dict() for a in self.assertions],
            "bounds": self.bounds,
        }


# assertions --------------------------------------------------------------------


def _need_rw(cfg: ExperimentConfig, name: str) -> None:
    if cfg.forecaster_id != "rwfpl":
        raise ConfigError(f"assertion {name} applies to the rwfpl forecaster only")


def _need_N2(cfg: ExperimentConfig, name: str) -> None:
    if cfg.combinatorial or cfg.N < 2:
        raise ConfigError(f"assertion {name} needs an expert run with N >= 2")


def _failing(cfg, mask) -> list:
    return [{"replication": int(r), "master_seed": int(cfg.master_seed)} for r in np.flatnonzero(mask)]


def _pathwise(field_name: str, label: str):
    def check(cfg, res, params):
        _need_rw(cfg, label)
        tol = float(params.get("tol", PATHWISE_TOL))
        margin = getattr(res, field_name)
        bad = margin < -tol
        worst = float(margin.min())
        return AssertionResult(
            label, not bad.any(),
            f"{int(bad.sum())} of {margin.size} replications violate (worst slack {worst:.3g}, "
            f"{margin.size * cfg.N} trajectory-comparator pairs)",
            failing=_failing(cfg, bad),
        )
    return check


def _mean_le(label, stat, bound, extra=""):
    ok = stat <= bound
    return AssertionResult(label, ok, f"mean {stat:.6g} <= {bound:.6g}{extra}" if ok else
                           f"mean {stat:.6g} exceeds {bound:.6g}{extra}")


def _check_thm1_regret(cfg, res, params):
    _need_N2(cfg, "thm1_regret")
    return _mean_le("thm1_regret", StatSummary.of(res.final_regret()).mean, B.thm1_bound(cfg.n, cfg.N))


def _check_thm1_switches(cfg, res, params):
    _need_N2(cfg, "thm1_switches")
    return _mean_le("thm1_switches", StatSummary.of(res.final_switches()).mean, B.thm1_switch_bound(cfg.n, cfg.N))


def _check_regret_vs_switches(cfg, res, params):
    k = float(params.get("k_se", 3.0))
    R, C = res.final_regret(), res.final_switches()
    diff = StatSummary.of(R - 2.0 * C)
    mr, mc = StatSummary.of(R).mean, StatSummary.of(C).mean
    bound = 2.0 * mc + k * diff.se
    return _mean_le("regret_vs_switches", mr, bound, f" (2*mean switches {2 * mc:.6g} + {k:g} SE {diff.se:.3g})")


def _lemma2_ts(cfg, res, params):
    ts = params.get("t")
    grid = res.grid
    if ts is None:
        return list(range(grid.size))
    idx = []
    for t in ts:
        hit = np.flatnonzero(grid == int(t))
        if hit.size == 0:
            raise ConfigError(f"lemma2 round t={t} is not on the grid")
        idx.append(int(hit[0]))
    return idx


def _check_lemma2(cfg, res, params):
    _need_rw(cfg, "lemma2")
    _need_N2(cfg, "lemma2")
    k = float(params.get("k_se", 3.0))
    R = res.replications
    lines, ok = [], True
    for g in _lemma2_ts(cfg, res, params):
        t = int(res.grid[g])
        p = float(res.lead_gt1[:, g].mean())
        s = float(res.switch_next[:, g].mean())
        bound = B.lemma2_bound(t, cfg.N)
        se = math.sqrt(s * (1 - s) / R) + 0.5 * math.sqrt(p * (1 - p) / R)
        good = p <= bound and s <= 0.5 * p + k * se
        ok &= good
        lines.append(f"t={t}: P(|A|>1)={p:.5f} (bound {bound:.5f}), P(switch)={s:.5f} "
                     f"(half-pack {0.5 * p:.5f} + {k:g} SE {se:.2g}){'' if good else ' FAIL'}")
    return AssertionResult("lemma2", ok, "; ".join(lines))


def _thm2_regret_bound(cfg, eta):
    if cfg.params.get("eta") is None:
        return B.thm2_regret_bound_tuned(cfg.n, cfg.d, cfg.m_value)
    return B.thm2_regret_bound(cfg.n, cfg.d, cfg.m_value, eta)


def _check_thm2_regret(cfg, res, params):
    if not cfg.combinatorial:
        raise ConfigError("thm2_regret applies to combinatorial runs only")
    return _mean_le("thm2_regret", StatSummary.of(res.final_regret()).mean, _thm2_regret_bound(cfg, cfg.eta()))


def _check_thm2_switches(cfg, res, params):
    if not cfg.combinatorial:
        raise ConfigError("thm2_switches applies to combinatorial runs only")
    bound = B.thm2_switch_bound(cfg.n, cfg.d, cfg.m_value, cfg.eta())
    return _mean_le("thm2_switches", StatSummary.of(res.final_switches()).mean, bound)


def _check_switch_range(cfg, res, params):
    """Mean switches over sqrt(n) lies in [c, hi] (``hi`` optional)."""
    lo = float(params.get("c", 0.3))
    hi = params.get("hi")
    ratio = StatSummary.of(res.final_switches()).mean / math.sqrt(cfg.n)
    ok = ratio >= lo and (hi is None or ratio <= float(hi))
    rng_txt = f"[{lo:g}, {hi:g}]" if hi is not None else f">= {lo:g}"
    return AssertionResult("switches_ge_sqrt", ok, f"mean switches / sqrt(n) = {ratio:.4f}, required {rng_txt}")


def _check_switch_frac(cfg, res, params):
    frac = float(params.get("frac", 0.4))
    mc = StatSummary.of(res.final_switches()).mean
    ok = mc >= frac * cfg.n
    return AssertionResult("switches_ge_frac_n", ok, f"mean switches {mc:.6g} vs {frac:g} n = {frac * cfg.n:.6g}")


def _check_zero_regret(cfg, res, params):
    r = res.regret
    bad = np.any(r != 0.0, axis=1)
    return AssertionResult("zero_regret", not bad.any(), f"{int(bad.sum())} replications with non-zero regret",
                           failing=_failing(cfg, bad))


ASSERTIONS = {
    "lemma1": _pathwise("lemma1_margin", "lemma1"),
    "be_the_leader": _pathwise("btl_margin", "be_the_leader"),
    "thm1_regret": _check_thm1_regret,
    "thm1_switches": _check_thm1_switches,
    "regret_vs_switches": _check_regret_vs_switches,
    "lemma2": _check_lemma2,
    "thm2_regret": _check_thm2_regret,
    "thm2_switches": _check_thm2_switches,
    "switches_ge_sqrt": _check_switch_range,
    "switches_ge_frac_n": _check_switch_frac,
    "zero_regret": _check_zero_regret,
}


# running -----------------------------------------------------------------------


def replication_keys(cfg: ExperimentConfig, start: int = 0, count: int | None = None) -> np.ndarray:
    """Stream keys of replications ``start..start+count-1``; replication r uses stream r."""
    count = cfg.replications - start if count is None else count
    return _rng.stream_keys(int(cfg.master_seed), count, _rng.FORECASTER, start)


def simulate(cfg: ExperimentConfig, keys: np.ndarray | None = None) -> BatchResult:
    """Run the batch kernel for ``cfg`` (all replications unless ``keys`` is given)."""
    losses = cfg.build_losses()
    grid = cfg.build_grid()
    keys = replication_keys(cfg) if keys is None else keys
    fid = cfg.forecaster_id
    try:
        if fid == "rwfpl":
            return run_rwfpl_batch(losses, keys, grid, cfg.backend, cfg.params.get("tie_break", DEFAULT_TIE_BREAK))
        if fid in KERNEL_IDS:
            return run_baseline_batch(fid, losses, keys, grid, cfg.eta(), cfg.backend)
        return run_combinatorial_batch(losses, cfg.dset, cfg.eta(), keys, grid, cfg.backend)
    except ContractError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _metrics(res: BatchResult) -> dict:
    out = {"regret": [], "switches": []}
    if res.lead_gt1 is not None:
        out["lead_pack_gt1"] = []
        out["switch_next"] = []
    for g, t in enumerate(res.grid.tolist()):
        out["regret"].append({"t": t, **StatSummary.of(res.regret[:, g]).to_dict()})
        out["switches"].append({"t": t, **StatSummary.of(res.switches[:, g]).to_dict()})
        if res.lead_gt1 is not None:
            out["lead_pack_gt1"].append({"t": t, **StatSummary.of(res.lead_gt1[:, g]).to_dict()})
            out["switch_next"].append({"t": t, **StatSummary.of(res.switch_next[:, g]).to_dict()})
    if res.lemma1_margin is not None:
        out["lemma1_margin"] = StatSummary.of(res.lemma1_margin).to_dict()
        out["btl_margin"] = StatSummary.of(res.btl_margin).to_dict()
    return out


def bound_values(cfg: ExperimentConfig) -> dict:
    n = cfg.n
    if cfg.combinatorial:
        eta = cfg.eta()
        return {
            "thm2_regret": _thm2_regret_bound(cfg, eta),
            "thm2_switches": B.thm2_switch_bound(n, cfg.d, cfg.m_value, eta),
            "eta": eta,
        }
    if cfg.N < 2:
        return {}
    return {
        "thm1_regret": B.thm1_bound(n, cfg.N),
        "thm1_switches": B.thm1_switch_bound(n, cfg.N),
        "lemma2_at_n": B.lemma2_bound(n, cfg.N),
        "lower": B.lower_bound(n, cfg.N),
    }


def apply_assertions(cfg: ExperimentConfig, res: BatchResult) -> list:
    out = []
    for a in cfg.assertions:
        name, params = (a, {}) if isinstance(a, str) else (a["name"], a.get("params", {}))
        r = ASSERTIONS[name](cfg, res, params)
        r.params = dict(params)
        out.append(r)
    return out


def run_experiment(cfg: ExperimentConfig, emit_files: bool = True) -> ExperimentResult:
    """Simulate, aggregate, check assertions and (optionally) write the output files."""
    res = simulate(cfg)
    result = ExperimentResult(
        config=cfg,
        batch=res,
        metrics=_metrics(res),
        assertions=apply_assertions(cfg, res),
        bounds=bound_values(cfg),
    )
    if emit_files and cfg.outputs.get("dir"):
        emit(result, cfg.outputs["dir"], svg=bool(cfg.outputs.get("svg", False)))
    return result


# emission ----------------------------------------------------------------------


def _num(x) -> str:
    x = float(x)
    if x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def replication_rows(cfg: ExperimentConfig, res: BatchResult | None):
    """CSV rows in replication-major, then t, order."""
    if res is None:
        return
    adv = cfg.adversary_spec.label
    fid = cfg.forecaster_id
    reg = res.regret
    for r in range(res.replications):
        for g, t in enumerate(res.grid.tolist()):
            lead = "" if res.lead_gt1 is None else str(int(res.lead_gt1[r, g]))
            row = [str(r), str(t), fid, adv, _num(res.cum_loss[r, g]), _num(res.best_loss[g]),
                   _num(reg[r, g]), str(int(res.switches[r, g])), lead]
            if cfg.combinatorial:
                row += [str(cfg.d), str(cfg.m_value)]
            yield row


def write_replications_csv(cfg: ExperimentConfig, res: BatchResult | None, path) -> None:
    cols = COMBINATORIAL_COLUMNS if cfg.combinatorial else CSV_COLUMNS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    w.writerows(replication_rows(cfg, res))
    _write_text(path, buf.getvalue())


def curve_rows(cfg: ExperimentConfig, result: ExperimentResult) -> list:
    """Per-t means with the matching bound evaluated at horizon t."""
    rows = []
    for g, t in enumerate(result.batch.grid.tolist()):
        reg = result.metrics["regret"][g]
        sw = result.metrics["switches"][g]
        if cfg.combinatorial:
            eta = cfg.eta()
            rb = _thm2_regret_bound(cfg.replace(n=t, grid=None), eta)
            sb = B.thm2_switch_bound(t, cfg.d, cfg.m_value, eta)
        elif cfg.N >= 2:
            rb, sb = B.thm1_bound(t, cfg.N), B.thm1_switch_bound(t, cfg.N)
        else:
            rb = sb = None
        lead = result.metrics.get("lead_pack_gt1")
        rows.append({
            "t": t,
            "mean_regret": reg["mean"],
            "se_regret": reg["se"],
            "mean_switches": sw["mean"],
            "se_switches": sw["se"],
            "lead_pack_gt1": None if lead is None else lead[g]["mean"],
            "regret_bound": rb,
            "switch_bound": sb,
        })
    return rows


CURVE_COLUMNS = ("t", "mean_regret", "se_regret", "mean_switches", "se_switches",
                 "lead_pack_gt1", "regret_bound", "switch_bound")


def write_curve_csv(rows: list, path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for row in rows:
        w.writerow(["" if row[c] is None else _num(row[c]) for c in CURVE_COLUMNS])
    _write_text(path, buf.getvalue())


def write_svg(rows: list, path, title: str = "") -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = [r["t"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, [r["mean_regret"] for r in rows], marker="o", label="mean regret")
    ax.plot(t, [r["mean_switches"] for r in rows], marker="s", label="mean switches")
    if rows and rows[0]["regret_bound"] is not None:
        ax.plot(t, [r["regret_bound"] for r in rows], ls="--", label="regret bound")
        ax.plot(t, [r["switch_bound"] for r in rows], ls=":", label="switch bound")
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    # fixed metadata keeps the file reproducible
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    finally:
        plt.close(fig)


def _write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def emit(result: ExperimentResult, out_dir, svg: bool = False) -> dict:
    """Write replications.csv, curve.csv, summary.json (and curve.svg); returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror}") from exc
    cfg = result.config
    paths = {"replications": out / "replications.csv", "curve": out / "curve.csv", "summary": out / "summary.json"}
    write_replications_csv(cfg, result.batch, paths["replications"])
    rows = curve_rows(cfg, result)
    write_curve_csv(rows, paths["curve"])
    _write_text(paths["summary"], json.dumps(result.summary_dict(), indent=2, sort_keys=True) + "\n")
    if svg:
        paths["svg"] = out / "curve.svg"
        write_svg(rows, paths["svg"], f"{cfg.forecaster_id} vs {cfg.adversary_spec.label}")
    return paths


# pathwise checks on single records ---------------------------------------------


def verify_pathwise_lemma1(record, losses: LossMatrix, tol: float = PATHWISE_TOL) -> np.ndarray:
    """Per-comparator truth of  L_hat - L_i <= 2C + Z_{i,n+1} - sum_t X_{I_{t-1},t}.

    C counts switches over rounds 1..n+1, i.e. including the switch to the
    unplayed minimizer I_{n+1}.
    """
    ext = record.extension
    if ext is None:
        raise ContractError("record carries no round-(n+1) extension; run it with run_rwfpl")
    if record.n != losses.n:
        raise ContractError(f"record has {record.n} rounds, losses have {losses.n}")
    lhs = record.cumulative_loss - losses.losses.sum(axis=0)
    C = record.switches + int(ext.action_next != int(record.actions[-1]))
    rhs = 2.0 * C + ext.Z_next - math.fsum(ext.x_prev)
    return lhs <= rhs + tol


def verify_be_the_leader(record, losses: LossMatrix, tol: float = PATHWISE_TOL) -> np.ndarray:
    """Per-comparator truth of  sum_{t<=n+1} (l_{I_t,t-1} + X_{I_t,t}) <= L_i + Z_{i,n+1}."""
    ext = record.extension
    if ext is None:
        raise ContractError("record carries no round-(n+1) extension; run it with run_rwfpl")
    acts = np.append(record.actions, ext.action_next)
    # l_{I_t, t-1} with l_0 = 0: round t's choice scored on the previous loss row
    prev_loss = losses.losses[np.arange(losses.n), acts[1:]]
    lhs = math.fsum(prev_loss) + math.fsum(ext.x_chosen)
    return lhs <= losses.losses.sum(axis=0) + ext.Z_next + tol


# replay and sweeps -------------------------------------------------------------


def replay(cfg: ExperimentConfig, replication: int):
    """Rerun replication ``r`` through the sequential path; returns (record, losses)."""
    if not 0 <= replication < cfg.replications:
        raise ConfigError(f"replication must lie in [0, {cfg.replications - 1}]")
    losses = cfg.build_losses()
    stream = _rng.RngStream(int(cfg.master_seed), replication)
    fid = cfg.forecaster_id
    if fid == "rwfpl":
        return run_rwfpl(losses, stream, cfg.params.get("tie_break", DEFAULT_TIE_BREAK)), losses
    if fid in FORECASTERS:
        return play(FORECASTERS[fid](eta=cfg.eta()), losses, stream), losses
    return run_combinatorial(losses, cfg.dset, cfg.eta(), stream), losses


def trace_rows(record, losses: LossMatrix):
    """Per-round trace: t, action (1-based), loss, cumulative loss, best action loss, switches."""
    cum_best = losses.cumulative()[1:].min(axis=1)
    cum = np.cumsum(record.losses_suffered)
    sw = np.concatenate([[0], np.cumsum(record.switch_flags)])
    for t in range(record.n):
        a = record.actions[t]
        act = str(int(a) + 1) if np.ndim(a) == 0 else " ".join(str(i + 1) for i in np.flatnonzero(a))
        yield [str(t + 1), act, _num(record.losses_suffered[t]), _num(cum[t]), _num(cum_best[t]),
               _num(cum[t] - cum_best[t]), str(int(sw[t]))]


TRACE_COLUMNS = ("t", "action", "loss", "cumulative_loss", "best_action_loss", "regret", "switches")


def parse_vary(spec: str) -> tuple[str, list]:
    """``"n=100,1000"`` -> ``("n", [100, 1000])``."""
    if "=" not in spec:
        raise ConfigError(f"--vary expects KEY=V1,V2,..., got {spec!r}")
    key, vals = spec.split("=", 1)
    key = key.strip()
    if key not in ("n", "N", "d", "m", "replications", "master_seed"):
        raise ConfigError(f"cannot vary {key!r}")
    try:
        values = [int(v) for v in vals.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--vary values must be integers, got {vals!r}") from None
    if not values:
        raise ConfigError("--vary needs at least one value")
    return key, values


def sweep(cfg: ExperimentConfig, key: str, values: list, emit_files: bool = True) -> list:
    """Run ``cfg`` once per value of ``key``; each run writes to ``<dir>/<key>=<value>``."""
    out = []
    base = cfg.outputs.get("dir")
    for v in values:
        outputs = dict(cfg.outputs)
        if base:
            outputs["dir"] = str(Path(base) / f"{key}={v}")
        grid = None if key == "n" else cfg.grid
        sub = cfg.replace(**{key: v, "outputs": outputs, "grid": grid})
        out.append((v, run_experiment(sub, emit_files=emit_files)))
    return out


# expert reduction --------------------------------------------------------------


def expert_reduction_cross_check(cfg: ExperimentConfig, k_se: float = 3.0) -> dict:
    """Compare the combinatorial forecaster with rwfpl over the members as experts.

    Every member v becomes an expert with loss v·l_t / m, so its regret is
    scaled back by m.  Returns both regret summaries and whether the means
    agree within ``k_se`` standard errors of the difference.
    """
    from .combinatorial import expert_losses

    if not cfg.combinatorial:
        raise ConfigError("cross-check needs a combinatorial config")
    dset = cfg.dset
    members = dset.enumerate()
    if members is None or members.shape[0] > 8:
        raise ConfigError("cross-check needs a decision set with at most 8 members")
    losses = cfg.build_losses()
    grid = np.array([cfg.n])
    keys = replication_keys(cfg)
    comb = run_combinatorial_batch(losses, dset, cfg.eta(), keys, grid, cfg.backend)
    reduced, _ = expert_losses(losses, dset)
    keys2 = _rng.stream_keys(int(cfg.master_seed), cfg.replications, _rng.FORECASTER, cfg.replications)
    rw = run_rwfpl_batch(reduced, keys2, grid, cfg.backend)
    a = StatSummary.of(comb.final_regret())
    b = StatSummary.of(rw.final_regret() * dset.m)
    se = math.hypot(a.se, b.se)
    gap = abs(a.mean - b.mean)
    return {
        "combinatorial": a.to_dict(),
        "experts": b.to_dict(),
        "gap": gap,
        "se": se,
        "agree": gap <= k_se * se if se > 0 else gap == 0.0,
    }
