"""Random-walk FPL for online combinatorial optimization.

Actions are binary vectors ``v`` in a finite set ``S ⊂ {0,1}^d`` with
``|v|_1 = m``.  Every one of the ``d`` loss components gets its own Gaussian
random walk with N(0, eta^2) steps, and the forecaster plays
``argmin_{v in S} v·(L_{t-1} + Z_t)`` through a linear-optimization oracle.

Decision sets provided here:

* :class:`MSetFamily` - all size-``m`` subsets of ``d`` components
* :class:`ExplicitSet` - a short explicit list of vectors (brute-force oracle)
* :class:`DagPathSet` - u→w paths of a layered DAG, dynamic-programming oracle

Standard normals come from Box-Muller on pairs of stream words (see
:mod:`lazyleader.rng`); each round consumes ``2*ceil(d/2)`` words.
"""

from __future__ import annotations

import graphlib
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng as _rng
from ._accel import njit, prange, resolve_backend
from .core import BatchResult, ContractError, DomainError, LossMatrix, RunRecord, check_grid

ENUMERATE_LIMIT = 50_000


class DagError(ContractError):
    """The graph cannot serve as a decision set (cycle, stray edge, uneven path length)."""


class LossVectorSequence(LossMatrix):
    """Loss vectors ``l_t ∈ [0,1]^d`` for ``n`` rounds."""

    @property
    def d(self) -> int:
        return self.N

    def __repr__(self) -> str:
        return f"LossVectorSequence(n={self.n}, d={self.d})"


def default_eta(d: int) -> float:
    """Tuned walk step size sqrt(2d / sqrt(2 ln d))."""
    if d < 2:
        raise DomainError(f"default_eta needs d >= 2 (ln d > 0), got d={d}")
    return math.sqrt(2.0 * d / math.sqrt(2.0 * math.log(d)))


class DecisionSet:
    """Finite family of 0/1 vectors with a common weight ``m`` and an exact oracle."""

    d: int
    m: int
    kind: int  # batch-kernel dispatch id

    def oracle(self, z) -> np.ndarray:
        """Incidence vector minimizing ``v·z`` over the set."""
        raise NotImplementedError

    def enumerate(self) -> np.ndarray | None:
        """All members as rows of a ``(K, d)`` int8 array, or ``None`` if too many."""
        return None

    def kernel_arrays(self) -> tuple:
        raise NotImplementedError

    def _check_z(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.d,):
            raise ContractError(f"cost vector must have shape ({self.d},), got {z.shape}")
        if not np.all(np.isfinite(z)):
            raise ContractError("cost vector must be finite")
        return z


class MSetFamily(DecisionSet):
    """All ``C(d, m)`` subsets of size ``m``; the oracle keeps the ``m`` smallest costs.

    Ties go to smaller component indices.
    """

    kind = 0

    def __init__(self, d: int, m: int):
        if d < 1 or not 1 <= m <= d:
            raise ContractError(f"need 1 <= m <= d, got d={d}, m={m}")
        self.d, self.m = int(d), int(m)

    def __repr__(self) -> str:
        return f"MSetFamily(d={self.d}, m={self.m})"

    def oracle(self, z) -> np.ndarray:
        z = self._check_z(z)
        v = np.zeros(self.d, dtype=np.int8)
        v[np.argsort(z, kind="stable")[: self.m]] = 1
        return v

    def enumerate(self) -> np.ndarray | None:
        if math.comb(self.d, self.m) > ENUMERATE_LIMIT:
            return None
        rows = []
        for idx in itertools.combinations(range(self.d), self.m):
            v = np.zeros(self.d, dtype=np.int8)
            v[list(idx)] = 1
            rows.append(v)
        return np.array(rows, dtype=np.int8)

    def kernel_arrays(self):
        return ()


class ExplicitSet(DecisionSet):
    """Explicit list of vectors; the oracle scans all of them (first minimum wins)."""

    kind = 2

    def __init__(self, vectors):
        V = np.asarray(vectors)
        if V.ndim != 2 or V.shape[0] < 1:
            raise ContractError("need a non-empty 2-D array of vectors")
        if not np.all((V == 0) | (V == 1)):
            raise ContractError("vectors must be 0/1")
        weights = V.sum(axis=1)
        if np.any(weights != weights[0]) or weights[0] < 1:
            raise ContractError("all vectors must have the same positive number of ones")
        if len({tuple(r) for r in V.tolist()}) != V.shape[0]:
            raise ContractError("vectors must be distinct")
        self.vectors = V.astype(np.int8)
        self.d = V.shape[1]
        self.m = int(weights[0])

    def __repr__(self) -> str:
        return f"ExplicitSet(K={self.vectors.shape[0]}, d={self.d}, m={self.m})"

    def oracle(self, z) -> np.ndarray:
        z = self._check_z(z)
        return self.vectors[int(np.argmin(self.vectors @ z))].copy()

    def enumerate(self) -> np.ndarray:
        return self.vectors.copy()

    def kernel_arrays(self):
        return (self.vectors,)


class DagPathSet(DecisionSet):
    """Directed u→w paths of a DAG whose edges are the ``d`` loss components.

    Construction rejects cycles, edges that lie on no u→w path, graphs
    without a u→w path, and graphs whose u→w paths differ in length.
    """

    kind = 1

    def __init__(self, n_vertices: int, edges, u: int, w: int):
        edges = [(int(a), int(b)) for a, b in edges]
        if n_vertices < 2:
            raise DagError("need at least two vertices")
        if not (0 <= u < n_vertices and 0 <= w < n_vertices) or u == w:
            raise DagError(f"endpoints u={u}, w={w} must be distinct vertices in [0, {n_vertices})")
        for a, b in edges:
            if not (0 <= a < n_vertices and 0 <= b < n_vertices):
                raise DagError(f"edge ({a}, {b}) references a vertex outside [0, {n_vertices})")
            if a == b:
                raise DagError(f"self-loop at vertex {a}")
        if not edges:
            raise DagError("graph has no edges")
        self.n_vertices = int(n_vertices)
        self.edges = edges
        self.u, self.w = int(u), int(w)
        self.d = len(edges)

        ts = graphlib.TopologicalSorter({v: set() for v in range(n_vertices)})
        for a, b in edges:
            ts.add(b, a)
        try:
            order = list(ts.static_order())
        except graphlib.CycleError as exc:
            raise DagError(f"graph has a cycle through {exc.args[1]}") from None
        self.topo = np.array(order, dtype=np.int64)

        out_adj = [[] for _ in range(n_vertices)]
        in_adj = [[] for _ in range(n_vertices)]
        for e, (a, b) in enumerate(edges):
            out_adj[a].append(e)
            in_adj[b].append(e)
        fwd = self._reach(self.u, out_adj, lambda e: edges[e][1])
        bwd = self._reach(self.w, in_adj, lambda e: edges[e][0])
        if self.w not in fwd:
            raise DagError(f"no path from u={u} to w={w}")
        stray = [e for e, (a, b) in enumerate(edges) if not (a in fwd and b in bwd)]
        if stray:
            raise DagError(f"edges {stray} lie on no u→w path")

        lo = np.full(n_vertices, np.iinfo(np.int64).max)
        hi = np.full(n_vertices, -1)
        lo[self.u] = hi[self.u] = 0
        for v in order:
            for e in in_adj[v]:
                a = edges[e][0]
                if hi[a] >= 0:
                    lo[v] = min(lo[v], lo[a] + 1)
                    hi[v] = max(hi[v], hi[a] + 1)
        if lo[self.w] != hi[self.w]:
            raise DagError(f"u→w paths have lengths between {lo[self.w]} and {hi[self.w]}; need one common length")
        self.m = int(lo[self.w])

        self.edge_src = np.array([a for a, _ in edges], dtype=np.int64)
        self.in_ptr = np.zeros(n_vertices + 1, dtype=np.int64)
        np.cumsum([len(in_adj[v]) for v in range(n_vertices)], out=self.in_ptr[1:])
        self.in_edge = np.array([e for v in range(n_vertices) for e in sorted(in_adj[v])], dtype=np.int64)
        self._out_adj = out_adj

    @staticmethod
    def _reach(start, adj, step):
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for e in adj[v]:
                nxt = step(e)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def __repr__(self) -> str:
        return f"DagPathSet(vertices={self.n_vertices}, d={self.d}, m={self.m}, u={self.u}, w={self.w})"

    def oracle(self, z) -> np.ndarray:
        return dag_oracle(self, z)

    def enumerate(self) -> np.ndarray | None:
        paths = []
        stack = [(self.u, [])]
        while stack:
            v, path = stack.pop()
            if v == self.w:
                inc = np.zeros(self.d, dtype=np.int8)
                inc[path] = 1
                paths.append(inc)
                if len(paths) > ENUMERATE_LIMIT:
                    return None
                continue
            for e in self._out_adj[v]:
                stack.append((self.edges[e][1], path + [e]))
        return np.array(paths, dtype=np.int8)

    def kernel_arrays(self):
        return (self.topo, self.in_ptr, self.in_edge, self.edge_src, self.u, self.w)


def dag_oracle(dag: DagPathSet, z) -> np.ndarray:
    """Minimum-cost u→w path by dynamic programming in topological order.

    Costs may be negative.  Among equally cheap incoming edges of a vertex
    the smaller edge index wins, so the result is deterministic.
    """
    z = dag._check_z(z)
    dist = np.full(dag.n_vertices, np.inf)
    pred = np.full(dag.n_vertices, -1, dtype=np.int64)
    dist[dag.u] = 0.0
    for v in dag.topo:
        for k in range(dag.in_ptr[v], dag.in_ptr[v + 1]):
            e = dag.in_edge[k]
            cand = dist[dag.edge_src[e]] + z[e]
            if cand < dist[v]:
                dist[v] = cand
                pred[v] = e
    inc = np.zeros(dag.d, dtype=np.int8)
    v = dag.w
    while v != dag.u:
        e = pred[v]
        inc[e] = 1
        v = dag.edge_src[e]
    return inc


def load_dag(path) -> DagPathSet:
    """Read an edge-list file: header ``vertices E u w``, then ``E`` lines ``src dst``.

    Blank lines and ``#`` comments are ignored.  Edge ``k`` (0-based, in file
    order) is loss component ``k``.
    """
    path = Path(path)
    rows = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append((lineno, [int(tok) for tok in line.split()]))
            except ValueError:
                raise DagError(f"{path}:{lineno}: expected integers, got {raw.strip()!r}") from None
    if not rows:
        raise DagError(f"{path}: empty DAG file")
    lineno, header = rows[0]
    if len(header) != 4:
        raise DagError(f"{path}:{lineno}: header must be 'vertices E u w'")
    V, E, u, w = header
    body = rows[1:]
    if len(body) != E:
        raise DagError(f"{path}: header declares {E} edges, found {len(body)}")
    edges = []
    for lineno, tok in body:
        if len(tok) != 2:
            raise DagError(f"{path}:{lineno}: edge line must be 'src dst'")
        edges.append((tok[0], tok[1]))
    return DagPathSet(V, edges, u, w)


def save_dag(dag: DagPathSet, path) -> None:
    lines = [f"{dag.n_vertices} {dag.d} {dag.u} {dag.w}"]
    lines += [f"{a} {b}" for a, b in dag.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def random_layered_dag(gen: np.random.Generator, layers: int | None = None, max_edges: int = 12) -> DagPathSet:
    """Random DAG with ``layers`` edge layers (so m = layers), at most ``max_edges`` edges.

    Vertices sit in layers 0..layers with single-vertex end layers; edges only
    join consecutive layers, so every u→w path has exactly ``layers`` edges.
    """
    if layers is None:
        layers = int(gen.integers(2, 5))
    for _ in range(1000):
        inner = [int(gen.integers(1, 4)) for _ in range(layers - 1)]
        widths = [1] + inner + [1]
        if sum(max(a, b) for a, b in zip(widths, widths[1:])) <= max_edges:
            break
    else:
        raise ContractError(f"cannot fit {layers} layers into {max_edges} edges")
    starts = np.cumsum([0] + widths)
    edges: set[tuple[int, int]] = set()
    for k in range(layers):
        src = list(range(starts[k], starts[k + 1]))
        dst = list(range(starts[k + 1], starts[k + 2]))
        # max(len(src), len(dst)) edges touching every vertex of both layers
        src, dst = list(gen.permutation(src)), list(gen.permutation(dst))
        for j in range(max(len(src), len(dst))):
            a = src[j] if j < len(src) else gen.choice(src)
            b = dst[j] if j < len(dst) else gen.choice(dst)
            edges.add((int(a), int(b)))
    candidates = [
        (a, b)
        for k in range(layers)
        for a in range(starts[k], starts[k + 1])
        for b in range(starts[k + 1], starts[k + 2])
        if (a, b) not in edges
    ]
    gen.shuffle(candidates)
    extra = int(gen.integers(0, max(0, max_edges - len(edges)) + 1))
    edges.update(candidates[:extra])
    edge_list = sorted(edges)
    order = gen.permutation(len(edge_list))
    return DagPathSet(int(starts[-1]), [edge_list[i] for i in order], 0, int(starts[-1]) - 1)


@dataclass(frozen=True)
class GaussianWalkState:
    Z: np.ndarray
    t: int
    eta: float

    @classmethod
    def initial(cls, d: int, eta: float) -> "GaussianWalkState":
        if not eta > 0:
            raise ContractError(f"eta must be positive, got {eta}")
        return cls(np.zeros(d), 0, float(eta))


def gauss_rw_step(
    walk: GaussianWalkState,
    L,
    dset: DecisionSet,
    rng: _rng.RngStream,
    incumbent: np.ndarray | None = None,
) -> tuple[np.ndarray, GaussianWalkState]:
    """Add a fresh N(0, eta^2) step to every component, then call the oracle.

    The incumbent is kept when its perturbed cost equals the oracle's.
    """
    L = np.asarray(L, dtype=np.float64)
    if L.shape != walk.Z.shape or dset.d != walk.Z.shape[0]:
        raise ContractError("walk, cumulative loss and decision set disagree on d")
    new = GaussianWalkState(walk.Z + walk.eta * rng.normals(dset.d), walk.t + 1, walk.eta)
    z = L + new.Z
    v = dset.oracle(z)
    if incumbent is not None and float(incumbent @ z) == float(v @ z):
        v = incumbent.copy()
    return v, new


def run_combinatorial(
    losses: LossVectorSequence,
    dset: DecisionSet,
    eta: float,
    rng: _rng.RngStream,
) -> RunRecord:
    """Play ``n`` rounds; ``actions`` is an ``(n, d)`` int8 array of chosen vectors.

    ``regret_vs`` holds one entry per member of ``dset`` when it can be
    enumerated, otherwise a single entry against ``oracle(L_n)``.
    """
    if losses.d != dset.d:
        raise ContractError(f"losses have d={losses.d}, decision set has d={dset.d}")
    n, d = losses.n, losses.d
    walk = GaussianWalkState.initial(d, eta)
    L = np.zeros(d)
    actions = np.zeros((n, d), dtype=np.int8)
    inc = None
    for t in range(n):
        inc, walk = gauss_rw_step(walk, L, dset, rng, inc)
        actions[t] = inc
        L = L + losses.losses[t]
    suffered = np.einsum("td,td->t", actions.astype(np.float64), losses.losses)
    members = dset.enumerate()
    if members is not None:
        regret_vs = suffered.sum() - members @ L
        mode = "enumerated"
    else:
        regret_vs = np.array([suffered.sum() - dset.oracle(L) @ L])
        mode = "oracle"
    return RunRecord(
        actions=actions,
        losses_suffered=suffered,
        regret_vs=regret_vs,
        meta={"d": d, "m": dset.m, "comparators": mode},
    )


def best_in_hindsight(dset: DecisionSet, L) -> float:
    L = np.asarray(L, dtype=np.float64)
    return float(dset.oracle(L) @ L)


def expert_losses(losses: LossVectorSequence, dset: DecisionSet) -> tuple[LossMatrix, np.ndarray]:
    """Treat every member of a small set as an expert with loss ``v·l_t / m``."""
    members = dset.enumerate()
    if members is None:
        raise ContractError("decision set is too large to enumerate")
    return LossMatrix(losses.losses @ members.T.astype(np.float64) / dset.m), members


# batch kernels ---------------------------------------------------------------


@njit(inline="always")
def _oracle_msets_nb(vals, m, out):
    d = vals.shape[0]
    for i in range(d):
        out[i] = 0
    for _ in range(m):
        best = np.inf
        arg = -1
        for i in range(d):
            if out[i] == 0 and (arg < 0 or vals[i] < best):
                best = vals[i]
                arg = i
        out[arg] = 1


@njit(inline="always")
def _oracle_dag_nb(vals, topo, in_ptr, in_edge, edge_src, u, w, dist, pred, out):
    for v in range(dist.shape[0]):
        dist[v] = np.inf
        pred[v] = -1
    dist[u] = 0.0
    for k in range(topo.shape[0]):
        v = topo[k]
        for j in range(in_ptr[v], in_ptr[v + 1]):
            e = in_edge[j]
            cand = dist[edge_src[e]] + vals[e]
            if cand < dist[v]:
                dist[v] = cand
                pred[v] = e
    for i in range(out.shape[0]):
        out[i] = 0
    v = w
    while v != u:
        e = pred[v]
        out[e] = 1
        v = edge_src[e]


@njit(inline="always")
def _oracle_explicit_nb(vals, mat, out):
    best = np.inf
    arg = 0
    for k in range(mat.shape[0]):
        s = 0.0
        for i in range(mat.shape[1]):
            if mat[k, i]:
                s += vals[i]
        if s < best:
            best = s
            arg = k
    for i in range(mat.shape[1]):
        out[i] = mat[arg, i]


@njit(parallel=True)
def _gauss_batch_nb(
    losses, keys, grid, eta, kind, m, topo, in_ptr, in_edge, edge_src, u, w, mat, n_vertices, cum_out, sw_out
):
    n, d = losses.shape
    R = keys.shape[0]
    G = grid.shape[0]
    pairs = (d + 1) // 2
    for r in prange(R):
        key = keys[r]
        L = np.zeros(d)
        Z = np.zeros(d)
        vals = np.empty(d)
        v = np.zeros(d, dtype=np.int8)
        inc = np.zeros(d, dtype=np.int8)
        dist = np.empty(n_vertices)
        pred = np.empty(n_vertices, dtype=np.int64)
        switches = 0
        cum = 0.0
        gi = 0
        for t in range(1, n + 1):
            base = (t - 1) * 2 * pairs
            for j in range(pairs):
                u1 = _rng.unit_open_right_nb(_rng.word_nb(key, base + 2 * j))
                u2 = _rng.unit_nb(_rng.word_nb(key, base + 2 * j + 1))
                rad = math.sqrt(-2.0 * math.log(u1))
                th = 2.0 * math.pi * u2
                Z[2 * j] += eta * (rad * math.cos(th))
                if 2 * j + 1 < d:
                    Z[2 * j + 1] += eta * (rad * math.sin(th))
            for i in range(d):
                vals[i] = L[i] + Z[i]
            if kind == 0:
                _oracle_msets_nb(vals, m, v)
            elif kind == 1:
                _oracle_dag_nb(vals, topo, in_ptr, in_edge, edge_src, u, w, dist, pred, v)
            else:
                _oracle_explicit_nb(vals, mat, v)
            if t > 1:
                same = True
                for i in range(d):
                    if v[i] != inc[i]:
                        same = False
                        break
                if not same:
                    sv = 0.0
                    si = 0.0
                    for i in range(d):
                        if v[i]:
                            sv += vals[i]
                        if inc[i]:
                            si += vals[i]
                    if si == sv:
                        same = True
                    else:
                        switches += 1
                        for i in range(d):
                            inc[i] = v[i]
            else:
                for i in range(d):
                    inc[i] = v[i]
            for i in range(d):
                if inc[i]:
                    cum += losses[t - 1, i]
                L[i] += losses[t - 1, i]
            if gi < G and grid[gi] == t:
                cum_out[r, gi] = cum
                sw_out[r, gi] = switches
                gi += 1


def _oracle_np(dset: DecisionSet, vals: np.ndarray) -> np.ndarray:
    """Row-wise oracle for an ``(R, d)`` array of cost vectors."""
    R, d = vals.shape
    out = np.zeros((R, d), dtype=np.int8)
    if dset.kind == 0:
        idx = np.argsort(vals, axis=1, kind="stable")[:, : dset.m]
        np.put_along_axis(out, idx, 1, axis=1)
    elif dset.kind == 2:
        obj = vals @ dset.vectors.T.astype(np.float64)
        out[:] = dset.vectors[np.argmin(obj, axis=1)]
    else:
        dist = np.full((R, dset.n_vertices), np.inf)
        pred = np.full((R, dset.n_vertices), -1, dtype=np.int64)
        dist[:, dset.u] = 0.0
        for v in dset.topo:
            for k in range(dset.in_ptr[v], dset.in_ptr[v + 1]):
                e = dset.in_edge[k]
                cand = dist[:, dset.edge_src[e]] + vals[:, e]
                better = cand < dist[:, v]
                dist[:, v] = np.where(better, cand, dist[:, v])
                pred[:, v] = np.where(better, e, pred[:, v])
        ar = np.arange(R)
        cur = np.full(R, dset.w)
        for _ in range(dset.m):
            e = pred[ar, cur]
            out[ar, e] = 1
            cur = dset.edge_src[e]
    return out


def _gauss_batch_np(losses, keys, grid, eta, dset, cum_out, sw_out):
    n, d = losses.shape
    R = keys.shape[0]
    G = grid.shape[0]
    nw = _rng.normal_words(d)
    L = np.zeros(d)
    Z = np.zeros((R, d))
    inc = np.zeros((R, d), dtype=np.int8)
    switches = np.zeros(R, dtype=np.int64)
    cum = np.zeros(R)
    gi = 0
    for t in range(1, n + 1):
        Z += eta * _rng.normals_from_words(_rng.words_block(keys, (t - 1) * nw, nw), d)
        vals = L[None, :] + Z
        v = _oracle_np(dset, vals)
        if t > 1:
            differ = np.any(v != inc, axis=1)
            tie = (v * vals).sum(axis=1) == (inc * vals).sum(axis=1)
            moved = differ & ~tie
            switches += moved
            inc[moved] = v[moved]
        else:
            inc = v
        cum += (inc * losses[t - 1]).sum(axis=1)
        L = L + losses[t - 1]
        if gi < G and grid[gi] == t:
            cum_out[:, gi] = cum
            sw_out[:, gi] = switches
            gi += 1


def run_combinatorial_batch(
    losses: LossVectorSequence,
    dset: DecisionSet,
    eta: float,
    keys: np.ndarray,
    grid,
    backend: str | None = None,
) -> BatchResult:
    """Monte Carlo replications of the Gaussian random-walk forecaster.

    ``best_loss`` at each grid round is ``min_v v·L_t`` from the oracle.
    """
    if losses.d != dset.d:
        raise ContractError(f"losses have d={losses.d}, decision set has d={dset.d}")
    if not eta > 0:
        raise ContractError(f"eta must be positive, got {eta}")
    backend = resolve_backend(backend)
    grid = check_grid(grid, losses.n)
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    R, G = keys.shape[0], grid.shape[0]
    cum = np.zeros((R, G))
    sw = np.zeros((R, G), dtype=np.int64)
    L = losses.cumulative()[grid]
    best = np.array([best_in_hindsight(dset, row) for row in L])
    ll = np.ascontiguousarray(losses.losses)
    if backend == "numba":
        empty_i = np.zeros(1, dtype=np.int64)
        topo, in_ptr, in_edge, edge_src, u, w = empty_i, empty_i, empty_i, empty_i, 0, 0
        mat = np.zeros((1, dset.d), dtype=np.int8)
        n_vertices = 1
        if dset.kind == 1:
            topo, in_ptr, in_edge, edge_src, u, w = dset.kernel_arrays()
            n_vertices = dset.n_vertices
        elif dset.kind == 2:
            (mat,) = dset.kernel_arrays()
        _gauss_batch_nb(
            ll, keys, grid, float(eta), dset.kind, dset.m,
            topo, in_ptr, in_edge, edge_src, u, w, np.ascontiguousarray(mat), n_vertices, cum, sw,
        )
    else:
        _gauss_batch_np(ll, keys, grid, float(eta), dset, cum, sw)
    return BatchResult(grid=grid, cum_loss=cum, best_loss=best, switches=sw)
