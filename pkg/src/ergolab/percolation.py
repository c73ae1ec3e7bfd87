"""Bernoulli bond percolation on windows with the monotone label coupling.

Every edge gets a uniform label in ``[0, 1)``; at parameter ``p`` the edge is
open iff its label is ``<= p``, so one labelling couples all ``p`` at once.
Labels come from a counter-based generator: SplitMix64 applied to the edge's
position key mixed with the seed. They do not depend on edge order, and a
grown window keeps the labels of the edges it already had.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .unionfind import UnionFind
from .windows import Window

RNG_ID = "splitmix64-v1"
DEFAULT_FRACTION_THRESHOLD = 0.05
DEFAULT_SIZE_EXPONENT = 0.6
DEFAULT_MANY = 10


def _splitmix64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def uniform_from_keys(keys: np.ndarray, seed: int, stream: int = 0) -> np.ndarray:
    """Uniform doubles in ``[0, 1)`` as a pure function of ``(seed, stream, key)``."""
    salt = _splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
    salt = _splitmix64(salt ^ np.uint64(stream & 0xFFFFFFFFFFFFFFFF))
    z = _splitmix64(np.asarray(keys, dtype=np.uint64) ^ salt[0])
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True, eq=False)
class EdgeLabels:
    labels: np.ndarray
    seed: int
    rng_id: str = RNG_ID

    def open_mask(self, p: float) -> np.ndarray:
        return self.labels <= p


def edge_labels(w: Window, seed: int, stream: int = 0) -> EdgeLabels:
    return EdgeLabels(uniform_from_keys(w.keys, seed, stream), seed)


@dataclass(eq=False)
class ClusterPartition:
    """Clusters of the open subgraph; cluster ids are minimum member ids."""

    cluster_of: np.ndarray
    open_edges: np.ndarray  # boolean mask over window edges
    sizes: dict
    boundary_touches: dict  # cluster id -> number of boundary vertices it contains

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    def largest(self) -> int:
        return max(self.sizes.values())

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.cluster_of == cid)

    def big_clusters(self, size_threshold: float) -> list:
        return sorted(c for c, s in self.sizes.items() if s >= size_threshold)


def partition_from_open(w: Window, open_mask: np.ndarray) -> ClusterPartition:
    uf = UnionFind(w.n_vertices)
    for u, v in w.edges[open_mask].tolist():
        uf.union(u, v)
    labels = uf.labels()
    roots, counts = np.unique(labels, return_counts=True)
    sizes = dict(zip(roots.tolist(), counts.tolist()))
    bl = labels[w.boundary]
    broots, bcounts = np.unique(bl, return_counts=True)
    touches = {r: 0 for r in sizes}
    touches.update(zip(broots.tolist(), bcounts.tolist()))
    return ClusterPartition(labels, open_mask, sizes, touches)


def percolate(w: Window, labels: EdgeLabels, p: float) -> ClusterPartition:
    """Clusters of the edges with label ``<= p`` (union-find)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return partition_from_open(w, labels.open_mask(p))


# ------------------------------------------------------------------ sweeps

@dataclass
class SweepRow:
    p: float
    seed: int
    largest: int
    largest_frac: float
    big_clusters: int
    spanning: bool
    open_edges: int
    n_vertices: int


def sweep_one(w: Window, labels: EdgeLabels, p_grid: Sequence[float],
              size_threshold: float) -> list:
    """Newman-Ziff pass: add edges in label order, record statistics at each ``p``."""
    grid = list(p_grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("p grid must be sorted ascending")
    order = np.argsort(labels.labels, kind="stable")
    sorted_labels = labels.labels[order]
    eu = w.edges[order, 0].tolist()
    ev = w.edges[order, 1].tolist()
    n = w.n_vertices
    parent = list(range(n))
    size = [1] * n
    side = [0] * n
    if w.side_a is not None:
        for v in np.asarray(w.side_a).tolist():
            side[v] |= 1
    if w.side_b is not None:
        for v in np.asarray(w.side_b).tolist():
            side[v] |= 2
    spanning = any(s == 3 for s in side)
    largest = 1 if n else 0
    big = sum(1 for _ in range(n)) if size_threshold <= 1 else 0
    rows = []
    e = 0
    m = len(eu)
    for p in grid:
        stop = int(np.searchsorted(sorted_labels, p, side="right"))
        while e < stop:
            x, y = eu[e], ev[e]
            e += 1
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            while parent[y] != y:
                parent[y] = parent[parent[y]]
                y = parent[y]
            if x == y:
                continue
            sx, sy = size[x], size[y]
            if sx < sy:
                x, y = y, x
            parent[y] = x
            s = sx + sy
            size[x] = s
            if sx >= size_threshold:
                big -= 1
            if sy >= size_threshold:
                big -= 1
            if s >= size_threshold:
                big += 1
            if s > largest:
                largest = s
            side[x] |= side[y]
            if side[x] == 3:
                spanning = True
        rows.append(SweepRow(float(p), labels.seed, largest, largest / n, big, spanning, stop, n))
        if e >= m and stop >= m:
            e = m
    return rows


def default_size_threshold(n_vertices: int) -> float:
    return n_vertices ** DEFAULT_SIZE_EXPONENT


@dataclass
class PhaseReport:
    p_grid: list
    seeds: list
    rows: list  # SweepRow, sorted by (p, seed)
    mean_largest_frac: list
    mean_big_clusters: list
    span_prob: list
    pc_hat: float | None
    fraction_threshold: float
    size_threshold: float
    monotone: bool

    def csv_rows(self) -> list:
        return [(r.p, r.seed, r.largest_frac, r.big_clusters, int(r.spanning)) for r in self.rows]


def _run_seed(args):
    w, seed, grid, s = args
    return sweep_one(w, edge_labels(w, seed), grid, s)


def sweep(w: Window, p_grid: Sequence[float], seeds: Sequence[int],
          fraction_threshold: float = DEFAULT_FRACTION_THRESHOLD,
          size_threshold: float | None = None, threads: int = 1) -> PhaseReport:
    """Statistics over a ``p`` grid with one shared labelling per seed.

    ``pc_hat`` is the smallest ``p`` whose mean largest-cluster fraction
    exceeds ``fraction_threshold``; the uniqueness indicator is the mean
    number of clusters of size at least ``size_threshold`` (default ``|V|^0.6``).
    """
    grid = [float(p) for p in p_grid]
    seeds = [int(s) for s in seeds]
    s = default_size_threshold(w.n_vertices) if size_threshold is None else size_threshold
    tasks = [(w, seed, grid, s) for seed in seeds]
    if threads > 1 and len(seeds) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_seed = list(pool.map(_run_seed, tasks))
    else:
        per_seed = [_run_seed(t) for t in tasks]
    monotone = all(
        all(b.largest >= a.largest and b.open_edges >= a.open_edges for a, b in zip(rows, rows[1:]))
        for rows in per_seed
    )
    k = len(seeds)
    mean_frac = [sum(rows[i].largest_frac for rows in per_seed) / k for i in range(len(grid))]
    mean_big = [sum(rows[i].big_clusters for rows in per_seed) / k for i in range(len(grid))]
    span = [sum(rows[i].spanning for rows in per_seed) / k for i in range(len(grid))]
    pc_hat = next((p for p, f in zip(grid, mean_frac) if f > fraction_threshold), None)
    rows = sorted((r for rows in per_seed for r in rows), key=lambda r: (r.p, r.seed))
    return PhaseReport(grid, seeds, rows, mean_frac, mean_big, span, pc_hat,
                       fraction_threshold, s, monotone)


# ------------------------------------------------------- interval of Theorem

@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def is_empty(self) -> bool:
        return self.lo >= self.hi

    def __contains__(self, p: float) -> bool:
        return self.lo < p < self.hi


def interval_for_p(n: int, norm_t: float) -> Interval:
    """The window ``1/(2n - ||T|| + 1) < p < 1/||T||`` of infinitely many infinite clusters.

    Check ``.is_empty``: when ``||T||`` is close to ``2n`` the window closes.
    """
    if not 0 < norm_t:
        raise ValueError("||T|| must be positive")
    if norm_t > 2 * n + 1e-12:
        raise ValueError(f"||T|| = {norm_t} exceeds 2n = {2 * n}")
    return Interval(1.0 / (2 * n - norm_t + 1.0), 1.0 / norm_t)


@dataclass
class ProbeReport:
    p: float
    size_threshold: float
    counts: list  # big clusters per seed
    mean_big_clusters: float
    fraction_of_seeds_with_many: float
    fraction_of_seeds_with_none: float
    many: int


def nonuniqueness_probe(w: Window, p: float, seeds: Sequence[int], size_threshold: float,
                        many: int = DEFAULT_MANY) -> ProbeReport:
    """Count clusters of size ``>= size_threshold`` per seed (a finite proxy for N_p)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    counts = []
    for seed in seeds:
        part = percolate(w, edge_labels(w, int(seed)), p)
        counts.append(len(part.big_clusters(size_threshold)))
    k = len(counts)
    return ProbeReport(p, size_threshold, counts, sum(counts) / k,
                       sum(c >= many for c in counts) / k, sum(c == 0 for c in counts) / k, many)


@dataclass
class RescaledEstimate:
    p0: float
    pc_window: float
    pc_second: float | None
    predicted: float
    width: float
    cluster_sizes: list


def _subwindow(w: Window, vertices: np.ndarray, edge_mask: np.ndarray) -> Window:
    new_id = np.full(w.n_vertices, -1, dtype=np.int64)
    new_id[vertices] = np.arange(vertices.size)
    edges = new_id[w.edges[edge_mask]]
    sub = Window(vertices.size, edges, w.labels[edge_mask], w.keys[edge_mask],
                 w.boundary[vertices], w.degree, root=int(new_id[vertices.min()]),
                 radius=w.radius, name=w.name + "|cluster")
    return sub


def rescaled_pc(w: Window, p0: float, p_grid: Sequence[float], seeds: Sequence[int],
                fraction_threshold: float = DEFAULT_FRACTION_THRESHOLD,
                pc_window: float | None = None) -> RescaledEstimate:
    """Second-round threshold on the largest first-round cluster.

    Percolate at ``p0``; on the open subgraph of the largest cluster keep an
    edge at level ``q`` iff its label is ``<= p0 q`` (the conditional label
    ``label/p0`` is uniform). The second-round threshold should be close to
    ``pc_window / p0``. ``width`` is the grid spacing, the resolution of both
    estimates.
    """
    grid = [float(q) for q in p_grid]
    if pc_window is None:
        pc_window = sweep(w, grid, seeds, fraction_threshold).pc_hat
        if pc_window is None:
            raise ValueError("window threshold not reached on the grid")
    if p0 <= pc_window:
        raise ValueError("first round subcritical")
    fracs = np.zeros(len(grid))
    sizes = []
    for seed in seeds:
        lab = edge_labels(w, int(seed))
        part = percolate(w, lab, p0)
        cid = max(part.sizes, key=lambda c: (part.sizes[c], -c))
        verts = part.members(cid)
        inside = np.zeros(w.n_vertices, dtype=bool)
        inside[verts] = True
        emask = part.open_edges & inside[w.edges[:, 0]]
        sub = _subwindow(w, verts, emask)
        sub_labels = EdgeLabels(lab.labels[emask] / p0, lab.seed)
        rows = sweep_one(sub, sub_labels, grid, math.inf)
        fracs += np.array([r.largest_frac for r in rows])
        sizes.append(int(verts.size))
    fracs /= len(seeds)
    second = next((q for q, f in zip(grid, fracs) if f > fraction_threshold), None)
    step = min((b - a for a, b in zip(grid, grid[1:])), default=0.0)
    return RescaledEstimate(p0, pc_window, second, pc_window / p0, step / p0 + step, sizes)


# ----------------------------------------------- insertion/deletion tolerance

def config_weights_scaled(n_edges: int, p: Fraction) -> tuple:
    """Integer weights ``a^k (b-a)^(E-k)`` of configurations by popcount ``k``.

    With ``p = a/b`` the true measure of a configuration with ``k`` open edges
    is this integer divided by ``b^E``.
    """
    a, b = p.numerator, p.denominator
    return tuple(a ** k * (b - a) ** (n_edges - k) for k in range(n_edges + 1)), b ** n_edges


def popcounts(n_edges: int) -> np.ndarray:
    idx = np.arange(1 << n_edges, dtype=np.int64)
    pc = np.zeros(idx.size, dtype=np.int64)
    for j in range(n_edges):
        pc += (idx >> j) & 1
    return pc


def event_measure(event: np.ndarray, pc: np.ndarray, scaled: tuple) -> int:
    """Scaled measure of an event given as a boolean mask over configurations."""
    counts = np.bincount(pc[event], minlength=len(scaled))
    return sum(int(c) * w for c, w in zip(counts.tolist(), scaled))


@dataclass
class ToleranceReport:
    n_edges: int
    p: Fraction
    n_events: int
    checks: int
    failures: list


def tolerance_check(n_edges: int, p: Fraction, events: Sequence[np.ndarray]) -> ToleranceReport:
    """Exact check of ``P(Pi_e A) >= p P(A)`` and ``P(Pi_not_e A) >= (1-p) P(A)``.

    Configurations are the integers ``0..2^E-1`` (bit ``e`` = edge ``e`` open);
    each event is a boolean mask over them. All comparisons are on integers.
    """
    p = Fraction(p)
    scaled, _ = config_weights_scaled(n_edges, p)
    pc = popcounts(n_edges)
    idx = np.arange(1 << n_edges, dtype=np.int64)
    a, b = p.numerator, p.denominator
    failures = []
    checks = 0
    for k, A in enumerate(events):
        A = np.asarray(A, dtype=bool)
        mA = event_measure(A, pc, scaled)
        members = idx[A]
        for e in range(n_edges):
            ins = np.zeros_like(A)
            ins[members | (1 << e)] = True
            dele = np.zeros_like(A)
            dele[members & ~(1 << e)] = True
            m_ins = event_measure(ins, pc, scaled)
            m_del = event_measure(dele, pc, scaled)
            checks += 2
            if b * m_ins < a * mA:
                failures.append(("insertion", k, e))
            if b * m_del < (b - a) * mA:
                failures.append(("deletion", k, e))
    return ToleranceReport(n_edges, p, len(events), checks, failures)


# ------------------------------------------------ cycles and return probability

def _word_closures(g, k: int):
    """Yield ``(word, orbit)`` for all ``m^k`` words over ``psi``, ``m = 2n``.

    ``orbit[x] = [x, psi_{i1}(x), ..., psi_{ik}...psi_{i1}(x)]``, computed by
    depth-first extension so the cost is shared between words.
    """
    psi = [np.asarray(a.perm, dtype=np.int64) for a in g.psi()]
    n = g.rel.n
    start = np.arange(n, dtype=np.int64)

    def rec(prefix, path):
        if len(prefix) == k:
            yield tuple(prefix), path
            return
        cur = path[-1]
        for i, s in enumerate(psi):
            yield from rec(prefix + [i], path + [s[cur]])

    yield from rec([], [start])


def return_probability(g, k: int):
    """``<T^k 1_Delta, 1_Delta>``: summed measure of fixed points of all length-``k`` words."""
    total = 0
    for _, path in _word_closures(g, k):
        fixed = np.flatnonzero(path[-1] == path[0])
        total += sum((g.rel.weights[x] for x in fixed.tolist()), 0)
    return total


def simple_cycle_measure(g, k: int):
    """``sum_{i1..ik} mu(A_{i1..ik})``: measure of points closing a simple ``k``-cycle.

    ``x`` is counted for a word when the word returns to ``x`` after ``k``
    steps and the intermediate points are pairwise distinct and distinct from ``x``.
    """
    total = 0
    for _, path in _word_closures(g, k):
        pts = np.stack(path, axis=1)  # (n, k+1)
        ok = pts[:, -1] == pts[:, 0]
        inner = pts[:, :-1]
        for a in range(inner.shape[1]):
            for b in range(a + 1, inner.shape[1]):
                ok &= inner[:, a] != inner[:, b]
        total += sum((g.rel.weights[x] for x in np.flatnonzero(ok).tolist()), 0)
    return total


def return_probability_matrix(g, k: int):
    """Same as :func:`return_probability` via the adjacency matrix, exact integers."""
    from .spectral import class_graphs
    total = 0
    for cg in class_graphs(g):
        A = cg.adjacency().astype(object)
        # integer matrix power keeps the trace exact
        P = np.identity(A.shape[0], dtype=object)
        for _ in range(k):
            P = P.dot(A)
        for i, x in enumerate(cg.vertices):
            total += g.rel.weights[x] * int(P[i, i])
    return total


def series_ratios(g, p: float, ks: Sequence[int]) -> list:
    """``t_{k+2}/t_k`` with ``t_k = p^k <T^k 1_Delta, 1_Delta>`` for even ``k``.

    Even moments of a self-adjoint operator satisfy ``t_{k+2} <= (p ||T||)^2 t_k``,
    so for ``p < 1/||T||`` every ratio is below 1 and the series converges.
    """
    out = []
    for k in ks:
        if k % 2:
            continue
        tk = float(return_probability_matrix(g, k)) * p ** k
        tk2 = float(return_probability_matrix(g, k + 2)) * p ** (k + 2)
        out.append((k, tk2 / tk if tk > 0 else 0.0))
    return out
