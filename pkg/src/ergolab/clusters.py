"""Cluster relations, ends counts and cycle statistics of percolation clusters.

Two stand-ins for the infinite-cluster locus are reported side by side: size
at least a threshold, and contact with the window boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

from .bernoulli import FiniteExtension, edge_list
from .eqrel import EqRel
from .percolation import ClusterPartition, edge_labels, percolate
from .unionfind import UnionFind
from .windows import Window

VERDICTS = ("one", "two", "threePlus", "inconclusive")


@dataclass(eq=False)
class ClusterRelation:
    """``R_cl`` on the points of an extension (or on window vertices for one labelling)."""

    rel: EqRel
    class_of: tuple
    locus: tuple  # bool per point: the class is "big"
    size_threshold: float

    def refines(self, other: EqRel) -> bool:
        return self.rel.refines(other)

    def locus_is_saturated(self) -> bool:
        """The big locus is a union of classes."""
        return all(len({self.locus[x] for x in c}) == 1 for c in self.rel.classes)


def cluster_relation(ext: FiniteExtension, g, size_threshold: float | None = None) -> ClusterRelation:
    """Cluster relation on a percolation extension ``(x, omega)``, ``omega`` in ``{0,1}^{E_x}``.

    Two points are related iff they share ``omega`` and their base points are
    joined by open edges. Edge coordinates follow :func:`edge_list`.
    """
    rel = ext.base_rel
    if size_threshold is None:
        size_threshold = max(len(c) for c in rel.classes) ** 0.6
    labels = [None] * ext.rel.n
    for ec in ext.rel.classes:
        x0, om = ext.points[ec[0]]
        members = rel.members(x0)
        pos = {y: i for i, y in enumerate(members)}
        uf = UnionFind(len(members))
        for bit, (u, v, _) in zip(om, edge_list(g, members)):
            if bit:
                uf.union(pos[u], pos[v])
        for i in ec:
            x, _ = ext.points[i]
            labels[i] = (ec[0], members[uf.find(pos[x])])
    cl = EqRel.from_labels(ext.rel.weights, labels, ext.rel.exact)
    locus = tuple(len(cl.members(i)) >= size_threshold for i in range(cl.n))
    return ClusterRelation(cl, cl.class_of, locus, size_threshold)


def cluster_relation_window(w: Window, labels, p: float,
                            size_threshold: float | None = None) -> ClusterRelation:
    """Window stand-in: clusters of one labelling, locus by size or boundary contact."""
    part = percolate(w, labels, p)
    s = w.n_vertices ** 0.6 if size_threshold is None else size_threshold
    cl = EqRel.from_labels([1.0 / w.n_vertices] * w.n_vertices, part.cluster_of.tolist(), exact=False)
    locus = tuple(part.sizes[c] >= s or part.boundary_touches[c] > 0
                  for c in part.cluster_of.tolist())
    return ClusterRelation(cl, cl.class_of, locus, s)


# -------------------------------------------------------------------- ends

@dataclass
class EndsEstimate:
    cluster_id: int
    root: int
    scales: list
    counts: list  # boundary-reaching components of cluster minus ball, per scale
    verdict: str


def _cluster_graph(part: ClusterPartition, w: Window, cid: int):
    verts = part.members(cid)
    new = np.full(w.n_vertices, -1, dtype=np.int64)
    new[verts] = np.arange(verts.size)
    e = w.edges[part.open_edges]
    e = e[(new[e[:, 0]] >= 0) & (e[:, 0] != e[:, 1])]
    u, v = new[e[:, 0]], new[e[:, 1]]
    A = sp.csr_matrix((np.ones(u.size), (u, v)), shape=(verts.size,) * 2)
    return verts, A + A.T


def cluster_root(part: ClusterPartition, w: Window, cid: int) -> int:
    """The window root when it lies in the cluster, else the minimum member."""
    return w.root if part.cluster_of[w.root] == cid else cid


def default_scales(w: Window) -> list:
    r = max(1, (w.radius or 8) // 8)
    return [r, 2 * r, 4 * r]


def ends_estimator(part: ClusterPartition, w: Window, cid: int,
                   scales: Sequence[int] | None = None) -> EndsEstimate:
    """Count components of ``cluster - ball(root, r)`` that reach the window boundary.

    Distances are measured inside the cluster. The verdict needs the same
    category at every scale; a cluster without boundary contact, or a scale
    whose ball swallows every boundary vertex, is inconclusive.
    """
    scales = default_scales(w) if scales is None else list(scales)
    verts, A = _cluster_graph(part, w, cid)
    root = cluster_root(part, w, cid)
    ridx = int(np.searchsorted(verts, root))
    bnd = w.boundary[verts]
    if not bnd.any():
        return EndsEstimate(cid, root, scales, [], "inconclusive")
    dist = shortest_path(A, unweighted=True, indices=ridx, directed=False)
    counts = []
    for r in scales:
        keep = np.flatnonzero(dist > r)
        if keep.size == 0:
            counts.append(0)
            continue
        sub = A[keep][:, keep]
        _, lab = connected_components(sub, directed=False)
        counts.append(int(np.unique(lab[bnd[keep]]).size))
    cats = {("one" if c == 1 else "two" if c == 2 else "threePlus" if c >= 3 else "none") for c in counts}
    verdict = cats.pop() if len(cats) == 1 else "inconclusive"
    if verdict == "none":
        verdict = "inconclusive"
    return EndsEstimate(cid, root, scales, counts, verdict)


# -------------------------------------------------------------------- cost

@dataclass
class CostProxy:
    forest_edges: int
    vertices: int
    clusters: int
    first_betti: int  # on the big locus
    big_vertices: int
    betti_by_cluster: dict

    @property
    def forest_fraction(self) -> float:
        return self.forest_edges / self.vertices


def cost_proxies(part: ClusterPartition, w: Window, size_threshold: float) -> CostProxy:
    """Spanning-forest edge count and first Betti number of the open subgraph on big clusters."""
    n_clusters = part.n_clusters
    forest = w.n_vertices - n_clusters
    e = w.edges[part.open_edges]
    cid = part.cluster_of[e[:, 0]]
    ecount = dict(zip(*np.unique(cid, return_counts=True)))
    betti = {}
    big_v = 0
    total = 0
    for c in part.big_clusters(size_threshold):
        b = int(ecount.get(c, 0)) - part.sizes[c] + 1
        betti[c] = b
        total += b
        big_v += part.sizes[c]
    return CostProxy(forest, w.n_vertices, n_clusters, total, big_v, betti)


# ------------------------------------------------------------ per-cluster table

def cluster_rows(w: Window, seed: int, p: float, size_threshold: float,
                 scales: Sequence[int] | None = None) -> list:
    """Rows ``(seed, p, clusterId, size, boundaryComponents, endsVerdict, betti)`` for big clusters."""
    part = percolate(w, edge_labels(w, seed), p)
    cost = cost_proxies(part, w, size_threshold)
    rows = []
    for c in part.big_clusters(size_threshold):
        est = ends_estimator(part, w, c, scales)
        bc = est.counts[0] if est.counts else 0
        rows.append((seed, p, c, part.sizes[c], bc, est.verdict, cost.betti_by_cluster[c]))
    return rows


# ------------------------------------------------------ indistinguishability

@dataclass
class IndistinguishabilityReport:
    pairs: int
    features: tuple
    p_values: dict
    aggregate_p: float
    rejected: bool
    alpha: float


def _features(part: ClusterPartition, w: Window, c: int, betti: int) -> tuple:
    size = part.sizes[c]
    return (math.log(size), betti / size, part.boundary_touches[c] / size)


def indistinguishability_probe(w: Window, p: float, seeds: Sequence[int], size_threshold: float,
                               n_perm: int = 2000, alpha: float = 0.01,
                               rng_seed: int = 0) -> IndistinguishabilityReport:
    """Paired permutation test on features of two big clusters of the same configuration.

    In each configuration with at least two big clusters, the two with the
    smallest ids form a pair. Features are log size, cycle density and boundary
    density. The sign-flip test asks whether the first member of a pair differs
    systematically from the second; the aggregate p-value is Bonferroni
    corrected over features. This is a statistical probe only.
    """
    names = ("log_size", "betti_density", "boundary_density")
    diffs = []
    for seed in seeds:
        part = percolate(w, edge_labels(w, int(seed)), p)
        big = part.big_clusters(size_threshold)
        if len(big) < 2:
            continue
        cost = cost_proxies(part, w, size_threshold)
        a, b = big[0], big[1]
        fa = _features(part, w, a, cost.betti_by_cluster[a])
        fb = _features(part, w, b, cost.betti_by_cluster[b])
        diffs.append(np.subtract(fa, fb))
    if not diffs:
        return IndistinguishabilityReport(0, names, {}, 1.0, False, alpha)
    D = np.array(diffs)
    rng = np.random.default_rng(rng_seed)
    signs = rng.choice((-1.0, 1.0), size=(n_perm, D.shape[0]))
    obs = np.abs(D.mean(axis=0))
    null = np.abs(signs @ D / D.shape[0])
    pv = {nm: float((1 + np.sum(null[:, j] >= obs[j] - 1e-15)) / (n_perm + 1))
          for j, nm in enumerate(names)}
    agg = min(1.0, len(names) * min(pv.values()))
    return IndistinguishabilityReport(D.shape[0], names, pv, agg, agg < alpha, alpha)
