"""Finite windows into Cayley and Schreier graphs.

A window is a finite multigraph together with the set of *boundary*
vertices whose edge neighbourhood was cut off by the truncation. Interior
vertices have full degree ``2n``. Every edge carries a generator label and a
64-bit key that depends only on the edge's position in the infinite graph,
so percolation labels drawn from the key survive growing the window.

Generator specs (as in JSON configs)::

    {"type": "free", "rank": r, "radius": R}        # Cayley graph of F_r
    {"type": "tree", "degree": d, "radius": R}      # d-regular tree (free product of d Z/2)
    {"type": "grid", "dims": [L1, L2, ...]}         # box in Z^k
    {"type": "perm", "generators": [[...], ...], "radius": R, "base": 0}
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

@dataclass(eq=False)
class Window:
    n_vertices: int
    edges: np.ndarray           # (E, 2) int64, undirected, self-loops allowed
    labels: np.ndarray          # (E,) generator index of each edge
    keys: np.ndarray            # (E,) uint64 position keys
    boundary: np.ndarray        # (V,) bool
    degree: int                 # full degree 2n of the infinite graph
    root: int = 0
    radius: int | None = None
    depth: np.ndarray | None = None   # graph distance from the root
    side_a: np.ndarray | None = None  # spanning detection: vertex sets
    side_b: np.ndarray | None = None
    name: str = "window"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric adjacency; a self-loop adds 2 to its diagonal entry."""
        if "adj" not in self._cache:
            u, v = self.edges[:, 0], self.edges[:, 1]
            rows = np.concatenate([u, v])
            cols = np.concatenate([v, u])
            data = np.ones(rows.shape[0], dtype=np.float64)
            A = sp.csr_matrix((data, (rows, cols)), shape=(self.n_vertices,) * 2)
            A.sum_duplicates()
            self._cache["adj"] = A
        return self._cache["adj"]

    def vertex_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def neighbours(self) -> list:
        """Adjacency lists ``[(nbr, edge id), ...]`` per vertex."""
        if "nbrs" not in self._cache:
            nbrs = [[] for _ in range(self.n_vertices)]
            for e, (u, v) in enumerate(self.edges.tolist()):
                nbrs[u].append((v, e))
                if u != v:
                    nbrs[v].append((u, e))
            self._cache["nbrs"] = nbrs
        return self._cache["nbrs"]

    def is_connected(self) -> bool:
        from .unionfind import components
        labs = components(self.n_vertices, self.edges)
        return bool(np.all(labs == 0))

    def stats(self) -> dict:
        return {"radius": self.radius, "V": self.n_vertices, "E": self.n_edges}

    @classmethod
    def from_edges(cls, n_vertices: int, edges, boundary=(), degree: int | None = None,
                   labels=None, root: int = 0, name: str = "custom") -> "Window":
        """Window from an explicit edge list (keys are the edge indices)."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        bmask = np.zeros(n_vertices, dtype=bool)
        bmask[list(boundary)] = True
        labels = np.zeros(len(edges), dtype=np.int64) if labels is None else np.asarray(labels)
        w = cls(n_vertices, edges, labels, np.arange(len(edges), dtype=np.uint64), bmask,
                degree if degree is not None else 0, root=root, name=name)
        w.depth = bfs_depth(w, root)
        if degree is None:
            w.degree = int(w.vertex_degrees().max()) if len(edges) else 0
        w.side_a = np.array([root], dtype=np.int64)
        w.side_b = np.flatnonzero(bmask)
        w.radius = int(w.depth.max()) if n_vertices else 0
        return w


def bfs_depth(w: Window, source: int) -> np.ndarray:
    from scipy.sparse.csgraph import breadth_first_order
    depth = np.full(w.n_vertices, -1, dtype=np.int64)
    if w.n_vertices == 0:
        return depth
    A = w.adjacency()
    order, pred = breadth_first_order(A, source, directed=False, return_predecessors=True)
    depth[source] = 0
    for v in order[1:]:
        depth[v] = depth[pred[v]] + 1
    return depth


def tree_ball(degree: int, radius: int, free_rank: int | None = None) -> Window:
    """Ball of the given radius around the identity in a ``degree``-regular tree.

    With ``free_rank=r`` (``degree == 2r``) the tree is the Cayley graph of the
    free group on ``r`` letters and an edge is labelled by its letter; otherwise
    it is the free product of ``degree`` copies of Z/2 and edges are labelled by
    colour. Vertices are numbered breadth first, children in letter order, so
    the ball of radius ``R`` is a prefix of the ball of radius ``R+1``.
    """
    if degree < 1 or radius < 0:
        raise ValueError("need degree >= 1 and radius >= 0")
    if free_rank is not None and degree != 2 * free_rank:
        raise ValueError("free group of rank r has degree 2r")
    letters = np.arange(degree, dtype=np.int64)
    if free_rank is not None:
        # letters 0..r-1 are generators, r..2r-1 their inverses
        inv_letter = np.concatenate([letters[free_rank:], letters[:free_rank]])
        label_of = letters % free_rank
    else:
        inv_letter = letters
        label_of = letters

    parents, childs, labs = [], [], []
    depth_parts = [np.zeros(1, dtype=np.int64)]
    level_ids = np.zeros(1, dtype=np.int64)
    level_last = np.full(1, -1, dtype=np.int64)
    next_id = 1
    for k in range(radius):
        if k == 0:
            par = np.repeat(level_ids, degree)
            let = np.tile(letters, level_ids.size)
        else:
            # each vertex has degree-1 children: every letter except the inverse of its last
            allowed = letters[None, :] != inv_letter[level_last][:, None]
            par = np.repeat(level_ids, degree - 1)
            let = np.broadcast_to(letters, (level_ids.size, degree))[allowed]
        ids = np.arange(next_id, next_id + par.size, dtype=np.int64)
        next_id += par.size
        parents.append(par)
        childs.append(ids)
        labs.append(label_of[let])
        depth_parts.append(np.full(ids.size, k + 1, dtype=np.int64))
        level_ids, level_last = ids, let
    n = next_id
    if parents:
        edges = np.stack([np.concatenate(parents), np.concatenate(childs)], axis=1)
        labels = np.concatenate(labs)
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
        labels = np.zeros(0, dtype=np.int64)
    depth = np.concatenate(depth_parts)
    boundary = depth == radius
    keys = edges[:, 1].astype(np.uint64)  # an edge is determined by its child
    name = f"free(rank={free_rank})" if free_rank is not None else f"tree(degree={degree})"
    return Window(n, edges, labels, keys, boundary, degree, root=0, radius=radius,
                  depth=depth, side_a=np.array([0]), side_b=np.flatnonzero(boundary),
                  name=f"{name},radius={radius}")


def grid_box(dims) -> Window:
    """Box ``[0,L1) x ... x [0,Lk)`` in Z^k with nearest-neighbour edges."""
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ValueError("grid dims must be positive")
    k = len(dims)
    n = int(np.prod(dims))
    coords = np.indices(dims).reshape(k, -1).T  # row-major ids
    ids = np.arange(n).reshape(dims)
    edge_parts, lab_parts, key_parts = [], [], []
    for j in range(k):
        lo = [slice(None)] * k
        hi = [slice(None)] * k
        lo[j] = slice(0, dims[j] - 1)
        hi[j] = slice(1, dims[j])
        u = ids[tuple(lo)].ravel()
        v = ids[tuple(hi)].ravel()
        edge_parts.append(np.stack([u, v], axis=1))
        lab_parts.append(np.full(u.size, j))
        # key from absolute coordinates of the lower endpoint and direction
        key = np.zeros(u.size, dtype=np.uint64)
        for c in range(k):
            key = key * np.uint64(1 << 20) + coords[u, c].astype(np.uint64)
        key_parts.append(key * np.uint64(k) + np.uint64(j))
    edges = np.concatenate(edge_parts) if edge_parts else np.zeros((0, 2), np.int64)
    boundary = np.zeros(n, dtype=bool)
    for j in range(k):
        boundary |= (coords[:, j] == 0) | (coords[:, j] == dims[j] - 1)
    root = int(ids[tuple(d // 2 for d in dims)])
    w = Window(n, edges.astype(np.int64), np.concatenate(lab_parts), np.concatenate(key_parts),
               boundary, 2 * k, root=root, radius=min(dims) // 2,
               side_a=np.flatnonzero(coords[:, 0] == 0),
               side_b=np.flatnonzero(coords[:, 0] == dims[0] - 1),
               name="grid(" + "x".join(map(str, dims)) + ")")
    w.depth = np.abs(coords - coords[root]).sum(axis=1)
    return w


def schreier_window(generators, radius: int | None = None, base: int = 0) -> Window:
    """Schreier graph of explicit permutations, optionally a ball around ``base``.

    Each point ``x`` of the window contributes the edges ``(x, g_i(x))``;
    fixed points give self-loops.
    """
    gens = [np.asarray(g, dtype=np.int64) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    m = gens[0].size
    for g in gens:
        if g.size != m or not np.array_equal(np.sort(g), np.arange(m)):
            raise ValueError("generators must be permutations of a common point set")
    inv = [np.argsort(g) for g in gens]
    depth = np.full(m, -1, dtype=np.int64)
    depth[base] = 0
    frontier = [base]
    d = 0
    while frontier and (radius is None or d < radius):
        nxt = []
        for x in frontier:
            for g, gi in zip(gens, inv):
                for y in (int(g[x]), int(gi[x])):
                    if depth[y] < 0:
                        depth[y] = d + 1
                        nxt.append(y)
        frontier = nxt
        d += 1
    inside = np.flatnonzero(depth >= 0)
    new_id = np.full(m, -1, dtype=np.int64)
    new_id[inside] = np.arange(inside.size)
    edges, labels, keys = [], [], []
    for i, g in enumerate(gens):
        for x in inside:
            y = int(g[x])
            if new_id[y] >= 0:
                edges.append((new_id[x], new_id[y]))
                labels.append(i)
                keys.append(int(x) * len(gens) + i)
    n = inside.size
    deg = np.zeros(n, dtype=np.int64)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    full = 2 * len(gens)
    boundary = deg < full
    w = Window(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2), np.asarray(labels),
               np.asarray(keys, dtype=np.uint64), boundary, full, root=int(new_id[base]),
               radius=radius, depth=depth[inside], name="perm")
    w.side_a = np.array([w.root])
    w.side_b = np.flatnonzero(boundary)
    return w


def build_window(spec: dict) -> Window:
    """Construct a window from a JSON generator spec (see module docstring)."""
    kind = spec.get("type")
    if kind == "free":
        r = int(spec["rank"])
        return tree_ball(2 * r, int(spec["radius"]), free_rank=r)
    if kind == "tree":
        return tree_ball(int(spec["degree"]), int(spec["radius"]))
    if kind == "grid":
        return grid_box(spec["dims"])
    if kind == "perm":
        return schreier_window(spec["generators"], spec.get("radius"), int(spec.get("base", 0)))
    raise ValueError(f"unknown window type {kind!r}")


def path_window(length: int) -> Window:
    """Path with ``length`` vertices rooted at its centre: a window into Z with one generator."""
    edges = [(i, i + 1) for i in range(length - 1)]
    return Window.from_edges(length, edges, boundary=[0, length - 1], degree=2,
                             root=(length - 1) // 2, name=f"path({length})")
