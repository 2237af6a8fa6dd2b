"""Triangulation of simple polygons.

Primary pipeline: sample the outline at spacing <= target_h, lay a hexagonal
lattice over the interior (kept clear of a protection band along the outline
so the boundary subsegments survive as Delaunay edges), triangulate the point
cloud, and keep the triangles whose centroid lies inside the polygon. The
result is accepted only if it tiles the polygon area exactly and its
topological boundary matches the outline; otherwise we fall back to
quality-greedy ear clipping. Either way, longest-edge bisection (LEPP walks)
then refines every triangle whose longest edge exceeds the target. Uniform
midpoint refinement is kept separately for nested mesh pairs (error
estimation by comparing h and h/2 on nested spaces).
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay, QhullError

from ..errors import MeshError, SingularMapError
from ..geometry import GEOM_TOL, Polygon2D, _cross2

__all__ = ["TriMesh", "mesh_polygon"]


@dataclass(frozen=True)
class TriMesh:
    """Conforming triangle mesh: ccw triangles, flagged boundary nodes."""

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_nodes: np.ndarray
    h: float

    @classmethod
    def from_arrays(cls, nodes, triangles) -> "TriMesh":
        nodes = np.ascontiguousarray(np.asarray(nodes, dtype=float))
        triangles = np.ascontiguousarray(np.asarray(triangles, dtype=np.int64))
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise MeshError("nodes must form an (N, 2) array")
        if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
            raise MeshError("triangles must form a nonempty (M, 3) index array")
        edges = _edge_array(triangles)
        uniq, counts = np.unique(edges, axis=0, return_counts=True)
        if counts.max(initial=0) > 2:
            raise MeshError("non-conforming mesh: an edge belongs to more than two triangles")
        boundary = np.unique(uniq[counts == 1])
        P = nodes[triangles]
        lengths = np.linalg.norm(P - np.roll(P, -1, axis=1), axis=2)
        nodes.flags.writeable = False
        triangles.flags.writeable = False
        boundary.flags.writeable = False
        return cls(nodes=nodes, triangles=triangles, boundary_nodes=boundary, h=float(lengths.max()))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def areas(self) -> np.ndarray:
        P = self.nodes[self.triangles]
        return 0.5 * _cross2(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])

    def interior_nodes(self) -> np.ndarray:
        mask = np.ones(self.n_nodes, dtype=bool)
        mask[self.boundary_nodes] = False
        return np.nonzero(mask)[0]

    def refined(self) -> "TriMesh":
        """Uniform midpoint refinement: each triangle splits into four similar
        children; the result is nested in this mesh."""
        T = self.triangles
        edges = np.sort(np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]]), axis=1)
        uniq, inverse = np.unique(edges, axis=0, return_inverse=True)
        mid_index = self.n_nodes + np.arange(len(uniq))
        midpoints = 0.5 * (self.nodes[uniq[:, 0]] + self.nodes[uniq[:, 1]])
        m = len(T)
        ab = mid_index[inverse[:m]]
        bc = mid_index[inverse[m : 2 * m]]
        ca = mid_index[inverse[2 * m :]]
        a, b, c = T[:, 0], T[:, 1], T[:, 2]
        children = np.concatenate(
            [
                np.column_stack([a, ab, ca]),
                np.column_stack([ab, b, bc]),
                np.column_stack([ca, bc, c]),
                np.column_stack([ab, bc, ca]),
            ]
        )
        return TriMesh.from_arrays(np.vstack([self.nodes, midpoints]), children)

    def transformed(self, B) -> "TriMesh":
        """Image mesh under an invertible linear map (same connectivity)."""
        B = np.asarray(B, dtype=float)
        det = float(np.linalg.det(B))
        if abs(det) <= GEOM_TOL:
            raise SingularMapError("non-invertible map")
        T = self.triangles[:, [0, 2, 1]] if det < 0 else self.triangles
        return TriMesh.from_arrays(self.nodes @ B.T, T)

    def dump(self, path) -> None:
        """Plain-text listing: node lines "x y", triangle lines "i j k", then
        one line with the boundary node indices."""
        with open(path, "w") as fh:
            for x, y in self.nodes:
                fh.write(f"{float(x)!r} {float(y)!r}\n")
            for a, b, c in self.triangles:
                fh.write(f"{a} {b} {c}\n")
            fh.write(" ".join(str(i) for i in self.boundary_nodes) + "\n")


def _edge_array(T: np.ndarray) -> np.ndarray:
    return np.sort(np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]]), axis=1)


def _sample_boundary(V: np.ndarray, spacing: float) -> np.ndarray:
    """Points along the outline, in order, at most `spacing` apart."""
    pts = []
    n = len(V)
    for i in range(n):
        p = V[i]
        q = V[(i + 1) % n]
        seg = max(1, int(np.ceil(np.linalg.norm(q - p) / spacing)))
        t = (np.arange(seg) / seg)[:, None]
        pts.append(p[None] * (1.0 - t) + q[None] * t)
    return np.concatenate(pts)


def _hex_grid(V: np.ndarray, s: float) -> np.ndarray:
    """Hexagonal lattice covering the bounding box of V with spacing s."""
    xmin, ymin = V.min(axis=0)
    xmax, ymax = V.max(axis=0)
    dy = s * np.sqrt(3.0) / 2.0
    ys = np.arange(ymin + dy, ymax, dy)
    if len(ys) == 0:
        return np.empty((0, 2))
    rows = []
    for k, y in enumerate(ys):
        x0 = xmin + (s / 2.0 if k % 2 else s)
        xs = np.arange(x0, xmax, s)
        rows.append(np.column_stack([xs, np.full(len(xs), y)]))
    return np.concatenate(rows) if rows else np.empty((0, 2))


def _dist_to_outline(points: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Distance from each point to the polygon outline (min over edges)."""
    P = V
    D = np.roll(V, -1, axis=0) - V
    L2 = np.maximum(np.sum(D * D, axis=1), 1e-300)
    out = np.empty(len(points))
    for lo in range(0, len(points), 2048):
        blk = points[lo : lo + 2048]
        rel = blk[:, None, :] - P[None]
        t = np.clip(np.einsum("mnd,nd->mn", rel, D) / L2, 0.0, 1.0)
        gap = rel - t[..., None] * D[None]
        out[lo : lo + 2048] = np.sqrt(np.sum(gap * gap, axis=2)).min(axis=1)
    return out


def _points_in_polygon(points: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Crossing-number test; points near the outline should be prefiltered."""
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(V)
    for i in range(n):
        xi, yi = V[i]
        xj, yj = V[i - 1]
        cond = (yi > y) != (yj > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            cross_x = (xj - xi) * (y - yi) / (yj - yi) + xi
        inside ^= cond & (x < cross_x)
    return inside


def _grid_delaunay(polygon: Polygon2D, target_h: float):
    """Fast-path triangulation; returns (nodes, triangles) or None on any
    mismatch (the caller falls back to ear clipping)."""
    V = polygon.vertices
    boundary = _sample_boundary(V, 0.98 * target_h)
    seg = np.linalg.norm(np.roll(boundary, -1, axis=0) - boundary, axis=1)
    protect = 0.55 * seg.max()
    cand = _hex_grid(V, 0.95 * target_h)
    if len(cand):
        cand = cand[_points_in_polygon(cand, V)]
    if len(cand):
        cand = cand[_dist_to_outline(cand, V) >= protect]
    pts = np.vstack([boundary, cand]) if len(cand) else boundary
    if len(pts) < 3:
        return None
    try:
        tri = Delaunay(pts)
    except QhullError:
        return None
    T = tri.simplices.astype(np.int64)
    P = pts[T]
    area2 = _cross2(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    flip = area2 < 0.0
    T[flip] = T[flip][:, ::-1]
    scale = max(1.0, float(np.abs(V).max()))
    T = T[np.abs(area2) > GEOM_TOL * scale * scale]
    if len(T) == 0:
        return None
    centroids = pts[T].mean(axis=1)
    T = T[_points_in_polygon(centroids, V)]
    if len(T) == 0:
        return None
    P = pts[T]
    total = 0.5 * float(np.abs(_cross2(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])).sum())
    if abs(total - polygon.area) > 1e-9 * polygon.area:
        return None
    used = np.unique(T)
    remap = np.full(len(pts), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return pts[used], remap[T]


def _ear_clip(V: np.ndarray, tol: float) -> np.ndarray:
    """Greedy ear clipping, always taking the best-shaped available ear."""
    n = len(V)
    scale = max(1.0, float(np.abs(V).max()))
    eps = tol * scale * scale
    dist_eps = tol * scale
    idx = list(range(n))
    out = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * n:
            raise MeshError("ear clipping did not terminate; polygon may be non-simple")
        P = V[idx]
        prev = np.roll(P, 1, axis=0)
        nxt = np.roll(P, -1, axis=0)
        cr = _cross2(P - prev, nxt - P)
        convex = cr > eps
        if not np.any(convex):
            flat = np.abs(cr) <= eps
            if np.any(flat):
                idx.pop(int(np.argmax(flat)))
                continue
            raise MeshError("no convex corner found; polygon may be non-simple")
        cand = np.nonzero(convex)[0]
        blockers = P[~convex]
        if len(blockers):
            A, Bv, C = prev[cand], P[cand], nxt[cand]
            d1 = _cross2((Bv - A)[:, None], blockers[None] - A[:, None])
            d2 = _cross2((C - Bv)[:, None], blockers[None] - Bv[:, None])
            d3 = _cross2((A - C)[:, None], blockers[None] - C[:, None])
            inside = (d1 >= -eps) & (d2 >= -eps) & (d3 >= -eps)
            # a blocker coinciding with an ear corner does not block that ear
            for corner in (A, Bv, C):
                inside &= np.linalg.norm(blockers[None] - corner[:, None], axis=2) > dist_eps
            cand = cand[~np.any(inside, axis=1)]
        if len(cand) == 0:
            flat = np.abs(cr) <= eps
            if np.any(flat):
                idx.pop(int(np.argmax(flat)))
                continue
            raise MeshError("every ear is blocked; polygon may be non-simple")
        A, Bv, C = prev[cand], P[cand], nxt[cand]
        per = (
            np.sum((Bv - A) ** 2, axis=1)
            + np.sum((C - Bv) ** 2, axis=1)
            + np.sum((A - C) ** 2, axis=1)
        )
        quality = 2.0 * np.sqrt(3.0) * cr[cand] / per
        best = int(cand[int(np.argmax(quality))])
        k = len(idx)
        out.append((idx[(best - 1) % k], idx[best], idx[(best + 1) % k]))
        idx.pop(best)
    out.append(tuple(idx))
    return np.array(out, dtype=np.int64)


class _Refiner:
    """Longest-edge bisection with LEPP walks until every edge <= target_h."""

    def __init__(self, nodes: np.ndarray, triangles: np.ndarray, target_h: float):
        self.xy = [tuple(p) for p in nodes]
        self.tris: dict[int, tuple[int, int, int]] = {i: tuple(t) for i, t in enumerate(triangles)}
        self.next_tid = len(triangles)
        self.target = float(target_h)
        self.edge_map: dict[tuple[int, int], list[int]] = {}
        for tid, t in self.tris.items():
            for e in self._edges(t):
                self.edge_map.setdefault(e, []).append(tid)
        self.midpoint: dict[tuple[int, int], int] = {}

    @staticmethod
    def _edges(t):
        a, b, c = t
        return (
            (a, b) if a < b else (b, a),
            (b, c) if b < c else (c, b),
            (c, a) if c < a else (a, c),
        )

    def _length2(self, e) -> float:
        p, q = self.xy[e[0]], self.xy[e[1]]
        return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2

    def _longest_edge(self, t):
        # lexicographic (length, pair) key makes ties deterministic
        return max(self._edges(t), key=lambda e: (self._length2(e), e))

    def _neighbor(self, tid, e):
        for other in self.edge_map[e]:
            if other != tid:
                return other
        return None

    def _split_edge(self, e) -> None:
        if e in self.midpoint:
            m = self.midpoint[e]
        else:
            p, q = self.xy[e[0]], self.xy[e[1]]
            m = len(self.xy)
            self.xy.append(((p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0))
            self.midpoint[e] = m
        for tid in list(self.edge_map[e]):
            t = self.tris.pop(tid)
            a, b, c = t
            # rotate so the split edge is (t0, t1), preserving orientation
            if e == self._edges(t)[1]:
                a, b, c = b, c, a
            elif e == self._edges(t)[2]:
                a, b, c = c, a, b
            self._remove_from_map(tid, (a, b, c))
            self._add((a, m, c))
            self._add((m, b, c))

    def _remove_from_map(self, tid, t) -> None:
        for e in self._edges(t):
            self.edge_map[e].remove(tid)
            if not self.edge_map[e]:
                del self.edge_map[e]

    def _add(self, t) -> int:
        tid = self.next_tid
        self.next_tid += 1
        self.tris[tid] = t
        for e in self._edges(t):
            self.edge_map.setdefault(e, []).append(tid)
        return tid

    def run(self) -> tuple[np.ndarray, np.ndarray]:
        target2 = self.target * self.target
        budget = 64 * (len(self.tris) + 16) + int(64.0 * self._total_area() / target2) + 100000
        splits = 0
        while True:
            oversized = sorted(
                tid for tid, t in self.tris.items() if self._length2(self._longest_edge(t)) > target2
            )
            if not oversized:
                break
            for tid in oversized:
                while tid in self.tris and self._length2(self._longest_edge(self.tris[tid])) > target2:
                    splits += self._lepp(tid)
                    if splits > budget:
                        raise MeshError("bisection budget exceeded; target_h too small for this polygon")
        return np.array(self.xy, dtype=float), np.array(
            [self.tris[tid] for tid in sorted(self.tris)], dtype=np.int64
        )

    def _lepp(self, tid: int) -> int:
        t = tid
        while True:
            e = self._longest_edge(self.tris[t])
            nb = self._neighbor(t, e)
            if nb is None or self._longest_edge(self.tris[nb]) == e:
                self._split_edge(e)
                return 1
            t = nb

    def _total_area(self) -> float:
        total = 0.0
        for t in self.tris.values():
            p0, p1, p2 = (self.xy[i] for i in t)
            total += abs(
                (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])
            )
        return 0.5 * total


_MESH_CACHE: OrderedDict[tuple, TriMesh] = OrderedDict()
_MESH_CACHE_SIZE = 32


def mesh_polygon(polygon: Polygon2D, target_h: float) -> TriMesh:
    """Conforming triangulation of the polygon with max edge <= target_h."""
    if not isinstance(polygon, Polygon2D):
        raise MeshError("mesh_polygon expects a Polygon2D")
    if not (target_h > 0.0) or not np.isfinite(target_h):
        raise MeshError("target_h must be positive")
    key = (polygon.fingerprint, float(target_h))
    hit = _MESH_CACHE.get(key)
    if hit is not None:
        _MESH_CACHE.move_to_end(key)
        return hit
    V = polygon.vertices
    mesh = None
    fast = _grid_delaunay(polygon, target_h)
    if fast is not None:
        nodes, triangles = _Refiner(fast[0], fast[1], target_h).run()
        candidate = TriMesh.from_arrays(nodes, triangles)
        # accept only if the topological boundary is exactly the set of nodes
        # sitting on the outline (guards against hanging boundary points)
        scale = max(1.0, float(np.abs(V).max()))
        on_outline = _dist_to_outline(candidate.nodes, V) <= 1e-9 * scale
        flagged = np.zeros(candidate.n_nodes, dtype=bool)
        flagged[candidate.boundary_nodes] = True
        if np.array_equal(on_outline, flagged):
            mesh = candidate
    if mesh is None:
        coarse = _ear_clip(V, GEOM_TOL)
        nodes, triangles = _Refiner(V, coarse, target_h).run()
        mesh = TriMesh.from_arrays(nodes, triangles)
    _MESH_CACHE[key] = mesh
    while len(_MESH_CACHE) > _MESH_CACHE_SIZE:
        _MESH_CACHE.popitem(last=False)
    return mesh
