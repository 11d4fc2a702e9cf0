"""Convex hulls in C and grid-based separately convex hulls in C^M."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def _cross(o: complex, a: complex, b: complex) -> float:
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


@dataclass(frozen=True)
class Hull2D:
    """Convex polygon in the complex plane, vertices counterclockwise.

    One vertex is a point hull, two a segment.
    """

    vertices: tuple

    @property
    def kind(self) -> str:
        return {1: "point", 2: "segment"}.get(len(self.vertices), "polygon")

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=complex)


COLLINEAR_TOL = 1e-12


def hull2d(points: Sequence[complex]) -> Hull2D:
    """Andrew's monotone chain; collinear vertices are dropped.

    A vertex whose turn has sine below ``COLLINEAR_TOL`` and that lies
    between its neighbours is dropped too, so round-off cannot leave a
    sliver polygon around points that are collinear in exact arithmetic.
    """
    pts = sorted({complex(p) for p in np.ravel(np.asarray(points, dtype=complex))},
                 key=lambda z: (z.real, z.imag))
    if not pts:
        raise ValueError("hull of an empty point set")
    if len(pts) <= 2:
        return Hull2D(tuple(pts))
    lower: list[complex] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[complex] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    verts = lower[:-1] + upper[:-1]
    while len(verts) >= 3:
        n = len(verts)
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            e1, e2 = b - a, c - b
            straight = (e1 * e2.conjugate()).real > 0
            if straight and _cross(a, b, c) <= COLLINEAR_TOL * abs(e1) * abs(e2):
                del verts[i]
                break
        else:
            break
    return Hull2D(tuple(verts))


def _segment_distance(z: np.ndarray, a: complex, b: complex) -> np.ndarray:
    ab = b - a
    L2 = abs(ab) ** 2
    if L2 == 0:
        return np.abs(z - a)
    t = ((z - a) * np.conj(ab)).real / L2
    t = np.clip(t, 0.0, 1.0)
    return np.abs(z - (a + t * ab))


def signed_distance(hull: Hull2D, z) -> np.ndarray | float:
    """Distance from z to the hull; negative inside a polygon."""
    zz = np.asarray(z, dtype=complex)
    v = hull.as_array()
    if len(v) == 1:
        d = np.abs(zz - v[0])
    elif len(v) == 2:
        d = _segment_distance(zz, v[0], v[1])
    else:
        edges = list(zip(v, np.roll(v, -1)))
        d = np.min([_segment_distance(zz, a, b) for a, b in edges], axis=0)
        inside = np.ones(zz.shape, dtype=bool)
        for a, b in edges:
            e = b - a
            w = zz - a
            inside &= (e.real * w.imag - e.imag * w.real) >= 0
        d = np.where(inside, -d, d)
    return d if np.ndim(d) else float(d)


def hull_contains(hull: Hull2D, z, eps: float = 0.0):
    """True iff the distance from z to the hull is at most eps."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    out = np.asarray(signed_distance(hull, z)) <= eps
    return out if out.ndim else bool(out)


def clip_to_box(hull: Hull2D, box: Sequence[float]) -> Hull2D | None:
    """Intersect with the rectangle (xmin, xmax, ymin, ymax); None if empty."""
    xmin, xmax, ymin, ymax = box
    poly = list(hull.vertices)
    if len(poly) < 3:
        return _clip_small(hull, box)
    planes = [
        (lambda p: p.real - xmin), (lambda p: xmax - p.real),
        (lambda p: p.imag - ymin), (lambda p: ymax - p.imag),
    ]
    for f in planes:
        out = []
        for i, cur in enumerate(poly):
            prev = poly[i - 1]
            fc, fp = f(cur), f(prev)
            if fc >= 0:
                if fp < 0:
                    out.append(prev + (cur - prev) * (fp / (fp - fc)))
                out.append(cur)
            elif fp >= 0:
                out.append(prev + (cur - prev) * (fp / (fp - fc)))
        poly = out
        if not poly:
            return None
    return hull2d(poly)


def _clip_small(hull: Hull2D, box) -> Hull2D | None:
    xmin, xmax, ymin, ymax = box
    v = hull.vertices
    if len(v) == 1:
        p = v[0]
        return hull if (xmin <= p.real <= xmax and ymin <= p.imag <= ymax) else None
    a, b = v
    # Liang-Barsky on the segment
    t0, t1 = 0.0, 1.0
    d = b - a
    for pk, qk in ((-d.real, a.real - xmin), (d.real, xmax - a.real),
                   (-d.imag, a.imag - ymin), (d.imag, ymax - a.imag)):
        if pk == 0:
            if qk < 0:
                return None
            continue
        t = qk / pk
        if pk < 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    if t0 > t1:
        return None
    return hull2d([a + t0 * d, a + t1 * d])


# ---------------------------------------------------------------------------
# separately convex hull on a grid


@dataclass
class SepHullGrid:
    """Occupancy mask over a (2M)-dimensional grid.

    Axis 2m is Re z_{m+1}, axis 2m+1 is Im z_{m+1}; ``bbox[m]`` is the
    rectangle (xmin, xmax, ymin, ymax) for coordinate m.
    """

    bbox: tuple
    resolution: int
    mask: np.ndarray
    converged: bool = False
    passes: int = 0
    history: list = field(default_factory=list)

    @property
    def M(self) -> int:
        return len(self.bbox)

    def cell_sizes(self) -> np.ndarray:
        h = []
        for xmin, xmax, ymin, ymax in self.bbox:
            h += [(xmax - xmin) / self.resolution, (ymax - ymin) / self.resolution]
        return np.array(h)

    def axis_centers(self, axis: int) -> np.ndarray:
        m, part = divmod(axis, 2)
        lo, hi = self.bbox[m][2 * part], self.bbox[m][2 * part + 1]
        h = (hi - lo) / self.resolution
        return lo + h * (np.arange(self.resolution) + 0.5)

    def cell_of(self, z: Sequence[complex]) -> tuple | None:
        """Grid index of the cell containing the C^M point z, or None outside."""
        idx = []
        for m, zm in enumerate(z):
            xmin, xmax, ymin, ymax = self.bbox[m]
            for val, lo, hi in ((zm.real, xmin, xmax), (zm.imag, ymin, ymax)):
                if not lo <= val <= hi:
                    return None
                i = int((val - lo) / (hi - lo) * self.resolution)
                idx.append(min(i, self.resolution - 1))
        return tuple(idx)

    def center(self, idx: Sequence[int]) -> np.ndarray:
        """Cell center as a complex M-vector."""
        re = [self.axis_centers(a)[i] for a, i in enumerate(idx)]
        return np.array([complex(re[2 * m], re[2 * m + 1]) for m in range(self.M)])

    def occupied_centers(self) -> np.ndarray:
        idx = np.argwhere(self.mask)
        cols = [self.axis_centers(a)[idx[:, a]] for a in range(2 * self.M)]
        return np.stack([cols[2 * m] + 1j * cols[2 * m + 1] for m in range(self.M)], axis=1)


def _validate_bbox(bbox, M: int) -> tuple:
    bbox = tuple(tuple(float(v) for v in b) for b in bbox)
    if len(bbox) != M:
        raise ValueError(f"bbox has {len(bbox)} rectangles, points live in C^{M}")
    for b in bbox:
        if len(b) != 4 or not (b[0] < b[1] and b[2] < b[3]):
            raise ValueError(f"bad bbox rectangle {b}")
    return bbox


def _convexify_slice(sl: np.ndarray, cx: np.ndarray, cy: np.ndarray,
                     grid_z: np.ndarray, eps: float) -> np.ndarray:
    occ = np.argwhere(sl)
    hull = hull2d(cx[occ[:, 0]] + 1j * cy[occ[:, 1]])
    if hull.kind == "point":
        return sl
    filled = np.asarray(signed_distance(hull, grid_z)) <= eps
    return sl | filled


def sep_hull_grid(points, bbox, resolution: int = 32,
                  iteration_cap: int = 50) -> SepHullGrid:
    """Grid approximation of the separately convex hull of ``points``.

    Starts from the cells containing the points and repeatedly adds, in
    every coordinate slice (one complex coordinate free, the others fixed
    to a grid cell), the cells whose centers lie in the convex hull of the
    slice's occupied centers, until nothing changes or ``iteration_cap``
    passes have run. Every occupied center is then a convex combination of
    the point cells' centers, so it is within half a cell diagonal of the
    ordinary hull of the points.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    if pts.size == 0:
        raise ValueError("no points")
    M = pts.shape[1]
    bbox = _validate_bbox(bbox, M)
    if resolution < 4:
        raise ValueError("resolution >= 4 required")
    R = resolution
    grid = SepHullGrid(bbox=bbox, resolution=R, mask=np.zeros((R,) * (2 * M), dtype=bool))
    for z in pts:
        idx = grid.cell_of(z)
        if idx is None:
            raise ValueError(f"point {tuple(z)} lies outside bbox")
        grid.mask[idx] = True

    h = grid.cell_sizes()
    seen: list[dict] = [dict() for _ in range(M)]
    for it in range(1, iteration_cap + 1):
        changed = False
        for m in range(M):
            ax = (2 * m, 2 * m + 1)
            cx, cy = grid.axis_centers(ax[0]), grid.axis_centers(ax[1])
            grid_z = cx[:, None] + 1j * cy[None, :]
            # round-off allowance only; a fattened hull would not be idempotent
            eps = 1e-9 * float(min(h[ax[0]], h[ax[1]]))
            view = np.moveaxis(grid.mask, ax, (-2, -1))
            flat = view.reshape(-1, R, R)
            counts = flat.sum(axis=(1, 2))
            for k in np.flatnonzero(counts >= 2):
                sl = flat[k]
                key = sl.tobytes()
                if seen[m].get(k) == key:
                    continue
                new = _convexify_slice(sl, cx, cy, grid_z, eps)
                seen[m][k] = new.tobytes()
                if not np.array_equal(new, sl):
                    flat[k] = new
                    changed = True
            grid.mask = np.moveaxis(flat.reshape(view.shape), (-2, -1), ax).copy()
        grid.passes = it
        grid.history.append(int(grid.mask.sum()))
        if not changed:
            grid.converged = True
            break
    return grid


def sep_hull_contains(grid: SepHullGrid, z: Sequence[complex]) -> str:
    """Tri-state membership: 'inside', 'outside' or 'uncertain'.

    Inside needs the containing cell and every face neighbour occupied,
    outside needs them all empty; anything else, or z outside the bbox,
    is uncertain.
    """
    idx = grid.cell_of(list(z))
    if idx is None:
        return "uncertain"
    vals = [grid.mask[idx]]
    for a in range(len(idx)):
        for step in (-1, 1):
            j = idx[a] + step
            if 0 <= j < grid.resolution:
                nb = list(idx)
                nb[a] = j
                vals.append(grid.mask[tuple(nb)])
            else:
                vals.append(False)
    if all(vals):
        return "inside"
    if not any(vals):
        return "outside"
    return "uncertain"


def rasterize_hull2d(points: Sequence[complex], box: Sequence[float],
                     resolution: int) -> np.ndarray:
    """2D cells whose centers lie in the hull of the point cells' centers.

    This is the M = 1 case of :func:`sep_hull_grid`.
    """
    g = sep_hull_grid(np.asarray(points, dtype=complex).reshape(-1, 1), [box],
                      resolution=resolution)
    return g.mask


# ---------------------------------------------------------------------------
# mask text format


def _rle(flat: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    if flat.size == 0:
        return runs
    edges = np.flatnonzero(np.diff(flat.astype(np.int8))) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [flat.size]))
    for s, e in zip(starts, ends):
        runs.append((int(flat[s]), int(e - s)))
    return runs


def dump_mask(grid: SepHullGrid) -> str:
    lines = [
        "# separately-convex-hull mask",
        f"M = {grid.M}",
        "bbox = " + " ; ".join(" ".join(repr(v) for v in b) for b in grid.bbox),
        f"resolution = {grid.resolution}",
        f"converged = {str(grid.converged).lower()}",
        f"passes = {grid.passes}",
        "runs =",
    ]
    runs = _rle(grid.mask.ravel())
    for chunk in itertools.zip_longest(*[iter(runs)] * 16):
        lines.append(" ".join(f"{v}:{n}" for v, n in (c for c in chunk if c)))
    return "\n".join(lines) + "\n"


def load_mask(text: str) -> SepHullGrid:
    head: dict[str, str] = {}
    runs: list[tuple[int, int]] = []
    in_runs = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if in_runs:
            for tok in line.split():
                v, n = tok.split(":")
                runs.append((int(v), int(n)))
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        if key == "runs":
            in_runs = True
            continue
        head[key] = val.strip()
    M = int(head["M"])
    R = int(head["resolution"])
    bbox = tuple(tuple(float(x) for x in part.split()) for part in head["bbox"].split(";"))
    flat = np.concatenate([np.full(n, bool(v)) for v, n in runs]) if runs else np.zeros(0, bool)
    if flat.size != R ** (2 * M):
        raise ValueError(f"mask has {flat.size} cells, expected {R ** (2 * M)}")
    return SepHullGrid(bbox=bbox, resolution=R, mask=flat.reshape((R,) * (2 * M)),
                       converged=head.get("converged") == "true",
                       passes=int(head.get("passes", 0)))
