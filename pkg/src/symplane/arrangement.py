"""Planar arrangement induced by a generic closed curve.

The image of a certified-generic curve cuts the plane into faces: the
double points become degree-4 vertices, the strands between them become
edges, and faces are read off a half-edge structure whose next-pointer
walks keep the face on the left. Bounded faces get canonical labels
1..r, ordered by their interior representative points (lexicographic by
x, then y).

Face boundaries may have several components: a face can enclose another
part of the curve, whose outer walk then appears as a hole. Areas are
net (holes subtracted), via the shoelace formula per boundary cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import ClosedCurve, GenericityReport, check_generic
from .errors import GenericityError, InconsistencyError, ValidationError
from .geometry import point_segment_distance, signed_area, winding_numbers


@dataclass(frozen=True)
class Vertex:
    index: int
    point: np.ndarray
    branches: tuple[tuple[int, float], tuple[int, float]]  # (loop, parameter) per strand
    angle: float


@dataclass
class HalfEdge:
    index: int
    loop: int
    t0: float
    t1: float  # t1 > t0 means forward in parameter; reversed for twins
    origin: int | None  # vertex index; None anchors a crossing-free loop
    target: int | None
    twin: int
    next: int
    face: int
    points: np.ndarray  # directed polyline including both endpoints


@dataclass
class Face:
    index: int
    cycles: tuple[tuple[int, ...], ...]  # half-edge indices per boundary walk
    polygons: tuple[np.ndarray, ...]  # closed boundary polylines, one per walk
    area: float  # net area; negative for the outer face
    is_outer: bool
    label: int | None = None  # canonical 1..r, bounded faces only
    rep_point: np.ndarray | None = None


@dataclass(frozen=True)
class AreaVector:
    """Bounded-face areas indexed by canonical label: values[j-1] is face j."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v <= 0):
            raise ValidationError("face areas must be positive")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


@dataclass
class Arrangement:
    curve: ClosedCurve
    report: GenericityReport
    vertices: tuple[Vertex, ...]
    half_edges: list[HalfEdge]
    faces: list[Face]
    outer_face: int
    passages: tuple[tuple[tuple[float, int], ...], ...]  # per loop: (t, vertex index)
    loop_arcs: tuple[tuple[int, ...], ...]  # per loop: forward half-edge per arc
    components: tuple[int, ...]  # component id per loop

    @property
    def r(self) -> int:
        return len(self.faces) - 1

    @property
    def bounded_faces(self) -> list[Face]:
        out = [f for f in self.faces if not f.is_outer]
        out.sort(key=lambda f: f.label)
        return out

    def face_by_label(self, label: int) -> Face:
        for f in self.faces:
            if f.label == label:
                return f
        raise KeyError(f"no face labeled {label}")

    def face_contains(self, face: Face, points) -> np.ndarray:
        """Boolean mask: which query points lie in the open face region."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        total = np.zeros(len(pts), dtype=np.int64)
        for poly in face.polygons:
            total += winding_numbers(pts, poly)
        return total == 1 if not face.is_outer else total == 0

    def boundary_distance(self, face: Face, point) -> float:
        """Distance from a point to the face's boundary polylines."""
        best = np.inf
        p = np.asarray(point, dtype=float)[None, :]
        for poly in face.polygons:
            for i in range(len(poly)):
                d = point_segment_distance(p, poly[i], poly[(i + 1) % len(poly)])[0]
                best = min(best, float(d))
        return best


def build_arrangement(curve: ClosedCurve, report: GenericityReport | None = None) -> Arrangement:
    """Build the face arrangement of a certified-generic curve.

    A report from check_generic may be passed to avoid recomputing it;
    non-generic input raises GenericityError. The construction is checked
    internally: the Euler count V - E + F = 1 + C must hold exactly and
    the bounded-face areas must sum to the area enclosed by the outer
    walks, else InconsistencyError.
    """
    if report is None:
        report = check_generic(curve)
    if not report.is_generic:
        kinds = sorted({v.kind for v in report.violations})
        raise GenericityError(
            f"curve is not generic at the sample scale (violations: {', '.join(kinds)}); "
            "see check_generic"
        )

    vertices = tuple(
        Vertex(i, dp.point, (dp.first, dp.second), dp.angle)
        for i, dp in enumerate(report.double_points)
    )

    passages: list[tuple[tuple[float, int], ...]] = []
    for loop in range(len(curve.loops)):
        per = []
        for v in vertices:
            for germ_loop, t in v.branches:
                if germ_loop == loop:
                    per.append((t, v.index))
        per.sort()
        passages.append(tuple(per))

    half_edges, loop_arcs = _build_half_edges(curve, vertices, passages)
    _link_next(curve, vertices, half_edges, passages)
    cycles = _extract_cycles(half_edges)
    components = _loop_components(len(curve.loops), passages)
    faces, outer_face = _assemble_faces(curve, half_edges, cycles, components)

    arr = Arrangement(
        curve=curve,
        report=report,
        vertices=vertices,
        half_edges=half_edges,
        faces=faces,
        outer_face=outer_face,
        passages=tuple(passages),
        loop_arcs=loop_arcs,
        components=components,
    )
    _check_euler(arr)
    _assign_labels(arr)
    return arr


def face_areas(arr: Arrangement) -> AreaVector:
    """Areas of the bounded faces, ordered by canonical label."""
    values = np.array([f.area for f in arr.bounded_faces])
    return AreaVector(values)


def integrate_density_over_faces(arr: Arrangement, density) -> np.ndarray:
    """Integral of a grid density over each bounded face, by label order.

    Midpoint rule on the density's cells: each cell contributes its
    center value (mean of the four corner nodes) times the cell area iff
    the center lies in the face. The density grid must cover the curve's
    bounding box so that no bounded face leaks outside the grid.
    """
    x0, x1, y0, y1 = density.x0, density.x1, density.y0, density.y1
    cx0, cx1, cy0, cy1 = arr.curve.bbox()
    if not (x0 <= cx0 and x1 >= cx1 and y0 <= cy0 and y1 >= cy1):
        raise ValidationError("density grid does not cover the curve bounding box")
    xs = np.linspace(x0, x1, density.nx)
    ys = np.linspace(y0, y1, density.ny)
    hx = xs[1] - xs[0]
    hy = ys[1] - ys[0]
    centers_x = xs[:-1] + 0.5 * hx
    centers_y = ys[:-1] + 0.5 * hy
    vals = density.values  # shape (nx, ny), x first
    cell_vals = 0.25 * (vals[:-1, :-1] + vals[1:, :-1] + vals[:-1, 1:] + vals[1:, 1:])

    gx, gy = np.meshgrid(centers_x, centers_y, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    flat_vals = cell_vals.ravel()

    out = np.zeros(arr.r)
    for face in arr.bounded_faces:
        lo, hi = _face_bbox(face)
        sel = (
            (pts[:, 0] >= lo[0] - hx)
            & (pts[:, 0] <= hi[0] + hx)
            & (pts[:, 1] >= lo[1] - hy)
            & (pts[:, 1] <= hi[1] + hy)
        )
        idx = np.flatnonzero(sel)
        if len(idx) == 0:
            continue
        inside = arr.face_contains(face, pts[idx])
        out[face.label - 1] = float(np.sum(flat_vals[idx[inside]]) * hx * hy)
    return out


def render_svg(arr: Arrangement, width: int = 640) -> str:
    """Draw the arrangement as a standalone SVG 1.1 document.

    Deterministic: equal arrangements yield byte-equal output. Curve
    loops are drawn as closed paths, double points as filled markers,
    bounded faces as labels at their representative points.
    """
    x0, x1, y0, y1 = arr.curve.bbox()
    pad = 0.08 * max(x1 - x0, y1 - y0, 1e-9)
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    scale = width / (x1 - x0)
    height = int(round((y1 - y0) * scale))

    def sx(x):
        return (x - x0) * scale

    def sy(y):
        return (y1 - y) * scale  # svg y axis points down

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for pts in arr.curve.loops:
        coords = " L ".join(f"{sx(x):.3f} {sy(y):.3f}" for x, y in pts)
        lines.append(
            f'<path d="M {coords} Z" fill="none" stroke="black" stroke-width="1.5"/>'
        )
    for face in arr.bounded_faces:
        px, py = face.rep_point
        lines.append(
            f'<text x="{sx(px):.3f}" y="{sy(py):.3f}" font-size="16" '
            f'text-anchor="middle" fill="#1a6faf">{face.label}</text>'
        )
    for v in arr.vertices:
        lines.append(
            f'<circle cx="{sx(v.point[0]):.3f}" cy="{sy(v.point[1]):.3f}" r="3" fill="#c02020"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# construction internals


def _arc_points(curve, loop, t0, t1, p_start, p_end):
    """Directed polyline for the arc from parameter t0 to t1 (cyclic)."""
    pts = curve.loops[loop]
    n = len(pts)
    span = (t1 - t0) % n
    if span == 0.0:
        span = n  # single passage: the arc is the whole loop
    first = int(np.floor(t0)) + 1
    count = int(np.ceil(t0 + span - 1e-9)) - first
    mids = [pts[(first + k) % n] for k in range(count)]
    # drop interior samples that coincide with an endpoint (crossing at a sample)
    keep = []
    for q in mids:
        if np.linalg.norm(q - p_start) > 1e-12 and np.linalg.norm(q - p_end) > 1e-12:
            keep.append(q)
    return np.vstack([p_start[None, :], *[q[None, :] for q in keep], p_end[None, :]])


def _build_half_edges(curve, vertices, passages):
    half_edges: list[HalfEdge] = []
    loop_arcs: list[tuple[int, ...]] = []
    vpoints = [v.point for v in vertices]
    for loop, per in enumerate(passages):
        n = len(curve.loops[loop])
        arcs = []
        if not per:
            pts = curve.loops[loop]
            ring = np.vstack([pts, pts[:1]])
            fwd = HalfEdge(len(half_edges), loop, 0.0, float(n), None, None, -1, -1, -1, ring)
            bwd = HalfEdge(
                len(half_edges) + 1, loop, float(n), 0.0, None, None, -1, -1, -1, ring[::-1].copy()
            )
            fwd.twin, bwd.twin = bwd.index, fwd.index
            half_edges.extend([fwd, bwd])
            arcs.append(fwd.index)
        else:
            for k, (t0, v0) in enumerate(per):
                t1, v1 = per[(k + 1) % len(per)]
                poly = _arc_points(curve, loop, t0, t1, vpoints[v0], vpoints[v1])
                fwd = HalfEdge(len(half_edges), loop, t0, t0 + ((t1 - t0) % n or n), v0, v1, -1, -1, -1, poly)
                bwd = HalfEdge(
                    len(half_edges) + 1,
                    loop,
                    fwd.t1,
                    t0,
                    v1,
                    v0,
                    -1,
                    -1,
                    -1,
                    poly[::-1].copy(),
                )
                fwd.twin, bwd.twin = bwd.index, fwd.index
                half_edges.extend([fwd, bwd])
                arcs.append(fwd.index)
        loop_arcs.append(tuple(arcs))
    return half_edges, loop_arcs


def _link_next(curve, vertices, half_edges, passages):
    """Wire next-pointers so each face walk keeps its region on the left."""
    outgoing: dict[int, list[tuple[float, int]]] = {v.index: [] for v in vertices}
    for he in half_edges:
        if he.origin is None:
            he.next = he.index  # crossing-free loop: the walk is the loop itself
            continue
        if he.t1 > he.t0:
            d = curve.tangent_at(he.loop, he.t0 % len(curve.loops[he.loop]))
        else:
            d = -curve.tangent_at(he.loop, he.t0 % len(curve.loops[he.loop]))
        outgoing[he.origin].append((float(np.arctan2(d[1], d[0])), he.index))
    order_at = {}
    for vid, items in outgoing.items():
        items.sort()
        order_at[vid] = [idx for _, idx in items]
    for he in half_edges:
        if he.target is None:
            continue
        order = order_at[he.target]
        k = order.index(he.twin)
        # the face walk turns as sharply left as possible: the outgoing
        # edge one step clockwise from the reversed incoming direction
        he.next = order[(k - 1) % len(order)]


def _extract_cycles(half_edges):
    seen = [False] * len(half_edges)
    cycles = []
    for start in range(len(half_edges)):
        if seen[start]:
            continue
        walk = []
        cur = start
        while not seen[cur]:
            seen[cur] = True
            walk.append(cur)
            cur = half_edges[cur].next
        if cur != start:
            raise InconsistencyError("face walk did not close on its start edge")
        cycles.append(tuple(walk))
    return cycles


def _cycle_polygon(half_edges, cycle):
    parts = [half_edges[cycle[0]].points]
    for idx in cycle[1:]:
        parts.append(half_edges[idx].points[1:])
    poly = np.vstack(parts)
    return poly[:-1]  # drop the repeated closing point


def _loop_components(num_loops, passages):
    parent = list(range(num_loops))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    vert_loop: dict[int, int] = {}
    for loop, per in enumerate(passages):
        for _, vid in per:
            if vid in vert_loop:
                parent[find(vert_loop[vid])] = find(loop)
            else:
                vert_loop[vid] = loop
    roots = {}
    comp = []
    for loop in range(num_loops):
        root = find(loop)
        if root not in roots:
            roots[root] = len(roots)
        comp.append(roots[root])
    return tuple(comp)


def _assemble_faces(curve, half_edges, cycles, components):
    polys = [_cycle_polygon(half_edges, c) for c in cycles]
    areas = [signed_area(p) for p in polys]
    cycle_comp = [components[half_edges[c[0]].loop] for c in cycles]

    positive = [i for i, a in enumerate(areas) if a > 0]
    negative = [i for i, a in enumerate(areas) if a <= 0]

    # a negative walk is the outer boundary of its component; it becomes a
    # hole of the smallest positive walk (of another component) containing
    # that component, or part of the outer face if nothing contains it
    comp_probe = {}
    for loop in range(len(curve.loops)):
        comp_probe.setdefault(components[loop], curve.loops[loop][0])

    face_of_cycle = {}
    holes: dict[int, list[int]] = {i: [] for i in positive}
    outer_cycles = []
    for i in negative:
        probe = comp_probe[cycle_comp[i]]
        best = None
        for j in positive:
            if cycle_comp[j] == cycle_comp[i]:
                continue
            if winding_numbers(probe[None, :], polys[j])[0] != 0:
                if best is None or abs(areas[j]) < abs(areas[best]):
                    best = j
        if best is None:
            outer_cycles.append(i)
        else:
            holes[best].append(i)

    faces: list[Face] = []
    for j in positive:
        members = [j] + sorted(holes[j])
        area = float(sum(areas[m] for m in members))
        if area <= 0:
            raise InconsistencyError("bounded face with non-positive net area")
        faces.append(
            Face(
                index=len(faces),
                cycles=tuple(cycles[m] for m in members),
                polygons=tuple(polys[m] for m in members),
                area=area,
                is_outer=False,
            )
        )
        for m in members:
            face_of_cycle[m] = faces[-1].index
    outer = Face(
        index=len(faces),
        cycles=tuple(cycles[m] for m in sorted(outer_cycles)),
        polygons=tuple(polys[m] for m in sorted(outer_cycles)),
        area=float(sum(areas[m] for m in sorted(outer_cycles))),
        is_outer=True,
    )
    faces.append(outer)
    for m in outer_cycles:
        face_of_cycle[m] = outer.index

    for ci, cyc in enumerate(cycles):
        for he_idx in cyc:
            half_edges[he_idx].face = face_of_cycle[ci]

    total_bounded = sum(f.area for f in faces if not f.is_outer)
    if abs(total_bounded + outer.area) > 1e-9 * max(total_bounded, 1e-12):
        raise InconsistencyError(
            f"face areas {total_bounded:.12g} disagree with outer walk {-outer.area:.12g}"
        )
    return faces, outer.index


def _check_euler(arr: Arrangement) -> None:
    free_loops = sum(1 for per in arr.passages if not per)
    v = len(arr.vertices) + free_loops  # a free loop counts as one vertex + one self-loop
    e = len(arr.half_edges) // 2
    f = len(arr.faces)
    c = len(set(arr.components))
    if v - e + f != 1 + c:
        raise InconsistencyError(f"Euler check failed: V={v} E={e} F={f} C={c}")


def _assign_labels(arr: Arrangement) -> None:
    bounded = [f for f in arr.faces if not f.is_outer]
    for face in bounded:
        face.rep_point = _representative_point(arr, face)
    bounded.sort(key=lambda f: (f.rep_point[0], f.rep_point[1]))
    for label, face in enumerate(bounded, start=1):
        face.label = label


def _representative_point(arr: Arrangement, face: Face) -> np.ndarray:
    """A deterministic interior point of the face.

    First choice is the net area centroid over the boundary walks; if
    that lands outside (possible for crescent shaped or holed faces), an
    inward offset of a boundary edge midpoint is searched.
    """
    weighted = np.zeros(2)
    for poly in face.polygons:
        a = signed_area(poly)
        weighted += a * _polygon_centroid_raw(poly)
    centroid = weighted / face.area
    scale = float(np.sqrt(face.area))
    if arr.face_contains(face, centroid)[0] and arr.boundary_distance(face, centroid) > 1e-6 * scale:
        return centroid
    for frac in (0.2, 0.08, 0.02, 0.005):
        delta = frac * scale
        for poly in face.polygons:
            for i in range(len(poly)):
                a, b = poly[i], poly[(i + 1) % len(poly)]
                d = b - a
                norm = np.linalg.norm(d)
                if norm == 0:
                    continue
                # face lies left of the directed boundary
                inward = np.array([-d[1], d[0]]) / norm
                p = 0.5 * (a + b) + delta * inward
                if arr.face_contains(face, p)[0] and arr.boundary_distance(face, p) > 0.4 * delta:
                    return p
    raise InconsistencyError(f"no interior representative point found for face {face.index}")


def _polygon_centroid_raw(poly):
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    w = x * yn - xn * y
    a = 0.5 * np.sum(w)
    if a == 0:
        return poly.mean(axis=0)
    return np.array([np.sum((x + xn) * w), np.sum((y + yn) * w)]) / (6.0 * a)


def _face_bbox(face: Face):
    allp = np.vstack(face.polygons)
    return allp.min(axis=0), allp.max(axis=0)
