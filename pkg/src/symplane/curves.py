"""Closed plane curves as sampled polyline loops, with genericity checking.

A curve is one or more closed loops, each a uniformly-or-otherwise sampled
polyline of at least MIN_LOOP_SAMPLES points. Positions along a loop are
measured by a cyclic parameter t in [0, n): the integer part names a
segment, the fraction the position along it.

Genericity here is a certification at the sample scale, not a statement
about an underlying smooth curve: check_generic certifies that all
self-intersections of the polyline are isolated transverse double points,
that no third strand passes within the separation tolerance, and that no
sample turns sharply enough to look like a cusp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError
from .geometry import cross2, segment_intersection, segment_pair_distance

MIN_LOOP_SAMPLES = 8
DEFAULT_ANGLE_TOL = 0.1
SEP_TOL_FACTOR = 1e-6


@dataclass(frozen=True)
class ClosedCurve:
    """One or more closed polyline loops, each an (n, 2) float array."""

    loops: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.loops:
            raise ValidationError("curve needs at least one loop")
        checked = []
        for k, pts in enumerate(self.loops):
            pts = np.asarray(pts, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2:
                raise ValidationError(f"loop {k}: expected shape (n, 2), got {pts.shape}")
            if len(pts) < MIN_LOOP_SAMPLES:
                raise ValidationError(
                    f"loop {k}: {len(pts)} samples, need at least {MIN_LOOP_SAMPLES}"
                )
            if not np.all(np.isfinite(pts)):
                raise ValidationError(f"loop {k}: non-finite coordinate")
            step = np.roll(pts, -1, axis=0) - pts
            if np.any(np.hypot(step[:, 0], step[:, 1]) == 0.0):
                raise ValidationError(f"loop {k}: repeated consecutive sample")
            checked.append(pts)
        object.__setattr__(self, "loops", tuple(checked))

    @property
    def sample_count(self) -> int:
        return sum(len(pts) for pts in self.loops)

    def bbox(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) over all loops."""
        allpts = np.vstack(self.loops)
        return (
            float(allpts[:, 0].min()),
            float(allpts[:, 0].max()),
            float(allpts[:, 1].min()),
            float(allpts[:, 1].max()),
        )

    def bbox_diagonal(self) -> float:
        x0, x1, y0, y1 = self.bbox()
        return float(np.hypot(x1 - x0, y1 - y0))

    def point_at(self, loop: int, t: float) -> np.ndarray:
        """Point at cyclic parameter t on the given loop."""
        pts = self.loops[loop]
        n = len(pts)
        t = t % n
        i = int(t)
        frac = t - i
        return (1.0 - frac) * pts[i] + frac * pts[(i + 1) % n]

    def tangent_at(self, loop: int, t: float) -> np.ndarray:
        """Unit tangent at parameter t; averaged across a sample point."""
        pts = self.loops[loop]
        n = len(pts)
        t = t % n
        i = int(t)
        frac = t - i
        if 1e-9 < frac < 1.0 - 1e-9:
            d = pts[(i + 1) % n] - pts[i]
        else:
            j = i if frac <= 1e-9 else (i + 1) % n
            a = pts[j] - pts[(j - 1) % n]
            b = pts[(j + 1) % n] - pts[j]
            d = a / np.linalg.norm(a) + b / np.linalg.norm(b)
        norm = np.linalg.norm(d)
        if norm == 0.0:
            raise ValidationError(f"loop {loop}: degenerate tangent at t={t}")
        return d / norm


@dataclass(frozen=True)
class DoublePoint:
    """A transverse self-intersection: where, which strands, how steeply."""

    point: np.ndarray
    first: tuple[int, float]  # (loop index, cyclic parameter), earlier strand
    second: tuple[int, float]
    angle: float  # angle between the strand tangent lines, in (0, pi/2]


@dataclass(frozen=True)
class Violation:
    kind: str  # tangency | triple-point | near-miss | cusp-proxy
    point: np.ndarray
    branches: tuple[tuple[int, float], ...]
    detail: str


@dataclass(frozen=True)
class GenericityReport:
    is_generic: bool
    double_points: tuple[DoublePoint, ...]
    violations: tuple[Violation, ...]
    angle_tol: float
    sep_tol: float


def load_curve(path: str | Path) -> ClosedCurve:
    """Read a curve file. See parse_curve for the format."""
    return parse_curve(Path(path).read_text())


def save_curve(curve: ClosedCurve, path: str | Path) -> None:
    Path(path).write_text(serialize_curve(curve))


def parse_curve(text: str) -> ClosedCurve:
    """Parse the plain-text curve format.

    Line one is the header ``curve v1``. Each loop is introduced by
    ``loop <n>`` followed by n lines of ``x y``. Blank lines are skipped
    and ``#`` starts a comment anywhere on a line.
    """
    lines = _significant_lines(text)
    if not lines:
        raise FormatError("empty curve file")
    lineno, header = lines[0]
    if header.split() != ["curve", "v1"]:
        raise FormatError(f"line {lineno}: expected header 'curve v1', got {header!r}")
    loops = []
    i = 1
    while i < len(lines):
        lineno, line = lines[i]
        parts = line.split()
        if len(parts) != 2 or parts[0] != "loop":
            raise FormatError(f"line {lineno}: expected 'loop <count>', got {line!r}")
        try:
            count = int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: bad loop count {parts[1]!r}") from None
        if count <= 0:
            raise FormatError(f"line {lineno}: loop count must be positive")
        if i + count >= len(lines) + 1:
            raise FormatError(f"line {lineno}: loop promises {count} samples, file ends early")
        pts = np.empty((count, 2), dtype=float)
        for k in range(count):
            lno, row = lines[i + 1 + k]
            cols = row.split()
            if len(cols) != 2:
                raise FormatError(f"line {lno}: expected 'x y', got {row!r}")
            try:
                pts[k, 0] = float(cols[0])
                pts[k, 1] = float(cols[1])
            except ValueError:
                raise FormatError(f"line {lno}: bad coordinate in {row!r}") from None
        if not np.all(np.isfinite(pts)):
            raise FormatError(f"line {lineno}: non-finite coordinate in loop")
        loops.append(pts)
        i += 1 + count
    if not loops:
        raise FormatError("curve file has no loops")
    return ClosedCurve(tuple(loops))


def serialize_curve(curve: ClosedCurve) -> str:
    """Inverse of parse_curve; coordinates keep full round-trip precision."""
    out = ["curve v1"]
    for pts in curve.loops:
        out.append(f"loop {len(pts)}")
        for x, y in pts:
            out.append(f"{float(x)!r} {float(y)!r}")
    return "\n".join(out) + "\n"


def _significant_lines(text: str) -> list[tuple[int, str]]:
    """(1-based line number, stripped content) with comments and blanks removed."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def resample(curve: ClosedCurve, n: int) -> ClosedCurve:
    """Resample every loop to n points with equal segment lengths.

    One redistribution pass places points at equal arclength along the
    current polyline; because new segments cut corners, that is not yet a
    fixed point, so passes repeat until a pass moves nothing by more than
    roundoff. A loop that is already uniform is returned unchanged, which
    makes resampling to the same n exactly idempotent.
    """
    if n < MIN_LOOP_SAMPLES:
        raise ValidationError(f"need at least {MIN_LOOP_SAMPLES} samples, got {n}")
    new_loops = []
    for pts in curve.loops:
        tol = 5e-14 * max(1.0, float(np.abs(pts).max()))
        cur = pts
        for _ in range(200):
            nxt = _redistribute(cur, n)
            if cur.shape == nxt.shape and np.max(np.abs(nxt - cur)) < tol:
                break
            cur = nxt
        else:
            cur = nxt
        new_loops.append(cur)
    return ClosedCurve(tuple(new_loops))


def _redistribute(pts: np.ndarray, n: int) -> np.ndarray:
    """One pass: n points at equal arclength steps along the polyline."""
    ring = np.vstack([pts, pts[:1]])
    step = np.diff(ring, axis=0)
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(step[:, 0], step[:, 1]))])
    targets = np.arange(n) * (cum[-1] / n)
    return np.column_stack(
        [np.interp(targets, cum, ring[:, 0]), np.interp(targets, cum, ring[:, 1])]
    )


def transform_curve(curve: ClosedCurve, fn) -> ClosedCurve:
    """Apply a point transform ((n, 2) array in, (n, 2) array out) to every loop."""
    return ClosedCurve(tuple(np.asarray(fn(pts), dtype=float) for pts in curve.loops))


def check_generic(
    curve: ClosedCurve,
    angle_tol: float = DEFAULT_ANGLE_TOL,
    sep_tol: float | None = None,
    max_turn: float = np.pi / 2,
) -> GenericityReport:
    """Certify that the sampled curve is generic at the sample scale.

    Parameters
    ----------
    curve : ClosedCurve
    angle_tol : minimum crossing angle (radians) for a double point to
        count as transverse; shallower crossings are tangency violations.
    sep_tol : spatial separation scale; defaults to 1e-6 times the
        bounding-box diagonal. Intersections closer than this are merged
        into one candidate crossing, and non-crossing strands that
        approach within it are near-miss violations.
    max_turn : samplewise turning angle at or above which a sample is
        flagged as a cusp proxy.
    """
    if angle_tol <= 0:
        raise ValidationError("angle_tol must be positive")
    if sep_tol is None:
        sep_tol = SEP_TOL_FACTOR * curve.bbox_diagonal()
    if sep_tol <= 0:
        raise ValidationError("sep_tol must be positive")

    violations: list[Violation] = []
    hits = _segment_hits(curve, sep_tol, violations)
    clusters = _cluster_hits(hits, sep_tol)

    double_points: list[DoublePoint] = []
    for cluster in clusters:
        point = np.mean([h[0] for h in cluster], axis=0)
        germs = _merge_germs([g for h in cluster for g in h[1]], curve)
        if len(germs) > 2:
            violations.append(
                Violation("triple-point", point, tuple(germs), f"{len(germs)} strands meet")
            )
            continue
        (la, ta), (lb, tb) = germs
        u = curve.tangent_at(la, ta)
        v = curve.tangent_at(lb, tb)
        angle = float(np.arcsin(min(1.0, abs(cross2(u, v)))))
        if angle < angle_tol:
            violations.append(
                Violation(
                    "tangency", point, tuple(germs), f"crossing angle {angle:.3g} < {angle_tol:.3g}"
                )
            )
        else:
            double_points.append(DoublePoint(point, (la, ta), (lb, tb), angle))

    _check_cusps(curve, max_turn, violations)

    double_points.sort(key=lambda dp: dp.first)
    violations.sort(key=lambda v: (v.kind, v.branches))
    return GenericityReport(
        is_generic=not violations,
        double_points=tuple(double_points),
        violations=tuple(violations),
        angle_tol=angle_tol,
        sep_tol=sep_tol,
    )


def _segment_hits(curve, sep_tol, violations):
    """All polyline self-intersections, plus near-miss violations.

    Returns a list of (point, ((loop, t), (loop, t))) records. Candidate
    segment pairs come from a bounding-box overlap prefilter inflated by
    sep_tol; adjacent segments of the same loop are excluded, and the
    near-miss test additionally skips parameter-close pairs, whose
    closeness is curvature, not a second strand.
    """
    loops = curve.loops
    for la in range(len(loops)):
        for lb in range(la, len(loops)):
            a, b = loops[la], loops[lb]
            na, nb = len(a), len(b)
            a1 = np.roll(a, -1, axis=0)
            b1 = np.roll(b, -1, axis=0)
            alo = np.minimum(a, a1) - sep_tol
            ahi = np.maximum(a, a1) + sep_tol
            blo, bhi = np.minimum(b, b1), np.maximum(b, b1)
            overlap = (
                (alo[:, None, 0] <= bhi[None, :, 0])
                & (ahi[:, None, 0] >= blo[None, :, 0])
                & (alo[:, None, 1] <= bhi[None, :, 1])
                & (ahi[:, None, 1] >= blo[None, :, 1])
            )
            if la == lb:
                i, j = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
                gap = np.minimum((i - j) % na, (j - i) % na)
                overlap &= gap > 1
                overlap &= i < j
                near_window = max(2, na // 100)
            else:
                near_window = 0
            for i, j in np.argwhere(overlap):
                res = segment_intersection(a[i], a1[i], b[j], b1[j])
                if res is not None:
                    t, u, point = res
                    yield point, ((la, (i + t) % na), (lb, (j + u) % nb))
                    continue
                if la == lb and min((i - j) % na, (j - i) % na) <= near_window:
                    continue
                dist = segment_pair_distance(a[i], a1[i], b[j], b1[j])
                if dist < sep_tol:
                    mid = 0.25 * (a[i] + a1[i] + b[j] + b1[j])
                    violations.append(
                        Violation(
                            "near-miss",
                            mid,
                            ((la, float(i)), (lb, float(j))),
                            f"strands {dist:.3g} apart without crossing (tol {sep_tol:.3g})",
                        )
                    )


def _cluster_hits(hits, sep_tol):
    """Group intersection records whose points lie within sep_tol."""
    hits = list(hits)
    parent = list(range(len(hits)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(hits)):
        for j in range(i + 1, len(hits)):
            if np.linalg.norm(hits[i][0] - hits[j][0]) <= sep_tol:
                parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i, h in enumerate(hits):
        groups.setdefault(find(i), []).append(h)
    return [groups[k] for k in sorted(groups)]


def _merge_germs(germs, curve):
    """Collapse (loop, t) records that describe the same strand passage.

    Records on the same loop within 1.5 samples of each other are the
    same passage seen from neighboring segments.
    """
    merged: list[list] = []
    for loop, t in sorted(germs):
        n = len(curve.loops[loop])
        for entry in merged:
            el, ets = entry
            if el != loop:
                continue
            d = abs(t - ets[0]) % n
            if min(d, n - d) <= 1.5:
                entry[1].append(t)
                break
        else:
            merged.append([loop, [t]])
    out = []
    for loop, ts in merged:
        n = len(curve.loops[loop])
        # circular mean of parameters, safe because the spread is <= 1.5
        base = ts[0]
        rel = [(t - base + n / 2) % n - n / 2 for t in ts]
        out.append((loop, float((base + np.mean(rel)) % n)))
    return sorted(out)


def _check_cusps(curve, max_turn, violations):
    for k, pts in enumerate(curve.loops):
        step = np.roll(pts, -1, axis=0) - pts
        prev = np.roll(step, 1, axis=0)
        turn = np.abs(np.arctan2(cross2(prev, step), np.einsum("ij,ij->i", prev, step)))
        for i in np.flatnonzero(turn >= max_turn):
            violations.append(
                Violation(
                    "cusp-proxy",
                    pts[i],
                    ((k, float(i)),),
                    f"turning angle {turn[i]:.3g} >= {max_turn:.3g} at sample {i}",
                )
            )
