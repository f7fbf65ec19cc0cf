"""Combinatorial diagram of an arrangement: codes, matching, symmetry.

A traversal of the curve in parameter order induces a Gauss code: each
crossing appears twice, tagged with a sign (orientation of the two
strand tangents at the crossing) and a slot (first or second visit).
Together with which faces sit left and right of every arc, and which
face is unbounded, this pins the diagram as an oriented plane diagram:
two arrangements are isomorphic exactly when some orientation-preserving
choice of basepoints and loop order reads off identical data.

Only cyclic basepoint shifts are enumerated, never reversals, so all
comparisons respect the curve orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .arrangement import Arrangement
from .errors import InconsistencyError, ValidationError
from .geometry import cross2


@dataclass(frozen=True)
class GaussCode:
    """Raw traversal data, in arrangement numbering.

    occ: per loop, the visited (vertex index, strand index) pairs in
    parameter order; strand 0 is the chronologically earlier passage.
    arcs: per loop, (left face, right face) of the arc after each
    passage; a crossing-free loop has no occurrences and one arc.
    base_sign: per vertex, the orientation sign of (strand-0 tangent,
    strand-1 tangent).
    """

    occ: tuple[tuple[tuple[int, int], ...], ...]
    arcs: tuple[tuple[tuple[int, int], ...], ...]
    base_sign: tuple[int, ...]
    outer_face: int
    num_faces: int

    def __post_init__(self):
        counts: dict[int, int] = {}
        for loop in self.occ:
            for v, _ in loop:
                counts[v] = counts.get(v, 0) + 1
        if sorted(counts) != list(range(len(self.base_sign))) and counts:
            raise ValidationError("occurrences do not cover vertices 0..n-1")
        if any(c != 2 for c in counts.values()):
            raise ValidationError("every crossing must be visited exactly twice")

    def labelled_sequences(self) -> tuple[tuple[tuple[int, int, int], ...], ...]:
        """Per loop: (crossing label, slot, sign) with labels 1.. by first visit."""
        label: dict[int, int] = {}
        out = []
        for loop in self.occ:
            row = []
            for v, strand in loop:
                if v not in label:
                    label[v] = len(label) + 1
                    slot = 0
                else:
                    slot = 1
                row.append((label[v], slot, self.base_sign[v]))
            out.append(tuple(row))
        return tuple(out)


@dataclass(frozen=True)
class FaceCorrespondence:
    """Bijection of canonical face labels (and crossings) from a to b."""

    faces: tuple[int, ...]  # faces[j-1] is the b-label matching a-label j
    vertices: tuple[int, ...]  # arrangement vertex index in b per vertex of a

    def face_map(self, label: int) -> int:
        return self.faces[label - 1]


@dataclass(frozen=True)
class SymmetryGroup:
    """Diagram automorphisms as paired face and crossing permutations.

    Face permutations act on canonical labels 1..r (stored 0-indexed:
    face_perms[k][j] is the image of label j+1, minus one). Crossing
    permutations act on arrangement vertex indices.
    """

    degree: int
    marked: int
    face_perms: tuple[tuple[int, ...], ...]
    vertex_perms: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...]  # indices into the element list

    @property
    def order(self) -> int:
        return len(self.face_perms)

    def __iter__(self):
        return iter(zip(self.face_perms, self.vertex_perms))


def gauss_code(arr: Arrangement) -> GaussCode:
    """Extract the traversal code of an arrangement."""
    occ = []
    arcs = []
    for loop, per in enumerate(arr.passages):
        row = []
        for t, vid in per:
            branches = arr.vertices[vid].branches
            if branches[0] == (loop, t):
                row.append((vid, 0))
            elif branches[1] == (loop, t):
                row.append((vid, 1))
            else:
                raise InconsistencyError("passage does not match either vertex strand")
        occ.append(tuple(row))
        row_arcs = []
        for he_idx in arr.loop_arcs[loop]:
            he = arr.half_edges[he_idx]
            row_arcs.append((he.face, arr.half_edges[he.twin].face))
        arcs.append(tuple(row_arcs))
    signs = []
    for v in arr.vertices:
        u = arr.curve.tangent_at(*v.branches[0])
        w = arr.curve.tangent_at(*v.branches[1])
        s = cross2(u, w)
        if s == 0:
            raise InconsistencyError("parallel strand tangents at a crossing")
        signs.append(1 if s > 0 else -1)
    return GaussCode(
        occ=tuple(occ),
        arcs=tuple(arcs),
        base_sign=tuple(signs),
        outer_face=arr.outer_face,
        num_faces=len(arr.faces),
    )


def canonical_code(gc: GaussCode) -> str:
    """Minimal serialization over basepoint shifts and loop orderings.

    Equal strings mean isomorphic oriented labelled plane diagrams; the
    outer face and the traversal orientation are preserved by every
    candidate, so a mirror image or a reversed loop will not collide.
    """
    best = None
    for order, rots in _candidates(gc):
        serial, _, _ = _read(gc, order, rots)
        if best is None or serial < best:
            best = serial
    return best


def isotopy_match(a: Arrangement, b: Arrangement) -> FaceCorrespondence | None:
    """One diagram isomorphism a -> b as a face-label bijection, if any."""
    gca = gauss_code(a)
    gcb = gauss_code(b)
    sa, face_a, vert_a = _minimal_reading(gca)
    sb, face_b, vert_b = _minimal_reading(gcb)
    if sa != sb:
        return None
    return _correspondence(a, b, face_a, vert_a, face_b, vert_b)


def symmetry_group(arr: Arrangement) -> SymmetryGroup:
    """All diagram automorphisms, as face and crossing permutations.

    Enumerates orientation-preserving basepoint shifts and loop
    reorderings whose reading of the code equals the identity reading.
    The element set is verified to satisfy the group axioms.
    """
    gc = gauss_code(arr)
    ident_order = tuple(range(len(gc.occ)))
    ident_rots = tuple(0 for _ in gc.occ)
    base_serial, base_faces, base_verts = _read(gc, ident_order, ident_rots)

    elements = []
    seen = set()
    for order, rots in _candidates(gc):
        serial, faces, verts = _read(gc, order, rots)
        if serial != base_serial:
            continue
        corr = _correspondence(arr, arr, base_faces, base_verts, faces, verts)
        fperm = tuple(v - 1 for v in corr.faces)
        vperm = corr.vertices
        if (fperm, vperm) not in seen:
            seen.add((fperm, vperm))
            elements.append((fperm, vperm))
    elements.sort()
    _verify_group(elements)
    generators = _find_generators(elements)
    return SymmetryGroup(
        degree=arr.r,
        marked=len(arr.vertices),
        face_perms=tuple(e[0] for e in elements),
        vertex_perms=tuple(e[1] for e in elements),
        generators=generators,
    )


def compose_perms(g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
    """g after h: the image of i is g[h[i]]."""
    return tuple(g[h[i]] for i in range(len(h)))


def invert_perm(g: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(g)
    for i, gi in enumerate(g):
        out[gi] = i
    return tuple(out)


def perm_cycles(perm: tuple[int, ...], one_based: bool = True) -> str:
    """Cycle notation, fixed points omitted; identity prints as 'id'."""
    seen = [False] * len(perm)
    parts = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i + 1 if one_based else i)
            i = perm[i]
        parts.append("(" + " ".join(str(x) for x in cyc) + ")")
    return "".join(parts) if parts else "id"


# internals


def _candidates(gc: GaussCode):
    loops = range(len(gc.occ))
    sizes = [len(gc.occ[k]) for k in loops]
    arcsizes = [len(gc.arcs[k]) for k in loops]
    for order in permutations(loops):
        # a loop can only take the place of one with the same shape
        if [sizes[k] for k in order] != list(sizes) or [arcsizes[k] for k in order] != list(
            arcsizes
        ):
            continue
        ranges = [range(max(1, sizes[k])) for k in order]
        for rots in product(*ranges):
            yield order, rots


def _read(gc: GaussCode, order, rots):
    """Read the code along a candidate traversal.

    Returns (serial string, face renumbering, vertex renumbering), the
    renumberings keyed by arrangement indices and assigned in order of
    first encounter.
    """
    vert_label: dict[int, int] = {}
    first_strand: dict[int, int] = {}
    face_label: dict[int, int] = {}
    chunks = []
    for pos, loop in enumerate(order):
        occ = gc.occ[loop]
        arcs = gc.arcs[loop]
        m = len(occ)
        rot = rots[pos]
        toks = []
        for k in range(max(m, len(arcs))):
            if m:
                v, strand = occ[(k + rot) % m]
                if v not in vert_label:
                    vert_label[v] = len(vert_label)
                    first_strand[v] = strand
                    slot = "a"
                else:
                    slot = "b"
                sign = gc.base_sign[v] if first_strand[v] == 0 else -gc.base_sign[v]
                tok = f"{vert_label[v]}{slot}{'+' if sign > 0 else '-'}"
            else:
                tok = "."
            lf, rf = arcs[(k + rot) % len(arcs)]
            for f in (lf, rf):
                if f not in face_label:
                    face_label[f] = len(face_label)
            toks.append(f"{tok}:{face_label[lf]}.{face_label[rf]}")
        chunks.append(",".join(toks))
    outer = face_label[gc.outer_face]
    serial = f"n{len(vert_label)}f{gc.num_faces}o{outer}|" + "|".join(chunks)
    return serial, face_label, vert_label


def _minimal_reading(gc: GaussCode):
    best = None
    for order, rots in _candidates(gc):
        serial, faces, verts = _read(gc, order, rots)
        if best is None or serial < best[0]:
            best = (serial, faces, verts)
    return best


def _correspondence(a: Arrangement, b: Arrangement, face_a, vert_a, face_b, vert_b):
    """Turn two equal readings into a face-label and vertex bijection."""
    face_b_inv = {j: f for f, j in face_b.items()}
    vert_b_inv = {j: v for v, j in vert_b.items()}
    faces = [0] * a.r
    for fa in a.faces:
        if fa.is_outer:
            continue
        fb_idx = face_b_inv[face_a[fa.index]]
        fb = b.faces[fb_idx]
        if fb.is_outer:
            raise InconsistencyError("face correspondence sent a bounded face to the outer face")
        faces[fa.label - 1] = fb.label
    verts = tuple(vert_b_inv[vert_a[v.index]] for v in a.vertices)
    return FaceCorrespondence(faces=tuple(faces), vertices=verts)


def _verify_group(elements):
    index = {e: k for k, e in enumerate(elements)}
    n_faces = len(elements[0][0]) if elements else 0
    ident = (tuple(range(n_faces)), tuple(range(len(elements[0][1]))) if elements else ())
    if ident not in index:
        raise InconsistencyError("automorphism set lacks the identity")
    for f1, v1 in elements:
        inv = (invert_perm(f1), invert_perm(v1))
        if inv not in index:
            raise InconsistencyError("automorphism set not closed under inverse")
        for f2, v2 in elements:
            prod = (compose_perms(f1, f2), compose_perms(v1, v2))
            if prod not in index:
                raise InconsistencyError("automorphism set not closed under composition")


def _find_generators(elements):
    if not elements:
        return ()
    n_f = len(elements[0][0])
    n_v = len(elements[0][1])
    ident = (tuple(range(n_f)), tuple(range(n_v)))
    generated = {ident}
    gens: list[int] = []
    for k, el in enumerate(elements):
        if el in generated:
            continue
        gens.append(k)
        frontier = list(generated)
        while frontier:
            nxt = []
            for g in frontier:
                for h_idx in gens:
                    h = elements[h_idx]
                    prod = (compose_perms(g[0], h[0]), compose_perms(g[1], h[1]))
                    if prod not in generated:
                        generated.add(prod)
                        nxt.append(prod)
            frontier = nxt
    return tuple(gens)
