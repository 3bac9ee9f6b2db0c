"""Complex-building operators: subdivisions, cones, joins, products, tubes.

Constructions that create vertices allocate fresh contiguous ids and record
a provenance label for each new vertex, so runs are reproducible bit for bit
and certificates stay readable.
"""

from __future__ import annotations

import itertools

from .certificates import CollapseCertificate
from .core import (
    EmptyComplexError,
    NotASubcomplexError,
    SimplicialComplex,
    Simplex,
    pack,
    unpack,
)


# ---------------------------------------------------------------------------
# barycentric subdivision

def sd_vertex_map(C: SimplicialComplex) -> dict[int, int]:
    """Face mask -> fresh vertex id, ordered by (dimension, vertex tuple)."""
    faces = sorted(C.all_face_masks(), key=lambda m: (m.bit_count(), unpack(m)))
    return {m: i for i, m in enumerate(faces)}


def sd(C: SimplicialComplex) -> SimplicialComplex:
    """Barycentric subdivision: facets are the maximal chains of the face poset."""
    if not C:
        raise EmptyComplexError("cannot subdivide the empty complex")
    vmap = sd_vertex_map(C)
    new_facets = []
    for fm in C.facet_masks:
        verts = unpack(fm)
        for perm in itertools.permutations(verts):
            chain_mask = 0
            face = 0
            for v in perm:
                face |= 1 << v
                chain_mask |= 1 << vmap[face]
            new_facets.append(chain_mask)
    labels = {i: "b(%s)" % ",".join(map(str, unpack(m))) for m, i in vmap.items()}
    return SimplicialComplex.from_masks(new_facets, labels=labels)


def sd_m(C: SimplicialComplex, m: int) -> SimplicialComplex:
    """m-fold iterated barycentric subdivision; sd_m(C, 0) is C itself."""
    if m < 0:
        raise ValueError("subdivision count must be non-negative")
    for _ in range(m):
        C = sd(C)
    return C


def sd_subcomplex(C: SimplicialComplex, D: SimplicialComplex) -> SimplicialComplex:
    """The copy of sd(D) inside sd(C), on sd(C)'s vertex ids."""
    if not D.is_subcomplex_of(C):
        raise NotASubcomplexError("D is not a subcomplex of C")
    vmap = sd_vertex_map(C)
    new_facets = []
    for fm in D.facet_masks:
        verts = unpack(fm)
        for perm in itertools.permutations(verts):
            chain_mask = 0
            face = 0
            for v in perm:
                face |= 1 << v
                chain_mask |= 1 << vmap[face]
            new_facets.append(chain_mask)
    return SimplicialComplex.from_masks(new_facets)


def restriction_of_sd(C: SimplicialComplex, D: SimplicialComplex) -> SimplicialComplex:
    """R(sd C, |D|): the chains of C whose top face belongs to D.

    Coincides with sd_subcomplex(C, D); kept separate because it computes
    the restriction rule directly and is used to cross-check it.
    """
    if not D.is_subcomplex_of(C):
        raise NotASubcomplexError("D is not a subcomplex of C")
    vmap = sd_vertex_map(C)
    d_faces = D.all_face_masks()
    keep = []
    for fm in D.facet_masks:  # chains with top in D are chains of D
        verts = unpack(fm)
        for perm in itertools.permutations(verts):
            chain_mask = 0
            face = 0
            ok = True
            for v in perm:
                face |= 1 << v
                if face not in d_faces:
                    ok = False
                    break
                chain_mask |= 1 << vmap[face]
            if ok:
                keep.append(chain_mask)
    return SimplicialComplex.from_masks(keep)


# ---------------------------------------------------------------------------
# cones, joins, suspensions

def cone(C: SimplicialComplex, apex: int | None = None) -> SimplicialComplex:
    """Join with a fresh apex vertex: facets F + {apex}."""
    if not C:
        raise EmptyComplexError("cannot cone the empty complex")
    if apex is None:
        apex = C.vertex_count and (max(C.vertices) + 1)
    if C.has_face([apex]):
        raise ValueError("apex %d is already a vertex of the complex" % apex)
    a = 1 << apex
    return SimplicialComplex.from_masks(fm | a for fm in C.facet_masks)


def join(A: SimplicialComplex, B: SimplicialComplex) -> SimplicialComplex:
    """Join A * B; B is relabeled onto fresh ids above A's vertex range."""
    if not A:
        return B
    if not B:
        return A
    offset = max(A.vertices) + 1
    b_map = {v: offset + i for i, v in enumerate(B.vertices)}
    new_facets = []
    for fa in A.facet_masks:
        for fb in B.facet_masks:
            m = fa
            for v in unpack(fb):
                m |= 1 << b_map[v]
            new_facets.append(m)
    labels = {b_map[v]: "B%d" % v for v in B.vertices}
    return SimplicialComplex.from_masks(new_facets, labels=labels)


def join_vertex_offset(A: SimplicialComplex) -> int:
    """First fresh id used for B's vertices in join(A, B)."""
    return max(A.vertices) + 1


def suspension(C: SimplicialComplex) -> SimplicialComplex:
    """Join with two fresh points."""
    if not C:
        raise EmptyComplexError("cannot suspend the empty complex")
    n = max(C.vertices) + 1
    two_points = SimplicialComplex([[0], [1]])
    # relabeling in join puts the two poles at n and n+1
    return join(C, two_points)


# ---------------------------------------------------------------------------
# products with intervals

def product_vertex_map(C: SimplicialComplex) -> dict[tuple[int, int], int]:
    """(base vertex, height) -> fresh id, ordered lexicographically."""
    return {
        (v, h): 2 * i + h
        for i, v in enumerate(C.vertices)
        for h in (0, 1)
    }


def product_interval(C: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of C x [0,1] over the global vertex order.

    Each d-facet F = (u_0 < ... < u_d) yields the d+1 simplices
    S_i = {(u_j, 0) : j <= i} + {(u_j, 1) : j >= i}.  The triangulation does
    not subdivide the bases and has no interior codimension-2 faces, so each
    prism is a path of simplices (a stacked subdivision).
    """
    if not C:
        raise EmptyComplexError("cannot take the product of the empty complex")
    vmap = product_vertex_map(C)
    new_facets = []
    for fm in C.facet_masks:
        verts = unpack(fm)
        d = len(verts) - 1
        for i in range(d + 1):
            m = 0
            for j, v in enumerate(verts):
                if j <= i:
                    m |= 1 << vmap[(v, 0)]
                if j >= i:
                    m |= 1 << vmap[(v, 1)]
            new_facets.append(m)
    labels = {idx: "(%d,%d)" % vh for vh, idx in vmap.items()}
    return SimplicialComplex.from_masks(new_facets, labels=labels)


def product_base_copy(C: SimplicialComplex, height: int) -> SimplicialComplex:
    """The induced copy C x {height} inside product_interval(C)."""
    vmap = product_vertex_map(C)
    return SimplicialComplex.from_masks(
        pack(vmap[(v, height)] for v in unpack(fm)) for fm in C.facet_masks
    )


def product_cube(C: SimplicialComplex, n: int) -> SimplicialComplex:
    """Triangulation of C x I^n by iterating the interval product."""
    if n < 0:
        raise ValueError("cube dimension must be non-negative")
    for _ in range(n):
        C = product_interval(C)
    return C


# ---------------------------------------------------------------------------
# derived neighborhoods

def derived_neighborhood(
    D: SimplicialComplex, C: SimplicialComplex, m: int = 1
) -> SimplicialComplex:
    """N^m(D, C): faces of sd^m C that meet sd^m D.

    For m = 1 these are generated by the maximal chains of C whose minimal
    element is a face of D; for larger m the rule is applied inside sd^{m-1}.
    """
    if m < 1:
        raise ValueError("derived neighborhoods need m >= 1")
    if not D.is_subcomplex_of(C):
        raise NotASubcomplexError("D is not a subcomplex of C")
    for _ in range(m - 1):
        C, D = sd(C), sd_subcomplex(C, D)
    vmap = sd_vertex_map(C)
    d_faces = D.all_face_masks()
    keep = []
    for fm in C.facet_masks:
        verts = unpack(fm)
        for perm in itertools.permutations(verts):
            if (1 << perm[0]) not in d_faces:
                continue
            chain_mask = 0
            face = 0
            for v in perm:
                face |= 1 << v
                chain_mask |= 1 << vmap[face]
            keep.append(chain_mask)
    if not keep:
        raise EmptyComplexError("neighborhood is empty; D shares no vertex chain")
    return SimplicialComplex.from_masks(keep)


# ---------------------------------------------------------------------------
# tubing

def tubing_collapse(
    C: SimplicialComplex, tau
) -> tuple[SimplicialComplex, CollapseCertificate]:
    """Collapse C x I onto the tube over the star of tau.

    For every facet F containing tau, the prism F x I is collapsed upward
    from its bottom face: the bottom copy of F and the prism interior are
    removed, leaving the top copy and the prism walls.  The residue contains
    Star(tau, C) x {1} and (C - tau) x {0}; it is a subcomplex of
    product_interval(C) combinatorially realizing the tubed subdivision.
    """
    t = pack(tau)
    if not C.has_face(unpack(t)):
        from .core import FaceNotInComplexError

        raise FaceNotInComplexError("%r is not a face of the complex" % (unpack(t),))
    P = product_interval(C)
    vmap = product_vertex_map(C)
    steps: list[tuple[Simplex, Simplex]] = []
    removed: set[int] = set()
    for fm in sorted(C.facet_masks):
        if fm & t != t:
            continue
        verts = unpack(fm)
        d = len(verts) - 1
        prism = []
        for i in range(d + 1):
            m = 0
            for j, v in enumerate(verts):
                if j <= i:
                    m |= 1 << vmap[(v, 0)]
                if j >= i:
                    m |= 1 << vmap[(v, 1)]
            prism.append(m)
        bottom = pack(vmap[(v, 0)] for v in verts)
        # bottom is free in the current complex: collapse the prism upward
        steps.append((unpack(bottom), unpack(prism[d])))
        removed.update((bottom, prism[d]))
        for i in range(d - 1, -1, -1):
            ridge = prism[i] & prism[i + 1]
            steps.append((unpack(ridge), unpack(prism[i])))
            removed.update((ridge, prism[i]))
    remaining = [m for m in P.all_face_masks() if m not in removed]
    result = SimplicialComplex.from_masks(remaining, labels=P.labels)
    return result, CollapseCertificate(steps=tuple(steps), target=result)
