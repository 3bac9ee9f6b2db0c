"""Certificates and their independent replay oracles.

Certificates are plain data: replaying them never calls back into the
search code, so a Positive verdict can always be checked from scratch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    Simplex,
    SimplicialComplex,
    mask_dim,
    iter_submasks,
    pack,
    unpack,
)


@dataclass(frozen=True)
class CollapseCertificate:
    """Ordered elementary collapses witnessing source \\searrow target."""

    steps: tuple[tuple[Simplex, Simplex], ...]
    target: SimplicialComplex

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class ShellingCertificate:
    """Facet removal order witnessing a (relative) shelling down to target.

    For a full shelling the target is a single facet and the construction
    order of the shelling is the reverse of `removal_order` preceded by
    that facet.
    """

    removal_order: tuple[Simplex, ...]
    target: SimplicialComplex

    @property
    def construction_order(self) -> tuple[Simplex, ...]:
        return tuple(self.target.facets) + tuple(reversed(self.removal_order))

    def __len__(self) -> int:
        return len(self.removal_order)


@dataclass(frozen=True)
class NonevasiveTree:
    """Recursion tree: at each node, the vertex whose link and deletion recurse.

    A leaf (both children None) asserts its complex is a single point.
    """

    vertex: int
    link_tree: "NonevasiveTree | None" = None
    deletion_tree: "NonevasiveTree | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.link_tree is None and self.deletion_tree is None


@dataclass(frozen=True)
class EndocollapseCertificate:
    """A facet whose open removal collapses onto the boundary (or a vertex)."""

    facet: Simplex
    collapse: CollapseCertificate


# ---------------------------------------------------------------------------
# collapse replay

def replay_collapse(
    source: SimplicialComplex, steps
) -> tuple[SimplicialComplex | None, int]:
    """Replay elementary collapses; (result, -1) or (None, failing index)."""
    faces = set(source.all_face_masks())
    for i, (sigma, big) in enumerate(steps):
        s, b = pack(sigma), pack(big)
        if s == 0 or s not in faces or b not in faces or (s & b) != s or s == b:
            return None, i
        # sigma must have b as its single proper coface, b must be maximal
        cofaces = 0
        for f in faces:
            if f != s and f & s == s:
                cofaces += 1
                if cofaces > 1 or f != b:
                    return None, i
        if any(f != b and f & b == b for f in faces):
            return None, i
        faces.discard(s)
        faces.discard(b)
    if not faces:
        return SimplicialComplex([]), -1
    return SimplicialComplex.from_masks(faces), -1


def verify_collapse(source: SimplicialComplex, cert: CollapseCertificate) -> bool:
    """True iff every step is a legal free-face deletion and the residue is target."""
    result, bad = replay_collapse(source, cert.steps)
    if result is None:
        return False
    return result == cert.target


# ---------------------------------------------------------------------------
# shelling replay

def _shelling_step_ok(facet_mask: int, remaining: SimplicialComplex) -> bool:
    """Check one removal step: intersection pure codim 1 and shellable."""
    d = mask_dim(facet_mask)
    if d == 0:
        return True  # dim-0 shellings are arbitrary vertex orders
    rem_faces = remaining.all_face_masks()
    shared = [m for m in iter_submasks(facet_mask, d) if m in rem_faces]
    if not shared:
        return False
    # purity: every shared face of the facet lies under a shared ridge
    for size in range(1, d):
        for m in iter_submasks(facet_mask, size):
            if m in rem_faces and not any(m & r == m for r in shared):
                return False
    inter = SimplicialComplex.from_masks(shared)
    return brute_force_shellable(inter)


def replay_shelling(
    source: SimplicialComplex, removal_order
) -> tuple[SimplicialComplex | None, int]:
    """Replay removals; (final complex, -1) or (None, failing index)."""
    current = source
    for i, facet in enumerate(removal_order):
        fm = pack(facet)
        if fm not in current.facet_masks:
            return None, i
        rest = [m for m in current.facet_masks if m != fm]
        if not rest:
            return None, i
        remaining = SimplicialComplex.from_masks(rest)
        if not _shelling_step_ok(fm, remaining):
            return None, i
        current = remaining
    return current, -1


def verify_shelling(source: SimplicialComplex, cert: ShellingCertificate) -> bool:
    """Replay the removal order; check every step and residue == target."""
    if source.dim >= 1 and not source.is_pure():
        return False
    result, bad = replay_shelling(source, cert.removal_order)
    if result is None:
        return False
    return result == cert.target


def brute_force_shellable(C: SimplicialComplex) -> bool:
    """Shellability by trying all facet orders. Only for very small complexes.

    Used as the recursive side condition of a shelling step; the complexes
    seen there are subcomplexes of a simplex boundary, so this stays tiny.
    """
    facets = sorted(C.facet_masks)
    if len(facets) == 1:
        return True
    d = C.dim
    if d == 0:
        return True
    if not C.is_pure():
        return False
    faces_of: dict[int, set[int]] = {}
    for fm in facets:
        sub = set()
        for size in range(1, fm.bit_count()):
            sub.update(iter_submasks(fm, size))
        faces_of[fm] = sub

    def extend(placed: list[int], covered: set[int], rest: list[int]) -> bool:
        if not rest:
            return True
        for k, fm in enumerate(rest):
            ridges = [m for m in iter_submasks(fm, d) if m in covered]
            if ridges and all(
                any(m & r == m for r in ridges)
                for m in faces_of[fm]
                if m in covered
            ):
                if extend(placed + [fm], covered | faces_of[fm] | {fm}, rest[:k] + rest[k + 1:]):
                    return True
        return False

    for k, start in enumerate(facets):
        if extend([start], faces_of[start] | {start}, facets[:k] + facets[k + 1:]):
            return True
    return False


# ---------------------------------------------------------------------------
# non-evasiveness replay

def verify_nonevasive_tree(C: SimplicialComplex, tree: NonevasiveTree) -> bool:
    """Replay a non-evasiveness recursion tree against the complex."""
    if not C:
        return False
    if tree.is_leaf:
        return C.dim == 0 and C.vertex_count == 1 and C.vertices[0] == tree.vertex
    v = tree.vertex
    if not C.has_face([v]):
        return False
    if tree.link_tree is None or tree.deletion_tree is None:
        return False
    try:
        lk = C.link([v])
    except Exception:
        return False
    return verify_nonevasive_tree(lk, tree.link_tree) and verify_nonevasive_tree(
        C.delete([v]), tree.deletion_tree
    )
