"""Immutable simplicial complexes and the face algebra everything else builds on.

A simplex is a strictly increasing tuple of non-negative integer vertex ids.
Internally every face is a bitmask (bit v set <=> vertex v belongs to the
face), which keeps face hashing and subset tests cheap; the search code in
`checkers` manipulates masks directly.  A complex is stored by its facets
(inclusion-maximal faces); everything below them is implicit.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator

Simplex = tuple[int, ...]


class TopologyError(ValueError):
    """Base class for contract violations raised by this package."""


class EmptyComplexError(TopologyError):
    pass


class FaceNotInComplexError(TopologyError):
    pass


class NotPureError(TopologyError):
    pass


class NotASubcomplexError(TopologyError):
    pass


class NotPseudomanifoldError(TopologyError):
    pass


class DimensionMismatchError(TopologyError):
    pass


class InvalidCertificateError(TopologyError):
    pass


# ---------------------------------------------------------------------------
# mask helpers

def pack(vertices: Iterable[int]) -> int:
    """Bitmask of a vertex collection. Duplicates collapse silently."""
    m = 0
    for v in vertices:
        if v < 0:
            raise ValueError("vertex ids must be non-negative, got %r" % (v,))
        m |= 1 << v
    return m


def unpack(mask: int) -> Simplex:
    """Sorted vertex tuple of a face mask."""
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


def mask_dim(mask: int) -> int:
    """Dimension of a face mask (-1 for the empty face)."""
    return mask.bit_count() - 1


def iter_submasks(mask: int, size: int) -> Iterator[int]:
    """All sub-faces of `mask` with exactly `size` vertices."""
    verts = unpack(mask)
    for combo in itertools.combinations(verts, size):
        m = 0
        for v in combo:
            m |= 1 << v
        yield m


def proper_submasks(mask: int) -> list[int]:
    """Every nonempty proper face of `mask`."""
    out = []
    k = mask.bit_count()
    for size in range(1, k):
        out.extend(iter_submasks(mask, size))
    return out


def _maximalize(masks: Iterable[int]) -> frozenset[int]:
    """Drop masks contained in another mask (antichain of facets)."""
    by_size = sorted(set(masks), key=lambda m: -m.bit_count())
    kept: list[int] = []
    for m in by_size:
        if not any(m & k == m for k in kept):
            kept.append(m)
    return frozenset(kept)


class SimplicialComplex:
    """A finite simplicial complex given by its facets.

    Instances are immutable values: all operations return new complexes,
    and equality/hashing is by the facet set (vertex labels included).
    The optional `labels` map records the provenance of vertices created
    by constructions; it is carried along but ignored by equality.
    """

    __slots__ = ("_facets", "labels", "_all_faces", "_canon")

    def __init__(self, facets: Iterable[Iterable[int]] = (), labels: dict[int, str] | None = None):
        masks = []
        for f in facets:
            m = pack(f)
            if m == 0:
                raise ValueError("the empty set is not a facet")
            masks.append(m)
        self._facets = _maximalize(masks)
        self.labels = labels
        self._all_faces: frozenset[int] | None = None
        self._canon: frozenset[int] | None = None

    @classmethod
    def from_masks(cls, masks: Iterable[int], labels: dict[int, str] | None = None) -> "SimplicialComplex":
        c = cls.__new__(cls)
        c._facets = _maximalize(masks)
        c.labels = labels
        c._all_faces = None
        c._canon = None
        if 0 in c._facets:
            raise ValueError("the empty set is not a facet")
        return c

    # -- basic queries ------------------------------------------------------

    @property
    def facet_masks(self) -> frozenset[int]:
        return self._facets

    @property
    def facets(self) -> tuple[Simplex, ...]:
        return tuple(sorted(unpack(m) for m in self._facets))

    def __bool__(self) -> bool:
        return bool(self._facets)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimplicialComplex) and self._facets == other._facets

    def __hash__(self) -> int:
        return hash(self._facets)

    def __repr__(self) -> str:
        fs = self.facets
        if len(fs) > 8:
            return "SimplicialComplex(%d facets, dim %d)" % (len(fs), self.dim)
        return "SimplicialComplex(%s)" % (list(map(list, fs)),)

    @property
    def dim(self) -> int:
        if not self._facets:
            return -1
        return max(m.bit_count() for m in self._facets) - 1

    @property
    def vertex_mask(self) -> int:
        m = 0
        for f in self._facets:
            m |= f
        return m

    @property
    def vertices(self) -> Simplex:
        return unpack(self.vertex_mask)

    @property
    def vertex_count(self) -> int:
        return self.vertex_mask.bit_count()

    def all_face_masks(self) -> frozenset[int]:
        """Every nonempty face of the closure, as masks (cached)."""
        if self._all_faces is None:
            seen: set[int] = set()
            for fm in self._facets:
                verts = unpack(fm)
                for size in range(1, len(verts) + 1):
                    for combo in itertools.combinations(verts, size):
                        m = 0
                        for v in combo:
                            m |= 1 << v
                        seen.add(m)
            self._all_faces = frozenset(seen)
        return self._all_faces

    def faces(self, k: int) -> set[Simplex]:
        """All k-dimensional faces; empty set when k is out of range."""
        if k == -1:
            return {()} if self._facets else set()
        return {unpack(m) for m in self.face_masks(k)}

    def face_masks(self, k: int) -> set[int]:
        if k < 0 or k > self.dim:
            return set()
        want = k + 1
        out: set[int] = set()
        for fm in self._facets:
            if fm.bit_count() >= want:
                out.update(iter_submasks(fm, want))
        return out

    def f_vector(self) -> tuple[int, ...]:
        """Face counts by dimension 0..dim."""
        if not self._facets:
            raise EmptyComplexError("empty complex has no f-vector")
        counts = [0] * (self.dim + 1)
        for m in self.all_face_masks():
            counts[mask_dim(m)] += 1
        return tuple(counts)

    def euler_characteristic(self) -> int:
        fv = self.f_vector()
        return sum((-1) ** i * n for i, n in enumerate(fv))

    def has_face(self, sigma: Iterable[int]) -> bool:
        m = pack(sigma)
        if m == 0:
            return bool(self._facets)
        return any(m & fm == m for fm in self._facets)

    def is_pure(self) -> bool:
        """True iff all facets have the top dimension. Errors on empty input."""
        if not self._facets:
            raise EmptyComplexError("purity is undefined for the empty complex")
        sizes = {m.bit_count() for m in self._facets}
        return len(sizes) == 1

    def is_connected(self) -> bool:
        if not self._facets:
            raise EmptyComplexError("connectivity is undefined for the empty complex")
        facets = list(self._facets)
        merged = facets[0]
        rest = facets[1:]
        while rest:
            nxt = [f for f in rest if not (f & merged)]
            if len(nxt) == len(rest):
                return False
            merged_extra = 0
            for f in rest:
                if f & merged:
                    merged_extra |= f
            merged |= merged_extra
            rest = nxt
        return True

    # -- face-algebra operations -------------------------------------------

    def link(self, sigma: Iterable[int]) -> "SimplicialComplex":
        """Link of a face: {tau : tau disjoint from sigma, tau + sigma a face}."""
        s = pack(sigma)
        cofacets = [fm for fm in self._facets if fm & s == s]
        if not cofacets:
            raise FaceNotInComplexError("%r is not a face of the complex" % (unpack(s),))
        return SimplicialComplex.from_masks(
            m for m in (fm & ~s for fm in cofacets) if m
        )

    def star(self, sigma: Iterable[int]) -> "SimplicialComplex":
        """Closed star: closure of the facets containing sigma."""
        s = pack(sigma)
        cofacets = [fm for fm in self._facets if fm & s == s]
        if not cofacets:
            raise FaceNotInComplexError("%r is not a face of the complex" % (unpack(s),))
        return SimplicialComplex.from_masks(cofacets)

    def delete(self, tau: Iterable[int]) -> "SimplicialComplex":
        """All faces not containing tau (deleting a non-face is the identity)."""
        t = pack(tau)
        if t == 0:
            raise ValueError("cannot delete the empty face")
        new_masks: list[int] = []
        for fm in self._facets:
            if fm & t != t:
                new_masks.append(fm)
            else:
                # maximal subfaces of fm missing tau: drop one tau-vertex each
                tm = t
                while tm:
                    low = tm & -tm
                    sub = fm & ~low
                    if sub:
                        new_masks.append(sub)
                    tm &= tm - 1
        return SimplicialComplex.from_masks(new_masks)

    def boundary(self) -> "SimplicialComplex":
        """Closure of the codimension-1 faces lying in exactly one facet."""
        if not self._facets:
            raise EmptyComplexError("boundary of the empty complex")
        if not self.is_pure() or self.dim < 1:
            raise NotPureError("boundary needs a pure complex of dimension >= 1")
        counts: dict[int, int] = {}
        for fm in self._facets:
            for r in iter_submasks(fm, fm.bit_count() - 1):
                counts[r] = counts.get(r, 0) + 1
        return SimplicialComplex.from_masks(r for r, c in counts.items() if c == 1)

    def free_faces(self) -> list[tuple[Simplex, Simplex]]:
        """All collapse pairs (sigma, Sigma): sigma lies in exactly one other face.

        The containing face is necessarily a facet with sigma of codimension 1.
        """
        counts: dict[int, list[int]] = {}
        for fm in self._facets:
            if fm.bit_count() < 2:
                continue
            for r in iter_submasks(fm, fm.bit_count() - 1):
                counts.setdefault(r, []).append(fm)
        pairs = []
        for r, owners in counts.items():
            if len(owners) == 1 and not any(
                r & fm == r for fm in self._facets if fm != owners[0]
            ):
                pairs.append((unpack(r), unpack(owners[0])))
        return sorted(pairs)

    # -- homology over GF(2) -------------------------------------------------

    def betti_z2(self) -> tuple[int, ...]:
        """Reduced Betti numbers over the field with two elements."""
        if not self._facets:
            raise EmptyComplexError("betti numbers of the empty complex")
        by_dim: list[list[int]] = [[] for _ in range(self.dim + 1)]
        for m in self.all_face_masks():
            by_dim[mask_dim(m)].append(m)
        for row in by_dim:
            row.sort()
        index = [{m: i for i, m in enumerate(row)} for row in by_dim]

        def boundary_rank(k: int) -> int:
            # rank of d_k: C_k -> C_{k-1}; k = 0 maps onto the empty face
            if k == 0:
                return 1 if by_dim[0] else 0
            rows = []
            idx = index[k - 1]
            for m in by_dim[k]:
                r = 0
                mm = m
                while mm:
                    low = mm & -mm
                    r |= 1 << idx[m & ~low]
                    mm &= mm - 1
                rows.append(r)
            return gf2_rank(rows)

        ranks = [boundary_rank(k) for k in range(self.dim + 1)]
        ranks.append(0)  # no faces above top dimension
        betti = []
        for k in range(self.dim + 1):
            betti.append(len(by_dim[k]) - ranks[k] - ranks[k + 1])
        return tuple(betti)

    # -- isomorphism and canonical form --------------------------------------

    def canonical_form(self) -> frozenset[int]:
        """Facet masks after a canonical relabeling of the vertices.

        Two complexes are isomorphic iff their canonical forms coincide.
        Exponential in the worst case; meant for the small complexes the
        search memoization sees.
        """
        if self._canon is None:
            self._canon = frozenset(canonical_facets(list(self._facets))[0])
        return self._canon

    def is_isomorphic_to(self, other: "SimplicialComplex") -> bool:
        """Facet-set isomorphism under a vertex bijection."""
        if len(self._facets) != len(other._facets):
            return False
        if sorted(m.bit_count() for m in self._facets) != sorted(
            m.bit_count() for m in other._facets
        ):
            return False
        return self.canonical_form() == other.canonical_form()

    # -- subcomplex relations -------------------------------------------------

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        other_faces = other.all_face_masks()
        return all(fm in other_faces for fm in self._facets)

    def intersection(self, other: "SimplicialComplex") -> "SimplicialComplex":
        """Subcomplex of faces belonging to both complexes."""
        common = self.all_face_masks() & other.all_face_masks()
        return SimplicialComplex.from_masks(common)


# ---------------------------------------------------------------------------
# GF(2) linear algebra on bitmask rows

def gf2_rank(rows: list[int]) -> int:
    """Rank of a matrix whose rows are bitmasks, by elimination."""
    rank = 0
    pivots: list[int] = []
    for row in rows:
        for p in pivots:
            low = p & -p
            if row & low:
                row ^= p
        if row:
            pivots.append(row)
            rank += 1
    return rank


# ---------------------------------------------------------------------------
# canonical labeling by refinement + individualization

def _refine(facets: list[int], verts: list[int], colors: dict[int, int]) -> dict[int, int]:
    incid: dict[int, list[int]] = {v: [] for v in verts}
    for fm in facets:
        for v in unpack(fm):
            incid[v].append(fm)
    while True:
        sigs = {}
        for v in verts:
            facet_sig = sorted(
                (fm.bit_count(), tuple(sorted(colors[w] for w in unpack(fm) if w != v)))
                for fm in incid[v]
            )
            sigs[v] = (colors[v], tuple(facet_sig))
        order = sorted(set(sigs.values()))
        rank = {s: i for i, s in enumerate(order)}
        new = {v: rank[sigs[v]] for v in verts}
        if new == colors:
            return colors
        colors = new


def canonical_facets(facets: list[int]) -> tuple[list[int], dict[int, int]]:
    """Canonically relabeled facet masks plus the old->new vertex map."""
    vm = 0
    for fm in facets:
        vm |= fm
    verts = list(unpack(vm))
    if not verts:
        return [], {}
    colors = _refine(facets, verts, {v: 0 for v in verts})

    best: tuple[list[int], dict[int, int]] | None = None

    def encode(col: dict[int, int]) -> tuple[list[int], dict[int, int]]:
        relab = {v: col[v] for v in verts}
        out = sorted(pack(relab[w] for w in unpack(fm)) for fm in facets)
        return out, relab

    def descend(col: dict[int, int]) -> None:
        nonlocal best
        classes: dict[int, list[int]] = {}
        for v in verts:
            classes.setdefault(col[v], []).append(v)
        split = sorted(c for c, vs in classes.items() if len(vs) > 1)
        if not split:
            cand = encode(col)
            if best is None or cand[0] < best[0]:
                best = cand
            return
        target = classes[split[0]]
        for v in sorted(target):
            branched = dict(col)
            # individualize v: shift everything up, pin v below its class
            for w in verts:
                branched[w] = branched[w] * 2 + (0 if w == v else 1)
            order = sorted(set(branched.values()))
            rank = {c: i for i, c in enumerate(order)}
            branched = {w: rank[branched[w]] for w in verts}
            descend(_refine(facets, verts, branched))

    descend(colors)
    assert best is not None
    return best
