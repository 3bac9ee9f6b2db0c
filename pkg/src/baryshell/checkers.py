"""Decision procedures with certificates.

Every search here is budgeted and seeded.  A Negative verdict is only ever
emitted when the search space was exhausted with no budget cutoff anywhere;
heuristic strategies (greedy_restarts, hybrid) otherwise report Positive or
Unknown.  Positive verdicts carry certificates that replay through the
independent oracles in `certificates`.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace

from .certificates import (
    CollapseCertificate,
    EndocollapseCertificate,
    NonevasiveTree,
    ShellingCertificate,
    brute_force_shellable,
    verify_collapse,
    verify_nonevasive_tree,
    verify_shelling,
)
from .core import (
    DimensionMismatchError,
    EmptyComplexError,
    InvalidCertificateError,
    NotASubcomplexError,
    NotPseudomanifoldError,
    NotPureError,
    SimplicialComplex,
    canonical_facets,
    iter_submasks,
    mask_dim,
    pack,
    unpack,
)

EXHAUSTIVE = "exhaustive"
GREEDY = "greedy_restarts"
HYBRID = "hybrid"

# complexes at most this many vertices get canonical-form memo keys
CANON_VERTEX_LIMIT = 24
# node allotment of a single backtracking restart under the hybrid strategy
HYBRID_RESTART_NODES = 20000


@dataclass(frozen=True)
class SearchBudget:
    """Limits and reproducibility knobs for a single check invocation."""

    max_nodes: int | None = None
    max_seconds: float | None = None
    seed: int = 0
    strategy: str = EXHAUSTIVE

    def __post_init__(self):
        if self.strategy not in (EXHAUSTIVE, GREEDY, HYBRID):
            raise ValueError("unknown strategy %r" % (self.strategy,))


@dataclass
class SearchStats:
    nodes: int = 0
    memo_hits: int = 0
    seconds: float = 0.0
    restarts: int = 0


@dataclass
class CheckOutcome:
    """Three-valued verdict with certificate and search statistics."""

    verdict: str  # "positive" | "negative" | "unknown"
    certificate: object | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    note: str = ""

    @property
    def is_positive(self) -> bool:
        return self.verdict == "positive"

    @property
    def is_negative(self) -> bool:
        return self.verdict == "negative"

    @property
    def is_unknown(self) -> bool:
        return self.verdict == "unknown"


class _OutOfBudget(Exception):
    pass


class _Ticker:
    """Node counting and deadline enforcement shared by one check call."""

    __slots__ = ("nodes", "memo_hits", "max_nodes", "deadline", "t0", "restarts")

    def __init__(self, budget: SearchBudget):
        self.nodes = 0
        self.memo_hits = 0
        self.restarts = 0
        self.max_nodes = budget.max_nodes
        self.t0 = time.perf_counter()
        self.deadline = (
            self.t0 + budget.max_seconds if budget.max_seconds is not None else None
        )

    def tick(self, n: int = 1):
        self.nodes += n
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise _OutOfBudget
        if self.deadline is not None and (self.nodes & 0xFF) == 0:
            if time.perf_counter() > self.deadline:
                raise _OutOfBudget

    def over_deadline(self) -> bool:
        return self.deadline is not None and time.perf_counter() > self.deadline

    def stats(self) -> SearchStats:
        return SearchStats(
            nodes=self.nodes,
            memo_hits=self.memo_hits,
            seconds=time.perf_counter() - self.t0,
            restarts=self.restarts,
        )


def _memo_key(faces: frozenset[int]) -> object:
    """Canonical key for a face set; exact key above the canonization limit."""
    vm = 0
    for f in faces:
        vm |= f
    if vm.bit_count() > CANON_VERTEX_LIMIT:
        return faces
    maximal = [f for f in faces if not any(g != f and g & f == f for g in faces)]
    return frozenset(canonical_facets(maximal)[0])


# ---------------------------------------------------------------------------
# collapse searches

def _free_pairs(faces: set[int], forbidden: frozenset[int]) -> list[tuple[int, int]]:
    """Eligible collapse pairs (sigma, Sigma) in a face set, sorted."""
    icc: dict[int, int] = {}
    owner: dict[int, int] = {}
    for f in faces:
        k = f.bit_count()
        if k < 2:
            continue
        for s in iter_submasks(f, k - 1):
            icc[s] = icc.get(s, 0) + 1
            owner[s] = f
    pairs = []
    for f in faces:
        if icc.get(f, 0):  # f is not maximal
            continue
        if f in forbidden:
            continue
        k = f.bit_count()
        if k < 2:
            continue
        for s in iter_submasks(f, k - 1):
            if icc[s] == 1 and s not in forbidden:
                pairs.append((s, f))
    pairs.sort()
    return pairs


def _cone_apexes(faces: set[int]) -> int:
    """Mask of vertices contained in every maximal face (0 if none)."""
    common = -1
    for f in faces:
        if not any(g != f and g & f == f for g in faces):
            common &= f
            if not common:
                return 0
    return common if common != -1 else 0


def _cone_steps(faces: set[int], apex_mask: int) -> list[tuple[int, int]]:
    """Explicit collapse of a cone onto its apex, largest faces first."""
    a = apex_mask & -apex_mask
    off = sorted(
        (f for f in faces if not f & a), key=lambda m: (-m.bit_count(), m)
    )
    return [(s, s | a) for s in off]


def _collapse_dfs(
    faces0: frozenset[int],
    target: frozenset[int] | None,
    tick: _Ticker,
    dead: set,
    rng: random.Random | None,
    node_cap: int | None,
) -> list[tuple[int, int]] | None:
    """Backtracking collapse search; None means exhausted (if no cap hit)."""
    forbidden = target if target is not None else frozenset()
    start_nodes = tick.nodes

    def done(faces: set[int]) -> list[tuple[int, int]] | None:
        if target is not None:
            return [] if faces == target else None
        if len(faces) == 1 and next(iter(faces)).bit_count() == 1:
            return []
        apex = _cone_apexes(faces)
        if apex:
            return _cone_steps(faces, apex)
        return None

    def rec(faces: set[int]) -> list[tuple[int, int]] | None:
        tick.tick()
        if node_cap is not None and tick.nodes - start_nodes > node_cap:
            raise _OutOfBudget
        fin = done(faces)
        if fin is not None:
            return fin
        key = _memo_key(frozenset(faces))
        if key in dead:
            tick.memo_hits += 1
            return None
        pairs = _free_pairs(faces, forbidden)
        if rng is not None:
            rng.shuffle(pairs)
        for s, f in pairs:
            faces.discard(s)
            faces.discard(f)
            res = rec(faces)
            faces.add(s)
            faces.add(f)
            if res is not None:
                return [(s, f)] + res
        dead.add(key)
        return None

    return rec(set(faces0))


def _collapse_greedy(
    faces0: frozenset[int],
    target: frozenset[int] | None,
    tick: _Ticker,
    rng: random.Random,
) -> list[tuple[int, int]] | None:
    forbidden = target if target is not None else frozenset()
    faces = set(faces0)
    steps: list[tuple[int, int]] = []
    while True:
        if target is not None and faces == target:
            return steps
        if target is None:
            if len(faces) == 1 and next(iter(faces)).bit_count() == 1:
                return steps
            apex = _cone_apexes(faces)
            if apex:
                return steps + _cone_steps(faces, apex)
        tick.tick()
        pairs = _free_pairs(faces, forbidden)
        if not pairs:
            return None
        s, f = rng.choice(pairs)
        faces.discard(s)
        faces.discard(f)
        steps.append((s, f))


def _run_collapse_search(
    C: SimplicialComplex,
    target_complex: SimplicialComplex | None,
    budget: SearchBudget,
) -> CheckOutcome:
    faces0 = frozenset(C.all_face_masks())
    target = (
        frozenset(target_complex.all_face_masks()) if target_complex is not None else None
    )
    tick = _Ticker(budget)

    def certify(steps_masks: list[tuple[int, int]]) -> CheckOutcome:
        steps = tuple((unpack(s), unpack(f)) for s, f in steps_masks)
        if target_complex is not None:
            tgt = target_complex
        else:
            remaining = set(faces0)
            for s, f in steps_masks:
                remaining.discard(s)
                remaining.discard(f)
            tgt = SimplicialComplex.from_masks(remaining)
        cert = CollapseCertificate(steps=steps, target=tgt)
        if not verify_collapse(C, cert):
            raise AssertionError("search produced an invalid collapse certificate")
        return CheckOutcome("positive", cert, tick.stats())

    # no moves at the root is an exhaustive refutation under any strategy
    root_pairs = _free_pairs(set(faces0), target or frozenset())

    if budget.strategy == EXHAUSTIVE:
        dead: set = set()
        try:
            res = _collapse_dfs(faces0, target, tick, dead, None, None)
        except _OutOfBudget:
            return CheckOutcome("unknown", None, tick.stats(), note="budget exhausted")
        if res is not None:
            return certify(res)
        return CheckOutcome("negative", None, tick.stats(), note="search space exhausted")

    if not root_pairs:
        done_now = (
            (target is not None and faces0 == target)
            or (target is None and len(faces0) == 1)
            or (target is None and _cone_apexes(set(faces0)))
        )
        if done_now:
            return certify(
                _collapse_greedy(faces0, target, tick, random.Random(budget.seed)) or []
            )
        return CheckOutcome(
            "negative", None, tick.stats(), note="no collapse pair at the root"
        )

    dead: set = set()
    attempt = 0
    while True:
        if tick.over_deadline() or (
            tick.max_nodes is not None and tick.nodes >= tick.max_nodes
        ):
            return CheckOutcome("unknown", None, tick.stats(), note="budget exhausted")
        rng = random.Random((budget.seed, attempt))
        tick.restarts += 1
        try:
            if budget.strategy == GREEDY:
                res = _collapse_greedy(faces0, target, tick, rng)
                if res is not None:
                    return certify(res)
            else:  # hybrid: bounded backtracking with shared sound memo
                res = _collapse_dfs(faces0, target, tick, dead, rng, HYBRID_RESTART_NODES)
                if res is not None:
                    return certify(res)
                # DFS exhausted the space within its cap: sound refutation
                return CheckOutcome(
                    "negative", None, tick.stats(), note="search space exhausted"
                )
        except _OutOfBudget:
            pass
        attempt += 1


def is_collapsible(C: SimplicialComplex, budget: SearchBudget | None = None) -> CheckOutcome:
    """Does C collapse onto a single vertex?"""
    budget = budget or SearchBudget()
    if not C:
        raise EmptyComplexError("collapsibility of the empty complex")
    if not C.is_connected():
        return CheckOutcome("negative", None, SearchStats(), note="disconnected")
    return _run_collapse_search(C, None, budget)


def collapses_onto(
    C: SimplicialComplex, D: SimplicialComplex, budget: SearchBudget | None = None
) -> CheckOutcome:
    """Does C collapse onto the subcomplex D?"""
    budget = budget or SearchBudget()
    if not D.is_subcomplex_of(C):
        raise NotASubcomplexError("D is not a subcomplex of C")
    if C == D:
        cert = CollapseCertificate(steps=(), target=D)
        return CheckOutcome("positive", cert, SearchStats())
    return _run_collapse_search(C, D, budget)


# ---------------------------------------------------------------------------
# shelling searches

class _ShellingSpace:
    """Incremental state for shelling-extension search on a pure complex."""

    def __init__(self, C: SimplicialComplex, base: SimplicialComplex | None):
        self.dim = C.dim
        self.nverts = (max(C.vertices) + 1) if C else 0
        base_masks = frozenset(base.facet_masks) if base is not None else frozenset()
        self.targets = sorted(m for m in C.facet_masks if m not in base_masks)
        self.index = {m: i for i, m in enumerate(self.targets)}
        # per-facet precomputation: proper submasks, ridges, sub->ridge bits
        self.subs: list[list[int]] = []
        self.ridges: list[list[int]] = []
        self.subridge: list[list[int]] = []
        for fm in self.targets:
            k = fm.bit_count()
            subs = []
            ridges = list(iter_submasks(fm, k - 1))
            srbits = []
            for size in range(1, k):
                for s in iter_submasks(fm, size):
                    subs.append(s)
                    bits = 0
                    for ri, r in enumerate(ridges):
                        if s & r == s:
                            bits |= 1 << ri
                    srbits.append(bits)
            self.subs.append(subs)
            self.ridges.append(ridges)
            self.subridge.append(srbits)
        # ridge -> candidate facet indices
        self.ridge_owners: dict[int, list[int]] = {}
        for i, fm in enumerate(self.targets):
            for r in self.ridges[i]:
                self.ridge_owners.setdefault(r, []).append(i)
        # coverage counts: list for small vertex ranges, dict otherwise
        self.use_array = self.nverts <= 20
        if self.use_array:
            self.cnt = [0] * (1 << self.nverts)
        else:
            self.cnt = {}
        if base is not None:
            for fm in base.facet_masks:
                self._bump(fm, +1, include_self=True)

    def _bump(self, fm: int, delta: int, include_self: bool = False):
        cnt = self.cnt
        if self.use_array:
            for size in range(1, fm.bit_count()):
                for s in iter_submasks(fm, size):
                    cnt[s] += delta
            if include_self:
                cnt[fm] += delta
        else:
            for size in range(1, fm.bit_count()):
                for s in iter_submasks(fm, size):
                    cnt[s] = cnt.get(s, 0) + delta
            if include_self:
                cnt[fm] = cnt.get(fm, 0) + delta

    def place(self, i: int):
        self._bump(self.targets[i], +1)

    def unplace(self, i: int):
        self._bump(self.targets[i], -1)

    def valid(self, i: int) -> bool:
        """Can facet i be attached: shared part pure of codimension 1."""
        cnt = self.cnt
        if self.use_array:
            present = 0
            for ri, r in enumerate(self.ridges[i]):
                if cnt[r]:
                    present |= 1 << ri
            if not present:
                return False
            for s, bits in zip(self.subs[i], self.subridge[i]):
                if cnt[s] and not (bits & present):
                    return False
            return True
        present = 0
        for ri, r in enumerate(self.ridges[i]):
            if cnt.get(r, 0):
                present |= 1 << ri
        if not present:
            return False
        for s, bits in zip(self.subs[i], self.subridge[i]):
            if cnt.get(s, 0) and not (bits & present):
                return False
        return True


def _shelling_search(
    C: SimplicialComplex,
    base: SimplicialComplex | None,
    budget: SearchBudget,
) -> CheckOutcome:
    """Extend `base` (or a first facet) across all of C by shelling steps."""
    tick = _Ticker(budget)
    space = _ShellingSpace(C, base)
    n = len(space.targets)

    def certify(order_idx: list[int]) -> CheckOutcome:
        construction = [space.targets[i] for i in order_idx]
        if base is None:
            tgt = SimplicialComplex.from_masks([construction[0]])
            removal = [unpack(m) for m in reversed(construction[1:])]
        else:
            tgt = base
            removal = [unpack(m) for m in reversed(construction)]
        cert = ShellingCertificate(removal_order=tuple(removal), target=tgt)
        if not verify_shelling(C, cert):
            raise AssertionError("search produced an invalid shelling certificate")
        return CheckOutcome("positive", cert, tick.stats())

    if n == 0:
        return certify([])

    if C.dim == 0:
        # any vertex ordering shells a 0-dimensional complex
        return certify(list(range(n)))

    def run_dfs(rng: random.Random | None, dead: set, node_cap: int | None):
        start_nodes = tick.nodes
        placed: list[int] = []
        placed_mask = 0
        pool: set[int] = set()
        pool_log: list[list[int]] = []

        def push(i: int):
            nonlocal placed_mask
            space.place(i)
            placed.append(i)
            placed_mask |= 1 << i
            added = []
            for r in space.ridges[i]:
                for j in space.ridge_owners.get(r, ()):
                    if not (placed_mask >> j) & 1 and j not in pool:
                        pool.add(j)
                        added.append(j)
            pool.discard(i)
            pool_log.append(added)

        def pop(i: int):
            nonlocal placed_mask
            space.unplace(i)
            placed.pop()
            placed_mask &= ~(1 << i)
            for j in pool_log.pop():
                pool.discard(j)
            pool.add(i)

        def rec() -> bool:
            tick.tick()
            if node_cap is not None and tick.nodes - start_nodes > node_cap:
                raise _OutOfBudget
            if len(placed) == n:
                return True
            if placed_mask in dead:
                tick.memo_hits += 1
                return False
            cands = [j for j in sorted(pool) if space.valid(j)]
            if rng is not None:
                rng.shuffle(cands)
            for j in cands:
                push(j)
                if rec():
                    return True
                pop(j)
            dead.add(placed_mask)
            return False

        if base is None:
            starts = list(range(n))
            if rng is not None:
                rng.shuffle(starts)
            for s in starts:
                push(s)
                if rec():
                    return list(placed)
                pop(s)
            return None
        else:
            # seed the pool with facets touching the base
            for i in range(n):
                if space.valid(i):
                    pool.add(i)
            # also any facet sharing a ridge with base coverage
            for i in range(n):
                for r in space.ridges[i]:
                    c = space.cnt[r] if space.use_array else space.cnt.get(r, 0)
                    if c:
                        pool.add(i)
                        break
            if rec():
                return list(placed)
            return None

    def run_greedy(rng: random.Random):
        placed: list[int] = []
        placed_set: set[int] = set()
        pool: set[int] = set()

        def push(i: int):
            space.place(i)
            placed.append(i)
            placed_set.add(i)
            for r in space.ridges[i]:
                for j in space.ridge_owners.get(r, ()):
                    if j not in placed_set:
                        pool.add(j)
            pool.discard(i)

        if base is None:
            push(rng.choice(range(n)))
        else:
            for i in range(n):
                for r in space.ridges[i]:
                    c = space.cnt[r] if space.use_array else space.cnt.get(r, 0)
                    if c:
                        pool.add(i)
                        break
        while len(placed) < n:
            tick.tick()
            cands = [j for j in sorted(pool) if space.valid(j)]
            if not cands:
                for i in reversed(placed):
                    space.unplace(i)
                return None
            push(rng.choice(cands))
        for i in reversed(placed):
            space.unplace(i)
        return list(placed)

    if budget.strategy == EXHAUSTIVE:
        dead: set = set()
        try:
            res = run_dfs(None, dead, None)
        except _OutOfBudget:
            return CheckOutcome("unknown", None, tick.stats(), note="budget exhausted")
        if res is not None:
            return certify(res)
        return CheckOutcome("negative", None, tick.stats(), note="search space exhausted")

    dead: set = set()
    attempt = 0
    while True:
        if tick.over_deadline() or (
            tick.max_nodes is not None and tick.nodes >= tick.max_nodes
        ):
            return CheckOutcome("unknown", None, tick.stats(), note="budget exhausted")
        rng = random.Random((budget.seed, attempt))
        tick.restarts += 1
        try:
            if budget.strategy == GREEDY:
                res = run_greedy(rng)
                if res is not None:
                    return certify(res)
            else:
                res = run_dfs(rng, dead, HYBRID_RESTART_NODES)
                if res is not None:
                    return certify(res)
                return CheckOutcome(
                    "negative", None, tick.stats(), note="search space exhausted"
                )
        except _OutOfBudget:
            # greedy runs cannot leave the space dirty; dfs restores on unwind
            if budget.strategy == HYBRID:
                space = _ShellingSpace(C, base)
        attempt += 1


def is_shellable(C: SimplicialComplex, budget: SearchBudget | None = None) -> CheckOutcome:
    """Search for a shelling of a pure complex."""
    budget = budget or SearchBudget()
    if not C:
        raise EmptyComplexError("shellability of the empty complex")
    if not C.is_pure():
        raise NotPureError("shellability needs a pure complex")
    return _shelling_search(C, None, budget)


def shells_to(
    C: SimplicialComplex, D: SimplicialComplex, budget: SearchBudget | None = None
) -> CheckOutcome:
    """Search for a sequence of shelling steps from C down to D."""
    budget = budget or SearchBudget()
    if not C or not D:
        raise EmptyComplexError("relative shelling with an empty complex")
    if not (C.is_pure() and D.is_pure()):
        raise NotPureError("relative shellings need pure complexes")
    if C.dim != D.dim:
        raise DimensionMismatchError("C and D must have equal dimension")
    if not D.is_subcomplex_of(C):
        raise NotASubcomplexError("D is not a subcomplex of C")
    return _shelling_search(C, D, budget)


def is_conforming(
    C: SimplicialComplex, cert: ShellingCertificate, D: SimplicialComplex
) -> bool:
    """Is the certified shelling D-conforming: every restriction to D pure?"""
    if not verify_shelling(C, cert):
        raise InvalidCertificateError("certificate does not verify on the complex")
    if not D.is_subcomplex_of(C):
        raise NotASubcomplexError("D is not a subcomplex of C")
    d_dim = D.dim
    current = C
    sequence = [current]
    for facet in cert.removal_order:
        fm = pack(facet)
        current = SimplicialComplex.from_masks(
            m for m in current.facet_masks if m != fm
        )
        sequence.append(current)
    for Ci in sequence:
        Di = Ci.intersection(D)
        if not Di:
            return False
        if Di.dim != d_dim or not Di.is_pure():
            return False
    return True


def join_shelling(
    A_cert: ShellingCertificate, B_cert: ShellingCertificate
) -> ShellingCertificate:
    """Shelling of join(A, B) in lexicographic order on construction pairs.

    A and B are reconstructed from the certificates (removal order plus
    target); the resulting certificate uses the vertex relabeling of
    `constructions.join`.
    """
    from .constructions import join, join_vertex_offset

    def rebuild(cert: ShellingCertificate) -> SimplicialComplex:
        masks = {pack(f) for f in cert.removal_order} | set(cert.target.facet_masks)
        return SimplicialComplex.from_masks(masks)

    A = rebuild(A_cert)
    B = rebuild(B_cert)
    if len(A_cert.target.facet_masks) != 1 or len(B_cert.target.facet_masks) != 1:
        raise InvalidCertificateError("join_shelling needs full shellings to one facet")
    if not verify_shelling(A, A_cert) or not verify_shelling(B, B_cert):
        raise InvalidCertificateError("input certificate does not verify")
    offset = join_vertex_offset(A)
    b_map = {v: offset + i for i, v in enumerate(B.vertices)}
    alpha = A_cert.construction_order
    beta = B_cert.construction_order
    construction = []
    for fa in alpha:
        for fb in beta:
            construction.append(pack(fa) | pack(b_map[v] for v in fb))
    target = SimplicialComplex.from_masks([construction[0]])
    removal = tuple(unpack(m) for m in reversed(construction[1:]))
    cert = ShellingCertificate(removal_order=removal, target=target)
    if not verify_shelling(join(A, B), cert):
        raise AssertionError("join shelling failed to verify")
    return cert


# ---------------------------------------------------------------------------
# non-evasiveness

def is_nonevasive(C: SimplicialComplex, budget: SearchBudget | None = None) -> CheckOutcome:
    """Recursive vertex-deletion search for non-evasiveness."""
    budget = budget or SearchBudget()
    if not C:
        raise EmptyComplexError("non-evasiveness of the empty complex")
    tick = _Ticker(budget)
    # memo: canonical facet set -> (verdict, tree in canonical labels)
    memo: dict[frozenset[int], tuple[bool, NonevasiveTree | None]] = {}
    shuffle = budget.strategy in (GREEDY, HYBRID)
    rng = random.Random(budget.seed) if shuffle else None

    def canon_tree(tree: NonevasiveTree, relab: dict[int, int]) -> NonevasiveTree:
        return NonevasiveTree(
            vertex=relab[tree.vertex],
            link_tree=canon_tree(tree.link_tree, relab) if tree.link_tree else None,
            deletion_tree=(
                canon_tree(tree.deletion_tree, relab) if tree.deletion_tree else None
            ),
        )

    def uncanon_tree(tree: NonevasiveTree, inv: dict[int, int]) -> NonevasiveTree:
        return NonevasiveTree(
            vertex=inv[tree.vertex],
            link_tree=uncanon_tree(tree.link_tree, inv) if tree.link_tree else None,
            deletion_tree=(
                uncanon_tree(tree.deletion_tree, inv) if tree.deletion_tree else None
            ),
        )

    def rec(X: SimplicialComplex) -> tuple[bool, NonevasiveTree | None]:
        verts = X.vertices
        if len(verts) == 1:
            return True, NonevasiveTree(vertex=verts[0])
        if X.dim == 0:
            return False, None
        tick.tick()
        canon, relab = canonical_facets(list(X.facet_masks))
        key = frozenset(canon)
        if key in memo:
            tick.memo_hits += 1
            ok, tree = memo[key]
            if not ok or tree is None:
                return ok, None
            inv = {c: v for v, c in relab.items()}
            return True, uncanon_tree(tree, inv)
        order = list(verts)
        if rng is not None:
            # try vertices with tree links first; random tie-break
            def rank(v):
                lk = X.link([v])
                fv = lk.f_vector()
                edges = fv[1] if len(fv) > 1 else 0
                return (0 if (lk.dim <= 1 and edges < len(lk.vertices)) else 1,
                        rng.random())

            order.sort(key=rank)
        for v in order:
            ok_l, t_l = rec(X.link([v]))
            if not ok_l:
                continue
            ok_d, t_d = rec(X.delete([v]))
            if ok_d:
                tree = NonevasiveTree(vertex=v, link_tree=t_l, deletion_tree=t_d)
                memo[key] = (True, canon_tree(tree, relab))
                return True, tree
        memo[key] = (False, None)
        return False, None

    try:
        ok, tree = rec(C)
    except _OutOfBudget:
        return CheckOutcome("unknown", None, tick.stats(), note="budget exhausted")
    if ok:
        assert tree is not None and verify_nonevasive_tree(C, tree)
        return CheckOutcome("positive", tree, tick.stats())
    return CheckOutcome("negative", None, tick.stats(), note="all vertices fail")


# ---------------------------------------------------------------------------
# endocollapsibility

def is_endocollapsible(
    C: SimplicialComplex, budget: SearchBudget | None = None
) -> CheckOutcome:
    """Does C minus some open facet collapse onto its boundary (or a vertex)?"""
    budget = budget or SearchBudget()
    if not C:
        raise EmptyComplexError("endocollapsibility of the empty complex")
    if not C.is_pure():
        raise NotPseudomanifoldError("endocollapsibility needs a pure pseudomanifold")
    d = C.dim
    if d >= 1:
        counts: dict[int, int] = {}
        for fm in C.facet_masks:
            for r in iter_submasks(fm, d):
                counts[r] = counts.get(r, 0) + 1
        if any(c > 2 for c in counts.values()):
            raise NotPseudomanifoldError("a ridge lies in more than two facets")
        bd = C.boundary()
    else:
        bd = SimplicialComplex([])
    total = SearchStats()
    for fm in sorted(C.facet_masks):
        rest = [m for m in C.facet_masks if m != fm]
        rest.extend(iter_submasks(fm, fm.bit_count() - 1))
        punctured = SimplicialComplex.from_masks(m for m in rest if m)
        if bd:
            out = collapses_onto(punctured, bd, budget)
        else:
            out = is_collapsible(punctured, budget)
        total.nodes += out.stats.nodes
        total.memo_hits += out.stats.memo_hits
        total.seconds += out.stats.seconds
        total.restarts += out.stats.restarts
        if out.is_positive:
            cert = EndocollapseCertificate(facet=unpack(fm), collapse=out.certificate)
            return CheckOutcome("positive", cert, total)
        if out.is_unknown:
            return CheckOutcome("unknown", None, total, note="budget exhausted")
    return CheckOutcome("negative", None, total, note="every facet fails exhaustively")


# ---------------------------------------------------------------------------
# PL link test

@dataclass
class PLLinksReport:
    per_vertex: dict[int, CheckOutcome]
    verdict: str  # all links Positive -> "positive"; any Negative -> "negative"


def pl_links_check(
    M: SimplicialComplex, m: int, budget: SearchBudget | None = None
) -> PLLinksReport:
    """Shellability outcome of every vertex link in sd^m(M)."""
    from .constructions import sd_m

    budget = budget or SearchBudget()
    if not M:
        raise EmptyComplexError("link check on the empty complex")
    if not M.is_pure():
        raise NotPureError("link check needs a pure complex")
    X = sd_m(M, m)
    per: dict[int, CheckOutcome] = {}
    verdict = "positive"
    for v in X.vertices:
        out = is_shellable(X.link([v]), budget)
        per[v] = out
        if out.is_negative:
            verdict = "negative"
        elif out.is_unknown and verdict == "positive":
            verdict = "unknown"
    return PLLinksReport(per_vertex=per, verdict=verdict)
