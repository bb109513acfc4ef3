"""The Magnus embedding and the free solvable groups built on it.

For a quotient Q = F/N of the rank-r free group, the embedding sends a
word w to the wreath element (f, b) over Z^r wr Q with b the image of w
and with the i-th coordinate of f at a vertex q equal to the coefficient
of q in the i-th projected Fox derivative of w.  Its kernel is the derived
subgroup N', so it gives normal forms, equality, exact word length, and a
conjugacy decision for the free solvable groups S_{r,d} = F/F^(d) through
the recursion S_{r,d} -> Z^r wr S_{r,d-1} (derived length one is Z^r).

The same coordinates, read as a function on Cayley-graph edges, are the
net edge-traversal flow of the path w reads in Cay(Q).  Word length in
F/N' is the total flow plus twice the minimal number of off-support edges
needed to visit every support vertex together with the identity; the
off-support connection cost is computed over flow-support components with
a 0/1-weight search and an exact path ordering.
"""

from functools import lru_cache
from collections import deque
from itertools import permutations

from .config import DEFAULT, RunConfig
from .errors import BeyondCapError
from .fox import projected_derivatives
from .groups import GroupHandle, ZrHandle
from .wreath import (
    ConjugacyResult,
    Measure,
    WreathElement,
    conjugacy_test,
    w_length,
    wreath_element,
)
from .words import FreeWord, from_json as word_from_json, identity as word_identity, to_json as word_to_json


def magnus_embed(w: FreeWord, Q: GroupHandle, lamp: ZrHandle | None = None) -> WreathElement:
    """Image of the word w in Z^r wr Q."""
    r = w.rank
    A = lamp if lamp is not None else ZrHandle(r)
    ders, endpoint = projected_derivatives(w, Q)
    cells: dict = {}
    for i, der in enumerate(ders):
        for elem, coeff in der.items():
            k = Q.key(elem)
            if k not in cells:
                cells[k] = (elem, [0] * r)
            cells[k][1][i] = coeff
    pairs = [(elem, tuple(vec)) for elem, vec in cells.values() if any(vec)]
    return wreath_element(A, Q, pairs, endpoint)


# -- edge flows ----------------------------------------------------------------


class EdgeFlow:
    """Net signed traversal counts of the path a word reads in Cay(Q).

    ``counts`` maps (key(q), i) for the directed edge (q, q.x_i) to its net
    count; ``vertices`` maps keys back to elements; ``endpoint`` is where
    the path stops.
    """

    __slots__ = ("counts", "vertices", "endpoint")

    def __init__(self, counts, vertices, endpoint):
        self.counts = counts
        self.vertices = vertices
        self.endpoint = endpoint

    def total(self) -> int:
        return sum(abs(c) for c in self.counts.values())


def flow_of(w: FreeWord, Q: GroupHandle) -> EdgeFlow:
    """Edge flow of w, assembled from the projected derivative coordinates."""
    ders, endpoint = projected_derivatives(w, Q)
    counts = {}
    vertices = {Q.key(Q.identity): Q.identity}
    for i, der in enumerate(ders, start=1):
        for elem, coeff in der.items():
            counts[(Q.key(elem), i)] = coeff
            vertices.setdefault(Q.key(elem), elem)
    return EdgeFlow(counts, vertices, endpoint)


def divergence_of(flow: EdgeFlow, Q: GroupHandle) -> dict:
    """Net outflow per vertex: +1 at the identity, -1 at the endpoint, zero
    elsewhere (identically zero when the endpoint is the identity)."""
    gens = [g for _, g in Q.generators()]
    div: dict = {}
    for (qk, i), c in flow.counts.items():
        q = flow.vertices[qk]
        head = Q.multiply(q, gens[i - 1])
        div[qk] = div.get(qk, 0) + c
        div[Q.key(head)] = div.get(Q.key(head), 0) - c
    return {k: v for k, v in div.items() if v}


def _support_components(flow: EdgeFlow, Q: GroupHandle):
    """Connected components of the support subgraph, with the identity
    vertex adjoined as its own component when isolated."""
    gens = [g for _, g in Q.generators()]
    parent: dict = {}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    verts: dict = {}

    def register(k, elem):
        verts.setdefault(k, elem)
        parent.setdefault(k, k)

    ekey = Q.key(Q.identity)
    register(ekey, Q.identity)
    for (qk, i), _ in flow.counts.items():
        q = flow.vertices[qk]
        head = Q.multiply(q, gens[i - 1])
        hk = Q.key(head)
        register(qk, q)
        register(hk, head)
        union(qk, hk)

    comps: dict = {}
    for k in verts:
        comps.setdefault(find(k), []).append(k)
    return [sorted(c) for root, c in sorted(comps.items())], verts


def _zero_one_distances(flow, Q, sources, targets, verts, config: RunConfig):
    """0/1-weight BFS from a vertex set: support edges are free, all other
    Cayley edges cost one.  Returns first-reached costs for target keys."""
    gens = [g for _, g in Q.generators()]
    support = set(flow.counts)
    dist = {k: 0 for k in sources}
    elems = {k: verts[k] for k in sources}
    dq = deque((0, k) for k in sources)
    remaining = set(targets) - set(sources)
    found = {}
    explored = 0
    while dq and remaining:
        d, k = dq.popleft()
        if d > dist.get(k, d):
            continue
        if k in remaining:
            found[k] = d
            remaining.discard(k)
            if not remaining:
                break
        q = elems[k]
        explored += 1
        if explored > config.walk_node_cap:
            raise BeyondCapError("off-support search exceeded the node cap")
        for i, g in enumerate(gens, start=1):
            forward = Q.multiply(q, g)
            backward = Q.multiply(q, Q.invert(g))
            for head, edge in (
                (forward, (k, i)),
                (backward, (Q.key(backward), i)),  # backwards crosses (head, head.x_i)
            ):
                hk = Q.key(head)
                w = 0 if edge in support else 1
                nd = d + w
                if nd > config.walk_cost_cap:
                    continue
                if nd < dist.get(hk, nd + 1):
                    dist[hk] = nd
                    elems[hk] = head
                    if w:
                        dq.append((nd, hk))
                    else:
                        dq.appendleft((nd, hk))
    return found


def offsupport_connection_cost(flow: EdgeFlow, Q: GroupHandle, config: RunConfig = DEFAULT) -> Measure:
    """Minimal number of non-support edges in a walk visiting every support
    vertex and the identity; support edges may be reused freely.

    Within a support component travel is free, so the walk cost is a
    path-TSP over components in the 0/1 metric (free endpoints).  Exact by
    enumeration while the component count stays small.
    """
    if not flow.counts:
        return Measure.exactly(0)
    comps, verts = _support_components(flow, Q)
    m = len(comps)
    if m == 1:
        return Measure.exactly(0)
    key_to_comp = {}
    for ci, comp in enumerate(comps):
        for k in comp:
            key_to_comp[k] = ci
    D = [[0] * m for _ in range(m)]
    for ci in range(m):
        targets = [k for cj in range(ci + 1, m) for k in comps[cj]]
        if not targets:
            continue
        found = _zero_one_distances(flow, Q, comps[ci], targets, verts, config)
        best = {}
        for k, d in found.items():
            cj = key_to_comp[k]
            if cj not in best or d < best[cj]:
                best[cj] = d
        for cj in range(ci + 1, m):
            if cj not in best:
                raise BeyondCapError("support components not connected within the cost cap")
            D[ci][cj] = D[cj][ci] = best[cj]

    if m <= max(3, config.travel_exact_max):
        best = None
        for order in permutations(range(m)):
            if order[0] > order[-1]:
                continue  # a path and its reverse cost the same
            cost = sum(D[a][b] for a, b in zip(order, order[1:]))
            if best is None or cost < best:
                best = cost
        return Measure.exactly(best)
    # Fallback: nearest-neighbour chain, flagged as an upper bound.
    left = set(range(1, m))
    cur, cost = 0, 0
    while left:
        nxt = min(left, key=lambda j: (D[cur][j], j))
        cost += D[cur][nxt]
        left.discard(nxt)
        cur = nxt
    return Measure(cost, False, max(max(row) for row in D))


def geodesic_length_of_word(w: FreeWord, Q: GroupHandle, config: RunConfig = DEFAULT) -> Measure:
    """Exact word length in F/N' of the element the word represents, from
    its edge flow over Cay(F/N): total flow plus twice the off-support
    connection cost."""
    flow = flow_of(w, Q)
    conn = offsupport_connection_cost(flow, Q, config)
    total = flow.total()
    return Measure(total + 2 * conn.value, conn.exact, total + 2 * conn.lower)


# -- free solvable groups -------------------------------------------------------


class SolvableElement:
    """An element of S_{r,d} for d >= 2: a representative word plus its
    cached image under the Magnus embedding (the normal form)."""

    __slots__ = ("group", "word", "_form")

    def __init__(self, group: "SolvableGroup", word: FreeWord):
        if word.rank != group.r:
            raise ValueError("word rank does not match the group rank")
        self.group = group
        self.word = word
        self._form = None

    @property
    def form(self) -> WreathElement:
        if self._form is None:
            self._form = magnus_embed(self.word, self.group.base, self.group.lamp)
        return self._form

    @property
    def is_identity(self) -> bool:
        return self.form.is_identity

    def __eq__(self, other):
        return (
            isinstance(other, SolvableElement)
            and self.group == other.group
            and self.form.key() == other.form.key()
        )

    def __hash__(self):
        return hash(self.form.key())

    def __repr__(self):
        return f"SolvableElement(r={self.group.r}, d={self.group.d}, word={list(self.word.letters)})"


class SolvableGroup(GroupHandle):
    """S_{r,d} = F/F^(d) for d >= 2, as a handle.

    Arithmetic concatenates representative words and recomputes the Magnus
    form lazily; no reduced normal word is attempted.  Distance is the
    exact flow-length formula over the base quotient S_{r,d-1}.
    """

    kind = "free_solvable"

    def __init__(self, r: int, d: int):
        if d < 2:
            raise ValueError("use solvable_group(), which maps d=1 to Z^r")
        self.r = r
        self.d = d
        self.base = solvable_group(r, d - 1)
        self.lamp = ZrHandle(r)
        self.identity = SolvableElement(self, word_identity(r))

    def generators(self):
        return [
            (f"x{i}", SolvableElement(self, FreeWord(self.r, (i,), _reduced=True)))
            for i in range(1, self.r + 1)
        ]

    def multiply(self, a: SolvableElement, b: SolvableElement) -> SolvableElement:
        return SolvableElement(self, a.word * b.word)

    def invert(self, a: SolvableElement) -> SolvableElement:
        return SolvableElement(self, a.word.inverse())

    def key(self, a: SolvableElement):
        return a.form.key()

    def from_word(self, w: FreeWord) -> SolvableElement:
        return SolvableElement(self, w)

    def distance(self, a: SolvableElement, b: SolvableElement) -> int:
        m = geodesic_length(self.multiply(self.invert(a), b))
        if not m.exact:
            raise BeyondCapError("geodesic length not exact within the configured thresholds")
        return m.value

    def order(self, a: SolvableElement):
        # Free solvable groups are torsion-free.
        return 1 if a.is_identity else None

    def power_membership(self, x: SolvableElement, b: SolvableElement):
        if b.is_identity:
            raise ValueError("power query needs a nontrivial base")
        if x.is_identity:
            return 0
        # Cyclic subgroups are at most 2-distorted, so |x = b^k| forces
        # |k| <= 2|x|.
        bound = 2 * geodesic_length(x).value
        target = self.key(x)
        for sign in (1, -1):
            step = b if sign > 0 else self.invert(b)
            acc = step
            for k in range(1, bound + 1):
                if self.key(acc) == target:
                    return sign * k
                acc = self.multiply(acc, step)
        return None

    def coset_key(self, b: SolvableElement, g: SolvableElement):
        if b.is_identity:
            return self.key(g)
        # Canonical representative: the (length, key)-least element of the
        # orbit window; 2-bounded distortion keeps every candidate at least
        # as short as g inside the window.
        glen = geodesic_length(g).value
        best = ((glen, self.key(g)))
        for sign in (1, -1):
            step = b if sign > 0 else self.invert(b)
            acc = g
            for _ in range(4 * glen + 2):
                acc = self.multiply(step, acc)
                cand = (geodesic_length(acc).value, self.key(acc))
                if cand < best:
                    best = cand
        return best[1]

    def to_json(self, a: SolvableElement):
        return {"r": self.r, "d": self.d, "word": word_to_json(a.word)}

    def from_json(self, data):
        if isinstance(data, dict):
            if int(data.get("r", self.r)) != self.r or int(data.get("d", self.d)) != self.d:
                raise ValueError("element JSON is for a different free solvable group")
            return SolvableElement(self, word_from_json(data["word"], self.r))
        return SolvableElement(self, word_from_json(data, self.r))

    def describe(self):
        return {"kind": "free_solvable", "r": self.r, "d": self.d}


@lru_cache(maxsize=None)
def solvable_group(r: int, d: int):
    """S_{r,d} as a handle; derived length one is the abelianisation Z^r."""
    if r < 1 or d < 1:
        raise ValueError("rank and derived length must be positive")
    if d == 1:
        return ZrHandle(r)
    return SolvableGroup(r, d)


def solvable_eq(u: SolvableElement, v: SolvableElement) -> bool:
    """Equality in S_{r,d}: equality of Magnus normal forms."""
    if u.group != v.group:
        raise ValueError("elements of different free solvable groups")
    return u.form.key() == v.form.key()


def geodesic_length(g: SolvableElement, config: RunConfig = DEFAULT) -> Measure:
    """Exact word length of g in S_{r,d}."""
    return geodesic_length_of_word(g.word, g.group.base, config)


def bilipschitz_check(g: SolvableElement, config: RunConfig = DEFAULT):
    """Compare |g| with the wreath length of its Magnus image; the embedding
    changes lengths by at most a factor of two in either direction."""
    intrinsic = geodesic_length(g, config)
    embedded = w_length(g.form, config)
    if not (intrinsic.exact and embedded.exact):
        raise BeyondCapError("bilipschitz comparison needs both lengths exact")
    ok = intrinsic.value <= 2 * embedded.value and embedded.value <= 2 * intrinsic.value
    return intrinsic, embedded, ok


def solvable_conjugacy_test(
    u: SolvableElement, v: SolvableElement, config: RunConfig = DEFAULT
) -> ConjugacyResult:
    """Conjugacy in S_{r,d}, decided on the Magnus images.

    The base quotient S_{r,d-1} is torsion-free, so conjugacy of the images
    in the wreath product is equivalent to conjugacy upstairs and the
    wreath decision transfers verbatim.
    """
    if u.group != v.group:
        raise ValueError("elements of different free solvable groups")
    return conjugacy_test(u.form, v.form, config)
