"""Restricted wreath products A wr B over arbitrary group handles:
arithmetic, the exact word metric, and the conjugacy machinery.

An element is a pair (f, b): a finite-support function f from B to A plus
a base point b, with multiplication (f,b)(g,c) = (f g^b, bc) where
g^b(x) = g(b^-1 x).  With the standard generating set (one generator per
base generator, one lamp generator per A generator at the identity
position) the word length is

    |(f, b)| = K(Supp f, b) + sum_x |f(x)|_A

where K(S, b) is the length of the shortest Cayley path in B from the
identity to b visiting every point of S.  K is a path-TSP; it is solved
exactly by a subset dynamic program up to a configured support size and
by nearest-neighbour + 2-opt (flagged as an upper bound) beyond it.

Conjugacy is decided through coset projections: fix b and a right-coset
representative t of <b>; the ordered product of the lamp values of f along
the coset (higher power of b multiplying on the left), optionally shifted
by z, is the invariant pi_t^(z)(f).  Two elements (f,b), (g,c) are
conjugate iff some z with bz = zc matches the projections on every coset
(equality for b of infinite order, A-conjugacy for finite order), and the
conjugator (h, z) is assembled from prefix products along each coset.
Every returned conjugator is re-verified against u*(h,z) = (h,z)*v, so a
wrong ordering convention cannot pass silently.
"""

from dataclasses import dataclass
from math import lcm
from typing import NamedTuple, Optional

from .config import DEFAULT, RunConfig
from .errors import BeyondCapError, InvariantViolation
from .groups import GroupHandle, ball_layers, enumerate_finite


class Measure(NamedTuple):
    """An integer quantity with exactness tracking.

    ``value`` is exact when ``exact`` is True, otherwise an upper bound;
    ``lower`` is always a sound lower bound (== value when exact).
    """

    value: int
    exact: bool
    lower: int

    @classmethod
    def exactly(cls, v: int) -> "Measure":
        return cls(v, True, v)

    def __add__(self, other):
        if isinstance(other, int):
            return Measure(self.value + other, self.exact, self.lower + other)
        return Measure(
            self.value + other.value,
            self.exact and other.exact,
            self.lower + other.lower,
        )


class WreathElement:
    """An element (f, b) of A wr B; identity lamp values are never stored."""

    __slots__ = ("lamp", "base", "f", "b", "_key")

    def __init__(self, lamp, base, f: dict, b, key=None):
        self.lamp = lamp
        self.base = base
        self.f = f  # base key -> (base element, nontrivial lamp element)
        self.b = b
        self._key = key

    def key(self):
        if self._key is None:
            items = tuple(
                sorted((k, self.lamp.key(val)) for k, (_, val) in self.f.items())
            )
            self._key = (self.base.key(self.b), items)
        return self._key

    @property
    def is_identity(self) -> bool:
        return not self.f and self.base.key(self.b) == self.base.key(self.base.identity)

    def support(self):
        """Support points of f in canonical key order."""
        return [self.f[k][0] for k in sorted(self.f)]

    def lamp_at(self, pos):
        t = self.f.get(self.base.key(pos))
        return t[1] if t else self.lamp.identity

    def __eq__(self, other):
        return (
            isinstance(other, WreathElement)
            and self.lamp == other.lamp
            and self.base == other.base
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        lamps = {k: self.lamp.key(v) for k, (_, v) in sorted(self.f.items())}
        return f"WreathElement(f={lamps}, b={self.base.key(self.b)})"


def wreath_element(lamp, base, pairs, b) -> WreathElement:
    """Normalised constructor from (position, lamp value) pairs."""
    f: dict = {}
    ekey = lamp.key(lamp.identity)
    for pos, val in pairs:
        k = base.key(pos)
        if k in f:
            val = lamp.multiply(f[k][1], val)
        if lamp.key(val) == ekey:
            f.pop(k, None)
        else:
            f[k] = (pos, val)
    return WreathElement(lamp, base, f, b)


def identity_element(lamp, base) -> WreathElement:
    return WreathElement(lamp, base, {}, base.identity)


def lamp_generator(lamp, base, t) -> WreathElement:
    """(f_t, e): the lamp value t planted at the identity position."""
    return wreath_element(lamp, base, [(base.identity, t)], base.identity)


def base_generator(lamp, base, s) -> WreathElement:
    """(1, s): a pure base move."""
    return WreathElement(lamp, base, {}, s)


def _check_groups(u: WreathElement, v: WreathElement):
    if u.lamp != v.lamp or u.base != v.base:
        raise ValueError("wreath elements live over different groups")


def w_multiply(u: WreathElement, v: WreathElement) -> WreathElement:
    _check_groups(u, v)
    A, B = u.lamp, u.base
    f = dict(u.f)
    ekey = A.key(A.identity)
    for _, (pos, val) in v.f.items():
        npos = B.multiply(u.b, pos)
        k = B.key(npos)
        if k in f:
            merged = A.multiply(f[k][1], val)  # f(x) * g^b(x), f on the left
            if A.key(merged) == ekey:
                del f[k]
            else:
                f[k] = (f[k][0], merged)
        else:
            f[k] = (npos, val)
    return WreathElement(A, B, f, B.multiply(u.b, v.b))


def w_invert(u: WreathElement) -> WreathElement:
    A, B = u.lamp, u.base
    binv = B.invert(u.b)
    f = {}
    for _, (pos, val) in u.f.items():
        npos = B.multiply(binv, pos)
        f[B.key(npos)] = (npos, A.invert(val))
    return WreathElement(A, B, f, binv)


def w_conjugate(u: WreathElement, gamma: WreathElement) -> WreathElement:
    """gamma^-1 * u * gamma."""
    return w_multiply(w_multiply(w_invert(gamma), u), gamma)


def w_power(u: WreathElement, k: int) -> WreathElement:
    acc = identity_element(u.lamp, u.base)
    step = u if k >= 0 else w_invert(u)
    for _ in range(abs(k)):
        acc = w_multiply(acc, step)
    return acc


# -- the word metric ---------------------------------------------------------


def travel_cost(B: GroupHandle, points, b, config: RunConfig = DEFAULT) -> Measure:
    """Length of the shortest Cayley path in B from the identity to b
    visiting every given point.

    Exact (subset dynamic program) while the point count stays within
    config.travel_exact_max; beyond that the value is a nearest-neighbour +
    2-opt upper bound and the lower field falls back to detour bounds.
    """
    e = B.identity
    ekey, bkey = B.key(e), B.key(b)
    seen = set()
    pts = []
    for p in points:
        k = B.key(p)
        if k in (ekey, bkey) or k in seen:
            continue  # start and end are visited for free
        seen.add(k)
        pts.append(p)
    if not pts:
        return Measure.exactly(B.distance(e, b))
    n = len(pts)
    d0 = [B.distance(e, p) for p in pts]
    dend = [B.distance(p, b) for p in pts]
    D = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            D[i][j] = D[j][i] = B.distance(pts[i], pts[j])

    if n <= config.travel_exact_max:
        return Measure.exactly(_path_tsp_exact(n, d0, D, dend))

    upper = _path_tsp_heuristic(n, d0, D, dend)
    lower = max(B.distance(e, b), max(d0[i] + dend[i] for i in range(n)))
    for i in range(n):
        for j in range(n):
            if i != j:
                detour = min(
                    d0[i] + D[i][j] + dend[j], d0[j] + D[j][i] + dend[i]
                )
                lower = max(lower, detour)
    return Measure(upper, False, lower)


def _path_tsp_exact(n, d0, D, dend) -> int:
    # dp[(mask, i)] = shortest start->i path visiting exactly `mask`
    dp = {(1 << i, i): d0[i] for i in range(n)}
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        for i in range(n):
            if not mask & (1 << i) or (mask, i) not in dp:
                continue
            base = dp[(mask, i)]
            for j in range(n):
                if mask & (1 << j):
                    continue
                nmask = mask | (1 << j)
                cand = base + D[i][j]
                if cand < dp.get((nmask, j), cand + 1):
                    dp[(nmask, j)] = cand
    return min(dp[(full, i)] + dend[i] for i in range(n))


def _path_tsp_heuristic(n, d0, D, dend) -> int:
    # greedy nearest-neighbour start, then 2-opt segment reversals with
    # O(1) delta evaluation (D is symmetric, so interior costs are unchanged)
    order = []
    left = set(range(n))
    cur = None
    while left:
        nxt = min(left, key=lambda j: (d0[j] if cur is None else D[cur][j], j))
        order.append(nxt)
        left.remove(nxt)
        cur = nxt

    improved = True
    passes = 0
    while improved and passes < 80:
        improved = False
        passes += 1
        for i in range(n - 1):
            for j in range(i + 1, n):
                before = d0[order[i]] if i == 0 else D[order[i - 1]][order[i]]
                after = dend[order[j]] if j == n - 1 else D[order[j]][order[j + 1]]
                nbefore = d0[order[j]] if i == 0 else D[order[i - 1]][order[j]]
                nafter = dend[order[i]] if j == n - 1 else D[order[i]][order[j + 1]]
                if nbefore + nafter < before + after:
                    order[i : j + 1] = order[i : j + 1][::-1]
                    improved = True
    total = d0[order[0]] + dend[order[-1]]
    for a, b2 in zip(order, order[1:]):
        total += D[a][b2]
    return total


def lamp_weight(u: WreathElement) -> int:
    """Sum of the lamp lengths |f(x)|_A over the support."""
    A = u.lamp
    e = A.identity
    return sum(A.distance(e, val) for _, (_, val) in u.f.items())


def w_length(u: WreathElement, config: RunConfig = DEFAULT) -> Measure:
    """Word length of (f, b): travel cost of the support plus lamp weight."""
    return travel_cost(u.base, u.support(), u.b, config) + lamp_weight(u)


# -- coset projections and conjugators ----------------------------------------


def _coset_j(B, b, order_n, point, t):
    """Exponent j with b^j t = point, or None if point is outside <b>t."""
    rel = B.multiply(point, B.invert(t))
    if order_n is None:
        return B.power_membership(rel, b)
    if order_n == 1:
        return 0 if B.key(rel) == B.key(B.identity) else None
    j = B.power_membership(rel, b)
    return None if j is None else j % order_n


def _ordered_product(A, entries) -> object:
    """Product of lamp values with the higher coset exponent on the left."""
    acc = A.identity
    for _, val in sorted(entries):  # ascending j; multiply new value on the left
        acc = A.multiply(val, acc)
    return acc


def pi_projection(u: WreathElement, t, z=None):
    """The ordered product of the lamp values of u along the coset <b>t,
    with the support shifted by z; the conjugacy invariant of the coset."""
    A, B = u.lamp, u.base
    z = B.identity if z is None else z
    order_n = B.order(u.b)
    entries = []
    for _, (pos, val) in u.f.items():
        j = _coset_j(B, u.b, order_n, B.multiply(z, pos), t)
        if j is not None:
            entries.append((j, val))
    return _ordered_product(A, entries)


def _coset_buckets(u: WreathElement, v: WreathElement, z):
    """Group both supports by the <b>-coset they (after shifting v's support
    by z) fall into.  Returns coset key -> (rep t, {j: f value}, {j: g value})."""
    B = u.base
    b = u.b
    order_n = B.order(b)
    buckets: dict = {}

    def bucket_for(point):
        ck = B.coset_key(b, point)
        if ck not in buckets:
            buckets[ck] = (point, {}, {})
        return buckets[ck]

    for k in sorted(u.f):
        pos, val = u.f[k]
        t, fmap, _ = bucket_for(pos)
        j = _coset_j(B, b, order_n, pos, t)
        if j is None:
            raise InvariantViolation("support point escaped its own coset")
        fmap[j] = val
    for k in sorted(v.f):
        pos, val = v.f[k]
        shifted = B.multiply(z, pos)
        t, _, gmap = bucket_for(shifted)
        j = _coset_j(B, b, order_n, shifted, t)
        if j is None:
            raise InvariantViolation("shifted support point escaped its coset")
        gmap[j] = val
    return buckets, order_n


def _lamp_conjugator(A, x, y, config: RunConfig):
    """Some alpha in A with x * alpha = alpha * y, or None.

    Abelian lamp groups need x == y and take alpha = identity; finite lamp
    groups are searched exhaustively.
    """
    if A.key(x) == A.key(y):
        return A.identity
    if A.is_abelian:
        return None
    if A.is_finite:
        for _, alpha in enumerate_finite(A):
            if A.key(A.multiply(x, alpha)) == A.key(A.multiply(alpha, y)):
                return alpha
        return None
    raise BeyondCapError("lamp conjugator search needs an abelian or finite lamp group")


def conjugator_for_z(
    u: WreathElement, v: WreathElement, z, config: RunConfig = DEFAULT
) -> Optional[WreathElement]:
    """The conjugator (h, z) with u (h,z) = (h,z) v for this base part, or
    None when no conjugator with base part z exists.

    h is assembled per coset from prefix products: writing F_k (resp. G_k)
    for the product of the f values (resp. shifted g values) at exponents
    <= k, higher exponent on the left, the infinite-order case takes
    h(b^k t) = F_k G_k^-1 and needs F = G at the top of every coset for h
    to have finite support; the finite-order-N case takes
    h(b^k t) = F_k alpha G_k^-1 for any alpha conjugating the full coset
    products.  The returned element is verified before being returned.
    """
    _check_groups(u, v)
    A, B = u.lamp, u.base
    if B.key(B.multiply(u.b, z)) != B.key(B.multiply(z, v.b)):
        return None
    if B.order(u.b) != B.order(v.b):
        return None

    buckets, order_n = _coset_buckets(u, v, z)
    pairs = []
    for ck in sorted(buckets):
        t, fmap, gmap = buckets[ck]
        if order_n is None:
            if A.key(_ordered_product(A, fmap.items())) != A.key(
                _ordered_product(A, gmap.items())
            ):
                return None
            js = set(fmap) | set(gmap)
            lo, hi = min(js), max(js)
            fcur = gcur = A.identity
            for k in range(lo, hi):
                if k in fmap:
                    fcur = A.multiply(fmap[k], fcur)
                if k in gmap:
                    gcur = A.multiply(gmap[k], gcur)
                val = A.multiply(fcur, A.invert(gcur))
                if A.key(val) != A.key(A.identity):
                    pairs.append((B.multiply(B.power(u.b, k), t), val))
        else:
            pf = _ordered_product(A, fmap.items())
            pg = _ordered_product(A, gmap.items())
            alpha = _lamp_conjugator(A, pf, pg, config)
            if alpha is None:
                return None
            fcur = gcur = A.identity
            for k in range(order_n):
                if k in fmap:
                    fcur = A.multiply(fmap[k], fcur)
                if k in gmap:
                    gcur = A.multiply(gmap[k], gcur)
                val = A.multiply(A.multiply(fcur, alpha), A.invert(gcur))
                if A.key(val) != A.key(A.identity):
                    pairs.append((B.multiply(B.power(u.b, k), t), val))

    witness = wreath_element(A, B, pairs, z)
    if w_multiply(u, witness) != w_multiply(witness, v):
        raise InvariantViolation("assembled conjugator failed verification")
    return witness


def is_inert(u: WreathElement) -> bool:
    """True when every coset projection of the lamp part is trivial, i.e.
    the element is conjugate to its own lamp-free form (1, b).

    The projections are computed with no shift; triviality does not depend
    on the shift, so this is a conjugacy invariant.
    """
    A, B = u.lamp, u.base
    order_n = B.order(u.b)
    buckets: dict = {}
    for k in sorted(u.f):
        pos, val = u.f[k]
        ck = B.coset_key(u.b, pos)
        t = buckets.setdefault(ck, (pos, []))[0]
        j = _coset_j(B, u.b, order_n, pos, t)
        buckets[ck][1].append((j, val))
    ekey = A.key(A.identity)
    return all(
        A.key(_ordered_product(A, entries)) == ekey for _, entries in buckets.values()
    )


@dataclass
class ConjugacyResult:
    conjugate: bool
    witness: Optional[WreathElement]
    complete: bool
    case: str

    def __bool__(self):
        return self.conjugate


def _base_conjugating_candidates(B, b, c, radius):
    """Yield z in ball(B, radius) with bz = zc, in canonical order."""
    ck = B.key(c)
    for _, layer in ball_layers(B, radius):
        for _, z in layer:
            if B.key(B.multiply(B.multiply(B.invert(z), b), z)) == ck:
                yield z


def conjugacy_test(
    u: WreathElement, v: WreathElement, config: RunConfig = DEFAULT
) -> ConjugacyResult:
    """Decide conjugacy of u and v in A wr B.

    The base-part scan radius 3(|u|+|v|) is complete for pairs that are not
    conjugate to a lamp-free element; pairs that are reduce to conjugacy of
    the base parts in B (exactly solvable for abelian or finite B, scanned
    with config.z_scan_slack otherwise).  The returned result records which
    case decided it and whether the decision is complete.
    """
    _check_groups(u, v)
    B = u.base
    if B.order(u.b) != B.order(v.b):
        return ConjugacyResult(False, None, True, "order-mismatch")

    inert_u, inert_v = is_inert(u), is_inert(v)
    if inert_u != inert_v:
        return ConjugacyResult(False, None, True, "projection-mismatch")

    if inert_u:
        # Both reduce to lamp-free forms; conjugacy is conjugacy of b and c in B.
        if B.is_abelian:
            if B.key(u.b) != B.key(v.b):
                return ConjugacyResult(False, None, True, "inert-base")
            witness = conjugator_for_z(u, v, B.identity, config)
            if witness is None:
                raise InvariantViolation("inert pair lost its identity conjugator")
            return ConjugacyResult(True, witness, True, "inert-base")
        if B.is_finite:
            for _, z in enumerate_finite(B):
                if B.key(B.multiply(u.b, z)) == B.key(B.multiply(z, v.b)):
                    witness = conjugator_for_z(u, v, z, config)
                    if witness is not None:
                        return ConjugacyResult(True, witness, True, "inert-base")
            return ConjugacyResult(False, None, True, "inert-base")
        # General base group: bounded scan with declared slack.
        n = (w_length(u, config) + w_length(v, config)).value
        radius = 3 * n + config.z_scan_slack
        for z in _base_conjugating_candidates(B, u.b, v.b, radius):
            witness = conjugator_for_z(u, v, z, config)
            if witness is not None:
                return ConjugacyResult(True, witness, True, "inert-base")
        return ConjugacyResult(False, None, False, "inert-base-scan-exhausted")

    nu, nv = w_length(u, config), w_length(v, config)
    n = nu.value + nv.value
    exact = nu.exact and nv.exact
    radius = 3 * n
    for _, layer in ball_layers(B, radius):
        for _, z in layer:
            if B.key(B.multiply(u.b, z)) != B.key(B.multiply(z, v.b)):
                continue
            witness = conjugator_for_z(u, v, z, config)
            if witness is not None:
                return ConjugacyResult(True, witness, True, "scan")
    return ConjugacyResult(False, None, exact, "scan-exhausted")


def minimal_conjugator(
    u: WreathElement,
    v: WreathElement,
    config: RunConfig = DEFAULT,
    z_radius: Optional[int] = None,
):
    """Scan every base part within the radius and return the shortest
    verified conjugator with its length, or None.

    The default radius is the completeness radius of conjugacy_test; pass a
    smaller one when the caller has its own completeness argument.
    """
    _check_groups(u, v)
    B = u.base
    if z_radius is None:
        z_radius = 3 * (w_length(u, config) + w_length(v, config)).value
    best = None
    for _, layer in ball_layers(B, z_radius):
        for _, z in layer:
            if B.key(B.multiply(u.b, z)) != B.key(B.multiply(z, v.b)):
                continue
            witness = conjugator_for_z(u, v, z, config)
            if witness is None:
                continue
            length = w_length(witness, config)
            if best is None or (length.value, witness.key()) < (
                best[1].value,
                best[0].key(),
            ):
                best = (witness, length)
    return best


def upper_bound_formula(n: int, P: int, delta=None, order=None, clf_a=None) -> int:
    """Closed-form conjugator-length bounds.

    Infinite base-part order: (n+1) * P * (2*delta(P) + 1), where delta is
    the distortion function of the cyclic subgroup generated by the base
    part (identity by default).  Finite order N: P * (N+1) *
    (2n + clf_a(n) + 1), where clf_a bounds conjugator length in the lamp
    group (zero by default).
    """
    if order is None:
        d = P if delta is None else delta(P)
        return (n + 1) * P * (2 * d + 1)
    c = 0 if clf_a is None else clf_a(n)
    return P * (order + 1) * (2 * n + c + 1)


# -- the wreath product as a group handle -------------------------------------


class WreathGroup(GroupHandle):
    """A wr B packaged as a handle, so the breadth-first oracle and the
    conjugacy machinery can treat it like any other group.

    ``distance`` is the exact metric formula; it raises BeyondCapError when
    the support outgrows the exact travel threshold.
    """

    kind = "wreath"

    def __init__(self, lamp: GroupHandle, base: GroupHandle, config: RunConfig = DEFAULT):
        self.lamp = lamp
        self.base = base
        self.config = config
        self.identity = identity_element(lamp, base)
        self.is_finite = lamp.is_finite and base.is_finite

    def generators(self):
        gens = []
        for label, t in self.lamp.generators():
            gens.append((f"a:{label}", lamp_generator(self.lamp, self.base, t)))
        for label, s in self.base.generators():
            gens.append((f"b:{label}", base_generator(self.lamp, self.base, s)))
        return gens

    def multiply(self, a, b):
        return w_multiply(a, b)

    def invert(self, a):
        return w_invert(a)

    def key(self, a):
        return a.key()

    def from_word(self, w):
        raise NotImplementedError("a wreath product is not a quotient of the free group on its lamps and base moves alone")

    def distance(self, a, b) -> int:
        m = w_length(w_multiply(w_invert(a), b), self.config)
        if not m.exact:
            raise BeyondCapError("wreath distance support exceeds the exact travel threshold")
        return m.value

    def order(self, a):
        nb = self.base.order(a.b)
        if nb is None:
            return None
        acc = w_power(a, nb)  # pure lamp part
        if acc.is_identity:
            return nb
        lamp_orders = set()
        for _, (_, val) in acc.f.items():
            o = self.lamp.order(val)
            if o is None:
                return None
            lamp_orders.add(o)
        out = nb
        for o in lamp_orders:
            out = lcm(out, o)
        return out

    def power_membership(self, x, b):
        if b.is_identity:
            raise ValueError("power query needs a nontrivial base")
        # Bounded two-sided scan; lengths grow at least linearly in the
        # exponent for the shipped lamp/base pairs.
        target = x.key()
        bound = w_length(x, self.config).value + 2
        for sign in (1, -1):
            step = b if sign > 0 else w_invert(b)
            acc = step
            for k in range(1, bound + 1):
                if acc.key() == target:
                    return sign * k
                acc = w_multiply(acc, step)
        return 0 if x.is_identity else None

    def coset_key(self, b, g):
        raise NotImplementedError("coset keys over wreath bases are not needed by the shipped machinery")

    def to_json(self, a):
        return element_to_json(a)

    def from_json(self, data):
        return element_from_json(data, self.lamp, self.base)

    def describe(self):
        return {
            "kind": "wreath",
            "lamp": self.lamp.describe(),
            "base": self.base.describe(),
        }


# -- JSON form ----------------------------------------------------------------


def element_to_json(u: WreathElement) -> dict:
    return {
        "f": [
            {"at": u.base.to_json(pos), "val": u.lamp.to_json(val)}
            for _, (pos, val) in sorted(u.f.items())
        ],
        "b": u.base.to_json(u.b),
    }


def element_from_json(data: dict, lamp: GroupHandle, base: GroupHandle) -> WreathElement:
    if not isinstance(data, dict) or "f" not in data or "b" not in data:
        raise ValueError('wreath element JSON needs "f" and "b" fields')
    pairs = [
        (base.from_json(cell["at"]), lamp.from_json(cell["val"])) for cell in data["f"]
    ]
    return wreath_element(lamp, base, pairs, base.from_json(data["b"]))
