import itertools
import random

import pytest

from magnuskit.errors import BeyondCapError
from magnuskit.groups import (
    FreeHandle,
    HeisenbergHandle,
    PermHandle,
    ZNHandle,
    ZrHandle,
    ball,
    edge_traversal_counts,
    enumerate_finite,
    handle_from_descriptor,
)
from magnuskit.words import FreeWord

HANDLES = [
    ZrHandle(2),
    ZNHandle(6),
    PermHandle(3),
    HeisenbergHandle(cap=6),
    FreeHandle(2),
]


def _random_element(handle, rng, steps=6):
    gens = [g for _, g in handle.gen_steps()]
    acc = handle.identity
    for _ in range(rng.randint(0, steps)):
        acc = handle.multiply(acc, rng.choice(gens))
    return acc


@pytest.mark.parametrize("handle", HANDLES, ids=lambda h: h.kind)
def test_group_laws(handle):
    rng = random.Random(5)
    e = handle.identity
    for _ in range(100):
        a, b, c = (_random_element(handle, rng) for _ in range(3))
        assert handle.key(handle.multiply(handle.multiply(a, b), c)) == handle.key(
            handle.multiply(a, handle.multiply(b, c))
        )
        assert handle.key(handle.multiply(a, handle.invert(a))) == handle.key(e)
        assert handle.key(handle.multiply(a, e)) == handle.key(a)


@pytest.mark.parametrize("handle", HANDLES, ids=lambda h: h.kind)
def test_metric_axioms_random(handle):
    rng = random.Random(6)
    for _ in range(60):
        a, b, c = (_random_element(handle, rng, steps=2) for _ in range(3))
        try:
            dab = handle.distance(a, b)
            dbc = handle.distance(b, c)
            dac = handle.distance(a, c)
            k = _random_element(handle, rng, steps=2)
            left = handle.distance(handle.multiply(k, a), handle.multiply(k, b))
        except BeyondCapError:
            continue
        assert dac <= dab + dbc
        assert left == dab  # left invariance
        assert (dab == 0) == (handle.key(a) == handle.key(b))


@pytest.mark.parametrize("handle", HANDLES, ids=lambda h: h.kind)
def test_generators_have_length_one(handle):
    e = handle.identity
    for _, g in handle.generators():
        assert handle.distance(e, g) == 1
        assert handle.distance(e, handle.invert(g)) == 1


def test_zr_distance_examples():
    Z2 = ZrHandle(2)
    assert Z2.distance((0, 0), (3, -2)) == 5
    assert Z2.distance(Z2.identity, Z2.identity) == 0


def test_zn_distance_and_order():
    Z6 = ZNHandle(6)
    assert Z6.distance(0, 4) == 2
    assert Z6.order(2) == 3
    assert Z6.order(0) == 1
    assert Z6.order(1) == 6


def test_heisenberg_commutator_distance():
    H = HeisenbergHandle(cap=6)
    z = H.from_word(FreeWord(2, (1, 2, -1, -2)))
    assert z == (0, 0, 1)
    assert H.distance(H.identity, z) == 4


def test_heisenberg_central_power_words():
    # [x1^k, x2^k] lands on the k^2-th central power, so |z^(k^2)| <= 4k.
    H = HeisenbergHandle(cap=14)
    for k in (1, 2, 3):
        w = FreeWord(2, (1,) * k + (2,) * k + (-1,) * k + (-2,) * k)
        assert H.from_word(w) == (0, 0, k * k)
        assert H.norm((0, 0, k * k)) <= 4 * k


def test_ball_counts():
    assert len(ball(ZrHandle(2), 1)) == 5
    assert len(ball(FreeHandle(2), 2)) == 17
    assert len(ball(ZNHandle(6), 3)) == 6  # whole group


def test_ball_cap_enforced():
    with pytest.raises(BeyondCapError):
        ball(HeisenbergHandle(cap=3), 4)


def test_heisenberg_ball_against_word_enumeration():
    # Independent oracle: multiply out every word of length <= 3 directly.
    H = HeisenbergHandle(cap=3)
    seen = set()
    gens = [g for _, g in H.gen_steps()]
    for n in range(0, 4):
        for combo in itertools.product(gens, repeat=n):
            acc = H.identity
            for s in combo:
                acc = H.multiply(acc, s)
            seen.add(acc)
    assert seen == set(ball(H, 3))


def test_order_infinite_cases():
    assert ZrHandle(2).order((0, 0)) == 1
    assert ZrHandle(2).order((2, 1)) is None
    H = HeisenbergHandle()
    assert H.order((0, 0, 5)) is None
    assert FreeHandle(2).order(FreeWord(2, (1,))) is None


def test_perm_handle():
    S3 = PermHandle(3)
    assert len(enumerate_finite(S3)) == 6
    swap = S3.generators()[0][1]
    cyc = S3.generators()[1][1]
    assert S3.order(swap) == 2
    assert S3.order(cyc) == 3
    assert S3.power_membership(S3.multiply(cyc, cyc), cyc) == 2
    assert S3.power_membership(swap, cyc) is None


def test_power_membership_zr():
    Z2 = ZrHandle(2)
    assert Z2.power_membership((4, 2), (2, 1)) == 2
    assert Z2.power_membership((1, 0), (0, 1)) is None
    assert Z2.power_membership((-6, 3), (2, -1)) == -3
    with pytest.raises(ValueError):
        Z2.power_membership((1, 1), (0, 0))


def test_power_membership_heisenberg_against_brute_force():
    H = HeisenbergHandle()
    rng = random.Random(9)
    for _ in range(200):
        b = _random_element(H, rng, steps=4)
        if b == H.identity:
            continue
        k = rng.randint(-6, 6)
        x = H.power(b, k)
        got = H.power_membership(x, b)
        assert got is not None and H.power(b, got) == x
    # negative case
    assert H.power_membership((1, 0, 0), (0, 1, 0)) is None


def test_power_membership_free():
    F = FreeHandle(2)
    b = FreeWord(2, (1, 2))
    assert F.power_membership(b.power(3), b) == 3
    assert F.power_membership(b.power(-2), b) == -2
    assert F.power_membership(FreeWord(2, (1,)), b) is None
    # conjugated base: b = w a w^-1
    c = FreeWord(2, (2, 1, -2))
    assert F.power_membership(c.power(4), c) == 4


def test_coset_keys_z():
    Z = ZrHandle(1)
    b = (2,)
    assert Z.coset_key(b, (5,)) == Z.coset_key(b, (7,))
    assert Z.coset_key(b, (5,)) != Z.coset_key(b, (4,))


def test_coset_keys_z2():
    Z2 = ZrHandle(2)
    b = (1, 0)
    rng = random.Random(3)
    for _ in range(100):
        g = (rng.randint(-5, 5), rng.randint(-5, 5))
        h = (rng.randint(-5, 5), rng.randint(-5, 5))
        assert (Z2.coset_key(b, g) == Z2.coset_key(b, h)) == (g[1] == h[1])


def test_coset_keys_zn():
    Z6 = ZNHandle(6)
    keys = {Z6.coset_key(2, g) for g in range(6)}
    assert len(keys) == 2  # <2> has index 2 in Z/6


def test_coset_keys_identity_base():
    Z2 = ZrHandle(2)
    assert Z2.coset_key((0, 0), (3, 4)) == Z2.key((3, 4))


def test_coset_key_constant_on_cosets():
    for handle, b in [
        (HeisenbergHandle(), (1, 0, 0)),
        (HeisenbergHandle(), (0, 0, 1)),
        (FreeHandle(2), FreeWord(2, (1, 2))),
    ]:
        rng = random.Random(4)
        for _ in range(50):
            g = _random_element(handle, rng, steps=3)
            k = rng.randint(-4, 4)
            shifted = handle.multiply(handle.power(b, k), g)
            assert handle.coset_key(b, g) == handle.coset_key(b, shifted)


def test_edge_walker_simple_paths():
    Z2 = ZrHandle(2)
    counts, _, end = edge_traversal_counts(Z2, FreeWord(2, (1,)))
    assert counts == {((0, 0), 1): 1}
    assert end == (1, 0)
    counts, _, end = edge_traversal_counts(Z2, FreeWord(2, (1, -1)))
    assert counts == {} and end == (0, 0)
    counts, _, end = edge_traversal_counts(Z2, FreeWord(2, (-1,)))
    assert counts == {((-1, 0), 1): -1} and end == (-1, 0)


def test_descriptor_round_trip():
    for desc in (
        {"kind": "Zr", "r": 2},
        {"kind": "ZN", "N": 6},
        {"kind": "heisenberg"},
        {"kind": "perm", "degree": 3},
        {"kind": "free", "rank": 2},
        {"kind": "free_solvable", "r": 2, "d": 2},
    ):
        h = handle_from_descriptor(desc)
        out = h.describe()
        assert handle_from_descriptor(out) == h


def test_free_solvable_d1_normalises_to_zr():
    h = handle_from_descriptor({"kind": "free_solvable", "r": 2, "d": 1})
    assert h.describe() == {"kind": "Zr", "r": 2}


def test_element_json_round_trip():
    rng = random.Random(12)
    for handle in HANDLES:
        for _ in range(20):
            g = _random_element(handle, rng, steps=4)
            assert handle.key(handle.from_json(handle.to_json(g))) == handle.key(g)
