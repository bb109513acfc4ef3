import pytest

from magnuskit.errors import BeyondCapError
from magnuskit.groups import HeisenbergHandle, PermHandle, ZrHandle
from magnuskit.magnus import solvable_group
from magnuskit.clf import (
    CSV_HEADER,
    FamilySpec,
    central_family,
    central_family_min_conjugator,
    clf_scan,
    cyclic_distortion,
    distortion_scan,
    first_witness_scan,
    rows_to_csv,
    z2_min_conjugator,
    z2_triangle_family,
)
from magnuskit.wreath import w_length, w_multiply, wreath_element
from magnuskit.words import FreeWord

Z1 = ZrHandle(1)
Z2 = ZrHandle(2)


def test_distortion_undistorted_line():
    rows = distortion_scan(Z2, (1, 0), 5)
    assert [r.measured for r in rows] == [1, 2, 3, 4, 5]
    assert all(r.measured <= r.bound for r in rows)


def test_distortion_solvable_quick():
    S = solvable_group(2, 2)
    x = S.from_word(FreeWord(2, (1,)))
    for n in range(1, 4):
        assert cyclic_distortion(S, x, n) == n
    comm = S.from_word(FreeWord(2, (1, 2, -1, -2)))
    assert cyclic_distortion(S, comm, 6) == 1  # the square costs 4 per lap


def test_distortion_heisenberg_central():
    H = HeisenbergHandle(cap=12)
    delta8 = cyclic_distortion(H, (0, 0, 1), 8)
    assert delta8 >= 4  # the k=2 central power word has length 8
    # frozen BFS values: the ratio delta(n)/n climbs (0.5 -> 0.75), the
    # desk-scale footprint of quadratic central distortion
    assert delta8 == 4
    assert cyclic_distortion(H, (0, 0, 1), 12) == 9


def test_distortion_cap_guard():
    H = HeisenbergHandle(cap=6)
    with pytest.raises(BeyondCapError):
        cyclic_distortion(H, (0, 0, 1), 8)


def test_central_family_instance():
    spec = FamilySpec(Z1, Z2, (1, 0), (0, 1), "central")
    inst = central_family(spec, 2)
    assert inst.delta == 2
    assert len(inst.witness.f) == 2 * inst.delta
    assert w_multiply(inst.u, inst.witness) == w_multiply(inst.witness, inst.v)


def test_central_family_degenerate_n0():
    spec = FamilySpec(Z1, Z2, (1, 0), (0, 1), "central")
    inst = central_family(spec, 0)
    assert inst.delta == 0
    assert inst.u == inst.v
    assert not inst.witness.f


def test_central_family_rejects_bad_spec():
    with pytest.raises(ValueError):
        FamilySpec(Z1, Z2, (0, 0), (0, 1), "central").validate()  # x finite order
    with pytest.raises(ValueError):
        FamilySpec(Z1, Z2, (1, 0), (2, 0), "central").validate()  # y^2 inside <x>


def test_central_min_conjugator_small():
    spec = FamilySpec(Z1, Z2, (1, 0), (0, 1), "central")
    scan = central_family_min_conjugator(spec, 1, z_scan_radius=4)
    assert scan.min_length is not None
    assert scan.offfamily_clean
    assert scan.min_length.value >= 4


def test_central_family_heisenberg_small():
    H = HeisenbergHandle(cap=12)
    spec = FamilySpec(Z1, H, (0, 0, 1), (1, 0, 0), "central")
    inst = central_family(spec, 4)
    assert inst.delta == 1
    scan = central_family_min_conjugator(spec, 4, z_scan_radius=3)
    assert scan.min_length is not None and scan.offfamily_clean
    assert scan.min_length.value >= 4 * inst.delta


def test_z2_family_instance_and_support():
    spec = FamilySpec(Z1, Z2, (1, 0), (0, 1), "z2")
    inst = z2_triangle_family(spec, 1)
    # both shaded corners: (1,0) -> a and (-1,-1) -> a^-1
    assert inst.witness.lamp_at((1, 0)) == (1,)
    assert inst.witness.lamp_at((-1, -1)) == (-1,)
    assert len(inst.witness.f) == 2
    assert w_multiply(inst.u, inst.witness) == w_multiply(inst.witness, inst.v)


def test_z2_family_envelopes_hold():
    spec = FamilySpec(Z1, Z2, (1, 0), (0, 1), "z2")
    for n in (1, 2, 3):
        inst = z2_triangle_family(spec, n)
        assert inst.u_len.exact and 4 * n + 2 <= inst.u_len.value


def test_z2_min_conjugator_quadratic():
    spec = FamilySpec(Z1, Z2, (1, 0), (0, 1), "z2")
    for n in (1, 2):
        scan = z2_min_conjugator(spec, n, offfamily_radius=2)
        assert scan.min_length is not None
        assert scan.offfamily_clean
        assert scan.min_length.lower >= n * n + n


def test_first_witness_scan_trivial_pair():
    u = wreath_element(Z1, Z2, [], (0, 0))
    w = first_witness_scan(u, u)
    assert w is not None and w_length(w).value == 0


def test_clf_scan_rows_and_csv():
    rows = clf_scan(Z1, Z2, samples=25, n_max=8, seed=77)
    assert len(rows) == 25
    for row in rows:
        assert row.measured <= row.bound or not row.exact
        assert row.seed == 77
    csv = rows_to_csv(rows)
    lines = csv.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 26
    n, measured, bound, exact, wl, seed = lines[1].split(",")
    assert int(seed) == 77 and exact in ("0", "1")


def test_clf_scan_deterministic():
    a = rows_to_csv(clf_scan(Z1, Z2, samples=10, n_max=8, seed=5))
    b = rows_to_csv(clf_scan(Z1, Z2, samples=10, n_max=8, seed=5))
    assert a == b


def test_inert_pairs_reduce_to_base_conjugacy():
    # lamp-free pairs over a nonabelian base: the minimal wreath conjugator
    # is a minimal base conjugator
    S3 = PermHandle(3)
    rows = clf_scan(Z1, Z2, samples=5, n_max=6, seed=9)  # smoke the abelian path
    assert all(r.bound >= r.measured for r in rows if r.exact)
    swap = S3.generators()[0][1]
    cyc = S3.generators()[1][1]
    other = S3.multiply(S3.multiply(cyc, swap), S3.invert(cyc))
    u = wreath_element(Z1, S3, [], swap)
    v = wreath_element(Z1, S3, [], other)
    w = first_witness_scan(u, v, z_radius=6)
    assert w is not None and not w.f
