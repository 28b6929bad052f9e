import math

import pytest

import treematch as tm


def six_point(eps=1.0):
    d = [[0.0] * 6 for _ in range(6)]
    for i in range(4):
        for j in range(4):
            if i != j:
                d[i][j] = 2.0
    for i in range(4):
        for h in (4, 5):
            d[i][h] = d[h][i] = 1.0
    d[4][5] = d[5][4] = eps
    return d


def square():
    return tm.from_points([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])


def test_validate_rejects_bad_input():
    with pytest.raises(tm.Error, match="TriangleViolation"):
        tm.validate([[0.0, 5.0, 1.0], [5.0, 0.0, 1.0], [1.0, 1.0, 0.0]])


def test_min_matching_six_point():
    r = tm.min_matching(six_point())
    assert r["value"] == pytest.approx(4.0, abs=1e-9)
    assert sorted(i for p in r["pairs"] for i in p) == list(range(6))


def test_dual_zeroes_the_hub_pair():
    r = tm.minimize_dual(six_point())
    assert r["m"] == pytest.approx(4.0, abs=1e-6)
    assert r["tree_like"]
    assert abs(r["D"][4][5]) < 1e-6
    audit = tm.exact_check_dual(six_point(), r["D"])
    assert audit["dominated"] and audit["triangle_ok"]
    assert audit["matching_gap"] < 1e-6


def test_certificate_square():
    c = tm.build_certificate(square())
    assert c["all_ok"]
    assert c["H1"] == pytest.approx(4.0, abs=1e-6)
    assert c["value"] == pytest.approx(c["m"], abs=1e-9)
    t = tm.realize_tree(c["D"])
    assert sum(e[2] for e in t["edges"]) == pytest.approx(4.0, abs=1e-6)


def test_oriented_potential_is_lipschitz():
    d = six_point()
    r = tm.oriented_min_connection(d, [0, 1, 4], [2, 3, 5])
    assert r["value"] == pytest.approx(4.0, abs=1e-9)
    f = r["potential"]
    for i in range(6):
        for j in range(6):
            assert f[i] - f[j] <= d[i][j] + 1e-9


def test_fill_on_a_path():
    vertices = [0, 1, 2, 3]
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]
    r = tm.fill_z2(vertices, edges, [0, 3])
    assert r["mass"] == pytest.approx(3.0, abs=1e-9)
    assert r["mass"] == pytest.approx(r["matching_value"], abs=1e-9)
    assert tm.lev_z2(vertices, edges, [0, 3], [0.0, 1.0, 2.0, 3.0]) == pytest.approx(
        3.0, abs=1e-9
    )
    assert tm.lev_z(
        vertices, edges, [0, 3], [0.0, 1.0, 2.0, 3.0], [0], [3]
    ) == pytest.approx(3.0, abs=1e-9)


def test_m_k_and_m_eps_on_the_square():
    d = square()
    assert tm.m_k(d, 2)["value"] == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-9)
    assert tm.m_k(d, 4)["value"] == pytest.approx(4.0, abs=1e-9)
    assert tm.m_eps(d, 2.5)["value"] == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-9)
    assert tm.m_eps(d, 3.0)["value"] == 0.0
    with pytest.raises(tm.Error, match="OddK"):
        tm.m_k(d, 3)


def test_comb_profile_and_fit():
    c = tm.comb_tree(2.0, 16)
    rows = []
    for k in range(1, 17):
        sub = [r[: 2 * k] for r in c["tips"][: 2 * k]]
        value = tm.min_matching(sub)["value"]
        assert value == pytest.approx(math.sqrt(k), abs=1e-9)
        rows.append((float(k), value))
    fit = tm.fit_dimension(rows)
    assert fit["dim"] == pytest.approx(2.0, abs=1e-6)
    assert fit["monotone"]


def test_cube_rows_are_seeded_and_deterministic():
    a = tm.cube_experiment(2, [8, 16], trials=2, seed=9)
    b = tm.cube_experiment(2, [8, 16], trials=2, seed=9)
    assert a == b
    modes = {r["mode"] for r in a}
    assert modes == {"fps", "grid"}
    assert all(r["value"] > 0.0 for r in a)
