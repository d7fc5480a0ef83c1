"""Smoke tests for the monoflow extension module (built by CMake)."""

import json

import numpy as np
import pytest

import monoflow as mf


def test_network_construction_and_parsing():
    net = mf.make_network("complete", 4, "unit")
    assert net.n == 4
    assert net.edge_count == 6
    assert not net.is_tree()
    assert net.is_biconnected()

    parsed = mf.PowerNetwork.parse_text(net.to_text())
    assert parsed.edges == net.edges

    jparsed = mf.PowerNetwork.parse_json(net.to_json())
    assert jparsed.edge_count == 6

    with pytest.raises(ValueError):
        mf.PowerNetwork.parse_text("n 3\n1 1 1.0\n")  # self-loop


def test_system_evaluation_and_trivial_layer():
    net = mf.make_network("cycle", 5, "uniform", seed=3)
    sys = mf.PowerFlowSystem(net)
    assert sys.dim == 8
    assert mf.trivial_solution_count(net) == 16

    b = net.susceptances().astype(complex)
    trivials = mf.enumerate_trivial_solutions(sys)
    assert len(trivials) == 16
    for sol in trivials:
        assert sol.is_trivial and sol.is_real
        assert np.max(np.abs(sys.evaluate(b, sol.z))) == 0.0


def test_jacobian_matches_finite_differences():
    net = mf.make_network("complete", 4, "uniform", seed=5)
    sys = mf.PowerFlowSystem(net)
    rng = np.random.default_rng(0)
    z = rng.normal(size=sys.dim) + 1j * rng.normal(size=sys.dim)
    b = rng.normal(size=net.edge_count) + 1j * rng.normal(size=net.edge_count)
    jac = sys.jacobian(b, z)
    h = 1e-6
    for j in range(sys.dim):
        zp, zm = z.copy(), z.copy()
        zp[j] += h
        zm[j] -= h
        col = (sys.evaluate(b, zp) - sys.evaluate(b, zm)) / (2 * h)
        assert np.max(np.abs(jac[:, j] - col)) < 1e-5


def test_symmetry_group_orders():
    assert mf.SymmetryGroup.for_network(mf.make_network("cycle", 5, "unit")).order == 2
    assert mf.SymmetryGroup.for_network(mf.make_network("cycle", 6, "unit")).order == 4
    bip = mf.detect_bipartition(mf.make_network("cycle", 6, "unit"))
    assert bip.present
    assert bip.side[0] == 0


def test_seeding_and_canonicalization():
    net = mf.make_network("cycle", 6, "uniform", seed=9)
    sys = mf.PowerFlowSystem(net)
    sp = mf.seed_nontrivial(sys, seed=4)
    res = np.max(np.abs(sys.evaluate(sp.b_seed, sp.z_seed)))
    assert res <= 1e-10
    A = mf.seed_incidence_matrix(net, sp.t_used)
    assert np.max(np.abs(A @ sp.b_seed)) <= 1e-12

    grp = mf.SymmetryGroup.for_network(net)
    rep, orbit = mf.canonicalize(sp.z_seed, grp)
    assert orbit == 4
    rep2, orbit2 = mf.canonicalize(grp.apply(1, sp.z_seed), grp)
    assert np.max(np.abs(rep - rep2)) < 1e-9


def test_monodromy_agrees_with_total_degree_on_k4():
    net = mf.make_network("complete", 4, "uniform", seed=17)
    sys = mf.PowerFlowSystem(net)
    b = net.susceptances()

    reg = mf.run_monodromy(sys, b, seed=7)
    td = mf.solve_total_degree(sys, b, seed=8)
    assert td.path_count == 64
    assert td.finite_paths + td.diverged_paths + td.failed_paths == 64

    trivials = mf.enumerate_trivial_solutions(sys)
    grp = mf.SymmetryGroup.for_network(net)
    cmp = mf.compare_with_monodromy(td, reg, trivials, grp)
    assert cmp.consistent
    assert len(td.endpoints) == len(trivials) + reg.total_nontrivial


def test_tree_networks_raise_for_monodromy():
    net = mf.make_network("path", 4, "unit")
    sys = mf.PowerFlowSystem(net)
    with pytest.raises(ValueError):
        mf.run_monodromy(sys, net.susceptances(), seed=1)


def test_solve_report_json_schema():
    net = mf.make_network("complete", 4, "uniform", seed=23)
    doc = json.loads(mf.solve_report_json(net, method="monodromy", seed=5))
    counts = doc["counts"]
    assert counts["total"] == counts["trivial"] + counts["nontrivial"]
    assert counts["trivial"] == 8
    orbit_sum = sum(int(k) * v for k, v in counts["orbit_size_histogram"].items())
    assert orbit_sum == counts["nontrivial"]
    assert doc["method"] == "monodromy"
    assert doc["diagnostics"]["wall_seconds"] == 0.0  # deterministic mode

    ok, _ = mf.verify_report_json(net, seed=5)
    assert ok
