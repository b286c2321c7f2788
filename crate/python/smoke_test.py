"""Smoke test for the pursuit_py extension.

Build and install the module first:

    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/pursuit_py-*.whl
    python python/smoke_test.py        # or: pytest python/smoke_test.py
"""

import math

import networkx as nx

import pursuit_py as pp


def test_construction_counts():
    a = pp.Arena.build(green=250)
    assert a.vertex_count == 19_752
    assert a.params() == {"green": 250, "spoke": 10, "chain": 16}
    adm = a.admissibility()
    assert adm["admissible"] and adm["threshold"] == 218
    assert pp.Arena.build().vertex_count == 64_752
    # every arc of the arena lies on the embedded planar surface
    g = nx.Graph()
    g.add_edges_from(a.arcs())
    assert nx.check_planarity(g)[0]


def test_roles():
    a = pp.Arena.build(green=250)
    assert a.role(0)["role"] == "center"
    assert pp.Arena.family("cycle:5").role(0) is None


def test_solver_cop_numbers():
    assert pp.cop_number(pp.Arena.family("path:5")) == 1
    assert pp.cop_number(pp.Arena.family("directed-cycle:6")) == 2
    r = pp.solve(pp.Arena.family("complete:4"), 1)
    assert r["cop_win"] and r["capture_time"] == 1
    assert not pp.solve(pp.Arena.family("directed-cycle:6"), 1)["cop_win"]


def test_separator_on_a_triangulation():
    a = pp.Arena.family("triangulation:2000:3")
    r = pp.separate(a)
    n = a.vertex_count
    assert r["ok"], r["problem"]
    assert sorted(r["a"] + r["b"] + r["c"]) == list(range(n))
    assert max(len(r["a"]), len(r["b"])) <= 2 * n / 3
    assert len(r["c"]) <= 4 * math.sqrt(n)


def test_matches():
    a = pp.Arena.build(green=250)
    s = pp.run_match(a, cops="greedy", k=3, max_rounds=2000, seed=1)
    assert s["outcome"]["result"] == "robber_survived"
    assert s["robber_report"]["violation_count"] == 0
    trap = pp.run_match(a, cops="trap", max_rounds=None)
    assert trap["outcome"]["result"] == "cops_win"
    full = pp.run_match(pp.Arena.family("path:4"), cops="solver", robber="solver", k=1, trace="full")
    assert full["summary"]["outcome"]["result"] == "cops_win"
    assert full["records"][0]["side"] == "cop_placement"


def test_lemma_checks():
    r = pp.verify_return()
    assert r["counterexamples"] == [] and r["max_moves"] <= 27
    e = pp.verify_center_escape(c=1)
    assert e["successes"] == e["cases"] > 0


def test_errors_raise():
    for bad in (lambda: pp.Arena.family("hexagon:3"), lambda: pp.Arena.build(chain=1),
                lambda: pp.run_match(pp.Arena.family("path:3"), cops="teleport")):
        try:
            bad()
        except pp.PursuitError:
            continue
        raise AssertionError("expected PursuitError")


if __name__ == "__main__":
    tests = [(k, f) for k, f in sorted(globals().items()) if k.startswith("test_")]
    for name, f in tests:
        f()
        print(f"{name}: pass")
    print(f"{len(tests)} passed")
