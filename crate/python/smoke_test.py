"""Smoke test for the dlad extension module.

Build and place the module next to this script first:

    cargo build --release -p dlad-py --features extension-module
    cp target/release/libdlad.so python/dlad.so
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import dlad  # noqa: E402


def main():
    g = dlad.Group(4, 5)
    assert (g.rank, g.p) == (4, 5)
    assert len(g.center()) == 4

    classes = g.classes(2)
    assert len(classes) == 3

    c = g.centralizer("0,1/4,1/2,3/4")
    assert c["semidirect"]["a_order"] == 4
    assert c["semidirect"]["verdict"] == "pass" and c["fiber"]["verdict"] == "pass"

    table = g.rational("0,1/4,1/2,3/4", 5)
    assert len(table["entries"]) == 4

    assert g.theorem_b("0,1/4,1/2,3/4", 5)["verdict"] == "pass"

    found = g.scenario(5)
    assert found and all(f["report"]["verdict"] == "pass" for f in found)

    try:
        g.cor32("0,0,0,1/2", 5)
    except dlad.HypothesisError:
        pass
    else:
        raise AssertionError("expected HypothesisError")

    try:
        g.classes(10)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    assert dlad.prop21(4, 3)["w_order"] == 192
    assert dlad.graph_auto(4, 3)["verdict"] == "pass"
    print("ok", len(found), "scenario classes")


if __name__ == "__main__":
    main()
