import numpy as np
import pytest

from multitile import group as grp
from multitile import measure as ms


def planar(fields, n=1000, rule="midpoint", mass=1.0, **params):
    G = grp.make_subgroup(2, [[0, 1]], [[1, 0]])
    base = ms.build_base_measure({"kind": "lebesgue_segment", "start": [0, 0], "end": [1, 0],
                                  "nodes": n, "rule": rule, "mass": mass}, G)
    return ms.assemble_multitile(G, base, [ms.make_field(f, 2, **params) for f in fields])


def square(n=1000):
    return planar(["square_upper", "square_lower"], n)


def separated(n=1000, delta=0.5, rule="left"):
    return planar(["separated_upper", "separated_lower"], n, rule=rule, delta=delta)


def helix(n=4096):
    G = grp.make_subgroup(3, [[0, 1, 0], [0, 0, 1]], [[1, 0, 0]])
    base = ms.build_base_measure({"kind": "lebesgue_segment", "start": [0, 0, 0],
                                  "end": [1, 0, 0], "nodes": n}, G)
    return ms.assemble_multitile(G, base, [ms.make_field("zero", 3), ms.make_field("helix", 3)])


def cantor(shifts=(0, 1, 3), depth=4):
    G = grp.make_subgroup(1, [], [[1.0]])
    base = ms.build_base_measure({"kind": "cantor4", "depth": depth}, G)
    return ms.assemble_multitile(G, base, [ms.make_field("constant", 1, g=[s]) for s in shifts])


def cube(level=3, n=16):
    G = grp.make_subgroup(2, [], np.eye(2))
    base = ms.build_base_measure({"kind": "lebesgue_region", "lower": [0, 0],
                                  "upper": [1, 1], "nodes": n}, G)
    return ms.assemble_multitile(
        G, base, [ms.make_field("cube_piece", 2, shift=j) for j in range(level)])


@pytest.fixture(scope="session")
def square_m():
    return square()


@pytest.fixture(scope="session")
def separated_m():
    return separated()


@pytest.fixture(scope="session")
def helix_m():
    return helix()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
