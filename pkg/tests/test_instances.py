import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inttsp.instances import (Instance, TsplibError, edge_endpoints, edge_index, edge_weight,
                              from_points, gen_mesh, gen_random_euclidean, num_edges,
                              parse_tsplib, render_tsplib)


def coord_file(kind, pts):
    body = "\n".join(f"{i + 1} {x} {y}" for i, (x, y) in enumerate(pts))
    return (f"NAME: t\nTYPE: TSP\nDIMENSION: {len(pts)}\nEDGE_WEIGHT_TYPE: {kind}\n"
            f"NODE_COORD_SECTION\n{body}\nEOF\n")


def test_edge_index_bijection_exhaustive():
    for n in range(2, 101):
        seen = set()
        for v in range(n):
            for u in range(v):
                idx = edge_index(u, v)
                assert edge_index(v, u) == idx
                assert edge_endpoints(idx) == (u, v)
                seen.add(idx)
        assert seen == set(range(num_edges(n)))


def test_euc_2d_examples():
    inst = parse_tsplib(coord_file("EUC_2D", [(0, 0), (3, 4), (1, 1)]))
    assert edge_weight(inst, 0, 1) == 5
    # nint(sqrt(2)) = 1
    assert edge_weight(inst, 0, 2) == 1


def test_ceil_2d():
    inst = parse_tsplib(coord_file("CEIL_2D", [(0, 0), (1, 1), (3, 4)]))
    assert edge_weight(inst, 0, 1) == 2
    assert edge_weight(inst, 0, 2) == 5


def test_att_pseudo_euclidean():
    # r = sqrt((100 + 0) / 10) = 3.162..., nint = 3 < r -> 4
    inst = parse_tsplib(coord_file("ATT", [(0, 0), (10, 0), (0, 0)]))
    assert edge_weight(inst, 0, 1) == 4
    assert edge_weight(inst, 0, 2) == 0


def test_geo_identical_coordinates():
    # the TSPLIB GEO formula adds 1.0 before truncation, so coincident
    # cities come out at distance 1, not 0
    inst = parse_tsplib(coord_file("GEO", [(38.24, 20.42), (38.24, 20.42), (39.57, 26.15)]))
    assert edge_weight(inst, 0, 1) == 1


def test_geo_matches_hand_evaluation():
    a, b = (38.24, 20.42), (39.57, 26.15)

    def rad(x):
        deg = int(x)
        return 3.141592 * (deg + 5.0 * (x - deg) / 3.0) / 180.0

    q1 = math.cos(rad(a[1]) - rad(b[1]))
    q2 = math.cos(rad(a[0]) - rad(b[0]))
    q3 = math.cos(rad(a[0]) + rad(b[0]))
    want = int(6378.388 * math.acos(0.5 * ((1 + q1) * q2 - (1 - q1) * q3)) + 1.0)
    inst = parse_tsplib(coord_file("GEO", [a, b, (0, 0)]))
    assert edge_weight(inst, 0, 1) == want


MATRIX = [[0, 3, 5, 9], [3, 0, 4, 7], [5, 4, 0, 2], [9, 7, 2, 0]]


def explicit_file(fmt, cells):
    return (f"NAME: m\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
            f"EDGE_WEIGHT_FORMAT: {fmt}\nEDGE_WEIGHT_SECTION\n{' '.join(map(str, cells))}\nEOF\n")


@pytest.mark.parametrize("fmt,cells", [
    ("FULL_MATRIX", [MATRIX[i][j] for i in range(4) for j in range(4)]),
    ("UPPER_ROW", [MATRIX[i][j] for i in range(4) for j in range(i + 1, 4)]),
    ("LOWER_ROW", [MATRIX[i][j] for i in range(4) for j in range(i)]),
    ("UPPER_DIAG_ROW", [MATRIX[i][j] for i in range(4) for j in range(i, 4)]),
    ("LOWER_DIAG_ROW", [MATRIX[i][j] for i in range(4) for j in range(i + 1)]),
])
def test_explicit_formats(fmt, cells):
    inst = parse_tsplib(explicit_file(fmt, cells))
    assert (inst.matrix() == np.array(MATRIX)).all()


def test_unsupported_keyword_names_line():
    text = "NAME: x\nTYPE: TSP\nCAPACITY: 5\nDIMENSION: 3\n"
    with pytest.raises(TsplibError, match=r"line 3.*CAPACITY"):
        parse_tsplib(text)


@pytest.mark.parametrize("kind", ["EUC_3D", "MAN_2D", "XRAY1"])
def test_unsupported_weight_type(kind):
    with pytest.raises(TsplibError, match=kind):
        parse_tsplib(coord_file(kind, [(0, 0), (1, 1), (2, 2)]))


def test_dimension_mismatch():
    text = coord_file("EUC_2D", [(0, 0), (1, 1), (2, 2)]).replace("DIMENSION: 3", "DIMENSION: 4")
    with pytest.raises(TsplibError, match="DIMENSION"):
        parse_tsplib(text)
    with pytest.raises(TsplibError, match="needs 6 weights"):
        parse_tsplib(explicit_file("UPPER_ROW", [1, 2, 3]))


def test_random_scaling_examples():
    inst = from_points([(0, 0), (0.5, 0), (1, 1), (1, 1)])
    assert edge_weight(inst, 0, 1) == 8192
    assert edge_weight(inst, 0, 2) == round(16384 * math.sqrt(2)) == 23170
    assert edge_weight(inst, 2, 3) == 0


def test_half_rounds_away_from_zero():
    # 2^14 * 0.5 / 2^14 * ... pick a distance whose scaled value is exactly k + 0.5
    inst = from_points([(0, 0), (0.5 / 16384, 0), (2.5 / 16384, 0)])
    assert edge_weight(inst, 0, 1) == 1
    assert edge_weight(inst, 0, 2) == 3


def test_random_reproducible_and_distinct():
    a = gen_random_euclidean(30, 7)
    b = gen_random_euclidean(30, 7)
    c = gen_random_euclidean(30, 8)
    assert (a.weights == b.weights).all()
    assert not (a.weights == c.weights).all()
    assert a.coords.min() >= 0 and a.coords.max() < 1


def test_random_rejects_small_n():
    with pytest.raises(ValueError):
        gen_random_euclidean(2, 0)


def test_mesh():
    m = gen_mesh(4)
    assert m.n == 12
    assert edge_weight(m, 0, 1) == 16384
    assert edge_weight(m, 0, 4) == 16384
    for bad in (3, 5, 2):
        with pytest.raises(ValueError):
            gen_mesh(bad)


def test_edge_weight_errors():
    inst = gen_random_euclidean(5, 0)
    with pytest.raises(ValueError):
        edge_weight(inst, 2, 2)
    with pytest.raises(ValueError):
        edge_weight(inst, 0, 5)


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance(3, [1, 2])
    with pytest.raises(ValueError):
        Instance(3, [1, -2, 3])
    inst = Instance(3, [1, 2, 3])
    with pytest.raises(ValueError):
        inst.weights[0] = 5


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**63 - 1))
def test_symmetry_nonnegative_and_roundtrip(n, seed):
    inst = gen_random_euclidean(n, seed)
    d = inst.matrix()
    assert (d == d.T).all() and (d >= 0).all()
    for u in range(n):
        for v in range(u + 1, n):
            assert edge_weight(inst, u, v) == edge_weight(inst, v, u) == d[u, v]
    back = parse_tsplib(render_tsplib(inst))
    assert (back.weights == inst.weights).all()
    assert render_tsplib(back) == render_tsplib(inst)


def test_subinstance_relabels():
    inst = gen_random_euclidean(8, 3)
    sub = inst.subinstance([5, 2, 7])
    assert sub.n == 3
    assert edge_weight(sub, 0, 1) == edge_weight(inst, 5, 2)
    assert edge_weight(sub, 1, 2) == edge_weight(inst, 2, 7)
