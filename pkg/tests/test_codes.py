import numpy as np
import pytest

from sblp import codes
from sblp.codes import AlistError, CssCode, CssError
from sblp.gf2 import BinaryMatrix


def test_tanner_graph_edges_and_degrees():
    H = BinaryMatrix([[1, 1, 0], [0, 1, 1]])
    g = codes.build_tanner(H)
    assert g.edges == [(0, 0), (0, 1), (1, 1), (1, 2)]
    assert g.var_degrees.tolist() == [1, 2, 1]
    assert g.check_degrees.tolist() == [2, 2]
    assert g.dv_max == 2 and g.dc_max == 2
    assert [list(x) for x in g.vn_neighbors] == [[0], [0, 1], [1]]
    assert g.to_matrix() == H


def test_tanner_graph_csr_consistent():
    g = codes.b1().x_graph
    assert g.num_edges == 2646
    assert np.array_equal(g.var_edges[g.var_slot], np.arange(g.num_edges))
    for j in (0, 100, 881):
        edges = g.var_edges[g.var_ptr[j]:g.var_ptr[j + 1]]
        assert (g.edge_var[edges] == j).all()
        assert (np.diff(g.edge_check[edges]) > 0).all()


def test_isolated_nodes_warn():
    with pytest.warns(UserWarning):
        codes.build_tanner(BinaryMatrix([[1, 0], [0, 0]]))


def test_hgp_of_repetition_rings():
    code = codes.hypergraph_product(codes.repetition_ring(3), codes.repetition_ring(3))
    assert (code.n, code.k) == (18, 2)
    assert codes.css_check(code)


def test_gb_identity_circulants():
    code = codes.generalized_bicycle([0], [0], 3)
    assert code.n == 6
    assert codes.css_check(code.hx, code.hz)


def test_circulant_validation():
    with pytest.raises(ValueError):
        codes.circulant([0, 0], 4)
    with pytest.raises(ValueError):
        codes.circulant([5], 4)


def test_builtin_parameters():
    assert (codes.steane().n, codes.steane().k) == (7, 1)
    hgp = codes.hgp400()
    assert (hgp.n, hgp.k) == (400, 16)
    b1 = codes.b1()
    assert (b1.n, b1.k) == (882, 24)
    assert set(b1.hz.dense.sum(axis=0)) == {3}
    assert set(b1.hz.dense.sum(axis=1)) == {6}


def test_css_violation_names_rows():
    hx = codes.HAMMING_7
    hz = BinaryMatrix(np.eye(3, 7, dtype=np.uint8))
    assert codes.first_commutation_violation(hx, hz) == (0, 0)
    with pytest.raises(CssError, match="H_X row 0 and H_Z row 0"):
        CssCode("bad", hx, hz)
    assert not codes.css_check(hx, hz)


def test_to_alist_identity():
    assert codes.to_alist(BinaryMatrix.identity(2)) == "2 2\n1 1\n1 1\n1 1\n1\n2\n1\n2\n"


@pytest.mark.parametrize("H", [codes.HAMMING_7, codes.repetition(5), codes.b1().hx])
def test_alist_round_trip(H):
    assert codes.from_alist(codes.to_alist(H)) == H


def test_alist_zero_weight_column_round_trip():
    H = BinaryMatrix([[1, 0, 0], [1, 0, 1]])
    assert codes.from_alist(codes.to_alist(H)) == H


@pytest.mark.parametrize(
    "text, line",
    [
        ("2 2\n1 1\n1 1\n1 1\n1\n2\n1\n", 8),  # truncated
        ("2 2\n1 1\n1 1\n1 1\n1\nx\n1\n2\n", 6),  # bad token
        ("2 2\n1 1\n1 1\n1 1\n1\n3\n1\n2\n", 6),  # index out of range
        ("2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n", 7),  # row lists disagree
    ],
)
def test_alist_errors_report_line(text, line):
    with pytest.raises(AlistError) as info:
        codes.from_alist(text)
    assert info.value.line == line


def test_manifest_round_trip(tmp_path):
    code = codes.hypergraph_product(codes.repetition_ring(3), codes.repetition_ring(3), name="toric")
    path = codes.save_manifest(code, tmp_path)
    loaded = codes.load_manifest(path)
    assert loaded.hx == code.hx and loaded.hz == code.hz and loaded.k == 2
    assert codes.load_code(str(path)).n == 18


def test_manifest_from_constructor(tmp_path):
    path = tmp_path / "gb.json"
    path.write_text('{"name": "gb", "n": 6, "constructor": {"kind": "gb", "a": [0], "b": [0], "ell": 3}}')
    assert codes.load_manifest(path).n == 6


def test_load_code_unknown():
    with pytest.raises(FileNotFoundError):
        codes.load_code("no-such-code")


def test_lifted_product_always_commutes():
    code = codes.lifted_product([[[0, 1], [2]], [[3], []]], [0, 2], 5)
    assert codes.css_check(code)
    assert code.n == 20
