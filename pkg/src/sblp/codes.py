"""Code model: Tanner graphs, CSS codes, constructors and file formats."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from . import gf2
from .gf2 import BinaryMatrix


class AlistError(ValueError):
    """Malformed alist text. ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CssError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Tanner graph


class TannerGraph:
    """Bipartite check/variable graph of a parity-check matrix.

    Edges are numbered lexicographically by (check, variable); every per-edge
    decoder buffer is a flat array in that order.
    """

    def __init__(self, H: BinaryMatrix) -> None:
        if H.m == 0 or H.n == 0:
            raise ValueError("parity-check matrix must be nonempty")
        self.H = H
        self.m, self.n = H.shape
        checks, variables = np.nonzero(H.dense)  # row-major: already lexicographic
        self.edge_check = checks.astype(np.int64)
        self.edge_var = variables.astype(np.int64)
        E = self.num_edges = len(checks)

        self.cn_neighbors = tuple(H.rows)
        self.cn_edges = tuple(np.flatnonzero(self.edge_check == i) for i in range(self.m))
        order = np.lexsort((self.edge_check, self.edge_var))
        vn_edges = [[] for _ in range(self.n)]
        for e in order:
            vn_edges[self.edge_var[e]].append(int(e))
        self.vn_edges = tuple(np.asarray(x, dtype=np.int64) for x in vn_edges)
        self.vn_neighbors = tuple(self.edge_check[x] for x in self.vn_edges)

        self.check_degrees = np.array([len(x) for x in self.cn_edges], dtype=np.int64)
        self.var_degrees = np.array([len(x) for x in self.vn_edges], dtype=np.int64)
        self.dc_max = int(self.check_degrees.max())
        self.dv_max = int(self.var_degrees.max())

        empty_rows = np.flatnonzero(self.check_degrees == 0)
        empty_cols = np.flatnonzero(self.var_degrees == 0)
        if len(empty_rows) or len(empty_cols):
            warnings.warn(
                f"Tanner graph has {len(empty_rows)} isolated check node(s) and "
                f"{len(empty_cols)} isolated variable node(s); they are inert in decoding",
                stacklevel=2,
            )

        # CSR views consumed by the compiled decoder kernels
        self.check_ptr = np.concatenate(([0], np.cumsum(self.check_degrees))).astype(np.int64)
        self.var_ptr = np.concatenate(([0], np.cumsum(self.var_degrees))).astype(np.int64)
        self.var_edges = np.concatenate(self.vn_edges).astype(np.int64) if E else np.zeros(0, np.int64)
        self.var_slot = np.empty(E, dtype=np.int64)
        self.var_slot[self.var_edges] = np.arange(E)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.edge_check.tolist(), self.edge_var.tolist()))

    def to_matrix(self) -> BinaryMatrix:
        dense = np.zeros((self.m, self.n), dtype=np.uint8)
        dense[self.edge_check, self.edge_var] = 1
        return BinaryMatrix(dense)

    def __repr__(self) -> str:
        return (
            f"TannerGraph(m={self.m}, n={self.n}, edges={self.num_edges}, "
            f"dc_max={self.dc_max}, dv_max={self.dv_max})"
        )


def build_tanner(H: BinaryMatrix) -> TannerGraph:
    return TannerGraph(H)


# ---------------------------------------------------------------------------
# CSS codes


@dataclass(frozen=True)
class CssCode:
    """CSS code from a commuting pair (H_X, H_Z).

    X errors are detected by H_Z and Z errors by H_X. Construction fails if
    the pair does not commute.
    """

    name: str
    hx: BinaryMatrix
    hz: BinaryMatrix
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.hx.n != self.hz.n:
            raise CssError(f"H_X has {self.hx.n} columns but H_Z has {self.hz.n}")
        bad = first_commutation_violation(self.hx, self.hz)
        if bad is not None:
            raise CssError(
                f"{self.name}: H_X row {bad[0]} and H_Z row {bad[1]} overlap on an odd "
                "number of qubits (H_X H_Z^T != 0)"
            )

    @property
    def n(self) -> int:
        return self.hx.n

    @cached_property
    def k(self) -> int:
        return self.n - gf2.rank(self.hx) - gf2.rank(self.hz)

    @cached_property
    def x_graph(self) -> TannerGraph:
        """Tanner graph used to decode X errors (built from H_Z)."""
        return TannerGraph(self.hz)

    @cached_property
    def z_graph(self) -> TannerGraph:
        return TannerGraph(self.hx)

    def __repr__(self) -> str:
        return f"CssCode({self.name!r}, n={self.n}, k={self.k})"


def first_commutation_violation(hx: BinaryMatrix, hz: BinaryMatrix) -> tuple[int, int] | None:
    prod = (hx.dense.astype(np.int64) @ hz.dense.T.astype(np.int64)) & 1
    hits = np.argwhere(prod)
    if len(hits) == 0:
        return None
    return int(hits[0][0]), int(hits[0][1])


def css_check(code_or_hx, hz: BinaryMatrix | None = None) -> bool:
    """True iff H_X H_Z^T = 0 over GF(2).

    Accepts either a :class:`CssCode` or a raw (H_X, H_Z) pair, since a
    non-commuting pair cannot be wrapped in a CssCode in the first place.
    """
    if isinstance(code_or_hx, CssCode):
        hx, hz = code_or_hx.hx, code_or_hx.hz
    else:
        hx = code_or_hx
    return first_commutation_violation(hx, hz) is None


def hypergraph_product(h1: BinaryMatrix, h2: BinaryMatrix, name: str | None = None) -> CssCode:
    """Hypergraph product of two classical parity-check matrices.

    H_X = [H1 (x) I_n2 | I_m1 (x) H2^T],  H_Z = [I_n1 (x) H2 | H1^T (x) I_m2].
    """
    m1, n1 = h1.shape
    m2, n2 = h2.shape
    if not (m1 and n1 and m2 and n2):
        raise ValueError("hypergraph product factors must be nonempty")
    hx = gf2.hstack(gf2.kron(h1, BinaryMatrix.identity(n2)), gf2.kron(BinaryMatrix.identity(m1), h2.T))
    hz = gf2.hstack(gf2.kron(BinaryMatrix.identity(n1), h2), gf2.kron(h1.T, BinaryMatrix.identity(m2)))
    return CssCode(name or f"hgp-{n1 * n2 + m1 * m2}", hx, hz, {"kind": "hgp"})


def circulant(coeffs, ell: int) -> BinaryMatrix:
    """ell x ell circulant with ones at (r, (r + c) mod ell) for c in coeffs."""
    coeffs = list(coeffs)
    if len(set(coeffs)) != len(coeffs):
        raise ValueError(f"duplicate circulant coefficients: {coeffs}")
    if any(not 0 <= c < ell for c in coeffs):
        raise ValueError(f"circulant coefficients must lie in [0, {ell})")
    dense = np.zeros((ell, ell), dtype=np.uint8)
    rows = np.arange(ell)
    for c in coeffs:
        dense[rows, (rows + c) % ell] = 1
    return BinaryMatrix(dense)


def generalized_bicycle(a_coeffs, b_coeffs, ell: int, name: str | None = None) -> CssCode:
    """Generalized bicycle code: H_X = [A | B], H_Z = [B^T | A^T]."""
    A = circulant(a_coeffs, ell)
    B = circulant(b_coeffs, ell)
    hx = gf2.hstack(A, B)
    hz = gf2.hstack(B.T, A.T)
    params = {"kind": "gb", "a": sorted(a_coeffs), "b": sorted(b_coeffs), "ell": ell}
    return CssCode(name or f"gb-{2 * ell}", hx, hz, params)


def lifted_product(a_exps, b_exps, ell: int, name: str | None = None) -> CssCode:
    """Quasi-cyclic lifted product of a polynomial matrix A and a polynomial b.

    ``a_exps[i][j]`` lists the exponents of the (i, j) entry of A (empty for
    zero) and ``b_exps`` those of b, all modulo x^ell - 1. With B = I (x) C(b),
    H_X = [A | B_m] and H_Z = [B_n^T | A^T]; circulants commute, so the pair
    is always CSS.
    """
    m = len(a_exps)
    n = len(a_exps[0]) if m else 0
    if not m or any(len(row) != n for row in a_exps):
        raise ValueError("lifted product base matrix must be a nonempty rectangle")
    blocks = np.zeros((m * ell, n * ell), dtype=np.uint8)
    for i, row in enumerate(a_exps):
        for j, exps in enumerate(row):
            blocks[i * ell:(i + 1) * ell, j * ell:(j + 1) * ell] = circulant(exps, ell).dense
    A = BinaryMatrix(blocks)
    cb = circulant(b_exps, ell)
    hx = gf2.hstack(A, gf2.kron(BinaryMatrix.identity(m), cb))
    hz = gf2.hstack(gf2.kron(BinaryMatrix.identity(n), cb.T), A.T)
    params = {"kind": "lp", "a": [[sorted(e) for e in row] for row in a_exps], "b": sorted(b_exps), "ell": ell}
    return CssCode(name or f"lp-{(m + n) * ell}", hx, hz, params)


# [[882, 24]] lifted product code, l = 63: A is the 7 x 7 block circulant whose
# first row is (x^27, 0, 0, 0, 0, 1, x^54), b = 1 + x + x^6.
_B1_FIRST_ROW = ((27,), (), (), (), (), (0,), (54,))


def b1() -> CssCode:
    """[[882, 24]] quasi-cyclic lifted product code with (3, 6)-regular checks."""
    a = [[_B1_FIRST_ROW[(j - i) % 7] for j in range(7)] for i in range(7)]
    code = lifted_product(a, (0, 1, 6), 63, name="b1")
    return CssCode("b1", code.hx, code.hz, {"kind": "b1"})


def repetition_ring(n: int) -> BinaryMatrix:
    """Cyclic repetition code check matrix (n x n, rows i, i+1 mod n)."""
    return circulant([0, 1], n)


def repetition(n: int) -> BinaryMatrix:
    dense = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        dense[i, i] = dense[i, i + 1] = 1
    return BinaryMatrix(dense)


HAMMING_7 = BinaryMatrix(
    [
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ]
)


def steane() -> CssCode:
    return CssCode("steane", HAMMING_7, HAMMING_7, {"kind": "steane"})


def hgp400() -> CssCode:
    """[[400, 16]] hypergraph product of a bundled (3,4)-regular [16, 4] code."""
    h = load_alist(resources.files("sblp.data") / "ldpc_16_12.alist")
    return hypergraph_product(h, h, name="hgp400")


BUILTIN_CODES = {
    "steane": steane,
    "hgp400": hgp400,
    "b1": b1,
    "toric3": lambda: hypergraph_product(repetition_ring(3), repetition_ring(3), name="toric3"),
}


# ---------------------------------------------------------------------------
# alist


def to_alist(H: BinaryMatrix) -> str:
    """MacKay alist text: column lists first, then row lists, 1-based, zero padded."""
    m, n = H.shape
    col_lists = [np.flatnonzero(H.dense[:, j]) + 1 for j in range(n)]
    row_lists = [r + 1 for r in H.rows]
    col_w = [len(c) for c in col_lists]
    row_w = [len(r) for r in row_lists]
    max_c = max(col_w, default=0)
    max_r = max(row_w, default=0)

    def padded(lst, width):
        return " ".join(str(int(x)) for x in list(lst) + [0] * (width - len(lst)))

    lines = [f"{n} {m}", f"{max_c} {max_r}", " ".join(map(str, col_w)), " ".join(map(str, row_w))]
    lines += [padded(c, max_c) for c in col_lists]
    lines += [padded(r, max_r) for r in row_lists]
    return "\n".join(lines) + "\n"


def from_alist(text: str) -> BinaryMatrix:
    lines = [(no, ln.split()) for no, ln in enumerate(text.splitlines(), start=1)]
    lines = [(no, toks) for no, toks in lines if toks]
    pos = 0

    def take(count: int | None = None) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise AlistError("unexpected end of file", last + 1)
        no, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError as exc:
            raise AlistError(f"non-integer token ({exc})", no) from None
        if count is not None and len(vals) != count:
            raise AlistError(f"expected {count} integers, found {len(vals)}", no)
        return no, vals

    no, (n, m) = take(2)
    if n <= 0 or m <= 0:
        raise AlistError("dimensions must be positive", no)
    no, (max_c, max_r) = take(2)
    no, col_w = take(n)
    if any(w < 0 or w > max_c for w in col_w):
        raise AlistError("column weight outside [0, max column weight]", no)
    no, row_w = take(m)
    if any(w < 0 or w > max_r for w in row_w):
        raise AlistError("row weight outside [0, max row weight]", no)
    if sum(col_w) != sum(row_w):
        raise AlistError(f"column weights sum to {sum(col_w)} but row weights to {sum(row_w)}", no)

    dense = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        no, vals = take()
        idx = _alist_entries(vals, col_w[j], m, no)
        dense[np.asarray(idx, dtype=np.int64) - 1, j] = 1
    for i in range(m):
        no, vals = take()
        idx = _alist_entries(vals, row_w[i], n, no)
        expected = np.flatnonzero(dense[i]) + 1
        if sorted(idx) != expected.tolist():
            raise AlistError(f"row {i + 1} list disagrees with the column lists", no)
    if pos != len(lines):
        raise AlistError("trailing data after row lists", lines[pos][0])
    return BinaryMatrix(dense)


def _alist_entries(vals: list[int], weight: int, bound: int, no: int) -> list[int]:
    head, tail = vals[:weight], vals[weight:]
    if len(head) < weight:
        raise AlistError(f"expected {weight} indices, found {len(head)}", no)
    if any(not 1 <= v <= bound for v in head):
        raise AlistError(f"index out of range [1, {bound}]", no)
    if len(set(head)) != len(head):
        raise AlistError("duplicate index", no)
    if any(v != 0 for v in tail):
        raise AlistError("nonzero entry in padding", no)
    return head


def load_alist(path) -> BinaryMatrix:
    return from_alist(Path(path).read_text() if not hasattr(path, "read_text") else path.read_text())


def save_alist(H: BinaryMatrix, path) -> None:
    Path(path).write_text(to_alist(H))


# ---------------------------------------------------------------------------
# manifests


def save_manifest(code: CssCode, directory, stem: str | None = None) -> Path:
    """Write ``<stem>_hx.alist``, ``<stem>_hz.alist`` and ``<stem>.json``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or code.name
    save_alist(code.hx, directory / f"{stem}_hx.alist")
    save_alist(code.hz, directory / f"{stem}_hz.alist")
    manifest = {
        "name": code.name,
        "n": code.n,
        "k": code.k,
        "hx": f"{stem}_hx.alist",
        "hz": f"{stem}_hz.alist",
        "constructor": code.params,
    }
    path = directory / f"{stem}.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def load_manifest(path) -> CssCode:
    """Load a code manifest.

    Matrix paths are resolved relative to the manifest. A manifest may
    instead carry only ``constructor`` parameters (kind hgp-ring, gb or a
    builtin name), in which case the code is rebuilt.
    """
    path = Path(path)
    data = json.loads(path.read_text())
    if "hx" in data and "hz" in data:
        hx = load_alist(path.parent / data["hx"])
        hz = load_alist(path.parent / data["hz"])
        code = CssCode(data.get("name", path.stem), hx, hz, data.get("constructor", {}))
    else:
        code = from_constructor(data.get("constructor", {}), name=data.get("name"))
    for key in ("n", "k"):
        if key in data and data[key] != getattr(code, key):
            raise CssError(f"manifest {key}={data[key]} but the matrices give {getattr(code, key)}")
    return code


def from_constructor(params: dict, name: str | None = None) -> CssCode:
    kind = params.get("kind")
    if kind in BUILTIN_CODES:
        return BUILTIN_CODES[kind]()
    if kind == "gb":
        return generalized_bicycle(params["a"], params["b"], params["ell"], name=name)
    if kind == "lp":
        return lifted_product(params["a"], params["b"], params["ell"], name=name)
    if kind == "hgp-ring":
        ring = repetition_ring(params["size"])
        return hypergraph_product(ring, ring, name=name)
    raise ValueError(f"unknown code constructor {kind!r}")


def load_code(spec: str) -> CssCode:
    """Resolve a ``--code`` argument: a builtin name or a manifest path."""
    if spec in BUILTIN_CODES:
        return BUILTIN_CODES[spec]()
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(f"no builtin code or manifest named {spec!r}")
    return load_manifest(path)
