"""QC-LDPC code structure: exponent matrices, CPM expansion, alist I/O.

A QC-LDPC parity-check matrix is an m x n grid of L x L blocks, each block
either the zero matrix or a circulant permutation matrix P^k (the identity
cyclically shifted right by k columns).  The grid of shift values is the
exponent matrix; -1 marks a zero block.

File formats
------------
Exponent matrix (``.exp``): first line ``m n L`` (ASCII, space separated),
then m lines of n integers, each -1 or in [0, L).

Alist: standard MacKay sparse format.  First line ``n m`` (columns then
rows), second line max column / max row degree, then the n column degrees,
the m row degrees, then n lines of 1-indexed row positions per column and
m lines of 1-indexed column positions per row, zero-padded to the maxima.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ParseError(ValueError):
    """Raised when an input document violates its declared format."""


@dataclass(frozen=True, eq=False)
class ExponentMatrix:
    """m x n array of circulant shifts over {-1} | [0, L); -1 is a zero block."""

    entries: np.ndarray
    circulant_size: int

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=np.int64)
        if ent.ndim != 2 or ent.size == 0:
            raise ValueError("exponent matrix must be a non-empty 2-D array")
        if self.circulant_size < 1:
            raise ValueError(f"circulant size must be >= 1, got {self.circulant_size}")
        bad = (ent < -1) | (ent >= self.circulant_size)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValueError(
                f"entry {ent[i, j]} at ({i}, {j}) out of range for L={self.circulant_size}"
            )
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def L(self) -> int:
        return self.circulant_size

    def mother(self) -> np.ndarray:
        """Binary mask of non-zero blocks (the mother / base matrix)."""
        return (self.entries >= 0).astype(np.uint8)

    def nonzero_blocks(self) -> int:
        return int((self.entries >= 0).sum())

    def column_weights(self) -> np.ndarray:
        return (self.entries >= 0).sum(axis=0)

    def row_weights(self) -> np.ndarray:
        return (self.entries >= 0).sum(axis=1)

    def to_text(self) -> str:
        lines = [f"{self.m} {self.n} {self.L}"]
        for row in self.entries:
            lines.append(" ".join(str(int(e)) for e in row))
        return "\n".join(lines) + "\n"


def parse_exponent_matrix(text: str) -> ExponentMatrix:
    """Parse the exponent-matrix text format, reporting line/column on error."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty document")
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError(f"line 1: expected header 'm n L', got {lines[0]!r}")
    try:
        m, n, L = (int(t) for t in header)
    except ValueError:
        raise ParseError(f"line 1: non-integer header field in {lines[0]!r}") from None
    if m < 1 or n < 1 or L < 1:
        raise ParseError(f"line 1: dimensions must be positive, got m={m} n={n} L={L}")
    if len(lines) - 1 < m:
        raise ParseError(f"expected {m} matrix rows, found {len(lines) - 1}")
    rows = []
    for i in range(m):
        toks = lines[1 + i].split()
        if len(toks) != n:
            raise ParseError(f"line {i + 2}: expected {n} entries, got {len(toks)} (ragged row)")
        row = []
        for j, tok in enumerate(toks):
            try:
                e = int(tok)
            except ValueError:
                raise ParseError(f"line {i + 2}, column {j + 1}: non-integer entry {tok!r}") from None
            if e < -1 or e >= L:
                raise ParseError(
                    f"line {i + 2}, column {j + 1}: entry out of range ({e} not in -1..{L - 1})"
                )
            row.append(e)
        rows.append(row)
    return ExponentMatrix(np.array(rows, dtype=np.int64), L)


@dataclass(eq=False)
class ParityCheckMatrix:
    """Sparse binary matrix held as paired row-major / column-major adjacency.

    Variable node j*L+s lives in block column j at shift s; check node i*L+r
    likewise, so the QC shift automorphism is a plain index formula.  Both
    adjacency views always describe the same 1-set.
    """

    rows: int
    cols: int
    row_adj: list = field(repr=False)
    col_adj: list = field(repr=False)
    circulant_size: int | None = None

    @classmethod
    def from_edges(cls, rows: int, cols: int, cn_idx: np.ndarray, vn_idx: np.ndarray,
                   circulant_size: int | None = None) -> "ParityCheckMatrix":
        cn_idx = np.asarray(cn_idx, dtype=np.int64)
        vn_idx = np.asarray(vn_idx, dtype=np.int64)
        if cn_idx.shape != vn_idx.shape:
            raise ValueError("edge index arrays must have equal length")
        order = np.lexsort((vn_idx, cn_idx))
        cn_s, vn_s = cn_idx[order], vn_idx[order]
        row_adj = [vn_s[cn_s == i] for i in range(rows)]
        order = np.lexsort((cn_idx, vn_idx))
        cn_s, vn_s = cn_idx[order], vn_idx[order]
        col_adj = [cn_s[vn_s == j] for j in range(cols)]
        return cls(rows, cols, row_adj, col_adj, circulant_size)

    @property
    def ones_count(self) -> int:
        return int(sum(len(a) for a in self.row_adj))

    def row_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self.row_adj], dtype=np.int64)

    def col_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self.col_adj], dtype=np.int64)

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, vns in enumerate(self.row_adj):
            H[i, vns] = 1
        return H

    def edge_set(self) -> set:
        return {(i, int(v)) for i, vns in enumerate(self.row_adj) for v in vns}


def expand(E: ExponentMatrix) -> ParityCheckMatrix:
    """Expand an exponent matrix into its mL x nL parity-check matrix.

    Block (i, j) with exponent k >= 0 contributes the L ones
    (i*L + r, j*L + (r + k) mod L) for r in [0, L).
    """
    L = E.L
    r = np.arange(L, dtype=np.int64)
    cn_parts, vn_parts = [], []
    for i in range(E.m):
        for j in range(E.n):
            k = int(E.entries[i, j])
            if k < 0:
                continue
            cn_parts.append(i * L + r)
            vn_parts.append(j * L + (r + k) % L)
    if cn_parts:
        cn_idx = np.concatenate(cn_parts)
        vn_idx = np.concatenate(vn_parts)
    else:
        cn_idx = vn_idx = np.empty(0, dtype=np.int64)
    return ParityCheckMatrix.from_edges(E.m * L, E.n * L, cn_idx, vn_idx, circulant_size=L)


def write_alist(Hm: ParityCheckMatrix) -> str:
    """Serialize to the MacKay alist format (1-indexed, zero-padded)."""
    n, m = Hm.cols, Hm.rows
    col_deg = Hm.col_weights()
    row_deg = Hm.row_weights()
    max_col = int(col_deg.max()) if n else 0
    max_row = int(row_deg.max()) if m else 0
    out = [f"{n} {m}", f"{max_col} {max_row}"]
    out.append(" ".join(str(int(d)) for d in col_deg))
    out.append(" ".join(str(int(d)) for d in row_deg))
    for j in range(n):
        ones = [str(int(c) + 1) for c in Hm.col_adj[j]]
        ones += ["0"] * (max_col - len(ones))
        out.append(" ".join(ones))
    for i in range(m):
        ones = [str(int(v) + 1) for v in Hm.row_adj[i]]
        ones += ["0"] * (max_row - len(ones))
        out.append(" ".join(ones))
    return "\n".join(out) + "\n"


def parse_alist(text: str) -> ParityCheckMatrix:
    """Parse a MacKay alist document; consistency violations raise ParseError."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise ParseError("truncated alist: fewer than 4 header lines")
    try:
        toks = [[int(t) for t in ln] for ln in lines]
    except ValueError:
        raise ParseError("alist contains a non-integer token") from None
    if len(toks[0]) != 2:
        raise ParseError("alist line 1 must hold exactly 'n m'")
    n, m = toks[0]
    if n < 1 or m < 1:
        raise ParseError(f"non-positive alist dimensions n={n} m={m}")
    if len(toks[1]) != 2:
        raise ParseError("alist line 2 must hold exactly max column / row degree")
    max_col, max_row = toks[1]
    if len(toks) < 4 + n + m:
        raise ParseError(f"truncated alist: expected {4 + n + m} lines, got {len(toks)}")
    col_deg, row_deg = toks[2], toks[3]
    if len(col_deg) != n:
        raise ParseError(f"column degree list has {len(col_deg)} entries, expected {n}")
    if len(row_deg) != m:
        raise ParseError(f"row degree list has {len(row_deg)} entries, expected {m}")
    cn_idx, vn_idx = [], []
    for j in range(n):
        ones = [t for t in toks[4 + j] if t != 0]
        if len(ones) != col_deg[j]:
            raise ParseError(
                f"column {j + 1}: {len(ones)} positions listed, degree says {col_deg[j]}"
            )
        for t in ones:
            if not 1 <= t <= m:
                raise ParseError(f"column {j + 1}: row index {t} out of range 1..{m}")
            cn_idx.append(t - 1)
            vn_idx.append(j)
    edge_set = set(zip(cn_idx, vn_idx))
    if len(edge_set) != len(cn_idx):
        raise ParseError("duplicate position in column adjacency")
    row_seen = [0] * m
    for i in range(m):
        ones = [t for t in toks[4 + n + i] if t != 0]
        if len(ones) != row_deg[i]:
            raise ParseError(f"row {i + 1}: {len(ones)} positions listed, degree says {row_deg[i]}")
        for t in ones:
            if not 1 <= t <= n:
                raise ParseError(f"row {i + 1}: column index {t} out of range 1..{n}")
            if (i, t - 1) not in edge_set:
                raise ParseError(f"row {i + 1}: position {t} absent from column adjacency")
            row_seen[i] += 1
    for i in range(m):
        expected = sum(1 for c, _ in edge_set if c == i)
        if row_seen[i] != expected:
            raise ParseError(f"row {i + 1}: row/column adjacency views disagree")
    return ParityCheckMatrix.from_edges(
        m, n, np.array(cn_idx, dtype=np.int64), np.array(vn_idx, dtype=np.int64)
    )
