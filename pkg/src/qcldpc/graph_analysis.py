"""Tanner-graph structure analysis: cycles, girth, EMD spectrum, orbits.

For QC codes, cycles are found at block level.  A cycle of length 2l in the
lifted graph projects to a closed alternating walk over the non-zero entries
of the mother matrix (an exponent chain); the walk lifts back to a cycle iff
its alternating exponent sum vanishes mod L.  Each valid chain, taken up to
rotation and reflection, corresponds to exactly one orbit of node-level
cycles under the QC shift automorphism, so enumeration cost scales with the
mother matrix, not with the lifted graph.

Node numbering: variable node j*L+s (block column j, shift s), check node
i*L+r.  The shift automorphism maps (block, s) to (block, s+1 mod L).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .code_model import ExponentMatrix, ParityCheckMatrix, expand


@dataclass(eq=False)
class TannerGraph:
    """Bipartite adjacency between variable and check nodes."""

    vn_adj: list
    cn_adj: list

    @property
    def vn_count(self) -> int:
        return len(self.vn_adj)

    @property
    def cn_count(self) -> int:
        return len(self.cn_adj)

    @classmethod
    def from_pcm(cls, Hm: ParityCheckMatrix) -> "TannerGraph":
        return cls(vn_adj=Hm.col_adj, cn_adj=Hm.row_adj)


@dataclass(frozen=True)
class ExponentChain:
    """Closed alternating row/column walk over mother-matrix positions.

    ``positions`` has length 2l; entries 2k and 2k+1 share block row I_k,
    entries 2k+1 and 2k+2 (cyclically) share block column J_{k+1}.
    """

    positions: tuple

    def __post_init__(self):
        p = self.positions
        if len(p) < 4 or len(p) % 2:
            raise ValueError("chain length must be even and >= 4")
        for t in range(len(p)):
            a, b = p[t], p[(t + 1) % len(p)]
            if t % 2 == 0:
                if a[0] != b[0] or a[1] == b[1]:
                    raise ValueError(f"positions {t},{t + 1} must share a row and change column")
            else:
                if a[1] != b[1] or a[0] == b[0]:
                    raise ValueError(f"positions {t},{t + 1} must share a column and change row")

    def exponents(self, E: ExponentMatrix) -> list:
        return [int(E.entries[i, j]) for i, j in self.positions]


@dataclass(frozen=True)
class Cycle:
    """A simple cycle given by its ordered variable and check nodes."""

    vns: tuple
    cns: tuple

    @property
    def length(self) -> int:
        return 2 * len(self.vns)


@dataclass
class EmdSpectrum:
    """Histogram over (cycle length, EMD of the walk's VN set).

    ``counts`` follows the reporting convention of published spectra: closed
    non-backtracking walks counted at node level, divided by the shift-orbit
    size L and rounded half up.  It equals the strict cycle-orbit count
    except where degenerate walks (a short cycle traversed twice) or orbits
    with non-trivial shift stabilizers exist; ``simple_counts`` holds the
    strict count and ``raw_counts`` the node-level simple-cycle total.
    """

    counts: dict
    simple_counts: dict
    raw_counts: dict
    orbit_counted: bool = True
    max_len: int = 0

    @property
    def girth(self) -> float:
        lengths = [ln for (ln, _), c in self.simple_counts.items() if c]
        return min(lengths) if lengths else math.inf

    @property
    def min_emd(self) -> float:
        g = self.girth
        emds = [e for (ln, e), c in self.simple_counts.items() if c and ln == g]
        return min(emds) if emds else math.inf


def block_cycle_check(chain, L: int, E: ExponentMatrix | None = None) -> bool:
    """True iff the chain's alternating exponent sum vanishes mod L.

    ``chain`` is either an exponent sequence a_1..a_2l or an ExponentChain
    (then ``E`` supplies the exponents).  Sum convention: odd positions
    enter negatively, sum_{i=1..2l} (-1)^i a_i = 0 (mod L).
    """
    if isinstance(chain, ExponentChain):
        if E is None:
            raise ValueError("an ExponentChain needs E to resolve exponents")
        seq = chain.exponents(E)
    else:
        seq = list(chain)
    if len(seq) % 2 or len(seq) < 4:
        raise ValueError("exponent chain must have even length >= 4")
    if any(a < 0 for a in seq):
        return False
    total = sum(a if i % 2 else -a for i, a in enumerate(seq, start=1))
    return total % L == 0


# ---------------------------------------------------------------------------
# Block-level chain enumeration (QC codes)
# ---------------------------------------------------------------------------

def _cyclic_row_sequences(m: int, l: int):
    """All length-l sequences over range(m) with cyclically distinct neighbours."""
    for seq in itertools.product(range(m), repeat=l):
        if all(seq[k] != seq[(k + 1) % l] for k in range(l)):
            yield seq


def _lex_min_rows(variants: np.ndarray) -> np.ndarray:
    """Row-wise lexicographic minimum over axis 1 of an (N, K, W) array."""
    best = variants[:, 0, :].copy()
    rows = np.arange(variants.shape[0])
    for k in range(1, variants.shape[1]):
        cand = variants[:, k, :]
        neq = cand != best
        any_neq = neq.any(axis=1)
        first = np.argmax(neq, axis=1)
        take = any_neq & (cand[rows, first] < best[rows, first])
        if take.any():
            best[take] = cand[take]
    return best


class ChainOrbits:
    """Cycle orbits of one length, held column-wise for bulk processing."""

    def __init__(self, E: ExponentMatrix, l: int, I: np.ndarray, J: np.ndarray):
        self.E = E
        self.l = l
        self.I = np.asarray(I, dtype=np.int64)
        self.J = np.asarray(J, dtype=np.int64)
        A = E.entries
        D = np.zeros_like(self.J)
        for k in range(1, l):
            D[:, k] = (
                D[:, k - 1]
                + A[self.I[:, k - 1], self.J[:, k]]
                - A[self.I[:, k - 1], self.J[:, k - 1]]
            )
        self.D = np.mod(D, E.L)
        self._stats = None

    def __len__(self) -> int:
        return self.I.shape[0]

    def vn_ids(self) -> np.ndarray:
        """Representative node cycle (start shift 0): VN ids, shape (N, l)."""
        return self.J * self.E.L + self.D

    def cn_ids(self) -> np.ndarray:
        A = self.E.entries
        R = np.mod(self.D - A[self.I, self.J], self.E.L)
        return self.I * self.E.L + R

    def orbit_sizes(self) -> np.ndarray:
        """Number of distinct node cycles per orbit (L / stabilizer order)."""
        N, l, L = len(self), self.l, self.E.L
        sizes = np.full(N, L, dtype=np.int64)
        if not N:
            return sizes
        pos = self._position_strings()
        rev = pos[:, ::-1]
        deltas = {}
        for r in range(l):
            if r > 0:
                eq = (np.roll(pos, -2 * r, axis=1) == pos).all(axis=1)
                for idx in np.nonzero(eq)[0]:
                    deltas.setdefault(idx, {0}).add(int(self.D[idx, r]) % L)
            eq = (np.roll(rev, -2 * r, axis=1) == pos).all(axis=1)
            for idx in np.nonzero(eq)[0]:
                deltas.setdefault(idx, {0}).add(int(self.D[idx, (l - r) % l]) % L)
        for idx, ds in deltas.items():
            g = L
            for d in ds:
                g = math.gcd(g, d)
            sizes[idx] = g if g else L
        return sizes

    def _position_strings(self) -> np.ndarray:
        N, l = len(self), self.l
        n = self.E.n
        pos = np.empty((N, 2 * l), dtype=np.int32)
        for k in range(l):
            pos[:, 2 * k] = self.I[:, k] * n + self.J[:, k]
            pos[:, 2 * k + 1] = self.I[:, k] * n + self.J[:, (k + 1) % l]
        return pos

    def simple_mask(self) -> np.ndarray:
        """True where the lifted walk has all-distinct VNs and CNs (a cycle)."""
        N, l, L = len(self), self.l, self.E.L
        if not N:
            return np.zeros(0, dtype=bool)
        vn_keys = np.sort(self.J * L + self.D, axis=1)
        ok = (vn_keys[:, 1:] != vn_keys[:, :-1]).all(axis=1) if l > 1 else np.ones(N, bool)
        cn_keys = np.sort(self.cn_ids(), axis=1)
        ok &= (cn_keys[:, 1:] != cn_keys[:, :-1]).all(axis=1)
        return ok

    def subset(self, mask: np.ndarray) -> "ChainOrbits":
        return ChainOrbits(self.E, self.l, self.I[mask], self.J[mask])

    def emd(self) -> np.ndarray:
        """Extrinsic message degree per orbit: checks singly tied to the VN set."""
        return self._check_degree_stats()[0]

    def odd_check_count(self) -> np.ndarray:
        """Checks of odd induced degree per orbit (the b of TS(a, b))."""
        return self._check_degree_stats()[1]

    def _check_degree_stats(self):
        if self._stats is not None:
            return self._stats
        E, l = self.E, self.l
        A, L, m = E.entries, E.L, E.m
        N = len(self)
        if not N:
            self._stats = (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
            return self._stats
        # degenerate walks repeat a VN slot; degrees are of the VN *set*
        V = self.J * L + self.D
        dup = np.zeros((N, l), dtype=bool)
        for k in range(1, l):
            for k2 in range(k):
                dup[:, k] |= V[:, k] == V[:, k2]
        pad = np.iinfo(np.int64).max
        codes = np.full((N, l * m), pad, dtype=np.int64)
        for k in range(l):
            cols = self.J[:, k]
            for i in range(m):
                a = A[i, cols]
                ok = (a >= 0) & ~dup[:, k]
                cn = i * L + np.mod(self.D[:, k] - a, L)
                codes[ok, k * m + i] = cn[ok]
        codes.sort(axis=1)
        valid = codes != pad
        starts = valid.copy()
        starts[:, 1:] &= codes[:, 1:] != codes[:, :-1]
        ends = valid.copy()
        ends[:, :-1] &= codes[:, :-1] != codes[:, 1:]
        rs, cs = np.nonzero(starts)
        _, ce = np.nonzero(ends)
        run_len = ce - cs + 1
        single = np.zeros(N, dtype=np.int64)
        odd = np.zeros(N, dtype=np.int64)
        np.add.at(single, rs, (run_len == 1).astype(np.int64))
        np.add.at(odd, rs, (run_len % 2).astype(np.int64))
        self._stats = (single, odd)
        return self._stats


def enumerate_chain_orbits(E: ExponentMatrix, max_len: int,
                           lengths=None, simple_only: bool = True) -> dict:
    """Enumerate cycle orbits per even length as a dict {2l: ChainOrbits}.

    With ``simple_only=False`` the result also contains closed
    non-backtracking walks that revisit a node (needed for the published
    spectrum convention).  Work per length is the number of closed
    alternating walks on the mother matrix; lengths beyond 10 get expensive
    on dense mother matrices.
    """
    if max_len % 2 or max_len < 4:
        raise ValueError("max_len must be even and >= 4")
    A = E.entries
    L = E.L
    m, n = E.m, E.n
    mask = E.mother().astype(bool)
    want = tuple(lengths) if lengths is not None else tuple(range(4, max_len + 1, 2))
    out = {}
    for two_l in want:
        l = two_l // 2
        canon_parts = []
        for I in _cyclic_row_sequences(m, l):
            doms = [np.nonzero(mask[I[k - 1]] & mask[I[k]])[0].astype(np.int16)
                    for k in range(l)]
            if any(len(d) == 0 for d in doms):
                continue
            J = _grow_chains(A, L, I, doms, l, simple_only)
            if J is None:
                continue
            canon_parts.append(_canonical_strings(n, I, J, l))
        if not canon_parts:
            out[two_l] = ChainOrbits(E, l, np.empty((0, l), dtype=np.int64),
                                     np.empty((0, l), dtype=np.int64))
            continue
        uniq = np.unique(np.vstack(canon_parts), axis=0)
        out[two_l] = ChainOrbits(E, l, uniq[:, 0::2] // n, uniq[:, 0::2] % n)
    return out


def _grow_chains(A, L, I, doms, l, simple_only=True):
    """All column sequences for a fixed row sequence, filtered to closing chains.

    Returns an (N, l) int array or None.  Grows layer by layer carrying the
    partial alternating sum; simplicity of the lifted cycle is checked on the
    closure survivors only.
    """
    outs = []
    for j0 in doms[0]:
        J = np.full((1, 1), j0, dtype=np.int16)
        D = np.zeros(1, dtype=np.int64)
        dead = False
        for k in range(1, l):
            nxt = doms[k]
            nn = len(nxt)
            J2 = np.repeat(J, nn, axis=0)
            cand = np.tile(nxt, J.shape[0])
            D2 = np.repeat(D, nn)
            keep = cand != J2[:, -1]
            J2, cand, D2 = J2[keep], cand[keep], D2[keep]
            if not len(cand):
                dead = True
                break
            w = A[I[k - 1], cand] - A[I[k - 1], J2[:, -1]]
            J = np.concatenate([J2, cand[:, None]], axis=1)
            D = (D2 + w) % L
        if dead:
            continue
        keep = J[:, -1] != j0
        J, D = J[keep], D[keep]
        if not len(D):
            continue
        total = (D + A[I[l - 1], j0] - A[I[l - 1], J[:, -1]]) % L
        J = J[total == 0]
        if len(J):
            J = J.astype(np.int64)
            if simple_only:
                J = _filter_simple(A, L, I, J, l)
            if len(J):
                outs.append(J)
    if not outs:
        return None
    return np.vstack(outs)


def _filter_simple(A, L, I, J, l):
    """Keep chains whose lifted cycles have distinct VNs and distinct CNs."""
    N = J.shape[0]
    I_row = np.asarray(I, dtype=np.int64)
    D = np.zeros((N, l), dtype=np.int64)
    for k in range(1, l):
        D[:, k] = D[:, k - 1] + A[I[k - 1], J[:, k]] - A[I[k - 1], J[:, k - 1]]
    D %= L
    vn_keys = np.sort(J * L + D, axis=1)
    ok = (vn_keys[:, 1:] != vn_keys[:, :-1]).all(axis=1)
    R = np.mod(D - A[I_row[None, :], J], L)
    cn_keys = np.sort(I_row[None, :] * L + R, axis=1)
    ok &= (cn_keys[:, 1:] != cn_keys[:, :-1]).all(axis=1)
    return J[ok]


def _canonical_strings(n, I, J, l):
    """Canonical (rotation/reflection-minimal) position strings, one per chain."""
    N = J.shape[0]
    I_row = np.asarray(I, dtype=np.int32)
    pos = np.empty((N, 2 * l), dtype=np.int32)
    for k in range(l):
        pos[:, 2 * k] = I_row[k] * n + J[:, k]
        pos[:, 2 * k + 1] = I_row[k] * n + J[:, (k + 1) % l]
    variants = np.empty((N, 2 * l, 2 * l), dtype=np.int32)
    rev = pos[:, ::-1]
    for r in range(l):
        variants[:, r, :] = np.roll(pos, -2 * r, axis=1)
        variants[:, l + r, :] = np.roll(rev, -2 * r, axis=1)
    return _lex_min_rows(variants)


# ---------------------------------------------------------------------------
# Node-level enumeration (any Tanner graph)
# ---------------------------------------------------------------------------

def _node_cycles(g: TannerGraph, max_len: int):
    """Yield each simple cycle once: minimal VN first, direction canonical."""
    max_vns = max_len // 2
    vn_adj = [list(map(int, a)) for a in g.vn_adj]
    cn_adj = [list(map(int, a)) for a in g.cn_adj]

    for start in range(g.vn_count):
        path_v = [start]
        path_c = []
        used_v = {start}
        used_c = set()

        def dfs(v, depth):
            for c in vn_adj[v]:
                if c in used_c:
                    continue
                for w in cn_adj[c]:
                    if w == start and depth >= 2:
                        if len(path_v) == 2:
                            if path_c[0] < c:
                                yield Cycle(tuple(path_v), tuple(path_c) + (c,))
                        elif path_v[1] < path_v[-1]:
                            yield Cycle(tuple(path_v), tuple(path_c) + (c,))
                        continue
                    if w <= start or w in used_v or depth + 1 > max_vns:
                        continue
                    used_c.add(c)
                    used_v.add(w)
                    path_v.append(w)
                    path_c.append(c)
                    yield from dfs(w, depth + 1)
                    path_v.pop()
                    path_c.pop()
                    used_v.discard(w)
                    used_c.discard(c)

        yield from dfs(start, 1)


def enumerate_cycles(g, max_len: int):
    """Yield every simple cycle of length <= max_len exactly once.

    Accepts an ExponentMatrix (orbit-level search, expanded by shift) or a
    TannerGraph (direct search).  max_len must be even and >= 4.
    """
    if max_len % 2 or max_len < 4:
        raise ValueError("max_len must be even and >= 4")
    if isinstance(g, ExponentMatrix):
        L = g.L
        orbits = enumerate_chain_orbits(g, max_len)
        for two_l in sorted(orbits):
            ch = orbits[two_l]
            if not len(ch):
                continue
            vn, cn = ch.vn_ids(), ch.cn_ids()
            sizes = ch.orbit_sizes()
            for row in range(len(ch)):
                bv, sv = vn[row] // L, vn[row] % L
                bc, sc = cn[row] // L, cn[row] % L
                for t in range(int(sizes[row])):
                    yield Cycle(
                        tuple(int(b * L + (s + t) % L) for b, s in zip(bv, sv)),
                        tuple(int(b * L + (s + t) % L) for b, s in zip(bc, sc)),
                    )
    elif isinstance(g, TannerGraph):
        yield from _node_cycles(g, max_len)
    else:
        raise TypeError("expected ExponentMatrix or TannerGraph")


def girth(g) -> float:
    """Shortest cycle length; math.inf for an acyclic graph."""
    if isinstance(g, ExponentMatrix):
        for two_l in range(4, 14, 2):
            if len(enumerate_chain_orbits(g, two_l, lengths=(two_l,))[two_l]):
                return two_l
        g = TannerGraph.from_pcm(expand(g))
    elif isinstance(g, ParityCheckMatrix):
        g = TannerGraph.from_pcm(g)
    best = math.inf
    for start in range(g.vn_count):
        dist = {("v", start): 0}
        parent = {("v", start): None}
        frontier = [("v", start)]
        depth = 0
        while frontier and 2 * depth < best:
            nxt = []
            for kind, node in frontier:
                adj = g.vn_adj[node] if kind == "v" else g.cn_adj[node]
                other = "c" if kind == "v" else "v"
                for nb in adj:
                    key = (other, int(nb))
                    if key == parent[(kind, node)]:
                        continue
                    if key in dist:
                        cyc = dist[(kind, node)] + dist[key] + 1
                        if cyc < best:
                            best = cyc
                    else:
                        dist[key] = dist[(kind, node)] + 1
                        parent[key] = (kind, node)
                        nxt.append(key)
            frontier = nxt
            depth += 1
    return best


def emd_of_cycle(g, cycle: Cycle) -> int:
    """Check nodes adjacent to exactly one VN of the cycle's VN set."""
    if isinstance(g, ParityCheckMatrix):
        g = TannerGraph.from_pcm(g)
    counts = {}
    for v in cycle.vns:
        for c in g.vn_adj[v]:
            counts[int(c)] = counts.get(int(c), 0) + 1
    return sum(1 for c in counts.values() if c == 1)


def emd_spectrum(E: ExponentMatrix, max_len: int = 10) -> EmdSpectrum:
    """Histogram of (walk length, EMD) per the published reporting convention.

    See EmdSpectrum for the three count views.
    """
    orbits = enumerate_chain_orbits(E, max_len, simple_only=False)
    L = E.L
    walk_raw, simple, raw = {}, {}, {}
    for two_l in sorted(orbits):
        ch = orbits[two_l]
        if not len(ch):
            continue
        emds = ch.emd()
        sizes = ch.orbit_sizes()
        is_simple = ch.simple_mask()
        for e, s, simp in zip(emds, sizes, is_simple):
            key = (two_l, int(e))
            walk_raw[key] = walk_raw.get(key, 0) + int(s)
            if simp:
                simple[key] = simple.get(key, 0) + 1
                raw[key] = raw.get(key, 0) + int(s)
    counts = {k: (v + L // 2) // L for k, v in walk_raw.items()}
    counts = {k: v for k, v in counts.items() if v}
    return EmdSpectrum(counts=counts, simple_counts=simple, raw_counts=raw,
                       orbit_counted=True, max_len=max_len)


@dataclass
class CycleDensity:
    """Per-block-row/-column cycle incidence, raw and averaged.

    ``row_avg[2l][i]`` spreads each orbit uniformly over its l check slots,
    so the averages over a block row sum to the orbit count of that length
    (this normalization reproduces the published per-row/column figures).
    ``row_raw`` counts orbits incident to the row at least once.
    """

    row_avg: dict
    col_avg: dict
    row_raw: dict
    col_raw: dict


def cycle_density_per_node(E: ExponentMatrix, lengths=(4, 6)) -> CycleDensity:
    orbits = enumerate_chain_orbits(E, max(lengths), lengths=tuple(lengths))
    row_avg, col_avg, row_raw, col_raw = {}, {}, {}, {}
    for two_l in lengths:
        ch = orbits[two_l]
        l = two_l // 2
        ra, ca = np.zeros(E.m), np.zeros(E.n)
        rr = np.zeros(E.m, dtype=np.int64)
        cr = np.zeros(E.n, dtype=np.int64)
        if len(ch):
            for k in range(l):
                np.add.at(ra, ch.I[:, k], 1.0 / l)
                np.add.at(ca, ch.J[:, k], 1.0 / l)
            for i in range(E.m):
                rr[i] = int(((ch.I == i).any(axis=1)).sum())
            for j in range(E.n):
                cr[j] = int(((ch.J == j).any(axis=1)).sum())
        row_avg[two_l], col_avg[two_l] = ra, ca
        row_raw[two_l], col_raw[two_l] = rr, cr
    return CycleDensity(row_avg, col_avg, row_raw, col_raw)


# ---------------------------------------------------------------------------
# QC shift-automorphism orbits of node sets
# ---------------------------------------------------------------------------

def shift_node_set(node_set, L: int, t: int) -> frozenset:
    """Apply the shift automorphism sigma^t to a set of node ids."""
    return frozenset((v // L) * L + (v % L + t) % L for v in node_set)


def expand_orbit(node_set, L: int) -> set:
    """All distinct images of a node set under the shift automorphism."""
    return {shift_node_set(node_set, L, t) for t in range(L)}


def canonical_node_set(node_set, L: int) -> tuple:
    """Orbit-minimal normal form: lexicographically smallest shifted image."""
    blocks = np.fromiter((v // L for v in sorted(node_set)), dtype=np.int64)
    shifts = np.fromiter((v % L for v in sorted(node_set)), dtype=np.int64)
    imgs = blocks[None, :] * L + (shifts[None, :] + np.arange(L)[:, None]) % L
    imgs.sort(axis=1)
    best = _lex_min_rows(imgs[None, :, :])
    return tuple(int(x) for x in best[0])


def orbit_size_of_set(node_set, L: int) -> int:
    """Distinct images under the shift automorphism (divides L)."""
    base = frozenset(node_set)
    stab = sum(1 for t in range(L) if shift_node_set(base, L, t) == base)
    return L // stab


def canonical_sets_batch(sets: np.ndarray, L: int, chunk: int = 40000):
    """Canonicalize many equal-size node sets at once.

    ``sets``: (N, u) array of node ids (any order).  Returns (canon, orbit)
    where canon is the (N, u) orbit-minimal sorted form and orbit the number
    of distinct shift images per set.
    """
    sets = np.asarray(sets, dtype=np.int64)
    N, u = sets.shape
    canon = np.empty_like(sets)
    orbit = np.empty(N, dtype=np.int64)
    blocks = (sets // L) * L
    shifts = sets % L
    t = np.arange(L, dtype=np.int64)
    for lo in range(0, N, chunk):
        hi = min(lo + chunk, N)
        sh = blocks[lo:hi, None, :] + (shifts[lo:hi, None, :] + t[None, :, None]) % L
        sh.sort(axis=2)
        base = sh[:, 0, :]
        stab = (sh == base[:, None, :]).all(axis=2).sum(axis=1)
        orbit[lo:hi] = L // stab
        canon[lo:hi] = _lex_min_rows(sh)
    return canon, orbit


def orbit_representatives(E: ExponentMatrix) -> list:
    """One variable node per block column (shift 0): seeds for orbit-reduced search."""
    return [j * E.L for j in range(E.n)]
