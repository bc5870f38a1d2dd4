"""Trapping-set enumeration by decoder error impulses, plus an exhaustive oracle.

A trapping set TS(a, b) is a set of a variable nodes, each lying on a cycle
of the subgraph it induces, with b odd-degree checks in that subgraph.  The
search plants error impulses on small VN sets drawn from a depth-limited
tree around each root, decodes, and sieves the per-iteration error sets
through two closures:

  S1(x) = Tree(S(x) | impulse set)        -- largest cycle-only core
  S2(x) = Tree(TS(S(x) | impulse set))    -- core after adding cycle-closers

For QC codes only one root per block column is processed; every found set
is stored in orbit-minimal form with its orbit multiplicity, so the output
is orbit-complete wherever the search reaches one member of an orbit.

``brute_force_ts_oracle`` enumerates *every* trapping set up to a size
bound by composing the VN supports of short cycles; it is the ground truth
the impulse search is validated against.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .code_model import ExponentMatrix, ParityCheckMatrix, expand
from .decoder import ChannelConfig, DecoderConfig, QuantizationSpec, decode
from .graph_analysis import (
    TannerGraph,
    canonical_sets_batch,
    cycle_density_per_node,
    enumerate_chain_orbits,
    enumerate_cycles,
    girth as graph_girth,
    orbit_representatives,
)


# ---------------------------------------------------------------------------
# Closures
# ---------------------------------------------------------------------------

def tree_closure(g: TannerGraph, vns) -> frozenset:
    """Largest subset whose every VN lies on a cycle of its induced subgraph.

    A cheap 2-core peel removes pendant material first; the survivors then
    keep exactly the VNs incident to a non-bridge edge (an edge lies on a
    cycle iff it is not a bridge).  The plain 2-core is not enough: a path
    joining two cycles survives the peel without lying on any cycle.
    """
    S = set(int(v) for v in vns)
    while S:
        deg = {}
        for v in S:
            for c in g.vn_adj[v]:
                c = int(c)
                deg[c] = deg.get(c, 0) + 1
        keep = set()
        for v in S:
            strong = sum(1 for c in g.vn_adj[v] if deg[int(c)] >= 2)
            if strong >= 2:
                keep.add(v)
        if keep == S:
            break
        S = keep
    if not S:
        return frozenset()
    return frozenset(v for v in _cycle_vns_induced(g, S))


def _cycle_vns_induced(g: TannerGraph, S: set):
    """VNs of S incident to a non-bridge edge of the subgraph induced by S."""
    vn_ids = sorted(S)
    vn_pos = {v: i for i, v in enumerate(vn_ids)}
    cn_pos = {}
    adj = [[] for _ in vn_ids]  # node index: VNs 0..|S|-1, CNs after
    cn_adj_local = []
    edges = []
    for v in vn_ids:
        for c in g.vn_adj[v]:
            c = int(c)
            if c not in cn_pos:
                cn_pos[c] = len(vn_ids) + len(cn_adj_local)
                cn_adj_local.append([])
            eid = len(edges)
            edges.append((vn_pos[v], cn_pos[c]))
            adj[vn_pos[v]].append((cn_pos[c], eid))
            cn_adj_local[cn_pos[c] - len(vn_ids)].append((vn_pos[v], eid))
    nodes = len(vn_ids) + len(cn_adj_local)
    full_adj = adj + cn_adj_local
    disc = [-1] * nodes
    low = [0] * nodes
    is_bridge = [False] * len(edges)
    timer = 0
    for start in range(nodes):
        if disc[start] >= 0:
            continue
        stack = [(start, -1, iter(full_adj[start]))]
        disc[start] = low[start] = timer
        timer += 1
        while stack:
            node, pedge, it = stack[-1]
            advanced = False
            for nb, eid in it:
                if eid == pedge:
                    continue
                if disc[nb] < 0:
                    disc[nb] = low[nb] = timer
                    timer += 1
                    stack.append((nb, eid, iter(full_adj[nb])))
                    advanced = True
                    break
                low[node] = min(low[node], disc[nb])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[node])
                    if low[node] > disc[parent]:
                        is_bridge[pedge] = True
    on_cycle = set()
    for eid, (vp, _) in enumerate(edges):
        if not is_bridge[eid]:
            on_cycle.add(vn_ids[vp])
    return on_cycle


def ts_closure(g: TannerGraph, vns) -> frozenset:
    """One sweep adding every outside VN that raises the induced cycle rank.

    A candidate v helps iff it meets k >= 2 induced checks spanning fewer
    than k connected components of the induced subgraph.
    """
    S = set(int(v) for v in vns)
    if not S:
        return frozenset()
    comp = {}

    def find(c):
        root = c
        while comp[root] != root:
            root = comp[root]
        while comp[c] != root:
            comp[c], c = root, comp[c]
        return root

    for v in S:
        cs = [int(c) for c in g.vn_adj[v]]
        for c in cs:
            comp.setdefault(c, c)
        for c in cs[1:]:
            comp[find(cs[0])] = find(c)
    candidates = {}
    for c in comp:
        for w in g.cn_adj[c]:
            w = int(w)
            if w not in S:
                candidates[w] = candidates.get(w, 0) + 1
    add = set()
    for w, k in candidates.items():
        if k < 2:
            continue
        comps = {find(int(c)) for c in g.vn_adj[w] if int(c) in comp}
        if k > len(comps):
            add.add(w)
    return frozenset(S | add)


def induced_odd_checks(g: TannerGraph, vns) -> tuple:
    """Checks with odd degree in the subgraph induced by the VN set."""
    deg = {}
    for v in vns:
        for c in g.vn_adj[int(v)]:
            c = int(c)
            deg[c] = deg.get(c, 0) + 1
    return tuple(sorted(c for c, d in deg.items() if d % 2))


def validate_trapping_set(g: TannerGraph, vns) -> tuple:
    """(a, b, is_fixpoint): recomputed class label and Tree-fixpoint check."""
    S = frozenset(int(v) for v in vns)
    return len(S), len(induced_odd_checks(g, S)), tree_closure(g, S) == S


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrappingSet:
    """Canonical (orbit-minimal) trapping set with its orbit multiplicity."""

    vns: tuple
    odd_checks: tuple
    orbit_size: int = 1

    @property
    def a(self) -> int:
        return len(self.vns)

    @property
    def b(self) -> int:
        return len(self.odd_checks)


def ts_sort_key(ts: TrappingSet) -> tuple:
    """Processing order: ascending b, then ascending a, then canonical VNs."""
    return (ts.b, ts.a, ts.vns)


def ts_order(t1: TrappingSet, t2: TrappingSet) -> int:
    """-1/0/1 comparison under the harm-first ordering rule."""
    k1, k2 = ts_sort_key(t1), ts_sort_key(t2)
    return -1 if k1 < k2 else (1 if k1 > k2 else 0)


@dataclass
class TsSpectrum:
    """Accumulated trapping sets keyed by canonical VN tuple."""

    sets: dict = field(default_factory=dict)
    a_max: int = 0
    b_max: int = 0
    complete: bool = True
    meta: dict = field(default_factory=dict)

    def insert(self, ts: TrappingSet) -> None:
        self.sets.setdefault(ts.vns, ts)

    def merge(self, other: "TsSpectrum") -> None:
        for ts in other.sets.values():
            self.insert(ts)
        self.complete &= other.complete

    def counts(self) -> dict:
        """(a, b) -> total multiplicity (orbit sizes summed)."""
        out = {}
        for ts in self.sets.values():
            key = (ts.a, ts.b)
            out[key] = out.get(key, 0) + ts.orbit_size
        return out

    def orbit_counts(self) -> dict:
        """(a, b) -> number of canonical sets."""
        out = {}
        for ts in self.sets.values():
            key = (ts.a, ts.b)
            out[key] = out.get(key, 0) + 1
        return out

    def classes(self) -> set:
        return {(ts.a, ts.b) for ts in self.sets.values()}

    def ordered(self) -> list:
        return sorted(self.sets.values(), key=ts_sort_key)


# ---------------------------------------------------------------------------
# Impulse trees and impulses
# ---------------------------------------------------------------------------

@dataclass
class ImpulseTree:
    """Layered neighborhoods VN1-CN1-VN2-CN2-... around a root VN."""

    root: int
    vn_layers: list
    cn_layers: list

    @property
    def depth(self) -> int:
        return len(self.cn_layers)


@dataclass(frozen=True)
class ErrorImpulse:
    """VN set whose channel LLRs are degraded to h*(1 - magnitude)."""

    vns: tuple
    magnitude: float


def build_impulse_tree(g: TannerGraph, root: int, depth: int = 3) -> ImpulseTree:
    """Breadth-first layers around the root, truncated at the given depth."""
    vn_layers = [[int(root)]]
    cn_layers = []
    seen_v = {int(root)}
    seen_c = set()
    for _ in range(depth):
        cn_next = []
        for v in vn_layers[-1]:
            for c in g.vn_adj[v]:
                c = int(c)
                if c not in seen_c:
                    seen_c.add(c)
                    cn_next.append(c)
        if not cn_next:
            break
        cn_layers.append(cn_next)
        vn_next = []
        for c in cn_next:
            for v in g.cn_adj[c]:
                v = int(v)
                if v not in seen_v:
                    seen_v.add(v)
                    vn_next.append(v)
        if vn_next:
            vn_layers.append(vn_next)
        else:
            break
    return ImpulseTree(int(root), vn_layers, cn_layers)


def generate_impulse_sets(tree: ImpulseTree, lambda_max: int,
                          budget: int | None = None, seed: int = 0) -> list:
    """Impulse VN sets in priority order, truncated to ``budget``.

    Priority: the root alone, root + one second-layer VN, branch triples
    (root, v in VN2, w in VN3 behind v), second-layer pairs, then sampled
    size-4 combinations.  Within the sampled classes a seeded permutation
    removes positional bias; the result is deterministic.
    """
    root = tree.root
    vn2 = list(tree.vn_layers[1]) if len(tree.vn_layers) > 1 else []
    vn3 = list(tree.vn_layers[2]) if len(tree.vn_layers) > 2 else []
    rng = np.random.default_rng([seed & 0x7FFFFFFF, root])
    sets = [(root,)]
    if lambda_max >= 2:
        sets.extend((root, v) for v in vn2)
    triples = []
    if lambda_max >= 3:
        triples.extend((root, v, w) for v, w in itertools.combinations(vn2, 2))
        if vn3:
            for v in vn2:
                picks = rng.choice(len(vn3), size=min(8, len(vn3)), replace=False)
                triples.extend((root, v, vn3[i]) for i in sorted(picks))
        perm = rng.permutation(len(triples))
        sets.extend(triples[i] for i in perm)
    if lambda_max >= 4 and vn2 and vn3:
        quads = []
        n_quads = min(4 * len(vn2), len(vn2) * (len(vn2) - 1) // 2)
        pairs = list(itertools.combinations(vn2, 2))
        pick_p = rng.choice(len(pairs), size=min(n_quads, len(pairs)), replace=False)
        pick_w = rng.choice(len(vn3), size=len(pick_p), replace=True)
        quads.extend((root, *pairs[i], vn3[w]) for i, w in zip(pick_p, pick_w))
        sets.extend(quads)
    uniq = []
    seen = set()
    for s in sets:
        t = tuple(sorted(set(s)))
        if t not in seen:
            seen.add(t)
            uniq.append(t)
    if budget is not None:
        uniq = uniq[:budget]
    return uniq


def generate_impulses(tree: ImpulseTree, eps_grid, lambda_max: int,
                      budget: int | None = None, seed: int = 0):
    """Each impulse set paired with every magnitude of the grid."""
    for vns in generate_impulse_sets(tree, lambda_max, budget, seed):
        for eps in eps_grid:
            yield ErrorImpulse(vns, float(eps))


# ---------------------------------------------------------------------------
# Sieve
# ---------------------------------------------------------------------------

def sieve(trace, impulse: ErrorImpulse, g: TannerGraph, girth_len: int,
          a_max: int | None = None) -> list:
    """Candidate trapping sets from a decode trace, most promising first.

    Evaluates S1 and S2 at the minimum-syndrome iteration, then at every
    recorded iteration from ceil(girth/2) on.  Empty and oversized closures
    are dropped; order is preserved and duplicates removed.
    """
    if not trace.syndrome_weights:
        return []
    start = max(1, math.ceil(girth_len / 2)) if math.isfinite(girth_len) else 1
    iters = [trace.min_syndrome_iteration] + list(range(start, trace.iterations + 1))
    base_imp = frozenset(impulse.vns)
    out = []
    seen_bases = set()
    seen = set()
    for it in iters:
        if it < 1 or it > trace.iterations:
            continue
        S = frozenset(int(v) for v in trace.errors_at(it)) | base_imp
        if S in seen_bases:
            continue
        seen_bases.add(S)
        for cand in (tree_closure(g, S), tree_closure(g, ts_closure(g, S))):
            if not cand or cand in seen:
                continue
            seen.add(cand)
            if a_max is None or len(cand) <= a_max:
                out.append(cand)
    return out


# ---------------------------------------------------------------------------
# Enumeration pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TsEnumConfig:
    a_max: int = 8
    b_max: int | None = None          # default: a_max
    eps_grid: tuple = (0.5, 1.0, 1.5, 2.0)
    depth: int = 3
    lambda_max: int | None = None     # default: max column weight
    snr_db: float = 4.0
    code_rate: float | None = None    # default: (n - m) / n from matrix shape
    max_iters: int = 20
    alpha: float = 0.75
    quantized: bool = True
    qbits: tuple = (4, 4, 6)          # llr, c2v, v2c widths when quantized
    impulse_budget_per_root: int = 700
    cycle_seeds: bool = True          # also impulse supports of cycles through the root
    cycle_seed_cap: int = 500         # per root, taken in harm (b, a) order
    deep_layer_mode: bool = False     # deepest layer gets eps*h instead of h(1-eps)
    density_adaptive: bool = True
    threads: int = 1
    seed: int = 12345
    max_decodes: int | None = None
    mem_limit_mb: int | None = None


def _cycle_seed_supports(E: ExponentMatrix, cfg: TsEnumConfig) -> dict:
    """Per block column: supports of short cycles through (col, shift 0).

    Candidate supports are ranked by the harm order (ascending b, then
    size) and capped; they are decoded as impulses alongside the blind
    tree-drawn sets, which anchors recall on cycle-built trapping sets.
    Pairwise unions of supports through the same root (overlapping cycles)
    follow, so composed trapping sets get excited as well.
    """
    L = E.L
    b_cap = (cfg.b_max if cfg.b_max is not None else cfg.a_max) + 1
    max_len = min(2 * cfg.a_max, 10)
    ranked = {}
    orbits = enumerate_chain_orbits(E, max_len, simple_only=True)
    for two_l, ch in orbits.items():
        if not len(ch):
            continue
        bs = ch.odd_check_count()
        keep = np.nonzero(bs <= b_cap)[0]
        l = two_l // 2
        for row in keep:
            cols = ch.J[row]
            shifts = ch.D[row]
            b = int(bs[row])
            for k in range(l):
                anchor = shifts[k]
                sup = tuple(sorted(
                    int(cols[i]) * L + int((shifts[i] - anchor) % L) for i in range(l)
                ))
                ranked.setdefault(int(cols[k]), {})[sup] = (b, l)
    out = {}
    for col, sups in ranked.items():
        order = sorted(sups, key=lambda s: (sups[s], s))
        pure = order[: cfg.cycle_seed_cap]
        unions = set()
        as_sets = [frozenset(s) for s in pure]
        for i in range(len(as_sets)):
            for k in range(i + 1, len(as_sets)):
                merged = as_sets[i] | as_sets[k]
                if len(merged) <= cfg.a_max:
                    tup = tuple(sorted(merged))
                    if tup not in sups:
                        unions.add(tup)
        out[col] = tuple(pure) + tuple(sorted(unions))[: cfg.cycle_seed_cap]
    return out


def _impulse_llrs(n: int, h: float, impulse: ErrorImpulse, deep_vns=()) -> np.ndarray:
    llr = np.full(n, h)
    llr[list(impulse.vns)] = h * (1.0 - impulse.magnitude)
    for v in deep_vns:
        if v not in impulse.vns:
            llr[v] = impulse.magnitude * h
    return llr


def _seed_impulses(seeds, eps_grid):
    for vns in seeds:
        for eps in eps_grid:
            yield ErrorImpulse(vns, float(eps))


def _root_worker(args):
    (root, g, Hm, cfg, h, dc, q, girth_len, lam, iter_cap, budget, L, seeds) = args
    tree = build_impulse_tree(g, root, cfg.depth)
    local = {}
    canon_cache = {}
    decodes = 0
    dc_root = replace(dc, max_iters=iter_cap)
    b_max = cfg.b_max if cfg.b_max is not None else cfg.a_max
    deep = tuple(tree.vn_layers[-1]) if cfg.deep_layer_mode and len(tree.vn_layers) > 2 else ()
    impulses = itertools.chain(
        _seed_impulses(seeds, cfg.eps_grid),
        generate_impulses(tree, cfg.eps_grid, lam, budget, cfg.seed),
    )
    for imp in impulses:
        llr = _impulse_llrs(Hm.cols, h, imp, deep)
        trace = decode(llr, Hm, dc_root, q, h=h)
        decodes += 1
        for cand in sieve(trace, imp, g, girth_len, cfg.a_max):
            raw = tuple(sorted(cand))
            key = canon_cache.get(raw)
            if key is None:
                if L:
                    canon, orbit = canonical_sets_batch(
                        np.array([raw], dtype=np.int64), L)
                    key = tuple(int(x) for x in canon[0])
                    osize = int(orbit[0])
                else:
                    key, osize = raw, 1
                canon_cache[raw] = key
                if key not in local:
                    a, b, fix = validate_trapping_set(g, key)
                    if fix and a <= cfg.a_max and b <= b_max:
                        local[key] = TrappingSet(key, induced_odd_checks(g, key), osize)
    return local, decodes


def enumerate_ts(code, config: TsEnumConfig | None = None) -> TsSpectrum:
    """Impulse-driven trapping-set enumeration.

    ``code`` is an ExponentMatrix (orbit-reduced roots, orbit-expanded
    output) or a ParityCheckMatrix (every VN is a root).  Deterministic for
    a fixed config regardless of thread count.
    """
    cfg = config or TsEnumConfig()
    t0 = time.time()
    if isinstance(code, ExponentMatrix):
        E, Hm = code, expand(code)
        L = E.L
    else:
        E, Hm = None, code
        L = 0
    g = TannerGraph.from_pcm(Hm)
    rate = cfg.code_rate if cfg.code_rate is not None else max(
        1e-3, (Hm.cols - Hm.rows) / Hm.cols)
    ch = ChannelConfig(cfg.snr_db, rate)
    dc = DecoderConfig(max_iters=cfg.max_iters, alpha=cfg.alpha)
    q = QuantizationSpec(*cfg.qbits) if cfg.quantized else None
    col_w = Hm.col_weights()
    lam = cfg.lambda_max if cfg.lambda_max is not None else int(col_w.max())
    girth_len = graph_girth(E if E is not None else g)
    if E is not None:
        roots = orbit_representatives(E)
        dense_cols = set()
        if cfg.density_adaptive:
            dens = cycle_density_per_node(E, lengths=(4,))
            dense_cols = {j for j in range(E.n) if dens.col_avg[4][j] > 0}
    else:
        roots = list(range(Hm.cols))
        dense_cols = set()
    roots = [r for r in roots if 0 < col_w[r] <= lam]
    budget = cfg.impulse_budget_per_root
    if cfg.max_decodes is not None:
        per_root = max(1, cfg.max_decodes // max(1, len(roots) * len(cfg.eps_grid)))
        budget = min(budget, per_root)
    seeds_by_col = {}
    if cfg.cycle_seeds and E is not None:
        seeds_by_col = _cycle_seed_supports(E, cfg)
    jobs = []
    for root in roots:
        col = root // L if L else root
        iter_cap = cfg.max_iters
        if cfg.density_adaptive and col in dense_cols:
            iter_cap = max(4, cfg.max_iters // 2)
        seeds = seeds_by_col.get(col, ())
        jobs.append((root, g, Hm, cfg, ch.h, dc, q, girth_len, lam, iter_cap, budget,
                     L, seeds))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            results = list(ex.map(_root_worker, jobs))
    else:
        results = [_root_worker(j) for j in jobs]
    spectrum = TsSpectrum(a_max=cfg.a_max,
                          b_max=cfg.b_max if cfg.b_max is not None else cfg.a_max)
    total_decodes = 0
    for local, decs in results:
        total_decodes += decs
        for ts in local.values():
            spectrum.insert(ts)
    if cfg.max_decodes is not None and total_decodes >= cfg.max_decodes:
        spectrum.complete = False
    spectrum.meta = {
        "decodes": total_decodes,
        "roots": len(roots),
        "seconds": round(time.time() - t0, 3),
        "girth": girth_len,
        "seed": cfg.seed,
    }
    return spectrum


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

def brute_force_ts_oracle(code, a_max: int, b_max: int | None = None) -> TsSpectrum:
    """Every trapping set with at most a_max VNs, by composing cycle supports.

    Each VN of a trapping set lies on an induced cycle no longer than
    2*a_max, so the universe is exactly the family of bounded unions of
    short-cycle VN supports.  Intended for a_max <= 5.
    """
    if a_max < 2:
        return TsSpectrum(a_max=a_max, b_max=b_max if b_max is not None else a_max)
    if isinstance(code, ExponentMatrix):
        return _oracle_qc(code, a_max, b_max)
    return _oracle_generic(code, a_max, b_max)


def _oracle_qc(E: ExponentMatrix, a_max: int, b_max: int | None) -> TsSpectrum:
    L = E.L
    g = TannerGraph.from_pcm(expand(E))
    orbits = enumerate_chain_orbits(E, 2 * a_max, simple_only=True)
    canon_sets = set()
    by_size = {}
    for two_l, ch in orbits.items():
        if not len(ch):
            continue
        vn = np.unique(np.sort(ch.vn_ids(), axis=1), axis=0)
        canon, _ = canonical_sets_batch(vn, L)
        for row in np.unique(canon, axis=0):
            key = tuple(int(x) for x in row)
            if key not in canon_sets:
                canon_sets.add(key)
                by_size.setdefault(len(key), []).append(key)

    # column index of anchored support reps, numpy-packed per block column
    slot_cols = {j: [] for j in range(E.n)}
    for size, keys in by_size.items():
        if size >= a_max:
            continue
        for key in keys:
            for v in key:
                col, s_v = divmod(v, L)
                anchored = tuple(((w // L) * L, (w % L - s_v) % L) for w in key)
                slot_cols[col].append(anchored)
    slots_np = {}
    for col, entries in slot_cols.items():
        if not entries:
            continue
        smax = max(len(e) for e in entries)
        blk = np.full((len(entries), smax), -1, dtype=np.int64)
        shf = np.zeros((len(entries), smax), dtype=np.int64)
        sizes = np.empty(len(entries), dtype=np.int64)
        for r, e in enumerate(entries):
            sizes[r] = len(e)
            for c, (b, s) in enumerate(e):
                blk[r, c] = b
                shf[r, c] = s
        slots_np[col] = (blk, shf, sizes, smax)

    small_sizes = sorted(s for s in by_size if s + 2 <= a_max)
    frontier = list(canon_sets)
    while frontier:
        raw_new = set()
        for key in frontier:
            u = len(key)
            if u >= a_max:
                continue
            U_arr = np.array(key, dtype=np.int64)
            U = frozenset(key)
            for v in key:
                col, s_v = divmod(v, L)
                if col not in slots_np:
                    continue
                blk, shf, sizes, smax = slots_np[col]
                valid = blk >= 0
                cand = blk + (shf + s_v) % L
                cand[~valid] = -1
                overlap = (np.isin(cand, U_arr) & valid).sum(axis=1)
                growth = sizes - overlap
                ok = np.nonzero((growth > 0) & (u + growth <= a_max))[0]
                for r in ok:
                    merged = U | frozenset(
                        int(x) for x in cand[r, : sizes[r]])
                    raw_new.add(tuple(sorted(merged)))
            for size in small_sizes:
                if u + size > a_max:
                    continue
                for rep in by_size[size]:
                    base = [(w // L, w % L) for w in rep]
                    for t in range(L):
                        S = frozenset(b * L + (s + t) % L for b, s in base)
                        if len(U | S) == u + size:
                            raw_new.add(tuple(sorted(U | S)))
        frontier = []
        if raw_new:
            by_len = {}
            for tup in raw_new:
                by_len.setdefault(len(tup), []).append(tup)
            for ln, tups in by_len.items():
                canon, _ = canonical_sets_batch(np.array(tups, dtype=np.int64), L)
                for row in np.unique(canon, axis=0):
                    key = tuple(int(x) for x in row)
                    if key not in canon_sets:
                        canon_sets.add(key)
                        frontier.append(key)
    return _classify_sets(g, sorted(canon_sets), L, a_max, b_max)


def _oracle_generic(Hm: ParityCheckMatrix, a_max: int, b_max: int | None) -> TsSpectrum:
    g = TannerGraph.from_pcm(Hm)
    supports = {frozenset(c.vns) for c in enumerate_cycles(g, 2 * a_max)}
    found = {fs for fs in supports if len(fs) <= a_max}
    frontier = list(found)
    small = [fs for fs in supports if len(fs) < a_max]
    while frontier:
        new = []
        for U in frontier:
            if len(U) >= a_max:
                continue
            for S in small:
                merged = U | S
                if len(merged) <= a_max and merged not in found:
                    found.add(merged)
                    new.append(merged)
        frontier = new
    keys = [tuple(sorted(fs)) for fs in found]
    return _classify_sets(g, keys, 0, a_max, b_max)


def _classify_sets(g: TannerGraph, keys: list, L: int, a_max: int,
                   b_max: int | None) -> TsSpectrum:
    bmax = b_max if b_max is not None else a_max
    spectrum = TsSpectrum(a_max=a_max, b_max=bmax)
    by_len = {}
    for key in keys:
        by_len.setdefault(len(key), []).append(key)
    for ln, group in by_len.items():
        if L:
            _, orbit = canonical_sets_batch(np.array(group, dtype=np.int64), L)
        else:
            orbit = np.ones(len(group), dtype=np.int64)
        for key, osize in zip(group, orbit):
            oc = induced_odd_checks(g, key)
            if len(oc) > bmax:
                continue
            spectrum.insert(TrappingSet(tuple(int(v) for v in key), oc, int(osize)))
    spectrum.meta = {"universe": len(keys)}
    return spectrum
