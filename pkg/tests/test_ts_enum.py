import itertools

import numpy as np

from qcldpc.code_model import ExponentMatrix, expand
from qcldpc.decoder import ChannelConfig, DecoderConfig, QuantizationSpec, decode
from qcldpc.graph_analysis import TannerGraph, expand_orbit, shift_node_set
from qcldpc.ts_enum import (
    ErrorImpulse,
    TrappingSet,
    TsEnumConfig,
    build_impulse_tree,
    brute_force_ts_oracle,
    enumerate_ts,
    generate_impulse_sets,
    induced_odd_checks,
    sieve,
    tree_closure,
    ts_closure,
    ts_order,
    ts_sort_key,
    validate_trapping_set,
    _impulse_llrs,
)

PAIR = (0, 2 * 128 + 47)  # one member of code-1's unique 4-cycle orbit


# ---------------------------------------------------------------------------
# closures
# ---------------------------------------------------------------------------

def test_tree_closure_keeps_cycle(code1_graph):
    assert tree_closure(code1_graph, PAIR) == frozenset(PAIR)


def test_tree_closure_kills_path(code1_graph):
    # two VNs sharing at most one check form a tree
    assert tree_closure(code1_graph, (0, 128 + 5)) == frozenset()


def test_tree_closure_prunes_pendant(code1_graph):
    assert tree_closure(code1_graph, PAIR + (7 * 128 + 9,)) == frozenset(PAIR)


def test_tree_closure_empty(code1_graph):
    assert tree_closure(code1_graph, ()) == frozenset()


def test_tree_closure_drops_bridge_between_cycles(code1_graph):
    # two shifted 4-cycle pairs plus a VN joining them through single checks:
    # the bridge VN is on no induced cycle and must go
    bridged = (0, 2 * 128 + 47, 1, 2 * 128 + 48, 1 * 128 + 96)
    out = tree_closure(code1_graph, bridged)
    assert out == frozenset(bridged) - {1 * 128 + 96}


def test_tree_closure_properties_random(code1_graph, rng):
    n = code1_graph.vn_count
    for _ in range(200):
        size = int(rng.integers(1, 12))
        S = frozenset(int(v) for v in rng.choice(n, size=size, replace=False))
        T = tree_closure(code1_graph, S)
        assert T <= S
        assert tree_closure(code1_graph, T) == T
    # idempotence + containment on structured sets too
    T = tree_closure(code1_graph, PAIR)
    assert tree_closure(code1_graph, T) == T


def test_ts_closure_empty(code1_graph):
    assert ts_closure(code1_graph, ()) == frozenset()


def test_ts_closure_extensive_random(code1_graph, rng):
    n = code1_graph.vn_count
    for _ in range(100):
        S = frozenset(int(v) for v in rng.choice(n, size=6, replace=False))
        assert S <= ts_closure(code1_graph, S)


def test_ts_closure_adds_cycle_closer(code1, code1_graph):
    # two VNs of a 6-cycle: the third meets two checks of their component
    found = brute_force_ts_oracle(code1, a_max=3, b_max=9)
    tri = next(ts.vns for ts in found.sets.values() if ts.a == 3)
    for partial in itertools.combinations(tri, 2):
        closed = ts_closure(code1_graph, partial)
        assert frozenset(tri) <= closed


def test_ts_closure_identity_when_saturated(code1_graph):
    # the 4-cycle pair: no single VN adds a new independent cycle... compute one
    out = ts_closure(code1_graph, PAIR)
    assert frozenset(PAIR) <= out
    # whatever is added must raise the cycle rank; re-running is stable modulo
    # the single-sweep contract
    again = ts_closure(code1_graph, out)
    assert out <= again


def test_validate_recomputes_b(code1_graph):
    a, b, fix = validate_trapping_set(code1_graph, PAIR)
    assert (a, b, fix) == (2, 2, True)
    assert len(induced_odd_checks(code1_graph, PAIR)) == 2


# ---------------------------------------------------------------------------
# impulse trees and impulses
# ---------------------------------------------------------------------------

def test_impulse_tree_single_check_code():
    g = TannerGraph(vn_adj=[[0], [0], [0]], cn_adj=[[0, 1, 2]])
    tree = build_impulse_tree(g, 0, depth=3)
    assert tree.vn_layers[0] == [0]
    assert sorted(tree.vn_layers[1]) == [1, 2]
    assert len(tree.vn_layers) == 2  # nothing beyond the second layer


def test_impulse_tree_root_degree(code1_graph):
    tree = build_impulse_tree(code1_graph, 3 * 128, depth=3)  # weight-4 column
    assert len(tree.cn_layers[0]) == 4


def test_impulse_tree_depth_zero(code1_graph):
    tree = build_impulse_tree(code1_graph, 5, depth=0)
    assert tree.vn_layers == [[5]] and tree.cn_layers == []


def test_impulse_llrs_magnitudes():
    imp = ErrorImpulse((1, 3), 1.0)
    llr = _impulse_llrs(6, 8.0, imp)
    assert llr[1] == llr[3] == 0.0  # eps=1: erasure
    assert (llr[[0, 2, 4, 5]] == 8.0).all()
    llr = _impulse_llrs(6, 8.0, ErrorImpulse((2,), 2.0))
    assert llr[2] == -8.0  # eps=2: hard flip


def test_impulse_sets_budget_and_determinism(code1_graph):
    tree = build_impulse_tree(code1_graph, 0, depth=3)
    a = generate_impulse_sets(tree, lambda_max=4, budget=50, seed=9)
    b = generate_impulse_sets(tree, lambda_max=4, budget=50, seed=9)
    assert a == b and len(a) == 50
    assert a[0] == (0,)
    assert all(0 in s for s in a)
    assert all(len(s) <= 4 for s in a)


# ---------------------------------------------------------------------------
# ordering
# ---------------------------------------------------------------------------

def _ts(a, b, tag=0):
    return TrappingSet(tuple(range(tag, tag + a)), tuple(range(b)), 1)


def test_ts_order_examples():
    assert ts_order(_ts(5, 3), _ts(5, 5)) == -1
    assert ts_order(_ts(4, 4), _ts(5, 4)) == -1
    assert ts_order(_ts(3, 3, tag=0), _ts(3, 3, tag=5)) == -1  # lexicographic tie-break
    assert ts_order(_ts(4, 4), _ts(4, 4)) == 0


def test_ts_sort_key_ascending_b_then_a():
    sloppy = [_ts(5, 5), _ts(2, 2), _ts(5, 3), _ts(4, 4)]
    ordered = sorted(sloppy, key=ts_sort_key)
    assert [(t.a, t.b) for t in ordered] == [(2, 2), (5, 3), (4, 4), (5, 5)]


# ---------------------------------------------------------------------------
# sieve
# ---------------------------------------------------------------------------

def test_sieve_clean_trace_is_empty(code1_pcm, code1_graph):
    ch = ChannelConfig(4.0, 0.8)
    llr = np.full(code1_pcm.cols, ch.h)
    trace = decode(llr, code1_pcm, DecoderConfig(), QuantizationSpec(), h=ch.h)
    out = sieve(trace, ErrorImpulse((), 0.0), code1_graph, 4)
    assert out == []


def test_sieve_finds_planted_trapping_set(code1, code1_pcm, code1_graph):
    # plant a hard flip on a known TS(4,4): an 8-cycle support with b = 4
    oracle = brute_force_ts_oracle(code1, a_max=4, b_max=4)
    target = next(ts.vns for ts in oracle.sets.values() if (ts.a, ts.b) == (4, 4))
    ch = ChannelConfig(4.0, 0.8)
    imp = ErrorImpulse(tuple(target), 2.0)
    llr = _impulse_llrs(code1_pcm.cols, ch.h, imp)
    trace = decode(llr, code1_pcm, DecoderConfig(), QuantizationSpec(), h=ch.h)
    cands = sieve(trace, imp, code1_graph, 4)
    assert frozenset(target) in cands


def test_sieve_tree_impulse_yields_no_pure_tree(code1_pcm, code1_graph):
    # an acyclic impulse set can only produce candidates that close a cycle
    ch = ChannelConfig(4.0, 0.8)
    imp = ErrorImpulse((0, 128 + 5), 2.0)  # two VNs sharing no two checks
    llr = _impulse_llrs(code1_pcm.cols, ch.h, imp)
    trace = decode(llr, code1_pcm, DecoderConfig(), QuantizationSpec(), h=ch.h)
    for cand in sieve(trace, imp, code1_graph, 4):
        a, b, fix = validate_trapping_set(code1_graph, cand)
        assert fix


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def test_oracle_single_four_cycle_toy(toy_4cycle):
    spec = brute_force_ts_oracle(toy_4cycle, a_max=2)
    assert spec.orbit_counts() == {(2, 0): 1}
    assert spec.counts() == {(2, 0): 3}


def test_oracle_tree_graph_empty():
    E = ExponentMatrix(np.array([[0, 1]]), 3)  # weight-1 columns
    assert brute_force_ts_oracle(E, a_max=4).sets == {}


def test_oracle_matches_exhaustive_subsets(rng):
    for _ in range(6):
        m, n = rng.integers(2, 4), rng.integers(3, 5)
        L = int(rng.integers(2, 6))
        E = ExponentMatrix(rng.integers(-1, L, size=(m, n)), L)
        H = expand(E)
        g = TannerGraph.from_pcm(H)
        a_max = 4 if H.cols <= 16 else 3
        direct = {}
        for a in range(2, a_max + 1):
            for S in itertools.combinations(range(H.cols), a):
                fs = frozenset(S)
                if tree_closure(g, fs) == fs:
                    direct[tuple(sorted(fs))] = len(induced_odd_checks(g, fs))
        spec = brute_force_ts_oracle(E, a_max=a_max, b_max=99)
        expanded = {}
        for ts in spec.sets.values():
            for img in expand_orbit(ts.vns, L):
                expanded[tuple(sorted(img))] = ts.b
        assert direct == expanded


def test_oracle_generic_matches_qc(toy_4cycle):
    qc = brute_force_ts_oracle(toy_4cycle, a_max=2)
    gen = brute_force_ts_oracle(expand(toy_4cycle), a_max=2)
    assert qc.counts() == gen.counts()


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

SMALL_CFG = dict(a_max=3, b_max=5, impulse_budget_per_root=40,
                 eps_grid=(1.0, 2.0), max_iters=8)


def test_enumerate_ts_finds_code1_small_classes(code1):
    spec = enumerate_ts(code1, TsEnumConfig(**SMALL_CFG))
    counts = spec.counts()
    assert counts[(2, 2)] == 128
    assert counts[(3, 2)] == 128


def test_enumerate_ts_validates_all_emitted(code1, code1_graph):
    spec = enumerate_ts(code1, TsEnumConfig(**SMALL_CFG))
    for ts in spec.sets.values():
        a, b, fix = validate_trapping_set(code1_graph, ts.vns)
        assert fix and (a, b) == (ts.a, ts.b)
        assert ts.odd_checks == induced_odd_checks(code1_graph, ts.vns)


def test_enumerate_ts_orbit_consistency(code1, code1_graph):
    spec = enumerate_ts(code1, TsEnumConfig(**SMALL_CFG))
    L = 128
    for ts in list(spec.sets.values())[:20]:
        shifted = shift_node_set(ts.vns, L, 7)
        a, b, fix = validate_trapping_set(code1_graph, shifted)
        assert fix and (a, b) == (ts.a, ts.b)


def test_enumerate_ts_thread_determinism(code1):
    runs = []
    for threads in (1, 4):
        cfg = TsEnumConfig(threads=threads, **SMALL_CFG)
        spec = enumerate_ts(code1, cfg)
        runs.append(sorted((ts.vns, ts.odd_checks, ts.orbit_size)
                           for ts in spec.sets.values()))
    assert runs[0] == runs[1]


def test_enumerate_ts_budget_flags_partial(code1):
    cfg = TsEnumConfig(a_max=3, b_max=3, max_decodes=10, cycle_seeds=False,
                       eps_grid=(2.0,), impulse_budget_per_root=40)
    spec = enumerate_ts(code1, cfg)
    assert not spec.complete


def test_enumerate_ts_tree_tanner_graph_empty():
    E = ExponentMatrix(np.array([[0, 1]]), 3)
    spec = enumerate_ts(E, TsEnumConfig(a_max=3, impulse_budget_per_root=5))
    assert spec.sets == {}


def test_enumerate_ts_accepts_pcm(toy_4cycle):
    spec = enumerate_ts(expand(toy_4cycle),
                        TsEnumConfig(a_max=2, b_max=2, impulse_budget_per_root=10))
    assert (2, 0) in spec.classes()
