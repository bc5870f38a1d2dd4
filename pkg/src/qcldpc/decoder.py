"""AWGN/BPSK channel model and quantized normalized layered min-sum decoding.

All-zero codeword transmission with BPSK mapping 0 -> +1 is assumed
throughout (valid by decoder symmetry).  Channel LLR for a received sample
y is h*y with h = 2/sigma^2, so a noiseless bit arrives as +h.

The decoder runs a layered schedule over groups of check rows.  For QC
codes each block row is one layer; the L checks of a layer touch disjoint
variable sets, so the layer updates vectorize cleanly.  Message widths
follow the quantized design: channel LLRs at 4 bits, check-to-variable at
4 bits, variable-to-check at 6 bits; the posterior accumulates at full
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .code_model import ParityCheckMatrix


@dataclass(frozen=True)
class ChannelConfig:
    """Eb/N0 operating point for rate-R BPSK over AWGN."""

    snr_db: float
    code_rate: float

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.code_rate * 10.0 ** (self.snr_db / 10.0)))

    @property
    def h(self) -> float:
        """Channel LLR scale 2/sigma^2: the LLR magnitude of a clean bit."""
        return 2.0 / self.sigma**2


@dataclass(frozen=True)
class QuantizationSpec:
    """Uniform symmetric saturating quantizers for the three message fields.

    A field with b bits uses levels step * k, k in [-(2^(b-1)-1), 2^(b-1)-1].
    Steps default to h/6 at decode time, placing a clean channel LLR (+h)
    one level below full scale of the 4-bit input quantizer.
    """

    llr_bits: int = 4
    c2v_bits: int = 4
    v2c_bits: int = 6
    llr_step: float | None = None
    c2v_step: float | None = None
    v2c_step: float | None = None

    def resolved(self, h: float) -> "QuantizationSpec":
        base = h / 6.0
        return QuantizationSpec(
            self.llr_bits, self.c2v_bits, self.v2c_bits,
            self.llr_step if self.llr_step is not None else base,
            self.c2v_step if self.c2v_step is not None else base,
            self.v2c_step if self.v2c_step is not None else base,
        )


def quantize(x: np.ndarray, step: float, bits: int) -> np.ndarray:
    """Symmetric mid-tread quantizer: quantize(-x) == -quantize(x), saturating."""
    qmax = (1 << (bits - 1)) - 1
    return np.clip(np.rint(x / step), -qmax, qmax) * step


@dataclass(frozen=True)
class DecoderConfig:
    max_iters: int = 20
    alpha: float = 0.75
    layers: tuple | None = None  # explicit CN partition; default: QC block rows

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("normalization alpha must be in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class DecodeTrace:
    """Per-iteration decoder state used by trapping-set sieving."""

    hard_decisions: list
    syndrome_weights: list
    converged: bool
    iterations: int

    @property
    def min_syndrome_iteration(self) -> int:
        """1-indexed iteration with the smallest syndrome weight (earliest tie)."""
        return int(np.argmin(self.syndrome_weights)) + 1

    def errors_at(self, iteration: int) -> np.ndarray:
        """Indices decided 1 after the given (1-indexed) iteration."""
        return np.nonzero(self.hard_decisions[iteration - 1])[0]


def channel_llr(noise: np.ndarray, cfg: ChannelConfig) -> np.ndarray:
    """LLRs for all-zero transmission: h * (1 + n_i)."""
    return cfg.h * (1.0 + np.asarray(noise, dtype=np.float64))


class _LayerPlan:
    """Per-layer gather indices; layer k is (vn_idx (C, d), pad mask, unique flag)."""

    def __init__(self, Hm: ParityCheckMatrix, layers):
        self.layers = []
        for cns in layers:
            cns = [c for c in cns if len(Hm.row_adj[c])]
            if not cns:
                continue
            degs = {len(Hm.row_adj[c]) for c in cns}
            d = max(degs)
            if len(degs) == 1:
                vn = np.vstack([Hm.row_adj[c] for c in cns]).astype(np.int64)
                pad = None
            else:
                vn = np.zeros((len(cns), d), dtype=np.int64)
                pad = np.ones((len(cns), d), dtype=bool)
                for r, c in enumerate(cns):
                    adj = Hm.row_adj[c]
                    vn[r, : len(adj)] = adj
                    pad[r, : len(adj)] = False
            unique = len(np.unique(vn if pad is None else vn[~pad])) == (
                vn.size if pad is None else int((~pad).sum())
            )
            self.layers.append((vn, pad, unique))


def _default_layers(Hm: ParityCheckMatrix):
    L = Hm.circulant_size
    if L:
        return [tuple(range(i * L, (i + 1) * L)) for i in range(Hm.rows // L)]
    return [tuple(range(Hm.rows))]


def _plan_for(Hm: ParityCheckMatrix, dc: DecoderConfig) -> _LayerPlan:
    cache = getattr(Hm, "_decoder_plans", None)
    if cache is None:
        cache = {}
        Hm._decoder_plans = cache
    key = dc.layers
    plan = cache.get(key)
    if plan is None:
        layers = dc.layers if dc.layers is not None else _default_layers(Hm)
        plan = _LayerPlan(Hm, layers)
        cache[key] = plan
    return plan


def decode(llr: np.ndarray, Hm: ParityCheckMatrix, dc: DecoderConfig | None = None,
           q: QuantizationSpec | None = None, h: float | None = None) -> DecodeTrace:
    """Layered normalized min-sum with optional message quantization.

    ``q=None`` disables quantization.  ``h`` anchors the default quantizer
    steps; if omitted, the largest input magnitude is used.  Returns the
    full per-iteration trace; exits early once the syndrome clears.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if dc is None:
        dc = DecoderConfig()
    if llr.shape != (Hm.cols,):
        raise ValueError(f"LLR length {llr.shape} does not match code length {Hm.cols}")
    plan = _plan_for(Hm, dc)
    if q is not None:
        anchor = h if h is not None else float(np.abs(llr).max())
        q = q.resolved(anchor if anchor > 0 else 1.0)
        post = quantize(llr, q.llr_step, q.llr_bits)
    else:
        post = llr.copy()
    c2v = [np.zeros(vn.shape) for vn, _, _ in plan.layers]
    hard_decisions, syndrome_weights = [], []
    converged = False
    it = 0
    for it in range(1, dc.max_iters + 1):
        for k, (vn, pad, unique) in enumerate(plan.layers):
            v2c = post[vn] - c2v[k]
            if q is not None:
                v2c = quantize(v2c, q.v2c_step, q.v2c_bits)
            mag = np.abs(v2c)
            neg = v2c < 0
            if pad is not None:
                mag[pad] = np.inf
                neg[pad] = False
            sgn_all = 1 - 2 * (neg.sum(axis=1, keepdims=True) % 2)
            sgn_excl = sgn_all * (1 - 2 * neg)
            if mag.shape[1] >= 2:
                order = np.argsort(mag, axis=1)
                ridx = np.arange(mag.shape[0])
                min1 = mag[ridx, order[:, 0]][:, None]
                min2 = mag[ridx, order[:, 1]][:, None]
                extr = np.where(
                    np.arange(mag.shape[1])[None, :] == order[:, 0][:, None], min2, min1
                )
            else:
                extr = np.zeros_like(mag)  # degree-1 check carries no extrinsic info
            extr = np.where(np.isfinite(extr), extr, 0.0)
            new = dc.alpha * sgn_excl * extr
            if q is not None:
                new = quantize(new, q.c2v_step, q.c2v_bits)
            if pad is not None:
                new[pad] = 0.0
            delta = new - c2v[k]
            if unique:
                post[vn.ravel()] += delta.ravel()
            else:
                np.add.at(post, vn.ravel(), delta.ravel())
            c2v[k] = new
        decision = post < 0
        hard_decisions.append(decision)
        w = syndrome_weight(decision, Hm)
        syndrome_weights.append(w)
        if w == 0:
            converged = True
            break
    return DecodeTrace(hard_decisions, syndrome_weights, converged, it)


def _syndrome_arrays(Hm: ParityCheckMatrix):
    arrays = getattr(Hm, "_syndrome_arrays", None)
    if arrays is None:
        if Hm.ones_count:
            cn = np.concatenate(
                [np.full(len(a), i, dtype=np.int64) for i, a in enumerate(Hm.row_adj)]
            )
            vn = np.concatenate([np.asarray(a, dtype=np.int64) for a in Hm.row_adj])
        else:
            cn = vn = np.empty(0, dtype=np.int64)
        arrays = (cn, vn)
        Hm._syndrome_arrays = arrays
    return arrays


def syndrome_weight(decision: np.ndarray, Hm: ParityCheckMatrix) -> int:
    """Number of unsatisfied parity checks for a hard-decision word."""
    decision = np.asarray(decision)
    if decision.shape != (Hm.cols,):
        raise ValueError("decision length does not match code length")
    cn, vn = _syndrome_arrays(Hm)
    sums = np.zeros(Hm.rows, dtype=np.int64)
    np.add.at(sums, cn, decision[vn].astype(np.int64))
    return int((sums % 2 != 0).sum())
