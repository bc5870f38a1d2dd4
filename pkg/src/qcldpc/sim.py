"""Direct Monte-Carlo BER/FER simulation over the AWGN/BPSK channel.

All-zero transmission (valid by decoder symmetry); every frame's noise
comes from a counter-based stream keyed by (seed, SNR index, frame index),
so results are byte-identical for any worker count.  Frames run in fixed
batches and the stop rule is evaluated at batch boundaries only, keeping
the set of simulated frames deterministic.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .code_model import ParityCheckMatrix
from .decoder import ChannelConfig, DecoderConfig, QuantizationSpec, channel_llr, decode
from .error_floor import substream


@dataclass
class SimPoint:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    ci_lo: float
    ci_hi: float
    seconds: float
    stopped_early: bool  # stop target reached (vs budget exhausted)


@dataclass
class SimResult:
    points: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _wilson(k: int, n: int, z: float = 1.96):
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1 + z * z / n
    center = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, center - half), min(1.0, center + half)


def _frame(Hm, ch, dc, q, seed, snr_idx, frame_idx):
    rng = substream(seed, 2, snr_idx, frame_idx)
    noise = rng.normal(0.0, ch.sigma, Hm.cols)
    trace = decode(channel_llr(noise, ch), Hm, dc, q, h=ch.h)
    decision = trace.hard_decisions[-1]
    nerr = int(decision.sum())
    frame_bad = (not trace.converged) or nerr > 0
    return (nerr if frame_bad else 0), frame_bad


def simulate(Hm: ParityCheckMatrix, snr_grid, dc: DecoderConfig | None = None,
             q: QuantizationSpec | None = None, code_rate: float | None = None,
             target_frame_errors: int = 200, max_frames: int | None = 100_000,
             seed: int = 12345, threads: int = 1, batch: int = 64,
             progress=None) -> SimResult:
    """Accumulate frame errors per SNR until the stop target or the budget.

    ``progress``: optional callback fed each completed SimPoint.
    """
    dc = dc or DecoderConfig()
    q = q if q is not None else QuantizationSpec()
    rate = code_rate if code_rate is not None else max(1e-3, (Hm.cols - Hm.rows) / Hm.cols)
    result = SimResult(meta={"seed": seed, "target_frame_errors": target_frame_errors,
                             "max_frames": max_frames, "code_rate": rate})
    for snr_idx, snr in enumerate(snr_grid):
        ch = ChannelConfig(float(snr), rate)
        t0 = time.time()
        frames = frame_errors = bit_errors = 0
        budget = max_frames if max_frames is not None else (1 << 62)
        stopped = False
        while frames < budget:
            nbatch = min(batch, budget - frames)
            idx = range(frames, frames + nbatch)
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as ex:
                    rows = list(ex.map(
                        lambda i: _frame(Hm, ch, dc, q, seed, snr_idx, i), idx))
            else:
                rows = [_frame(Hm, ch, dc, q, seed, snr_idx, i) for i in idx]
            for nerr, bad in rows:
                bit_errors += nerr
                frame_errors += int(bad)
            frames += nbatch
            if target_frame_errors and frame_errors >= target_frame_errors:
                stopped = True
                break
        fer = frame_errors / frames if frames else 0.0
        ber = bit_errors / (frames * Hm.cols) if frames else 0.0
        lo, hi = _wilson(frame_errors, frames)
        point = SimPoint(float(snr), frames, frame_errors, bit_errors, fer, ber,
                         lo, hi, round(time.time() - t0, 3), stopped)
        result.points.append(point)
        if progress:
            progress(point)
    return result
