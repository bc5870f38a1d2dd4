"""Trapping-set failure weighting by importance sampling and floor prediction.

Each trapping-set class is weighted by its decoder-failure probability,
estimated with mean-shifted importance sampling: the Gaussian channel noise
is biased toward the error region of the set's variable nodes, and every
sample is reweighted by the exact density ratio, keeping the estimator
unbiased.  Class estimates combine into a frame-error floor (union bound
over multiplicities) and a bit-error floor (multiplicity * a/n weighting).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .code_model import ParityCheckMatrix
from .decoder import ChannelConfig, DecoderConfig, QuantizationSpec, decode
from .ts_enum import TrappingSet

_MASK64 = (1 << 64) - 1


def _mix(*parts) -> int:
    """Deterministic 64-bit mix of integer parts (no str hashing involved)."""
    acc = 0x9E3779B97F4A7C15
    for p in parts:
        acc ^= (int(p) & _MASK64) + 0x9E3779B97F4A7C15 + ((acc << 6) & _MASK64) + (acc >> 2)
        acc &= _MASK64
    return acc


def substream(seed: int, *key) -> np.random.Generator:
    """Counter-based substream keyed by integers; order- and thread-agnostic."""
    words = np.array([seed & _MASK64, _mix(*key)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=words))


@dataclass
class TsFailureEstimate:
    """Importance-sampled failure probability of one trapping-set class."""

    a: int
    b: int
    vns: tuple
    snr_db: float
    p_hat: float
    rel_std: float
    std_err: float
    n_samples: int
    n_failures: int
    mu: float
    reliable: bool


@dataclass
class ErrorFloorPrediction:
    """Per-SNR floor estimates with the per-class contribution breakdown."""

    snr_db: np.ndarray
    fer_floor: np.ndarray
    ber_floor: np.ndarray
    contributions: dict = field(default_factory=dict)  # (a, b) -> per-SNR array
    contribution_stds: dict = field(default_factory=dict)
    excluded: list = field(default_factory=list)

    def total_std(self) -> np.ndarray:
        """Combined standard error of the floor across classes."""
        if not self.contribution_stds:
            return np.zeros_like(self.fer_floor)
        return np.sqrt(sum(s**2 for s in self.contribution_stds.values()))


def shifted_gaussian_event_probability(event, dims: int, sigma: float,
                                       shift_coords, mu: float, n_samples: int,
                                       rng: np.random.Generator,
                                       batch: int = 2048):
    """Unbiased IS estimate of P(event(y)) for y ~ N(+1, sigma^2 I).

    The biasing density moves the mean to 1 - mu on ``shift_coords``; a
    sample's log-weight is sum_i [mu (y_i - 1) + mu^2 / 2] / sigma^2 over
    the shifted coordinates.  Standard normals are drawn before scaling by
    sigma, so a shared ``rng`` gives common random numbers across SNRs.
    Returns (p_hat, std_err, n_failures).
    """
    shift_coords = np.asarray(list(shift_coords), dtype=np.int64)
    total_w = 0.0
    total_w2 = 0.0
    n_fail = 0
    done = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        z = rng.standard_normal(size=(b, dims))
        y = 1.0 + sigma * z
        y[:, shift_coords] -= mu
        hit = np.asarray(event(y), dtype=bool)
        if hit.any():
            dy = y[hit][:, shift_coords] - 1.0
            logw = (mu * dy.sum(axis=1) + 0.5 * mu * mu * len(shift_coords)) / sigma**2
            w = np.exp(logw)
            total_w += float(w.sum())
            total_w2 += float((w * w).sum())
            n_fail += int(hit.sum())
        done += b
    p_hat = total_w / n_samples
    var = max(total_w2 / n_samples - p_hat**2, 0.0) / n_samples
    return p_hat, math.sqrt(var), n_fail


def is_weight_ts(Hm: ParityCheckMatrix, ts: TrappingSet, channel: ChannelConfig,
                 dc: DecoderConfig | None = None, q: QuantizationSpec | None = None,
                 n_samples: int = 2000, seed: int = 0, mu: float | None = None,
                 overlap_frac: float = 0.5, mu_grid=(1.0, 1.5, 2.0, 2.5),
                 pilot: int = 96) -> TsFailureEstimate:
    """Failure probability of one trapping set under biased channel noise.

    Failure: the decoder fails to converge or converges to a wrong word,
    with the final error support covering at least ``overlap_frac`` of the
    set.  ``mu=None`` picks the shift by a coarse pilot line search that
    maximizes the failure rate under the biasing density.  The main
    estimate draws from a substream keyed by (seed, class) only, so a
    sweep over SNRs sees common random numbers.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100 for a usable estimate")
    dc = dc or DecoderConfig()
    q = q if q is not None else QuantizationSpec()
    vns = np.asarray(ts.vns, dtype=np.int64)
    need = max(1, math.ceil(overlap_frac * len(vns)))
    h = channel.h

    def event(y_batch):
        out = np.empty(len(y_batch), dtype=bool)
        for i, y in enumerate(y_batch):
            trace = decode(h * y, Hm, dc, q, h=h)
            decision = trace.hard_decisions[-1]
            failed = (not trace.converged) or bool(decision.any())
            out[i] = failed and int(decision[vns].sum()) >= need
        return out

    key = _mix(*ts.vns)
    if mu is None:
        best = (-1.0, mu_grid[0])
        for m_try in mu_grid:
            rng = substream(seed, key, 1, int(m_try * 64))
            _, _, fails = shifted_gaussian_event_probability(
                event, Hm.cols, channel.sigma, vns, m_try, pilot, rng)
            rate = fails / pilot
            if rate > best[0]:
                best = (rate, m_try)
        mu = best[1]
    rng = substream(seed, key, 0)
    p_hat, std, n_fail = shifted_gaussian_event_probability(
        event, Hm.cols, channel.sigma, vns, mu, n_samples, rng)
    rel = std / p_hat if p_hat > 0 else math.inf
    return TsFailureEstimate(
        a=ts.a, b=ts.b, vns=ts.vns, snr_db=channel.snr_db, p_hat=p_hat,
        rel_std=rel, std_err=std, n_samples=n_samples, n_failures=n_fail,
        mu=float(mu), reliable=n_fail > 0,
    )


def _assemble(class_rows, snr_grid, n_bits, ber: bool):
    snr_grid = np.asarray(snr_grid, dtype=float)
    total = np.zeros(len(snr_grid))
    contributions = {}
    stds = {}
    excluded = []
    for (a, b), mult, estimates in class_rows:
        ps = np.array([e.p_hat for e in estimates])
        ss = np.array([e.std_err for e in estimates])
        if any(not e.reliable for e in estimates):
            excluded.append((a, b))
            continue
        weight = mult * (a / n_bits if ber else 1.0)
        contributions[(a, b)] = weight * ps
        stds[(a, b)] = weight * ss
        total += weight * ps
    return total, contributions, stds, excluded


def fer_union_bound(class_rows, snr_grid, n_bits: int) -> ErrorFloorPrediction:
    """Frame-error floor: sum over classes of multiplicity * p_hat(snr).

    ``class_rows`` is a list of ((a, b), multiplicity, [TsFailureEstimate
    per SNR]) tuples; classes with an unreliable estimate at any SNR are
    excluded and reported.
    """
    fer, contribs, stds, excl = _assemble(class_rows, snr_grid, n_bits, ber=False)
    return ErrorFloorPrediction(
        snr_db=np.asarray(snr_grid, dtype=float), fer_floor=fer,
        ber_floor=np.zeros_like(fer), contributions=contribs,
        contribution_stds=stds, excluded=excl)


def ber_linear_model(class_rows, snr_grid, n_bits: int) -> ErrorFloorPrediction:
    """Bit-error floor: sum of multiplicity * (a / n) * p_hat(snr)."""
    ber, contribs, stds, excl = _assemble(class_rows, snr_grid, n_bits, ber=True)
    return ErrorFloorPrediction(
        snr_db=np.asarray(snr_grid, dtype=float), fer_floor=np.zeros_like(ber),
        ber_floor=ber, contributions=contribs, contribution_stds=stds,
        excluded=excl)


def predict_floors(Hm: ParityCheckMatrix, spectrum, snr_grid, code_rate: float,
                   n_samples: int = 2000, seed: int = 0,
                   dc: DecoderConfig | None = None,
                   q: QuantizationSpec | None = None,
                   max_classes: int | None = None) -> ErrorFloorPrediction:
    """Weight one representative per class over an SNR grid, then combine.

    All members of a shift orbit fail with the same probability, so each
    class is estimated on its first canonical representative (harm order)
    and weighted by the class multiplicity from the spectrum.
    """
    reps = {}
    for ts in spectrum.ordered():
        key = (ts.a, ts.b)
        if key not in reps:
            reps[key] = [ts, 0]
        reps[key][1] += ts.orbit_size
    items = list(reps.items())
    if max_classes is not None:
        items = items[:max_classes]
    class_rows = []
    for key, (ts, mult) in items:
        mu = None
        estimates = []
        for snr in snr_grid:
            ch = ChannelConfig(float(snr), code_rate)
            est = is_weight_ts(Hm, ts, ch, dc=dc, q=q, n_samples=n_samples,
                               seed=seed, mu=mu)
            mu = est.mu  # pin the pilot-selected shift across the grid
            estimates.append(est)
        class_rows.append((key, mult, estimates))
    fer = fer_union_bound(class_rows, snr_grid, Hm.cols)
    ber = ber_linear_model(class_rows, snr_grid, Hm.cols)
    return ErrorFloorPrediction(
        snr_db=np.asarray(list(snr_grid), dtype=float),
        fer_floor=fer.fer_floor, ber_floor=ber.ber_floor,
        contributions=dict(fer.contributions),
        contribution_stds=dict(fer.contribution_stds), excluded=fer.excluded)
