"""Seeded Monte Carlo estimation of the secrecy metrics.

Trials map to a counter-based random stream (Philox) in fixed-size blocks
of uniforms, so trial i always consumes the same stream slice no matter
how the run is partitioned.  Estimates are therefore bit-identical across
block sizes and across splitting a run into shards, which is what lets
long sweeps be resumed or distributed without drift.

Per-trial layout (stream order): k destination-channel uniforms, then k
eavesdropper-channel uniforms, then k backhaul-gate uniforms, padded to a
multiple of four because the counter advances in four-word steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .params import KnowledgeMode, Metric, Scheme, SystemParams, secrecy_rate

DEFAULT_BLOCK = 1 << 16
_WORDS_PER_COUNTER_STEP = 4


def trial_stride(k: int) -> int:
    """Uniforms reserved per trial: 3k, rounded up to a counter boundary."""
    needed = 3 * k
    return -(-needed // _WORDS_PER_COUNTER_STEP) * _WORDS_PER_COUNTER_STEP


def uniform_block(seed: int, k: int, start: int, count: int) -> np.ndarray:
    """Uniforms for trials [start, start + count), shape (count, 3k).

    Each 64-bit draw consumes one stream word, so jumping to trial `start`
    is an exact counter advance; the per-trial padding is generated and
    discarded to keep trial boundaries aligned.
    """
    stride = trial_stride(k)
    bits = Philox(key=seed)
    bits.advance(start * stride // _WORDS_PER_COUNTER_STEP)
    u = Generator(bits).random(count * stride).reshape(count, stride)
    return u[:, : 3 * k]


@dataclass(frozen=True)
class ChannelRealization:
    """One trial's channel state: per-transmitter gains and gate states."""

    gain_d: tuple[float, ...]
    gain_e: tuple[float, ...]
    active: tuple[bool, ...]


@dataclass(frozen=True)
class SelectionOutcome:
    """Result of applying a selection scheme to one realization.

    `selected` is None when gate knowledge is available and every gate is
    down (nothing transmits).  `rate` is the achieved secrecy rate, zero
    whenever nothing is transmitted or the selected gate turns out dead.
    """

    selected: int | None
    transmitted: bool
    rate: float


@dataclass(frozen=True)
class MetricEstimate:
    metric: Metric
    value: float
    std_err: float
    trials: int
    seed: int


def realization_from_uniforms(p: SystemParams, row: np.ndarray) -> ChannelRealization:
    """Map one trial's uniform row to gains and gates (inverse-CDF)."""
    k = p.k
    gain_d = tuple(-math.log1p(-u) / p.lambda_d for u in row[:k])
    gain_e = tuple(-math.log1p(-u) / p.lambda_e for u in row[k : 2 * k])
    active = tuple(bool(u < p.delta) for u in row[2 * k : 3 * k])
    return ChannelRealization(gain_d, gain_e, active)


def sample_realization(p: SystemParams, seed: int, trial: int) -> ChannelRealization:
    """Realization for one trial index on the given stream."""
    row = uniform_block(seed, p.k, trial, 1)[0]
    return realization_from_uniforms(p, row)


def _score(scheme: Scheme, p: SystemParams, g_d: float, g_e: float) -> float:
    if scheme is Scheme.RTS:
        return g_d / g_e if g_e > 0.0 else math.inf
    if scheme is Scheme.TTS:
        return g_d
    if scheme is Scheme.MIN_ES:
        return -g_e
    return secrecy_rate(g_d, g_e, p.sigma_d, p.sigma_e)


def select(
    p: SystemParams, scheme: Scheme, mode: KnowledgeMode, real: ChannelRealization
) -> SelectionOutcome:
    """Scalar reference selection; ties resolve to the lowest index."""
    indices = range(p.k)
    if mode is KnowledgeMode.AVAILABLE:
        candidates = [i for i in indices if real.active[i]]
        if not candidates:
            return SelectionOutcome(None, False, 0.0)
    else:
        candidates = list(indices)
    best = max(candidates, key=lambda i: _score(scheme, p, real.gain_d[i], real.gain_e[i]))
    if not real.active[best]:
        return SelectionOutcome(best, True, 0.0)
    rate = secrecy_rate(real.gain_d[best], real.gain_e[best], p.sigma_d, p.sigma_e)
    return SelectionOutcome(best, True, rate)


def _block_outcomes(
    p: SystemParams, scheme: Scheme, mode: KnowledgeMode, u: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized selection over a block of uniform rows.

    Returns (rates, transmitted, outage).  Mirrors `select` exactly: same
    gain mapping, same scores, and argmax ties resolving to the lowest
    index.  The outage indicator compares the unclamped rate to the
    threshold, so equality at the clamp (an atom when the threshold is
    zero) stays a measure-zero boundary; dead or silent trials always
    count as outages.
    """
    k = p.k
    g_d = -np.log1p(-u[:, :k]) / p.lambda_d
    g_e = -np.log1p(-u[:, k : 2 * k]) / p.lambda_e
    active = u[:, 2 * k : 3 * k] < p.delta

    if scheme is Scheme.RTS:
        with np.errstate(divide="ignore"):
            score = np.where(g_e > 0.0, g_d / np.where(g_e > 0.0, g_e, 1.0), np.inf)
    elif scheme is Scheme.TTS:
        score = g_d
    elif scheme is Scheme.MIN_ES:
        score = -g_e
    else:
        score = np.maximum(
            np.log2((1.0 + g_d / p.sigma_d) / (1.0 + g_e / p.sigma_e)), 0.0
        )

    if mode is KnowledgeMode.AVAILABLE:
        transmitted = active.any(axis=1)
        sel = np.argmax(np.where(active, score, -np.inf), axis=1)
    else:
        transmitted = np.ones(u.shape[0], dtype=bool)
        sel = np.argmax(score, axis=1)

    rows = np.arange(u.shape[0])
    raw = np.log2((1.0 + g_d[rows, sel] / p.sigma_d) / (1.0 + g_e[rows, sel] / p.sigma_e))
    live = transmitted & active[rows, sel]
    rate = np.where(live, np.maximum(raw, 0.0), 0.0)
    outage = np.where(live, raw < p.r_th, True)
    return rate, transmitted, outage


def _all_outcomes(
    p: SystemParams,
    scheme: Scheme,
    mode: KnowledgeMode,
    trials: int,
    seed: int,
    block: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if block < 1:
        raise ValueError(f"block must be >= 1, got {block}")
    rates = np.empty(trials)
    transmitted = np.empty(trials, dtype=bool)
    outage = np.empty(trials, dtype=bool)
    start = 0
    while start < trials:
        count = min(block, trials - start)
        u = uniform_block(seed, p.k, start, count)
        r, t, o = _block_outcomes(p, scheme, mode, u)
        rates[start : start + count] = r
        transmitted[start : start + count] = t
        outage[start : start + count] = o
        start += count
    return rates, transmitted, outage


def trial_outcomes(
    p: SystemParams,
    scheme: Scheme,
    mode: KnowledgeMode,
    trials: int,
    seed: int,
    block: int = DEFAULT_BLOCK,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial (rates, transmitted) arrays for `trials` trials."""
    rates, transmitted, _ = _all_outcomes(p, scheme, mode, trials, seed, block)
    return rates, transmitted


def outage_indicators(
    p: SystemParams,
    scheme: Scheme,
    mode: KnowledgeMode,
    trials: int,
    seed: int,
    block: int = DEFAULT_BLOCK,
) -> np.ndarray:
    """Per-trial outage indicator array (dead or silent trials included)."""
    return _all_outcomes(p, scheme, mode, trials, seed, block)[2]


def simulate_point(
    p: SystemParams,
    scheme: Scheme,
    mode: KnowledgeMode,
    trials: int,
    seed: int,
    block: int = DEFAULT_BLOCK,
) -> dict[Metric, MetricEstimate]:
    """Both metric estimates from a single pass over the trial stream."""
    rates, _, outage = _all_outcomes(p, scheme, mode, trials, seed, block)
    nzr_hits = int(np.count_nonzero(rates > 0.0))
    outage_hits = int(np.count_nonzero(outage))
    out = {}
    for metric, hits in ((Metric.NZR, nzr_hits), (Metric.SOP, outage_hits)):
        value = hits / trials
        std_err = math.sqrt(value * (1.0 - value) / trials)
        out[metric] = MetricEstimate(metric, value, std_err, trials, seed)
    return out


def estimate_metric(
    p: SystemParams,
    scheme: Scheme,
    mode: KnowledgeMode,
    metric: Metric,
    trials: int,
    seed: int,
    block: int = DEFAULT_BLOCK,
) -> MetricEstimate:
    """One metric estimate; same stream contract as `simulate_point`."""
    return simulate_point(p, scheme, mode, trials, seed, block)[metric]
