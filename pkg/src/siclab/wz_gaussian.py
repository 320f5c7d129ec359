"""Gaussian lossy coding with decoder feedforward.

A block of l i.i.d. Gaussian samples is collapsed into one scalar
statistic, quantized uniformly on a fixed interval (values outside are
truncated to the edge cells), and the cell index is the entire
description. The decoder unrolls the statistic back into a block
estimate, consuming the true past samples as they become available
(feedforward). With decoder side information y and x = y + n, the same
encoder output is decoded by shifting the received cell center by the
side-information part of the statistic and reconstructing the noise
stream instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "FfQuantizerSpec",
    "IdentityCheck",
    "derive_quantizer",
    "statistic_coefficients",
    "build_statistic",
    "quantize_uniform",
    "cell_center",
    "reconstruct_ff",
    "wz_encode",
    "wz_decode",
    "check_distortion_identity",
    "perturb_index_robustness",
    "distortion_limit",
    "simulate_distortion",
    "simulate_wz_distortion",
    "truncation_probability",
]


@dataclass(frozen=True)
class FfQuantizerSpec:
    """One operating point: block length, rate, slack, and the derived
    mixing gain beta, interval width Delta, and level count M."""

    block_len_l: int
    rate_R: float
    epsilon: float
    source_var: float
    beta: float
    interval_Delta: float
    levels_M: int

    @property
    def cell_width(self) -> float:
        return self.interval_Delta / self.levels_M


def derive_quantizer(l: int, R: float, epsilon: float,
                     source_var: float = 1.0) -> FfQuantizerSpec:
    """Build the operating point beta = 2^(R-2eps), Delta = 2^(l eps),
    M = ceil(2^(R l))."""
    if not isinstance(l, (int, np.integer)) or l < 1:
        raise ValueError(f"block length must be an integer >= 1, got {l!r}")
    if R <= 0 or not math.isfinite(R):
        raise ValueError(f"rate must be positive and finite, got {R!r}")
    if epsilon <= 0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be positive and finite, got {epsilon!r}")
    if source_var <= 0:
        raise ValueError(f"source variance must be > 0, got {source_var!r}")
    beta = 2.0 ** (R - 2.0 * epsilon)
    if l >= 2 and beta <= 1.0:
        raise ValueError(f"beta = 2^(R - 2 eps) = {beta} <= 1 needs R > 2 eps for l >= 2")
    if beta < 1.0:
        raise ValueError(f"beta = {beta} < 1 is outside the scheme's range")
    return FfQuantizerSpec(
        block_len_l=int(l),
        rate_R=float(R),
        epsilon=float(epsilon),
        source_var=float(source_var),
        beta=beta,
        interval_Delta=2.0 ** (l * epsilon),
        levels_M=math.ceil(2.0 ** (R * l)),
    )


def statistic_coefficients(l: int, beta: float) -> np.ndarray:
    """Weights c with statistic = -c . x: c[0] = 1/beta and
    c[k-1] = sqrt(beta^2 - 1) beta^(-(k+1)) for k = 2..l."""
    if l < 1:
        raise ValueError("need l >= 1")
    if beta < 1.0 or (l >= 2 and beta == 1.0):
        raise ValueError(f"beta = {beta} gives an imaginary mixing weight for l >= 2")
    c = np.empty(l)
    c[0] = 1.0 / beta
    if l >= 2:
        k = np.arange(2, l + 1, dtype=float)
        c[1:] = math.sqrt(beta * beta - 1.0) * beta ** (-(k + 1.0))
    return c


def build_statistic(x_seq, beta: float) -> float:
    """Collapse a block into the scalar the quantizer sees."""
    x = np.asarray(x_seq, dtype=float)
    return -float(np.dot(statistic_coefficients(x.size, beta), x))


def quantize_uniform(value: float, spec: FfQuantizerSpec):
    """Uniform quantizer on [-Delta/2, Delta/2] with M cells.

    Returns (index, center). Cell boundaries go to the higher-index cell;
    out-of-interval values map to the nearest edge cell.
    """
    w = spec.cell_width
    idx = math.floor((value + spec.interval_Delta / 2.0) / w)
    idx = min(max(idx, 0), spec.levels_M - 1)
    return idx, cell_center(idx, spec)


def cell_center(index: int, spec: FfQuantizerSpec) -> float:
    if not 0 <= index < spec.levels_M:
        raise ValueError(f"cell index {index} out of range [0, {spec.levels_M})")
    return -spec.interval_Delta / 2.0 + (index + 0.5) * spec.cell_width


def reconstruct_ff(y_hat: float, x_ff, beta: float, l: int | None = None) -> np.ndarray:
    """Unroll the quantized statistic into a block estimate.

    x_ff supplies the true past samples; only x_ff[0 .. l-2] are read, so
    each estimate depends on strictly earlier samples.
    """
    x = np.asarray(x_ff, dtype=float)
    if l is None:
        l = x.size
    if l < 1:
        raise ValueError("need l >= 1")
    if x.size < l - 1:
        raise ValueError(f"feedforward gives {x.size} samples, need at least {l - 1}")
    out = np.empty(l)
    out[0] = -beta * y_hat
    if l >= 2:
        out[1] = math.sqrt(beta * beta - 1.0) * (out[0] - x[0])
    coef = (beta * beta - 1.0) / beta
    for i in range(3, l + 1):
        out[i - 1] = beta * out[i - 2] - coef * x[i - 2]
    return out


def wz_encode(x_seq, spec: FfQuantizerSpec) -> int:
    """Encoder output: the quantization cell index of the block statistic."""
    x = np.asarray(x_seq, dtype=float)
    if x.size != spec.block_len_l:
        raise ValueError(f"block length {x.size} != spec block length {spec.block_len_l}")
    idx, _ = quantize_uniform(build_statistic(x, spec.beta), spec)
    return idx


def wz_decode(index: int, y_si, x_ff, spec: FfQuantizerSpec) -> np.ndarray:
    """Reconstruct a block from the cell index plus side information y.

    The source is x = y + n. The side-information part of the statistic
    is added back onto the received cell center, the noise stream is
    reconstructed from the shifted value with n = x - y as feedforward,
    and the block estimate is y plus the noise estimate.
    """
    y = np.asarray(y_si, dtype=float)
    x = np.asarray(x_ff, dtype=float)
    l = spec.block_len_l
    if y.size != l:
        raise ValueError(f"side information length {y.size} != block length {l}")
    c = statistic_coefficients(l, spec.beta)
    shifted = cell_center(index, spec) + float(np.dot(c, y))
    n_ff = x[: l - 1] - y[: l - 1] if l >= 2 else np.empty(0)
    n_hat = reconstruct_ff(shifted, n_ff, spec.beta, l)
    return y + n_hat


def distortion_limit(spec: FfQuantizerSpec) -> float:
    """Large-block distortion value sigma^2 2^(-2(R - 2 eps))."""
    return spec.source_var * 2.0 ** (-2.0 * (spec.rate_R - 2.0 * spec.epsilon))


class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float
    diff_se: float
    trials: int


def _encode_blocks(x: np.ndarray, spec: FfQuantizerSpec):
    """Vectorized encode of rows of x: statistic, index, center."""
    c = statistic_coefficients(spec.block_len_l, spec.beta)
    stat = -(x @ c)
    w = spec.cell_width
    idx = np.floor((stat + spec.interval_Delta / 2.0) / w)
    np.clip(idx, 0, spec.levels_M - 1, out=idx)
    centers = -spec.interval_Delta / 2.0 + (idx + 0.5) * w
    return stat, idx.astype(np.int64), centers


def _reconstruct_blocks(y_hat: np.ndarray, x: np.ndarray, beta: float) -> np.ndarray:
    """Vectorized reconstruction of one block estimate per row."""
    trials, l = x.shape
    out = np.empty_like(x)
    out[:, 0] = -beta * y_hat
    if l >= 2:
        out[:, 1] = math.sqrt(beta * beta - 1.0) * (out[:, 0] - x[:, 0])
    coef = (beta * beta - 1.0) / beta
    for i in range(3, l + 1):
        out[:, i - 1] = beta * out[:, i - 2] - coef * x[:, i - 2]
    return out


def check_distortion_identity(spec: FfQuantizerSpec, num_trials: int,
                              rng: np.random.Generator) -> IdentityCheck:
    """Monte Carlo check that mean block distortion equals the quantizer
    error term plus the closed-form feedforward term.

    lhs: mean over trials of the per-block distortion. rhs: mean of
    (stat - center)^2 beta^(2l)/l plus sigma^2 (l-1)/(l beta^2). The
    difference is estimated per-trial (paired), so diff_se is the
    standard error of lhs - rhs.
    """
    l, beta = spec.block_len_l, spec.beta
    x = rng.normal(0.0, math.sqrt(spec.source_var), size=(num_trials, l))
    stat, _, centers = _encode_blocks(x, spec)
    xhat = _reconstruct_blocks(centers, x, beta)
    lhs_trial = np.mean((x - xhat) ** 2, axis=1)
    closed_term = spec.source_var * (l * beta ** 2 - beta ** 2) / (l * beta ** 4)
    rhs_trial = (stat - centers) ** 2 * beta ** (2 * l) / l + closed_term
    diff = lhs_trial - rhs_trial
    return IdentityCheck(
        lhs=float(lhs_trial.mean()),
        rhs=float(rhs_trial.mean()),
        diff_se=float(diff.std(ddof=1) / math.sqrt(num_trials)),
        trials=num_trials,
    )


def perturb_index_robustness(spec: FfQuantizerSpec, offset: int, num_trials: int,
                             rng: np.random.Generator) -> float:
    """Mean distortion when the decoder sees the index shifted by offset
    (clamped to the valid range). offset = 0 is the unperturbed scheme."""
    l = spec.block_len_l
    x = rng.normal(0.0, math.sqrt(spec.source_var), size=(num_trials, l))
    _, idx, _ = _encode_blocks(x, spec)
    idx2 = np.clip(idx + offset, 0, spec.levels_M - 1)
    centers = -spec.interval_Delta / 2.0 + (idx2 + 0.5) * spec.cell_width
    xhat = _reconstruct_blocks(centers, x, spec.beta)
    return float(np.mean((x - xhat) ** 2))


def simulate_distortion(spec: FfQuantizerSpec, num_trials: int,
                        rng: np.random.Generator):
    """Mean per-block distortion and its standard error, no side information."""
    l = spec.block_len_l
    x = rng.normal(0.0, math.sqrt(spec.source_var), size=(num_trials, l))
    _, _, centers = _encode_blocks(x, spec)
    xhat = _reconstruct_blocks(centers, x, spec.beta)
    per_trial = np.mean((x - xhat) ** 2, axis=1)
    return float(per_trial.mean()), float(per_trial.std(ddof=1) / math.sqrt(num_trials))


def simulate_wz_distortion(spec: FfQuantizerSpec, si_var: float, num_trials: int,
                           rng: np.random.Generator):
    """Mean distortion of the side-information decoder, x = y + n with
    Gaussian y of variance si_var. Returns (mean, standard error)."""
    l = spec.block_len_l
    y = rng.normal(0.0, math.sqrt(si_var), size=(num_trials, l))
    n = rng.normal(0.0, math.sqrt(spec.source_var), size=(num_trials, l))
    x = y + n
    _, _, centers = _encode_blocks(x, spec)
    c = statistic_coefficients(l, spec.beta)
    shifted = centers + y @ c
    # the decoder only has x and y, so its feedforward samples are x - y,
    # not the true n (identical up to rounding)
    n_hat = _reconstruct_blocks(shifted, x - y, spec.beta)
    xhat = y + n_hat
    per_trial = np.mean((x - xhat) ** 2, axis=1)
    return float(per_trial.mean()), float(per_trial.std(ddof=1) / math.sqrt(num_trials))


def truncation_probability(spec: FfQuantizerSpec, num_trials: int,
                           rng: np.random.Generator, si_var: float = 0.0) -> float:
    """Empirical probability that the block statistic falls outside the
    quantizer interval. With si_var > 0 the blocks are x = y + n."""
    l = spec.block_len_l
    x = rng.normal(0.0, math.sqrt(spec.source_var), size=(num_trials, l))
    if si_var > 0.0:
        x = x + rng.normal(0.0, math.sqrt(si_var), size=(num_trials, l))
    stat, _, _ = _encode_blocks(x, spec)
    return float(np.mean(np.abs(stat) > spec.interval_Delta / 2.0))
