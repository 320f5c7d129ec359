"""Reversed-block source coding with a feedforward stream of past source
symbols at the reconstruction side.

The source is reversed, a noisy companion word is drawn for the first
block, and each later block's companion word is shaped to carry the
compressed bits of the previous stage; only the last stage's bits are
emitted.  The decoder works last stage to first: recover the companion
word against the channel output, reconstruct symbol-wise, then use the
fed-forward source block to pull out the previous stage's bits.
"""

import dataclasses
import math
from fractions import Fraction

import numpy as np

from . import finite_info as fi
from . import sw_codecs as sw


class WzEncodeError(RuntimeError):
    """Shaping failure, reported with the failing stage index."""


class WzDecodeError(RuntimeError):
    """Recovery or unshaping failure, reported with the failing stage."""


def _round_half_up(x):
    if isinstance(x, Fraction):
        return int(math.floor(x + Fraction(1, 2)))
    return sw.floor_bits(x + 0.5)


def _ceil_exact(x):
    if isinstance(x, Fraction):
        return int(math.ceil(x))
    return sw.ceil_bits(x)


def _floor_exact(x):
    if isinstance(x, Fraction):
        return int(math.floor(x))
    return sw.floor_bits(x)


@dataclasses.dataclass(frozen=True)
class WzSlacks:
    """eps_shape is subtracted from the shaper-side entropy, eps_encode
    added to the compression-side entropy."""

    eps_shape: float
    eps_encode: float

    def __post_init__(self):
        if self.eps_shape < 0.0 or self.eps_encode < 0.0:
            raise ValueError("slacks must be nonnegative")


@dataclasses.dataclass(frozen=True)
class WzSchedule:
    """Geometric block plan: l_j = round(L * r^j) with r = rate_y/rate_x.

    capacity_rate is the per-symbol shaper capacity used by the stage
    budget check; it stays at the unslacked conditional entropy when
    planning from a law, so the eps_shape slack buys real headroom
    instead of cancelling out of the comparison.
    """

    base_len_L: int
    iterations_k: int
    rate_x: object
    rate_y: object
    capacity_rate: object
    block_lens: tuple
    sw_bits: tuple

    @property
    def ratio_r(self):
        if self.rate_y == 0:
            return Fraction(1)
        return self.rate_y / self.rate_x

    @property
    def total_n(self) -> int:
        return sum(self.block_lens)

    @property
    def emitted_bits(self) -> int:
        return self.sw_bits[-1]

    @property
    def rate(self) -> Fraction:
        return Fraction(self.emitted_bits, self.total_n)

    @property
    def rate_limit(self):
        return self.rate_y - self.rate_x


def wz_plan_rates(base_len_L, iterations_k, rate_x, rate_y,
                  capacity_rate=None) -> WzSchedule:
    """Plan from explicit per-symbol rates; exact when given Fractions."""
    if base_len_L < 1 or iterations_k < 1:
        raise ValueError("base_len_L and iterations_k must be >= 1")
    if rate_y < 0:
        raise ValueError("rate_y must be nonnegative")
    if rate_y == 0:
        # lossless collapse: every stage carries zero bits
        lens = tuple([base_len_L] * iterations_k)
        return WzSchedule(base_len_L, iterations_k, rate_x, rate_y,
                          capacity_rate if capacity_rate is not None else rate_x,
                          lens, tuple([0] * iterations_k))
    if rate_x <= 0:
        raise ValueError("rate_x must be positive when rate_y is positive")
    if rate_y < rate_x:
        raise ValueError("ratio below one: rate_y must be >= rate_x")
    if capacity_rate is None:
        capacity_rate = rate_x
    r = rate_y / rate_x
    lens = []
    bits = []
    for j in range(iterations_k):
        l_j = _round_half_up(base_len_L * r ** j)
        lens.append(l_j)
        bits.append(_ceil_exact(l_j * rate_y))
        if j >= 1 and bits[j - 1] > _floor_exact(l_j * capacity_rate):
            raise ValueError(
                f"stage {j} shaper capacity "
                f"{_floor_exact(l_j * capacity_rate)} is below the "
                f"{bits[j - 1]}-bit payload; widen the slacks")
    return WzSchedule(base_len_L, iterations_k, rate_x, rate_y,
                      capacity_rate, tuple(lens), tuple(bits))


def wz_plan(base_len_L: int, iterations_k: int, law: fi.WzLaw,
            slacks: WzSlacks) -> WzSchedule:
    """Plan from a law: rate_x = H(U|X) - eps_shape, rate_y = H(U|Y) +
    eps_encode, shaper capacity checked at the unslacked H(U|X)."""
    m = fi.info_measures(law)
    rate_y = m.h_u_given_y + slacks.eps_encode
    if m.h_u_given_y == 0.0 and slacks.eps_encode == 0.0:
        return wz_plan_rates(base_len_L, iterations_k,
                             m.h_u_given_x - slacks.eps_shape, 0)
    rate_x = m.h_u_given_x - slacks.eps_shape
    if rate_x <= 0:
        raise ValueError("eps_shape consumes the whole shaper entropy")
    if rate_y < rate_x:
        raise ValueError("ratio below one: H(U|Y) must dominate H(U|X)")
    return wz_plan_rates(base_len_L, iterations_k, rate_x, rate_y,
                         capacity_rate=m.h_u_given_x)


@dataclasses.dataclass(frozen=True)
class WzCodecConfig:
    """Typicality slacks for the runtime codes: delta_shape for the
    shaper sets against X, delta_decode for recovery against Y."""

    delta_shape: float
    delta_decode: float
    enum_budget: int = fi.DEFAULT_ENUM_BUDGET


@dataclasses.dataclass(frozen=True)
class WzTranscript:
    reversed_source: np.ndarray
    u_blocks: tuple
    stage_bits: tuple
    emitted_bits: np.ndarray
    x_hat: np.ndarray
    distortion: float


def build_wz_codes(schedule: WzSchedule, law: fi.WzLaw,
                   codec: WzCodecConfig, master_seed: int):
    """Per-stage compression codes against Y and shaper specs against X
    (stage 0 draws its block, so its shaper slot is None)."""
    pair_uy = fi.wz_pair_uy(law)
    pair_ux = fi.wz_pair_ux(law)
    codes = []
    shapers = [None]
    for j in range(schedule.iterations_k):
        n = schedule.block_lens[j]
        codes.append(sw.BinningCode(
            n, schedule.sw_bits[j], sw.derive_seed(master_seed, j),
            pair_uy, fi.TypicalitySpec(codec.delta_decode, n),
            codec.enum_budget))
        if j >= 1:
            shapers.append(sw.ShaperSpec(
                n, pair_ux, fi.TypicalitySpec(codec.delta_shape, n),
                codec.enum_budget))
    return codes, shapers


def _block_bounds(schedule: WzSchedule):
    # half-open [start, stop) offsets in the reversed stream
    bounds = []
    start = 0
    for l_j in schedule.block_lens:
        bounds.append((start, start + l_j))
        start += l_j
    return bounds


def wz_ff_encode_stages(x_seq, schedule: WzSchedule, law: fi.WzLaw,
                        codec: WzCodecConfig, master_seed: int, rng):
    """Returns (u_blocks, stage_bits), both in reversed-stream stage
    order; stage_bits[j] is the compression of u_blocks[j]."""
    x = np.asarray(x_seq, dtype=np.int64)
    if x.shape != (schedule.total_n,):
        raise ValueError("source length must equal the schedule's total_n")
    rev = x[::-1]
    codes, shapers = build_wz_codes(schedule, law, codec, master_seed)
    bounds = _block_bounds(schedule)
    u_blocks = []
    stage_bits = []
    prev_bits = None
    for j in range(schedule.iterations_k):
        start, stop = bounds[j]
        x_block = rev[start:stop]
        if j == 0:
            u = fi.sample_u_given_x(law, x_block, rng)
        else:
            try:
                u = sw.shape(prev_bits, x_block, shapers[j])
            except sw.ShaperRangeError as exc:
                raise WzEncodeError(
                    f"shaping failed at stage {j}: {exc}") from exc
        prev_bits = sw.sw_encode(u, codes[j])
        u_blocks.append(u)
        stage_bits.append(prev_bits)
    return tuple(u_blocks), tuple(stage_bits)


def wz_ff_encode(x_seq, schedule: WzSchedule, law: fi.WzLaw,
                 codec: WzCodecConfig, master_seed: int, rng) -> np.ndarray:
    """Emitted bits: the last stage's compression output."""
    _, stage_bits = wz_ff_encode_stages(x_seq, schedule, law, codec,
                                        master_seed, rng)
    return stage_bits[-1]


def wz_ff_decode_stages(bits, y_seq, x_stream, schedule: WzSchedule,
                        law: fi.WzLaw, codec: WzCodecConfig,
                        master_seed: int):
    """Returns (x_hat, u_hat_blocks, recovered_bits).

    u_hat_blocks is in stage order; recovered_bits[j] is the bit string
    pulled out of stage j's fed-forward source block (the stage j-1
    payload), None at stage 0.  x_stream is indexed lazily in original
    stream order, one already-reconstructed block at a time, so tests
    can audit feedforward causality through a logging wrapper.
    """
    y = np.asarray(y_seq, dtype=np.int64)
    n = schedule.total_n
    if y.shape != (n,):
        raise ValueError("channel output length must equal total_n")
    if len(x_stream) != n:
        raise ValueError("feedforward stream length must equal total_n")
    codes, shapers = build_wz_codes(schedule, law, codec, master_seed)
    bounds = _block_bounds(schedule)
    rev_y = y[::-1]
    k = schedule.iterations_k
    x_hat_rev = np.zeros(n, dtype=np.int64)
    u_hat_blocks = [None] * k
    recovered = [None] * k
    cur_bits = np.asarray(bits, dtype=np.int64)
    for j in range(k - 1, -1, -1):
        start, stop = bounds[j]
        y_block = rev_y[start:stop]
        try:
            u_hat = sw.sw_decode(cur_bits, y_block, codes[j]).u_seq
        except sw.SwDecodeFailure as exc:
            raise WzDecodeError(
                f"recovery failed at stage {j}: {exc}") from exc
        u_hat_blocks[j] = u_hat
        x_hat_rev[start:stop] = law.f_uy[u_hat, y_block]
        if j >= 1:
            # the block is reconstructed; only now read its source
            # symbols off the feedforward stream (original order)
            ff_block = np.asarray(x_stream[n - stop:n - start],
                                  dtype=np.int64)[::-1]
            try:
                cur_bits = sw.unshape(u_hat, ff_block, shapers[j],
                                      schedule.sw_bits[j - 1])
            except sw.ShaperRangeError as exc:
                raise WzDecodeError(
                    f"unshaping failed at stage {j}: {exc}") from exc
            recovered[j] = cur_bits
    return x_hat_rev[::-1], tuple(u_hat_blocks), tuple(recovered)


def wz_ff_decode(bits, y_seq, x_stream, schedule: WzSchedule,
                 law: fi.WzLaw, codec: WzCodecConfig,
                 master_seed: int) -> np.ndarray:
    x_hat, _, _ = wz_ff_decode_stages(bits, y_seq, x_stream, schedule,
                                      law, codec, master_seed)
    return x_hat


def realized_distortion(law: fi.WzLaw, x_seq, x_hat) -> float:
    x = np.asarray(x_seq, dtype=np.int64)
    return float(np.mean(law.rho[x, np.asarray(x_hat, dtype=np.int64)]))


def run_wz_trial(schedule: WzSchedule, law: fi.WzLaw, codec: WzCodecConfig,
                 master_seed: int, rng):
    """Draw a source/output pair, encode, decode, score.

    Returns (transcript, None) on completion or (None, reason) when a
    stage raises; the reason string keeps the stage index.
    """
    x, y = fi.sample_wz_source(law, schedule.total_n, rng)
    try:
        u_blocks, stage_bits = wz_ff_encode_stages(
            x, schedule, law, codec, master_seed, rng)
    except WzEncodeError as exc:
        return None, str(exc)
    try:
        x_hat = wz_ff_decode(stage_bits[-1], y, x, schedule, law, codec,
                             master_seed)
    except WzDecodeError as exc:
        return None, str(exc)
    transcript = WzTranscript(
        reversed_source=x[::-1],
        u_blocks=u_blocks,
        stage_bits=stage_bits,
        emitted_bits=stage_bits[-1],
        x_hat=x_hat,
        distortion=realized_distortion(law, x, x_hat),
    )
    return transcript, None
