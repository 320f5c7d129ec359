"""Iterative state-cancelling protocol over a channel with feedback.

A message is planted as the bin index of a block-1 inverse binning
against the state sequence; each block's source word is then recompressed
against the fed-back channel outputs into the (much shorter) payload of
the next block, and the final payload is conveyed by a repetition code.
Decoding runs the chain backwards from the termination code.
"""

import dataclasses
import math
from fractions import Fraction

import numpy as np

from . import finite_info as fi
from . import sw_codecs as sw


class GpSessionError(RuntimeError):
    """Transmit-side failure, reported with the failing block index."""


class GpDecodeError(RuntimeError):
    """Receive-side failure, reported with the failing stage index."""


def _round_half_up(x):
    if isinstance(x, Fraction):
        return int(math.floor(x + Fraction(1, 2)))
    return sw.floor_bits(x + 0.5)


def _ceil_exact(x):
    if isinstance(x, Fraction):
        return int(math.ceil(x))
    return sw.ceil_bits(x)


@dataclasses.dataclass(frozen=True)
class GpSlacks:
    """Per-symbol rate slacks: subtracted on the inversion side, added on
    the compression side."""

    eps_invert: float
    eps_encode: float

    def __post_init__(self):
        if self.eps_invert < 0.0 or self.eps_encode < 0.0:
            raise ValueError("slacks must be nonnegative")


@dataclasses.dataclass(frozen=True)
class GpSchedule:
    """Block plan for one session.

    rate_s is the per-symbol budget of the inverse binning side, rate_y
    the per-symbol budget of the recompression side; both may be exact
    Fractions, in which case every derived quantity stays exact.
    """

    message_bits_N: int
    rate_s: object
    rate_y: object
    iterations_k: int
    min_block: int
    block_lens: tuple
    payload_bits: tuple
    termination_bits: int
    termination_factor_r: int

    @property
    def cumulative_len(self) -> int:
        return sum(self.block_lens)

    @property
    def termination_len_L(self) -> int:
        return self.termination_factor_r * self.termination_bits

    @property
    def total_channel_uses(self) -> int:
        return self.cumulative_len + self.termination_len_L

    @property
    def net_rate(self):
        return self.rate_s - self.rate_y

    @property
    def achieved_rate(self) -> Fraction:
        return Fraction(self.message_bits_N, self.total_channel_uses)

    @property
    def channel_use_bound(self):
        return self.message_bits_N / self.net_rate + self.termination_len_L


def plan_schedule_rates(message_bits_N, rate_s, rate_y, iterations_k,
                        min_block, term_factor) -> GpSchedule:
    """Plan block lengths from explicit per-symbol rates.

    Payload-driven recursion: block j is sized to hold its payload at
    rate_s, and emits ceil(n_j * rate_y) bits for block j+1.  Blocks
    after the first are lengthened to min_block when the recursion asks
    for less (a longer block only loosens the inversion); a first block
    below min_block is rejected because lengthening it cannot create the
    missing typical sequences per bin.
    """
    if message_bits_N < 1:
        raise ValueError("message_bits_N must be at least 1")
    if iterations_k < 1 or min_block < 1 or term_factor < 1:
        raise ValueError("iterations_k, min_block, term_factor must be >= 1")
    if rate_s <= 0:
        raise ValueError("inversion rate must be positive")
    if rate_y < 0:
        raise ValueError("compression rate must be nonnegative")
    if rate_y >= rate_s:
        raise ValueError("non-positive net rate: rate_y >= rate_s")
    lens = []
    payloads = []
    bits = message_bits_N
    for j in range(iterations_k):
        if bits == 0:
            raise ValueError(
                f"k too large for this rate pair: block {j + 1} payload is empty")
        n = _round_half_up(Fraction(bits) / rate_s
                           if isinstance(rate_s, Fraction) else bits / rate_s)
        if j == 0:
            if n < min_block:
                raise ValueError(
                    f"first block length {n} is below min_block {min_block}; "
                    "lower min_block or raise message_bits_N")
        else:
            n = max(n, min_block)
        lens.append(n)
        payloads.append(bits)
        bits = _ceil_exact(n * rate_y)
    return GpSchedule(
        message_bits_N=message_bits_N,
        rate_s=rate_s,
        rate_y=rate_y,
        iterations_k=iterations_k,
        min_block=min_block,
        block_lens=tuple(lens),
        payload_bits=tuple(payloads),
        termination_bits=bits,
        termination_factor_r=term_factor,
    )


def plan_schedule(message_bits_N: int, law: fi.GpLaw, slacks: GpSlacks,
                  iterations_k: int, min_block: int,
                  term_factor: int) -> GpSchedule:
    """Plan from a law: rates are the conditional entropies adjusted by
    the slacks."""
    m = fi.info_measures(law)
    rate_s = m.h_u_given_s - slacks.eps_invert
    rate_y = m.h_u_given_y + slacks.eps_encode
    return plan_schedule_rates(message_bits_N, rate_s, rate_y, iterations_k,
                               min_block, term_factor)


@dataclasses.dataclass(frozen=True)
class GpCodecConfig:
    """Typicality slacks used by the session's binning codes."""

    delta_invert: float
    delta_decode: float
    enum_budget: int = fi.DEFAULT_ENUM_BUDGET


@dataclasses.dataclass(frozen=True)
class GpSessionTranscript:
    message_bits: np.ndarray
    payloads: tuple
    u_blocks: tuple
    s_blocks: tuple
    x_blocks: tuple
    y_blocks: tuple
    term_bits: np.ndarray
    term_s: np.ndarray
    term_x: np.ndarray
    term_y: np.ndarray
    decoded_bits: np.ndarray | None = None


def build_block_codes(schedule: GpSchedule, law: fi.GpLaw,
                      codec: GpCodecConfig, master_seed: int):
    """Per-block code pair: (inverse-binning codes against S,
    recompression codes against Y), with seeds derived from the master
    seed and block index."""
    pair_us = fi.gp_pair_us(law)
    pair_uy = fi.gp_pair_uy(law)
    invert_codes = []
    compress_codes = []
    k = schedule.iterations_k
    for j in range(k):
        n = schedule.block_lens[j]
        out_bits = (schedule.payload_bits[j + 1] if j + 1 < k
                    else schedule.termination_bits)
        invert_codes.append(sw.BinningCode(
            n, schedule.payload_bits[j], sw.derive_seed(master_seed, j, 0),
            pair_us, fi.TypicalitySpec(codec.delta_invert, n),
            codec.enum_budget))
        compress_codes.append(sw.BinningCode(
            n, out_bits, sw.derive_seed(master_seed, j, 1),
            pair_uy, fi.TypicalitySpec(codec.delta_decode, n),
            codec.enum_budget))
    return invert_codes, compress_codes


def induced_term_table(law: fi.GpLaw) -> np.ndarray:
    """Channel seen by one termination bit b: x = f(b, s) with s drawn
    fresh, so p(y|b) = sum_s p(s) p(y | f(b,s), s).  Shape (2, num_y)."""
    if law.num_u < 2:
        raise ValueError("termination needs at least two source symbols")
    x_of = law.f_us[:2, :]
    chan = law.p_y_given_xs[x_of, np.arange(law.num_s)[None, :], :]
    return np.einsum("s,bsy->by", law.p_state, chan)


def term_symbol_error(law: fi.GpLaw) -> float:
    """Worst-case over the two bit values of the per-symbol maximum
    likelihood decision error."""
    table = induced_term_table(law)
    decide_one = table[1] > table[0]  # ties resolve to bit 0
    err0 = float(np.sum(table[0][decide_one]))
    err1 = float(np.sum(table[1][~decide_one]))
    return max(err0, err1)


def repetition_error_probability(factor_r: int, symbol_error: float) -> float:
    """Majority-vote error over factor_r independent per-symbol decisions
    each wrong with probability symbol_error; factor_r must be odd so the
    vote has no ties."""
    if factor_r < 1 or factor_r % 2 == 0:
        raise ValueError("factor_r must be odd and positive")
    if not 0.0 <= symbol_error <= 1.0:
        raise ValueError("symbol_error must be a probability")
    p = symbol_error
    return sum(math.comb(factor_r, j) * p ** j * (1.0 - p) ** (factor_r - j)
               for j in range((factor_r + 1) // 2, factor_r + 1))


def termination_error_probability(law: fi.GpLaw, factor_r: int) -> float:
    """Per-termination-bit majority decode error for this law."""
    return repetition_error_probability(factor_r, term_symbol_error(law))


def transmit_termination(bits, law: fi.GpLaw, factor_r: int, rng):
    """Send each bit factor_r times as x = f(bit, s) with fresh states.
    Returns (s, x, y) symbol arrays of length factor_r * len(bits)."""
    bit_arr = np.asarray(bits, dtype=np.int64)
    reps = np.repeat(bit_arr, factor_r)
    s = fi.sample_gp_state(law, reps.size, rng)
    x = law.f_us[reps, s]
    y = fi.sample_gp_channel(law, x, s, rng)
    return s, x, y


def decode_termination(y_syms, law: fi.GpLaw, factor_r: int,
                       num_bits: int) -> np.ndarray:
    """Per-symbol ML decision on the induced bit channel, then majority
    per bit; both kinds of tie resolve to 0."""
    y = np.asarray(y_syms, dtype=np.int64)
    if y.size != factor_r * num_bits:
        raise ValueError("termination stream length must be factor_r * num_bits")
    if num_bits == 0:
        return np.zeros(0, dtype=np.int64)
    table = induced_term_table(law)
    votes = (table[1, y] > table[0, y]).astype(np.int64)
    ones = votes.reshape(num_bits, factor_r).sum(axis=1)
    return (2 * ones > factor_r).astype(np.int64)


def run_gp_session(schedule: GpSchedule, law: fi.GpLaw, message_bits,
                   codec: GpCodecConfig, master_seed: int,
                   rng) -> GpSessionTranscript:
    """Execute the transmit side of one session.

    Block j: invert the payload against a fresh state block, send
    x = f(u, s), observe the channel block over feedback, and compress
    the source block into the next payload; after the last block the
    compressed bits go out through the repetition code.
    """
    msg = np.asarray(message_bits, dtype=np.int64)
    if msg.shape != (schedule.message_bits_N,):
        raise ValueError("message length must equal message_bits_N")
    if np.any((msg != 0) & (msg != 1)):
        raise ValueError("message bits must be 0 or 1")
    invert_codes, compress_codes = build_block_codes(
        schedule, law, codec, master_seed)
    payloads = []
    u_blocks = []
    s_blocks = []
    x_blocks = []
    y_blocks = []
    payload = msg
    for j in range(schedule.iterations_k):
        n = schedule.block_lens[j]
        s = fi.sample_gp_state(law, n, rng)
        try:
            u = sw.sw_invert(payload, s, invert_codes[j])
        except sw.SwInvertFailure as exc:
            raise GpSessionError(
                f"inverse binning failed at block {j + 1}: {exc}") from exc
        x = law.f_us[u, s]
        y = fi.sample_gp_channel(law, x, s, rng)
        payloads.append(payload)
        u_blocks.append(u)
        s_blocks.append(s)
        x_blocks.append(x)
        y_blocks.append(y)
        payload = sw.sw_encode(u, compress_codes[j])
    term_s, term_x, term_y = transmit_termination(
        payload, law, schedule.termination_factor_r, rng)
    return GpSessionTranscript(
        message_bits=msg,
        payloads=tuple(payloads),
        u_blocks=tuple(u_blocks),
        s_blocks=tuple(s_blocks),
        x_blocks=tuple(x_blocks),
        y_blocks=tuple(y_blocks),
        term_bits=payload,
        term_s=term_s,
        term_x=term_x,
        term_y=term_y,
    )


def decode_gp_chain(transcript: GpSessionTranscript, schedule: GpSchedule,
                    law: fi.GpLaw, codec: GpCodecConfig,
                    master_seed: int) -> np.ndarray:
    """Receive side: decode the termination bits, recover the last source
    block from them, then walk the chain backwards; the bin index of the
    first block is the message."""
    invert_codes, compress_codes = build_block_codes(
        schedule, law, codec, master_seed)
    k = schedule.iterations_k
    bits = decode_termination(transcript.term_y, law,
                              schedule.termination_factor_r,
                              schedule.termination_bits)
    try:
        u_hat = sw.sw_decode(bits, transcript.y_blocks[k - 1],
                             compress_codes[k - 1]).u_seq
    except sw.SwDecodeFailure as exc:
        raise GpDecodeError(f"decode failed at stage {k}: {exc}") from exc
    for j in range(k - 1, 0, -1):
        bits = sw.sw_encode(u_hat, invert_codes[j])
        try:
            u_hat = sw.sw_decode(bits, transcript.y_blocks[j - 1],
                                 compress_codes[j - 1]).u_seq
        except sw.SwDecodeFailure as exc:
            raise GpDecodeError(f"decode failed at stage {j}: {exc}") from exc
    return sw.sw_encode(u_hat, invert_codes[0])


def run_gp_trial(schedule: GpSchedule, law: fi.GpLaw, message_bits,
                 codec: GpCodecConfig, master_seed: int, rng):
    """One session plus backward decode.

    Returns (transcript, failure). On success the transcript carries the
    decoded bits and failure is None; a transmit-side failure returns
    (None, reason); a decode failure returns the bare transcript and the
    reason.
    """
    try:
        transcript = run_gp_session(schedule, law, message_bits, codec,
                                    master_seed, rng)
    except GpSessionError as exc:
        return None, str(exc)
    try:
        decoded = decode_gp_chain(transcript, schedule, law, codec,
                                  master_seed)
    except GpDecodeError as exc:
        return transcript, str(exc)
    return dataclasses.replace(transcript, decoded_bits=decoded), None
