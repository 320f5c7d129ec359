"""Seeded random-binning codes and the typical-set shaper.

Lossless compression against side information by hashing sequences into
bins and decoding by conditional-typicality search; the inverse-binning
map used on the transmit side; and the injective map from payload bits
into the conditional typical set of a feedforward block.
"""

import dataclasses
import math

import numpy as np

from . import finite_info as fi

_MIX_SEED = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_MIX_DIGIT = np.uint64(0xD1B54A32D192ED03)
_MIX_POS = np.uint64(0x8CB92BA72F3D8DD7)
_U64_MASK = (1 << 64) - 1


class SwDecodeFailure(RuntimeError):
    """No sequence in the bin is typical with the side information."""


class SwInvertFailure(RuntimeError):
    """No typical sequence exists in the requested bin."""


class ShaperRangeError(ValueError):
    """Payload does not fit the typical set, or the sequence is not in it."""


def _splitmix64(v: np.ndarray) -> np.ndarray:
    # 64-bit finalizer; operates on uint64 arrays with wraparound
    v = v + _MIX_SEED
    v = (v ^ (v >> np.uint64(30))) * _MIX_A
    v = (v ^ (v >> np.uint64(27))) * _MIX_B
    return v ^ (v >> np.uint64(31))


def _hash_rows(digits: np.ndarray, seed: int) -> np.ndarray:
    """Rolling 64-bit hash of each digit row, keyed by seed."""
    rows, n = digits.shape
    init = _splitmix64(np.array([seed & _U64_MASK], dtype=np.uint64))[0]
    pos_salt = np.arange(n, dtype=np.uint64) * _MIX_POS
    pre = (digits.astype(np.uint64) + np.uint64(1)) * _MIX_DIGIT + pos_salt[None, :]
    state = np.full(rows, init, dtype=np.uint64)
    for j in range(n):
        state = _splitmix64(state ^ pre[:, j])
    return state


def bits_to_int(bits) -> int:
    """Big-endian bit array to integer; empty array maps to 0."""
    value = 0
    for b in np.asarray(bits, dtype=np.int64):
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, length: int) -> np.ndarray:
    if value < 0 or value >= (1 << length):
        raise ValueError(f"value {value} does not fit in {length} bits")
    return np.array([(value >> (length - 1 - i)) & 1 for i in range(length)],
                    dtype=np.int64)


def ceil_bits(x: float) -> int:
    """Ceiling with a tiny nudge so exact integers survive float noise."""
    return max(0, math.ceil(x - 1e-9))


def floor_bits(x: float) -> int:
    return max(0, math.floor(x + 1e-9))


def encode_bit_budget(n: int, h_bits: float, eps: float) -> int:
    """Compression budget ceil(n (H + eps)) for decode-side slack eps."""
    return ceil_bits(n * (h_bits + eps))


def invert_bit_budget(n: int, h_bits: float, eps: float) -> int:
    """Inversion budget floor(n (H - eps)); clamped at zero."""
    return floor_bits(n * (h_bits - eps))


def derive_seed(master_seed: int, *path: int) -> int:
    """Stable per-component seed from a master seed and an index path.

    The path length is encoded and entries are offset by one because
    SeedSequence absorbs trailing zero entropy words, which would make
    (m,), (m, 0) and (m, 0, 0) collide.
    """
    entropy = (master_seed, len(path)) + tuple(p + 1 for p in path)
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, np.uint64)[0])


@dataclasses.dataclass(frozen=True)
class BinningCode:
    """Random binning of length-n sequences into 2**bit_budget bins."""

    block_len_n: int
    bit_budget: int
    hash_seed: int
    pair_law: np.ndarray
    typicality: fi.TypicalitySpec
    enum_budget: int = fi.DEFAULT_ENUM_BUDGET

    def __post_init__(self):
        if not 0 <= self.bit_budget <= 64:
            raise ValueError("bit_budget must be in [0, 64]")
        if self.block_len_n != self.typicality.block_len:
            raise ValueError("typicality spec block length mismatch")
        pair = np.asarray(self.pair_law, dtype=float)
        if pair.ndim != 2:
            raise ValueError("pair_law must be a 2-D joint table")
        object.__setattr__(self, "pair_law", pair)

    @property
    def num_u(self) -> int:
        return self.pair_law.shape[0]


@dataclasses.dataclass(frozen=True)
class ShaperSpec:
    """Injective map from payload bits into T_{U|X} of a given block."""

    block_len_n: int
    pair_law: np.ndarray
    typicality: fi.TypicalitySpec
    enum_budget: int = fi.DEFAULT_ENUM_BUDGET

    def __post_init__(self):
        if self.block_len_n != self.typicality.block_len:
            raise ValueError("typicality spec block length mismatch")
        pair = np.asarray(self.pair_law, dtype=float)
        if pair.ndim != 2:
            raise ValueError("pair_law must be a 2-D joint table")
        object.__setattr__(self, "pair_law", pair)


@dataclasses.dataclass(frozen=True)
class SwDecodeResult:
    u_seq: np.ndarray
    ambiguous: bool


def _bins_of(digits: np.ndarray, code: BinningCode) -> np.ndarray:
    state = _hash_rows(digits, code.hash_seed)
    if code.bit_budget == 0:
        return np.zeros(digits.shape[0], dtype=np.uint64)
    return state >> np.uint64(64 - code.bit_budget)


def sw_encode(u_seq, code: BinningCode) -> np.ndarray:
    """Bin index of the sequence as bit_budget bits, big-endian."""
    u = np.asarray(u_seq, dtype=np.int64)
    if u.shape != (code.block_len_n,):
        raise ValueError("sequence length must equal block_len_n")
    if np.any(u < 0) or np.any(u >= code.num_u):
        raise ValueError("sequence symbols out of alphabet range")
    bin_value = int(_bins_of(u[None, :], code)[0])
    return int_to_bits(bin_value, code.bit_budget)


def _check_scan_budget(code: BinningCode) -> None:
    total = code.num_u ** code.block_len_n
    if total > code.enum_budget:
        raise fi.EnumerationBudgetError(
            f"{code.num_u}^{code.block_len_n} = {total} sequences exceed "
            f"enumeration budget {code.enum_budget}")


def sw_decode(bits, side_seq, code: BinningCode) -> SwDecodeResult:
    """Lexicographically smallest sequence in the bin jointly typical
    with the side information; flags ambiguity when more than one
    candidate qualifies."""
    if len(np.asarray(bits)) != code.bit_budget:
        raise ValueError("bits length must equal bit_budget")
    side = np.asarray(side_seq, dtype=np.int64)
    _check_scan_budget(code)
    target = np.uint64(bits_to_int(bits))
    first = None
    for _, digits in fi.iter_sequence_chunks(code.num_u, code.block_len_n):
        in_bin = _bins_of(digits, code) == target
        if not np.any(in_bin):
            continue
        cand = digits[in_bin]
        ok = fi.conditional_typical_mask(cand, side, code.pair_law,
                                         code.typicality.slack_delta)
        hits = cand[ok]
        if hits.shape[0] == 0:
            continue
        if first is None:
            first = hits[0].copy()
            if hits.shape[0] > 1:
                return SwDecodeResult(first, True)
        else:
            return SwDecodeResult(first, True)
    if first is None:
        raise SwDecodeFailure("no typical sequence in the bin")
    return SwDecodeResult(first, False)


def sw_invert(bits, side_seq, code: BinningCode) -> np.ndarray:
    """Lexicographically smallest sequence with the given bin index that
    is jointly typical with the side information."""
    if len(np.asarray(bits)) != code.bit_budget:
        raise ValueError("bits length must equal bit_budget")
    side = np.asarray(side_seq, dtype=np.int64)
    _check_scan_budget(code)
    target = np.uint64(bits_to_int(bits))
    for _, digits in fi.iter_sequence_chunks(code.num_u, code.block_len_n):
        in_bin = _bins_of(digits, code) == target
        if not np.any(in_bin):
            continue
        cand = digits[in_bin]
        ok = fi.conditional_typical_mask(cand, side, code.pair_law,
                                         code.typicality.slack_delta)
        hits = cand[ok]
        if hits.shape[0] > 0:
            return hits[0].copy()
    raise SwInvertFailure("no typical sequence in the bin")


def shaper_table(x_seq, spec: ShaperSpec) -> np.ndarray:
    """The lexicographic conditional typical set of the block."""
    x = np.asarray(x_seq, dtype=np.int64)
    return fi.enumerate_conditional_typical(x, spec.pair_law, spec.typicality,
                                            spec.enum_budget)


def shaper_bit_budget(x_seq, spec: ShaperSpec) -> int:
    """floor(log2 |T_{U|X}[x^n]|); fails when the set is empty."""
    count = shaper_table(x_seq, spec).shape[0]
    if count == 0:
        raise ShaperRangeError("no typical sequence for this block")
    return count.bit_length() - 1


def shape(bits, x_seq, spec: ShaperSpec) -> np.ndarray:
    """Element of T_{U|X}[x^n] at the index encoded by the payload bits.

    The payload may be shorter than the per-block budget (its value still
    indexes the enumeration); longer payloads are an explicit failure.
    """
    table = shaper_table(x_seq, spec)
    if table.shape[0] == 0:
        raise ShaperRangeError("no typical sequence for this block")
    budget = table.shape[0].bit_length() - 1
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[0] > budget:
        raise ShaperRangeError(
            f"payload of {bits.shape[0]} bits exceeds shaper budget {budget}")
    index = bits_to_int(bits)
    return table[index].copy()


def unshape(u_seq, x_seq, spec: ShaperSpec, out_len: int) -> np.ndarray:
    """Index of the sequence in T_{U|X}[x^n], as out_len payload bits."""
    table = shaper_table(x_seq, spec)
    u = np.asarray(u_seq, dtype=np.int64)
    codes = fi.sequence_codes(table, spec.pair_law.shape[0])
    code = fi.sequence_codes(u[None, :], spec.pair_law.shape[0])[0]
    pos = int(np.searchsorted(codes, code))
    if pos >= codes.shape[0] or codes[pos] != code:
        raise ShaperRangeError("sequence is not typical with this block")
    if pos >= (1 << out_len):
        raise ShaperRangeError(
            f"typical-set index {pos} does not fit in {out_len} bits")
    return int_to_bits(pos, out_len)
