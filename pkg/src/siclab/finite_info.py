"""Finite-alphabet probability machinery.

Laws for the state-channel and side-information source problems, exact
entropy and mutual-information evaluation in bits, desk-scale brute-force
optimization over auxiliary conditionals, strong-typicality tests, and
lexicographic enumeration of conditional typical sets.
"""

import dataclasses
import itertools
import math
from functools import lru_cache

import numpy as np

# exhaustive scans over |U|^n sequences refuse to start beyond this
DEFAULT_ENUM_BUDGET = 1 << 22
# brute-force search refuses grids with more candidate evaluations than this
DEFAULT_SEARCH_BUDGET = 2_000_000

_ROW_SUM_TOL = 1e-12


class EnumerationBudgetError(RuntimeError):
    """An exhaustive sequence scan would exceed the configured budget."""


class SearchBudgetError(RuntimeError):
    """A brute-force grid would exceed the configured evaluation budget."""


def _as_prob_matrix(table, name: str) -> np.ndarray:
    t = np.asarray(table, dtype=float)
    if t.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional")
    if np.any(t < 0.0):
        raise ValueError(f"{name} has negative entries")
    if np.any(np.abs(t.sum(axis=-1) - 1.0) > _ROW_SUM_TOL):
        raise ValueError(f"{name} rows must sum to 1")
    return t


def _as_map_table(table, name: str, out_size: int) -> np.ndarray:
    t = np.asarray(table)
    if t.ndim != 2 or not np.issubdtype(t.dtype, np.integer):
        raise ValueError(f"{name} must be a 2-dimensional integer table")
    if np.any(t < 0) or np.any(t >= out_size):
        raise ValueError(f"{name} entries out of range [0, {out_size})")
    return t.astype(np.int64)


@dataclasses.dataclass(frozen=True)
class GpLaw:
    """State channel with encoder-side state knowledge.

    p_state[s] is the i.i.d. state law, p_u_given_s[s, u] the auxiliary
    conditional, f_us[u, s] the deterministic input map, and
    p_y_given_xs[x, s, y] the channel.
    """

    p_state: np.ndarray
    p_u_given_s: np.ndarray
    f_us: np.ndarray
    p_y_given_xs: np.ndarray

    def __post_init__(self):
        p_s = np.asarray(self.p_state, dtype=float)
        if p_s.ndim != 1 or np.any(p_s < 0.0) or abs(p_s.sum() - 1.0) > _ROW_SUM_TOL:
            raise ValueError("p_state must be a probability vector")
        chan = np.asarray(self.p_y_given_xs, dtype=float)
        if chan.ndim != 3:
            raise ValueError("p_y_given_xs must be indexed by (x, s, y)")
        if np.any(chan < 0.0) or np.any(np.abs(chan.sum(axis=-1) - 1.0) > _ROW_SUM_TOL):
            raise ValueError("p_y_given_xs rows must sum to 1")
        p_us = _as_prob_matrix(self.p_u_given_s, "p_u_given_s")
        f = _as_map_table(self.f_us, "f_us", chan.shape[0])
        if p_us.shape[0] != p_s.shape[0]:
            raise ValueError("p_u_given_s must have one row per state symbol")
        if f.shape != (p_us.shape[1], p_s.shape[0]):
            raise ValueError("f_us must be indexed by (u, s)")
        if chan.shape[1] != p_s.shape[0]:
            raise ValueError("p_y_given_xs state axis mismatch")
        object.__setattr__(self, "p_state", p_s)
        object.__setattr__(self, "p_u_given_s", p_us)
        object.__setattr__(self, "f_us", f)
        object.__setattr__(self, "p_y_given_xs", chan)

    @property
    def num_s(self) -> int:
        return self.p_state.shape[0]

    @property
    def num_u(self) -> int:
        return self.p_u_given_s.shape[1]

    @property
    def num_x(self) -> int:
        return self.p_y_given_xs.shape[0]

    @property
    def num_y(self) -> int:
        return self.p_y_given_xs.shape[2]


@dataclasses.dataclass(frozen=True)
class WzLaw:
    """Source pair with decoder-side side information.

    p_xy[x, y] is the joint source law, p_u_given_x[x, u] the auxiliary
    conditional, f_uy[u, y] the deterministic reconstruction map, and
    rho[x, xhat] the distortion table (Hamming when omitted).
    """

    p_xy: np.ndarray
    p_u_given_x: np.ndarray
    f_uy: np.ndarray
    rho: np.ndarray | None = None

    def __post_init__(self):
        joint = np.asarray(self.p_xy, dtype=float)
        if joint.ndim != 2 or np.any(joint < 0.0) or abs(joint.sum() - 1.0) > _ROW_SUM_TOL:
            raise ValueError("p_xy must be a joint probability table")
        p_ux = _as_prob_matrix(self.p_u_given_x, "p_u_given_x")
        if p_ux.shape[0] != joint.shape[0]:
            raise ValueError("p_u_given_x must have one row per source symbol")
        if self.rho is not None:
            rho = np.asarray(self.rho, dtype=float)
            if rho.ndim != 2 or rho.shape[0] != joint.shape[0] or np.any(rho < 0.0):
                raise ValueError("rho must be a nonnegative (x, xhat) table")
            num_xhat = rho.shape[1]
        else:
            num_xhat = joint.shape[0]
            rho = 1.0 - np.eye(joint.shape[0], num_xhat)
        f = _as_map_table(self.f_uy, "f_uy", num_xhat)
        if f.shape != (p_ux.shape[1], joint.shape[1]):
            raise ValueError("f_uy must be indexed by (u, y)")
        object.__setattr__(self, "p_xy", joint)
        object.__setattr__(self, "p_u_given_x", p_ux)
        object.__setattr__(self, "f_uy", f)
        object.__setattr__(self, "rho", rho)

    @property
    def num_x(self) -> int:
        return self.p_xy.shape[0]

    @property
    def num_y(self) -> int:
        return self.p_xy.shape[1]

    @property
    def num_u(self) -> int:
        return self.p_u_given_x.shape[1]

    @property
    def num_xhat(self) -> int:
        return self.rho.shape[1]


@dataclasses.dataclass(frozen=True)
class TypicalitySpec:
    """Per-pair additive frequency slack for strong typicality."""

    slack_delta: float
    block_len: int

    def __post_init__(self):
        if self.slack_delta <= 0.0:
            raise ValueError("slack_delta must be positive")
        if self.block_len < 1:
            raise ValueError("block_len must be at least 1")


@dataclasses.dataclass(frozen=True)
class InfoMeasures:
    """Entropies and mutual informations in bits; state fields are None
    for laws without a state variable."""

    h_u_given_s: float | None
    h_u_given_y: float
    h_u_given_x: float
    i_u_s: float | None
    i_u_y: float
    i_u_x: float


def entropy_bits(p) -> float:
    """Shannon entropy of a probability vector (any shape), in bits."""
    q = np.asarray(p, dtype=float).ravel()
    q = q[q > 0.0]
    return float(-np.sum(q * np.log2(q)))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def conditional_entropy_bits(joint: np.ndarray) -> float:
    """H(A|B) for a 2-D joint table with A on axis 0 and B on axis 1."""
    return entropy_bits(joint) - entropy_bits(np.sum(joint, axis=0))


def mutual_information_bits(joint: np.ndarray) -> float:
    """I(A;B) for a 2-D joint table."""
    return (entropy_bits(np.sum(joint, axis=1))
            + entropy_bits(np.sum(joint, axis=0))
            - entropy_bits(joint))


def gp_joint_usy(law: GpLaw) -> np.ndarray:
    """Joint p(u, s, y) under u ~ p(u|s), x = f(u, s), y ~ p(y|x, s)."""
    pair_us = gp_pair_us(law)
    chan = law.p_y_given_xs[law.f_us, np.arange(law.num_s)[None, :], :]
    return pair_us[:, :, None] * chan


def gp_pair_us(law: GpLaw) -> np.ndarray:
    return law.p_u_given_s.T * law.p_state[None, :]


def gp_pair_uy(law: GpLaw) -> np.ndarray:
    return gp_joint_usy(law).sum(axis=1)


def gp_pair_ux(law: GpLaw) -> np.ndarray:
    pair_us = gp_pair_us(law)
    out = np.zeros((law.num_u, law.num_x))
    for u in range(law.num_u):
        np.add.at(out[u], law.f_us[u], pair_us[u])
    return out


def wz_joint_uxy(law: WzLaw) -> np.ndarray:
    """Joint p(u, x, y) under (x, y) ~ p_xy, u ~ p(u|x)."""
    return law.p_u_given_x.T[:, :, None] * law.p_xy[None, :, :]


def wz_pair_ux(law: WzLaw) -> np.ndarray:
    return law.p_u_given_x.T * law.p_xy.sum(axis=1)[None, :]


def wz_pair_uy(law: WzLaw) -> np.ndarray:
    return wz_joint_uxy(law).sum(axis=1)


def info_measures(law) -> InfoMeasures:
    """All entropy and mutual-information functionals of a law, in bits."""
    if isinstance(law, GpLaw):
        pair_us = gp_pair_us(law)
        pair_uy = gp_pair_uy(law)
        pair_ux = gp_pair_ux(law)
        return InfoMeasures(
            h_u_given_s=conditional_entropy_bits(pair_us),
            h_u_given_y=conditional_entropy_bits(pair_uy),
            h_u_given_x=conditional_entropy_bits(pair_ux),
            i_u_s=mutual_information_bits(pair_us),
            i_u_y=mutual_information_bits(pair_uy),
            i_u_x=mutual_information_bits(pair_ux),
        )
    if isinstance(law, WzLaw):
        pair_ux = wz_pair_ux(law)
        pair_uy = wz_pair_uy(law)
        return InfoMeasures(
            h_u_given_s=None,
            h_u_given_y=conditional_entropy_bits(pair_uy),
            h_u_given_x=conditional_entropy_bits(pair_ux),
            i_u_s=None,
            i_u_y=mutual_information_bits(pair_uy),
            i_u_x=mutual_information_bits(pair_ux),
        )
    raise TypeError("law must be a GpLaw or WzLaw")


def gp_objective(law: GpLaw) -> float:
    """Channel functional I(U;Y) - I(U;S) in bits."""
    m = info_measures(law)
    return m.i_u_y - m.i_u_s


def wz_objective(law: WzLaw) -> tuple[float, float]:
    """Source functional: (rate I(U;X) - I(U;Y), expected distortion)."""
    m = info_measures(law)
    joint = wz_joint_uxy(law)
    xhat = law.f_uy[:, None, :]
    dist = float(np.sum(joint * law.rho[np.arange(law.num_x)[None, :, None], xhat]))
    return m.i_u_x - m.i_u_y, dist


def best_response_f_wz(p_xy, p_u_given_x, rho=None) -> np.ndarray:
    """Distortion-minimizing reconstruction map f(u, y), ties to the
    smallest index."""
    joint = np.asarray(p_xy, dtype=float)
    p_ux = np.asarray(p_u_given_x, dtype=float)
    num_x = joint.shape[0]
    if rho is None:
        rho = 1.0 - np.eye(num_x)
    rho = np.asarray(rho, dtype=float)
    # cost[u, y, xhat] = sum_x p(x, u, y) rho(x, xhat)
    joint_uxy = p_ux.T[:, :, None] * joint[None, :, :]
    cost = np.einsum("uxy,xh->uyh", joint_uxy, rho)
    return np.argmin(cost, axis=2).astype(np.int64)


def _simplex_grid(num_symbols: int, step: float) -> list[tuple[float, ...]]:
    """All probability vectors on the simplex with coordinates k*step."""
    k = round(1.0 / step)
    if abs(k * step - 1.0) > 1e-9:
        raise ValueError("grid step must divide 1")
    points = []
    for combo in itertools.combinations_with_replacement(range(num_symbols), k):
        counts = [0] * num_symbols
        for c in combo:
            counts[c] += 1
        points.append(tuple(c / k for c in counts))
    points.sort()
    return points


def brute_force_gp(p_state, p_y_given_xs, num_u: int, grid_step: float,
                   budget: int = DEFAULT_SEARCH_BUDGET) -> tuple[GpLaw, float]:
    """Grid search over p(u|s) and exhaustive search over input maps f,
    maximizing the channel functional."""
    p_s = np.asarray(p_state, dtype=float)
    chan = np.asarray(p_y_given_xs, dtype=float)
    num_s, num_x = p_s.shape[0], chan.shape[0]
    points = _simplex_grid(num_u, grid_step)
    num_rows = len(points) ** num_s
    num_maps = num_x ** (num_u * num_s)
    total = num_rows * num_maps
    if total > budget:
        raise SearchBudgetError(f"{total} candidate evaluations exceed budget {budget}")
    s_range = np.arange(num_s)
    best = None
    for rows in itertools.product(points, repeat=num_s):
        p_us = np.array(rows)
        pair_us = p_us.T * p_s[None, :]
        h_vec = np.array([entropy_bits(p_us[s]) for s in range(num_s)])
        h_u_given_s = float(np.dot(p_s, h_vec))
        h_u = entropy_bits(pair_us.sum(axis=1))
        for flat in itertools.product(range(num_x), repeat=num_u * num_s):
            f = np.array(flat, dtype=np.int64).reshape(num_u, num_s)
            joint_uy = (pair_us[:, :, None] * chan[f, s_range[None, :], :]).sum(axis=1)
            i_u_y = mutual_information_bits(joint_uy)
            objective = i_u_y - (h_u - h_u_given_s)
            if best is None or objective > best[0] + 1e-15:
                best = (objective, p_us, f)
    objective, p_us, f = best
    law = GpLaw(p_state=p_s, p_u_given_s=p_us, f_us=f, p_y_given_xs=chan)
    return law, objective


def brute_force_wz(p_xy, num_u: int, grid_step: float, lagrange_weight: float = 1.0,
                   rho=None, budget: int = DEFAULT_SEARCH_BUDGET) -> tuple[WzLaw, tuple[float, float]]:
    """Grid search over p(u|x) with the reconstruction map chosen by exact
    best response, minimizing rate + lagrange_weight * distortion."""
    joint = np.asarray(p_xy, dtype=float)
    num_x = joint.shape[0]
    points = _simplex_grid(num_u, grid_step)
    total = len(points) ** num_x
    if total > budget:
        raise SearchBudgetError(f"{total} candidate evaluations exceed budget {budget}")
    best = None
    for rows in itertools.product(points, repeat=num_x):
        p_ux = np.array(rows)
        f = best_response_f_wz(joint, p_ux, rho)
        law = WzLaw(p_xy=joint, p_u_given_x=p_ux, f_uy=f, rho=rho)
        rate, dist = wz_objective(law)
        score = rate + lagrange_weight * dist
        if best is None or score < best[0] - 1e-15:
            best = (score, law, (rate, dist))
    return best[1], best[2]


def _pair_counts(a_seq: np.ndarray, b_seq: np.ndarray, num_a: int, num_b: int) -> np.ndarray:
    idx = a_seq * num_b + b_seq
    return np.bincount(idx, minlength=num_a * num_b).reshape(num_a, num_b)


def _conditional_table(pair_law: np.ndarray) -> np.ndarray:
    """V(a|b) from a 2-D joint; columns of zero-probability b stay zero so
    the hard-zero condition rejects any occurrence of such b."""
    p_b = pair_law.sum(axis=0)
    cond = np.zeros_like(pair_law)
    np.divide(pair_law, p_b[None, :], out=cond, where=p_b[None, :] > 0.0)
    return cond


def conditional_typical_mask(a_rows: np.ndarray, b_seq, pair_law: np.ndarray,
                             slack_delta: float) -> np.ndarray:
    """Vectorized conditional strong typicality of each row of a_rows
    against b_seq: every pair count within n*slack_delta of V(a|b) times
    the realized count of b, and conditionally impossible pairs absent."""
    b = np.asarray(b_seq, dtype=np.int64)
    rows, n = a_rows.shape
    if b.shape != (n,):
        raise ValueError("conditioning sequence length mismatch")
    num_a, num_b = pair_law.shape
    cond = _conditional_table(pair_law)
    target = cond * np.bincount(b, minlength=num_b)[None, :]
    slack = n * slack_delta + 1e-9
    counts = np.zeros((rows, num_a * num_b), dtype=np.int64)
    row_idx = np.arange(rows)
    for j in range(n):
        counts[row_idx, a_rows[:, j] * num_b + b[j]] += 1
    counts = counts.reshape(rows, num_a, num_b)
    ok = np.all(np.abs(counts - target[None, :, :]) <= slack, axis=(1, 2))
    ok &= ~np.any((cond == 0.0)[None, :, :] & (counts > 0), axis=(1, 2))
    return ok


def is_jointly_typical(a_seq, b_seq, pair_law: np.ndarray, spec: TypicalitySpec) -> bool:
    """Conditional strong typicality of a_seq given b_seq under a 2-D
    joint law."""
    a = np.asarray(a_seq, dtype=np.int64)
    b = np.asarray(b_seq, dtype=np.int64)
    if a.shape != (spec.block_len,) or b.shape != (spec.block_len,):
        raise ValueError("sequence length must equal spec.block_len")
    return bool(conditional_typical_mask(a[None, :], b, pair_law, spec.slack_delta)[0])


@lru_cache(maxsize=32)
def _place_values(num_symbols: int, n: int) -> np.ndarray:
    return num_symbols ** np.arange(n - 1, -1, -1, dtype=np.int64)


def iter_sequence_chunks(num_symbols: int, n: int, chunk: int = 1 << 16):
    """Yield (codes, digits) for all num_symbols**n sequences in
    lexicographic order; digits has shape (len(codes), n) with the most
    significant position first."""
    total = num_symbols ** n
    place = _place_values(num_symbols, n)
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // place[None, :]) % num_symbols
        yield codes, digits


def sequence_codes(seqs: np.ndarray, num_symbols: int) -> np.ndarray:
    """Lexicographic integer codes of digit rows."""
    s = np.atleast_2d(np.asarray(seqs, dtype=np.int64))
    return s @ _place_values(num_symbols, s.shape[1])


def enumerate_conditional_typical(x_seq, pair_law: np.ndarray, spec: TypicalitySpec,
                                  budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """All u^n jointly typical with x_seq under pair_law[u, x], in
    lexicographic order, as an (count, n) array."""
    x = np.asarray(x_seq, dtype=np.int64)
    n = spec.block_len
    if x.shape != (n,):
        raise ValueError("sequence length must equal spec.block_len")
    num_u, num_x = pair_law.shape
    total = num_u ** n
    if total > budget:
        raise EnumerationBudgetError(
            f"{num_u}^{n} = {total} sequences exceed enumeration budget {budget}")
    out = []
    for _, digits in iter_sequence_chunks(num_u, n):
        ok = conditional_typical_mask(digits, x, pair_law, spec.slack_delta)
        if np.any(ok):
            out.append(digits[ok])
    if not out:
        return np.empty((0, n), dtype=np.int64)
    return np.concatenate(out, axis=0)


def typical_count(x_seq, pair_law: np.ndarray, spec: TypicalitySpec,
                  budget: int = DEFAULT_ENUM_BUDGET) -> int:
    return enumerate_conditional_typical(x_seq, pair_law, spec, budget).shape[0]


def _draw_rows(prob_rows: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One categorical draw per row of a probability matrix."""
    cum = np.cumsum(prob_rows, axis=1)
    u = rng.random(prob_rows.shape[0])
    idx = (u[:, None] > cum).sum(axis=1)
    return np.minimum(idx, prob_rows.shape[1] - 1).astype(np.int64)


def sample_gp_state(law: GpLaw, n: int, rng: np.random.Generator) -> np.ndarray:
    return _draw_rows(np.broadcast_to(law.p_state, (n, law.num_s)), rng)


def sample_gp_channel(law: GpLaw, x_seq, s_seq, rng: np.random.Generator) -> np.ndarray:
    rows = law.p_y_given_xs[np.asarray(x_seq), np.asarray(s_seq), :]
    return _draw_rows(rows, rng)


def sample_u_given_s(law: GpLaw, s_seq, rng: np.random.Generator) -> np.ndarray:
    return _draw_rows(law.p_u_given_s[np.asarray(s_seq)], rng)


def sample_wz_source(law: WzLaw, n: int, rng: np.random.Generator):
    flat = np.broadcast_to(law.p_xy.ravel(), (n, law.num_x * law.num_y))
    idx = _draw_rows(flat, rng)
    return idx // law.num_y, idx % law.num_y


def sample_u_given_x(law: WzLaw, x_seq, rng: np.random.Generator) -> np.ndarray:
    return _draw_rows(law.p_u_given_x[np.asarray(x_seq)], rng)


def _fmt_row(row) -> str:
    return " ".join(repr(float(v)) for v in row)


def _fmt_int_row(row) -> str:
    return " ".join(str(int(v)) for v in row)


def write_law(law, path) -> None:
    """Serialize a law to the plain-text table format."""
    lines = []
    if isinstance(law, GpLaw):
        lines.append("kind gp")
        lines.append(f"sizes {law.num_s} {law.num_u} {law.num_x} {law.num_y}")
        lines.append("p_state " + _fmt_row(law.p_state))
        for s in range(law.num_s):
            lines.append("p_u_given_s " + _fmt_row(law.p_u_given_s[s]))
        for u in range(law.num_u):
            lines.append("f_us " + _fmt_int_row(law.f_us[u]))
        for x in range(law.num_x):
            for s in range(law.num_s):
                lines.append("p_y_given_xs " + _fmt_row(law.p_y_given_xs[x, s]))
    elif isinstance(law, WzLaw):
        lines.append("kind wz")
        lines.append(f"sizes {law.num_x} {law.num_y} {law.num_u} {law.num_xhat}")
        for x in range(law.num_x):
            lines.append("p_xy " + _fmt_row(law.p_xy[x]))
        for x in range(law.num_x):
            lines.append("p_u_given_x " + _fmt_row(law.p_u_given_x[x]))
        for u in range(law.num_u):
            lines.append("f_uy " + _fmt_int_row(law.f_uy[u]))
        for x in range(law.num_x):
            lines.append("rho " + _fmt_row(law.rho[x]))
    else:
        raise TypeError("law must be a GpLaw or WzLaw")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_labeled_rows(lines: list[str], label: str, count: int, start: int):
    rows = []
    for i in range(count):
        parts = lines[start + i].split()
        if parts[0] != label:
            raise ValueError(f"expected '{label}' row at line {start + i + 1}")
        rows.append(parts[1:])
    return rows, start + count


def read_law(path):
    """Parse a law file written by write_law (comments with '#' allowed)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    head = lines[0].split()
    if head[0] != "kind" or len(head) != 2:
        raise ValueError("law file must start with a 'kind' line")
    sizes_parts = lines[1].split()
    if sizes_parts[0] != "sizes":
        raise ValueError("second line must declare alphabet sizes")
    sizes = [int(v) for v in sizes_parts[1:]]
    if head[1] == "gp":
        num_s, num_u, num_x, num_y = sizes
        pos = 2
        p_state_rows, pos = _read_labeled_rows(lines, "p_state", 1, pos)
        p_us_rows, pos = _read_labeled_rows(lines, "p_u_given_s", num_s, pos)
        f_rows, pos = _read_labeled_rows(lines, "f_us", num_u, pos)
        chan_rows, pos = _read_labeled_rows(lines, "p_y_given_xs", num_x * num_s, pos)
        chan = np.array([[float(v) for v in r] for r in chan_rows]).reshape(num_x, num_s, num_y)
        return GpLaw(
            p_state=np.array([float(v) for v in p_state_rows[0]]),
            p_u_given_s=np.array([[float(v) for v in r] for r in p_us_rows]),
            f_us=np.array([[int(v) for v in r] for r in f_rows]),
            p_y_given_xs=chan,
        )
    if head[1] == "wz":
        num_x, num_y, num_u, num_xhat = sizes
        pos = 2
        p_xy_rows, pos = _read_labeled_rows(lines, "p_xy", num_x, pos)
        p_ux_rows, pos = _read_labeled_rows(lines, "p_u_given_x", num_x, pos)
        f_rows, pos = _read_labeled_rows(lines, "f_uy", num_u, pos)
        rho_rows, pos = _read_labeled_rows(lines, "rho", num_x, pos)
        return WzLaw(
            p_xy=np.array([[float(v) for v in r] for r in p_xy_rows]),
            p_u_given_x=np.array([[float(v) for v in r] for r in p_ux_rows]),
            f_uy=np.array([[int(v) for v in r] for r in f_rows]),
            rho=np.array([[float(v) for v in r] for r in rho_rows]),
        )
    raise ValueError(f"unknown law kind '{head[1]}'")
