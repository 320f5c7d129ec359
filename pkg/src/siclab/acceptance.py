"""Acceptance suite: twelve numbered checks over the four schemes.

Each criterion function returns (passed, detail) and is deterministic
given the master seed; ``run_suite`` collects them into result rows for
the CLI and the test suite.  Two criteria are expected to fail at desk
scale and are kept faithful instead of weakened: the low-slack Gaussian
feedforward distortion target (5) and the pinned two-stage feedforward
instance whose inner blocks outgrow the enumeration budget (8).
"""

import csv
import dataclasses
import io
import math
import os
from fractions import Fraction

import numpy as np

from . import __version__
from . import dirty_paper as dp
from . import finite_info as fi
from . import gp_finite as gp
from . import reporting
from . import sw_codecs as sw
from . import wz_finite as wzf
from . import wz_gaussian as wzg

import matplotlib.pyplot as plt  # backend fixed to Agg by reporting


@dataclasses.dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str


def _flip_pair_law(flip: float) -> np.ndarray:
    return 0.5 * np.array([[1.0 - flip, flip], [flip, 1.0 - flip]])


def _erasure_channel(e: float) -> np.ndarray:
    # y = x xor s with probability 1 - e, erasure symbol 2 otherwise
    chan = np.zeros((2, 2, 3))
    for x in range(2):
        for s in range(2):
            chan[x, s, x ^ s] = 1.0 - e
            chan[x, s, 2] = e
    return chan


def _gp_acceptance_instance():
    law, objective = fi.brute_force_gp([0.5, 0.5], _erasure_channel(0.01),
                                       2, 0.25)
    schedule = gp.plan_schedule(12, law, gp.GpSlacks(0.15, 0.15), 2, 8, 5)
    codec = gp.GpCodecConfig(0.25, 0.2)
    return law, objective, schedule, codec


def _wz_demo_law() -> fi.WzLaw:
    p_xy = np.array([[0.375, 0.0, 0.125], [0.0, 0.375, 0.125]])
    p_ux = np.array([[0.9, 0.1], [0.1, 0.9]])
    return fi.WzLaw(p_xy, p_ux, fi.best_response_f_wz(p_xy, p_ux))


def criterion_1(master_seed: int, quick: bool):
    """Shared-noise paired episodes: known interference changes nothing."""
    pairs = 100 if quick else 1000
    params = dp.derive_params(1.0, 1.0, 15, 0.4, interference_var=4.0)
    rng = np.random.default_rng(sw.derive_seed(master_seed, 1))
    msgs = rng.integers(params.num_messages_M, size=pairs)
    s_mat = rng.normal(0.0, 2.0, size=(pairs, 15))
    z_mat = rng.normal(0.0, 1.0, size=(pairs, 15))
    with_s = dp.run_episodes_batch(params, msgs, s_mat, z_mat)
    without = dp.run_episodes_batch(params, msgs, np.zeros_like(s_mat), z_mat)
    same = bool(np.all(with_s.decoded == without.decoded))
    gap = float(np.max(np.abs(
        (with_s.theta - with_s.final_estimates)
        - (without.theta - without.final_estimates))))
    passed = same and gap < 1e-9
    return passed, (f"{pairs} pairs: identical decisions {same}, "
                    f"max final-error gap {gap:.3g} (< 1e-9)")


def criterion_2(master_seed: int, quick: bool):
    """Final error variance follows noise_var / alpha^(2n)."""
    trials = 20000 if quick else 100000
    params = dp.derive_params(1.0, 1.0, 10, 0.4)
    rng = np.random.default_rng(sw.derive_seed(master_seed, 2))
    msgs = rng.integers(params.num_messages_M, size=trials)
    z_mat = rng.normal(0.0, 1.0, size=(trials, 10))
    batch = dp.run_episodes_batch(params, msgs, np.zeros((trials, 10)), z_mat)
    target = params.noise_var / params.alpha_sq ** params.horizon_n
    var = float(batch.phi_final.var(ddof=1))
    se = target * math.sqrt(2.0 / (trials - 1))
    dev = abs(var - target) / se
    return dev < 4.0, (f"{trials} episodes: var {var:.6g} vs target "
                       f"{target:.6g}, {dev:.2f} standard errors (< 4)")


def criterion_3(master_seed: int, quick: bool):
    """Mean-square transmit power equals P at every step i >= 2."""
    trials = 20000 if quick else 100000
    params = dp.derive_params(1.0, 1.0, 15, 0.4, interference_var=4.0)
    rng = np.random.default_rng(sw.derive_seed(master_seed, 3))
    msgs = rng.integers(params.num_messages_M, size=trials)
    s_mat = rng.normal(0.0, 2.0, size=(trials, 15))
    z_mat = rng.normal(0.0, 1.0, size=(trials, 15))
    batch = dp.run_episodes_batch(params, msgs, s_mat, z_mat)
    worst = 0.0
    for i in range(2, 16):
        sq = batch.inputs[:, i - 1] ** 2
        se = float(sq.std(ddof=1)) / math.sqrt(trials)
        worst = max(worst, abs(float(sq.mean()) - params.power_P) / se)
    return worst < 4.0, (f"{trials} episodes, steps 2..15: worst deviation "
                         f"{worst:.2f} standard errors (< 4)")


def criterion_4(master_seed: int, quick: bool):
    """Monte Carlo two-sided distortion identity at three design points."""
    trials = 20000 if quick else 100000
    configs = ((4, 1.0, 0.05, 1.0), (8, 1.0, 0.05, 1.0), (8, 2.0, 0.1, 2.0))
    parts = []
    passed = True
    for i, (l, rate, eps, var) in enumerate(configs):
        spec = wzg.derive_quantizer(l, rate, eps, var)
        rng = np.random.default_rng(sw.derive_seed(master_seed, 4, i, 1))
        chk = wzg.check_distortion_identity(spec, trials, rng)
        dev = abs(chk.lhs - chk.rhs) / chk.diff_se
        passed = passed and dev <= 3.0
        parts.append(f"(l={l},R={rate},eps={eps}): {dev:.2f}se")
    return passed, f"{trials} trials each, gap within 3 combined "\
                   f"standard errors: " + ", ".join(parts)


def criterion_5(master_seed: int, quick: bool):
    """Low-slack feedforward distortion target; fails at desk scale:
    at R=1, eps=0.05 the block statistic overflows the quantizer
    interval on a large fraction of blocks and the clipped residual is
    amplified through the beta^l reconstruction chain, so measured
    distortion grows with l instead of approaching the limit."""
    trials = 2000 if quick else 10000
    means = {}
    for l in (10, 20, 30):
        spec = wzg.derive_quantizer(l, 1.0, 0.05, 1.0)
        rng = np.random.default_rng(sw.derive_seed(master_seed, 5, l))
        mean, _ = wzg.simulate_wz_distortion(spec, 4.0, trials, rng)
        means[l] = mean
    limit = wzg.distortion_limit(wzg.derive_quantizer(30, 1.0, 0.05, 1.0))
    rel = abs(means[30] - limit) / limit
    within = rel <= 0.25
    decreasing = means[10] > means[20] > means[30]
    passed = within and decreasing
    return passed, (f"{trials} trials: mean distortion "
                    f"{means[10]:.4g} / {means[20]:.4g} / {means[30]:.4g} "
                    f"at l=10/20/30 vs limit {limit:.4g}; "
                    f"within 25% at l=30: {within}, decreasing: {decreasing}")


def criterion_6(master_seed: int, quick: bool):
    """Index offset by one cell moves mean distortion by under 10%."""
    trials = 4000 if quick else 20000
    spec = wzg.derive_quantizer(30, 1.0, 0.25)
    d0 = wzg.perturb_index_robustness(
        spec, 0, trials, np.random.default_rng(sw.derive_seed(master_seed, 6)))
    d1 = wzg.perturb_index_robustness(
        spec, 1, trials, np.random.default_rng(sw.derive_seed(master_seed, 6)))
    rel = abs(d1 - d0) / d0
    return rel < 0.10, (f"{trials} trials at l=30: baseline {d0:.5g}, "
                        f"offset-1 {d1:.5g}, relative change {rel:.4g} (< 0.1)")


def criterion_7(master_seed: int, quick: bool):
    """Iterative state-writing protocol end to end on the optimized
    binary erasure instance."""
    sessions = 50 if quick else 200
    law, objective, schedule, codec = _gp_acceptance_instance()
    recovered = 0
    for t in range(sessions):
        master = sw.derive_seed(master_seed, 7, t)
        rng = np.random.default_rng(sw.derive_seed(master, 99))
        message = rng.integers(0, 2, size=schedule.message_bits_N)
        transcript, failure = gp.run_gp_trial(schedule, law, message, codec,
                                              master, rng)
        if failure is None and np.array_equal(transcript.decoded_bits,
                                              message):
            recovered += 1
    rate_floor = Fraction(1, 2) * schedule.net_rate
    rate_ok = schedule.achieved_rate >= rate_floor
    recovery = recovered / sessions
    passed = recovery >= 0.90 and rate_ok
    return passed, (f"{sessions} sessions: recovery {recovery:.3f} (>= 0.9), "
                    f"achieved rate {float(schedule.achieved_rate):.4g} >= "
                    f"0.5 x net rate {float(schedule.net_rate):.4g}: {rate_ok}; "
                    f"search objective {objective:.4g}")


def criterion_8(master_seed: int, quick: bool):
    """Pinned two-stage feedforward instance; fails at desk scale: the
    plan is geometrically sound but its second block (27 symbols) needs
    2^27 candidate enumerations against a 2^22 budget, so no trial can
    complete.  The geometric plan identities are still checked."""
    p_xy = np.array([[0.375, 0.125], [0.125, 0.375]])
    p_ux = np.array([[0.9, 0.1], [0.1, 0.9]])
    law = fi.WzLaw(p_xy, p_ux, np.array([[0, 0], [1, 1]]))
    measures = fi.info_measures(law)
    schedule = wzf.wz_plan(10, 2, law, wzf.WzSlacks(0.1, 0.1))
    rate_y = measures.h_u_given_y + 0.1
    ratio = rate_y / (measures.h_u_given_x - 0.1)
    plan_ok = (
        schedule.block_lens == tuple(
            int(math.floor(10 * ratio ** j + 0.5)) for j in range(2))
        and schedule.sw_bits == tuple(
            math.ceil(schedule.block_lens[j] * rate_y) for j in range(2)))
    exact = fi.wz_objective(law)[1]
    trials = 1 if quick else 3
    dists = []
    wall = None
    for t in range(trials):
        rng = np.random.default_rng(sw.derive_seed(master_seed, 8, t))
        try:
            transcript, _ = wzf.run_wz_trial(
                schedule, law, wzf.WzCodecConfig(0.1, 0.1), t, rng)
        except fi.EnumerationBudgetError as exc:
            wall = str(exc)
            break
        if transcript is not None:
            dists.append(transcript.distortion)
    if wall is not None:
        return False, (f"plan {schedule.block_lens} blocks / "
                       f"{schedule.sw_bits} bits matches the geometric "
                       f"formulas: {plan_ok}; no trial can run: {wall}")
    if not dists:
        return False, "all trials failed before producing a distortion"
    d = np.asarray(dists)
    se = d.std(ddof=1) / math.sqrt(d.size) if d.size > 1 else float("inf")
    dist_ok = abs(d.mean() - exact) <= 3.0 * se
    return plan_ok and dist_ok, (
        f"distortion {d.mean():.4g} vs exact {exact:.4g} within 3se: "
        f"{dist_ok}; plan identities: {plan_ok}")


def criterion_9(master_seed: int, quick: bool):
    """Exact rational schedule arithmetic for both planners."""
    s = gp.plan_schedule_rates(16, Fraction(1), Fraction(1, 2), 3, 1, 1)
    ratio = Fraction(1, 2) / Fraction(1)
    gp_checks = (
        s.block_lens == (16, 8, 4)
        and Fraction(s.block_lens[0]) == Fraction(16) / Fraction(1)
        and all(Fraction(s.block_lens[j + 1])
                == Fraction(s.block_lens[j]) * ratio for j in range(2))
        and s.cumulative_len == 28
        and s.termination_bits == 2
        and s.achieved_rate == Fraction(8, 15)
        and Fraction(s.cumulative_len + s.termination_len_L)
        <= Fraction(16) / s.net_rate + s.termination_len_L)
    w = wzf.wz_plan_rates(4, 3, Fraction(1, 4), Fraction(1, 2))
    r = w.ratio_r
    wz_checks = (
        w.block_lens == (4, 8, 16)
        and Fraction(w.total_n) == 4 * sum(r ** j for j in range(3))
        and Fraction(w.emitted_bits) == 4 * r ** 2 * Fraction(1, 2)
        and w.sw_bits == (2, 4, 8)
        and w.rate == Fraction(2, 7))
    passed = gp_checks and wz_checks
    return passed, (f"state-writing plan (16, 8, 4)/28 identities: "
                    f"{gp_checks}; feedforward plan (4, 8, 16)/8-bit "
                    f"identities: {wz_checks} (exact rationals)")


def criterion_10(master_seed: int, quick: bool):
    """Codec round trips exhaustively at n=8; seeded decode success."""
    pair = _flip_pair_law(0.1)
    spec8 = fi.TypicalitySpec(0.1, 8)
    code = sw.BinningCode(8, 3, sw.derive_seed(master_seed, 10, 0), pair,
                          spec8)
    invert_ok = True
    inverted = 0
    for side_val in range(256):
        side = sw.int_to_bits(side_val, 8)
        for value in range(8):
            bits = sw.int_to_bits(value, 3)
            try:
                u = sw.sw_invert(bits, side, code)
            except sw.SwInvertFailure:
                continue
            inverted += 1
            if not (np.array_equal(sw.sw_encode(u, code), bits)
                    and fi.is_jointly_typical(u, side, pair, spec8)):
                invert_ok = False

    shaper = sw.ShaperSpec(8, _flip_pair_law(0.2), fi.TypicalitySpec(0.15, 8))
    shaper_ok = True
    step = 8 if quick else 1
    for x_val in range(0, 256, step):
        x = sw.int_to_bits(x_val, 8)
        table = sw.shaper_table(x, shaper)
        budget = table.shape[0].bit_length() - 1
        seen = set()
        for value in range(1 << budget):
            bits = sw.int_to_bits(value, budget)
            u = sw.shape(bits, x, shaper)
            seen.add(tuple(u.tolist()))
            if not np.array_equal(sw.unshape(u, x, shaper, budget), bits):
                shaper_ok = False
        if len(seen) != 1 << budget:
            shaper_ok = False

    n, flip, delta = 12, 0.05, 0.05
    dec_pair = _flip_pair_law(flip)
    budget = sw.encode_bit_budget(n, fi.binary_entropy(flip), 0.15)
    dec_code = sw.BinningCode(n, budget, sw.derive_seed(master_seed, 10, 2),
                              dec_pair, fi.TypicalitySpec(delta, n))
    dec_spec = fi.TypicalitySpec(delta, n)
    rng = np.random.default_rng(sw.derive_seed(master_seed, 10, 3))
    wanted = 200 if quick else 1000
    successes = trials = 0
    while trials < wanted:
        y = rng.integers(0, 2, size=n)
        u = y ^ (rng.random(n) < flip)
        if not fi.is_jointly_typical(u, y, dec_pair, dec_spec):
            continue
        trials += 1
        res = sw.sw_decode(sw.sw_encode(u, dec_code), y, dec_code)
        if np.array_equal(res.u_seq, u):
            successes += 1
    rate = successes / trials
    passed = invert_ok and shaper_ok and rate >= 0.95
    return passed, (f"bin inversion round trip {inverted} cases: {invert_ok}; "
                    f"shaper bijection (stride {step}): {shaper_ok}; "
                    f"decode success {rate:.3f} (>= 0.95) at "
                    f"{budget}-bit budget, n={n}")


def criterion_11(master_seed: int, quick: bool):
    """One-sided empirical bounds: measured reliable channel rate never
    beats the single-letter objective, measured distortion never beats
    the exact single-letter distortion."""
    sessions = 20 if quick else 60
    law, objective, schedule, codec = _gp_acceptance_instance()
    recovered = 0
    for t in range(sessions):
        master = sw.derive_seed(master_seed, 11, 0, t)
        rng = np.random.default_rng(sw.derive_seed(master, 99))
        message = rng.integers(0, 2, size=schedule.message_bits_N)
        transcript, failure = gp.run_gp_trial(schedule, law, message, codec,
                                              master, rng)
        if failure is None and np.array_equal(transcript.decoded_bits,
                                              message):
            recovered += 1
    reliable = float(schedule.achieved_rate) * recovered / sessions
    rate_ok = reliable <= objective + 0.05

    wz_law = _wz_demo_law()
    exact = fi.wz_objective(wz_law)[1]
    wz_schedule = wzf.wz_plan(6, 2, wz_law, wzf.WzSlacks(0.07, 0.5))
    wz_codec = wzf.WzCodecConfig(0.14, 0.25)
    dists = []
    for t in range(sessions):
        master = sw.derive_seed(master_seed, 11, 1, t)
        rng = np.random.default_rng(sw.derive_seed(master, 1))
        transcript, _ = wzf.run_wz_trial(wz_schedule, wz_law, wz_codec,
                                         master, rng)
        if transcript is not None:
            dists.append(transcript.distortion)
    d = np.asarray(dists)
    se = float(d.std(ddof=1)) / math.sqrt(d.size)
    dist_ok = float(d.mean()) >= exact - 3.0 * se
    passed = rate_ok and dist_ok
    return passed, (f"reliable channel rate {reliable:.4g} <= objective "
                    f"{objective:.4g} + 0.05: {rate_ok}; distortion "
                    f"{float(d.mean()):.4g} >= exact {exact:.4g} - 3se: "
                    f"{dist_ok} ({d.size}/{sessions} trials complete)")


def criterion_12(master_seed: int, quick: bool):
    """Two same-seed suite passes emit byte-identical CSV text."""
    first = run_suite(quick=True, master_seed=master_seed,
                      indices=range(1, 12))
    second = run_suite(quick=True, master_seed=master_seed,
                       indices=range(1, 12))
    text_a = criteria_csv_text(first)
    text_b = criteria_csv_text(second)
    passed = text_a == text_b
    return passed, (f"two quick passes over criteria 1-11: CSV bytes "
                    f"{'identical' if passed else 'differ'} "
                    f"({len(text_a.encode('utf-8'))} bytes)")


_CRITERIA = (
    (1, "interference invariance", criterion_1),
    (2, "final-error variance law", criterion_2),
    (3, "constant transmit power", criterion_3),
    (4, "distortion identity", criterion_4),
    (5, "feedforward distortion limit", criterion_5),
    (6, "index-offset robustness", criterion_6),
    (7, "state-writing end-to-end", criterion_7),
    (8, "feedforward end-to-end", criterion_8),
    (9, "schedule arithmetic", criterion_9),
    (10, "codec properties", criterion_10),
    (11, "one-sided sanity bounds", criterion_11),
    (12, "determinism", criterion_12),
)


def run_suite(quick: bool = False, master_seed: int = 0,
              indices=None) -> list[CriterionResult]:
    wanted = set(indices) if indices is not None else None
    results = []
    for index, name, fn in _CRITERIA:
        if wanted is not None and index not in wanted:
            continue
        passed, detail = fn(master_seed, quick)
        results.append(CriterionResult(index, name, passed, detail))
    return results


def format_result(result: CriterionResult) -> str:
    verdict = "PASS" if result.passed else "FAIL"
    return f"criterion {result.index:2d} {verdict} {result.name}: " \
           f"{result.detail}"


def criteria_csv_text(results) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("criterion", "name", "passed", "detail"))
    for result in results:
        writer.writerow((result.index, result.name,
                         "PASS" if result.passed else "FAIL", result.detail))
    return buffer.getvalue()


def write_suite_report(results, out_dir: str, master_seed: int,
                       quick: bool = False) -> dict:
    """criteria.csv, meta.txt, and a pass/fail chart under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {"csv": os.path.join(out_dir, "criteria.csv")}
    with open(paths["csv"], "w", encoding="utf-8", newline="") as handle:
        handle.write(criteria_csv_text(results))
    paths["meta"] = reporting.write_meta(
        os.path.join(out_dir, "meta.txt"),
        f"command: accept\nquick: {quick}", master_seed)

    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    xs = [r.index for r in results]
    colors = ["#2a7e43" if r.passed else "#b03a2e" for r in results]
    ax.bar(xs, [1] * len(results), color=colors)
    ax.set_xticks(xs)
    ax.set_yticks([])
    ax.set_xlabel("criterion")
    ax.set_title("acceptance suite: green pass, red fail")
    fig.tight_layout()
    paths["figure"] = os.path.join(out_dir, "criteria.png")
    fig.savefig(paths["figure"], dpi=120)
    plt.close(fig)
    return paths
