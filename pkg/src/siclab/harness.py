"""Seeded Monte Carlo experiment driver for the four schemes.

Every trial draws its randomness from a generator seeded with
hash(master_seed, trial index), so results do not depend on execution
order or worker count; aggregation follows the trial index.
"""

import concurrent.futures
import dataclasses
import math

import numpy as np

from . import config as cfg
from . import dirty_paper as dp
from . import finite_info as fi
from . import gp_finite as gp
from . import sw_codecs as sw
from . import wz_finite as wzf
from . import wz_gaussian as wzg


@dataclasses.dataclass(frozen=True)
class ResultRow:
    """One aggregated sweep point: named point estimates with standard
    errors computed from the per-trial outcomes, the analytic reference
    for the scheme, and the trial count behind the point."""

    swept_value: object
    estimates: dict
    std_errors: dict
    reference: float
    trials: int


def _map_trials(fn, trials: int, workers: int) -> list:
    # trial-level parallelism only; map preserves the index order
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return float("nan"), float("nan")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def _run_dirty_paper(params: dict, law, trials: int, master_seed: int,
                     workers: int):
    fb = dp.derive_params(
        P=params["power_p"], noise_var=params["noise_var"],
        n=params["horizon_n"], R=params["rate_r"],
        interference_var=params["interference_var"])
    n = fb.horizon_n
    messages = np.zeros(trials, dtype=np.int64)
    s_mat = np.zeros((trials, n))
    z_mat = np.zeros((trials, n))
    s_std = math.sqrt(fb.interference_var)
    z_std = math.sqrt(fb.noise_var)
    for t in range(trials):
        rng = np.random.default_rng(sw.derive_seed(master_seed, t))
        messages[t] = rng.integers(fb.num_messages_M)
        if s_std > 0.0:
            s_mat[t] = rng.normal(0.0, s_std, n)
        z_mat[t] = rng.normal(0.0, z_std, n)
    # the recursion is vectorized but bit-identical to per-episode runs
    batch = dp.run_episodes_batch(fb, messages, s_mat, z_mat)
    errors = (batch.decoded != batch.messages).astype(float)
    power = np.mean(batch.inputs ** 2, axis=1)
    err_mean, err_se = _mean_se(errors)
    pow_mean, pow_se = _mean_se(power)
    estimates = {"error_rate": err_mean, "mean_power": pow_mean}
    std_errors = {"error_rate": err_se, "mean_power": pow_se}
    return estimates, std_errors, fb.capacity_C


def _run_wz_gaussian(params: dict, law, trials: int, master_seed: int,
                     workers: int):
    spec = wzg.derive_quantizer(
        params["block_len_l"], params["rate_r"], params["epsilon"],
        params["source_var"])
    si_var = params["si_var"]
    si_std = math.sqrt(si_var)
    src_std = math.sqrt(spec.source_var)
    l = spec.block_len_l

    def one(t: int) -> float:
        rng = np.random.default_rng(sw.derive_seed(master_seed, t))
        y = rng.normal(0.0, si_std, l) if si_var > 0.0 else np.zeros(l)
        x = y + rng.normal(0.0, src_std, l)
        index = wzg.wz_encode(x, spec)
        x_hat = wzg.wz_decode(index, y, x, spec)
        return float(np.mean((x - x_hat) ** 2))

    dist_mean, dist_se = _mean_se(_map_trials(one, trials, workers))
    estimates = {"distortion": dist_mean}
    std_errors = {"distortion": dist_se}
    return estimates, std_errors, wzg.distortion_limit(spec)


def _run_gp_finite(params: dict, law, trials: int, master_seed: int,
                   workers: int):
    slacks = gp.GpSlacks(params["eps_invert"], params["eps_encode"])
    schedule = gp.plan_schedule(
        params["message_bits"], law, slacks, params["iterations"],
        params["min_block"], params["term_factor"])
    codec = gp.GpCodecConfig(params["delta_invert"], params["delta_decode"])

    def one(t: int) -> float:
        seed = sw.derive_seed(master_seed, t)
        rng = np.random.default_rng(sw.derive_seed(seed, 1))
        message = rng.integers(0, 2, size=schedule.message_bits_N)
        transcript, failure = gp.run_gp_trial(schedule, law, message, codec,
                                              seed, rng)
        recovered = (failure is None
                     and np.array_equal(transcript.decoded_bits, message))
        return 1.0 if recovered else 0.0

    rec_mean, rec_se = _mean_se(_map_trials(one, trials, workers))
    measures = fi.info_measures(law)
    estimates = {"recovery_rate": rec_mean,
                 "achieved_rate": float(schedule.achieved_rate)}
    std_errors = {"recovery_rate": rec_se, "achieved_rate": 0.0}
    return estimates, std_errors, measures.h_u_given_s - measures.h_u_given_y


def _run_wz_finite(params: dict, law, trials: int, master_seed: int,
                   workers: int):
    slacks = wzf.WzSlacks(params["eps_shape"], params["eps_encode"])
    schedule = wzf.wz_plan(params["base_len"], params["iterations"], law,
                           slacks)
    codec = wzf.WzCodecConfig(params["delta_shape"], params["delta_decode"])

    def one(t: int):
        seed = sw.derive_seed(master_seed, t)
        rng = np.random.default_rng(sw.derive_seed(seed, 1))
        transcript, _ = wzf.run_wz_trial(schedule, law, codec, seed, rng)
        if transcript is None:
            return 0.0, None
        return 1.0, transcript.distortion

    outcomes = _map_trials(one, trials, workers)
    done_mean, done_se = _mean_se([done for done, _ in outcomes])
    dist_mean, dist_se = _mean_se(
        [d for _, d in outcomes if d is not None])
    measures = fi.info_measures(law)
    estimates = {"completion_rate": done_mean, "distortion": dist_mean,
                 "emitted_rate": float(schedule.rate)}
    std_errors = {"completion_rate": done_se, "distortion": dist_se,
                  "emitted_rate": 0.0}
    return estimates, std_errors, measures.h_u_given_y - measures.h_u_given_x


_RUNNERS = {
    "dirty-paper": _run_dirty_paper,
    "wz-gaussian": _run_wz_gaussian,
    "gp-finite": _run_gp_finite,
    "wz-finite": _run_wz_finite,
}

# documented CSV estimate columns per scheme, in emission order
SCHEMA = {
    "dirty-paper": ("error_rate", "mean_power"),
    "wz-gaussian": ("distortion",),
    "gp-finite": ("recovery_rate", "achieved_rate"),
    "wz-finite": ("completion_rate", "distortion", "emitted_rate"),
}


def run_experiment(config: cfg.ExperimentConfig) -> list[ResultRow]:
    """Run the configured experiment; one row per sweep value (a single
    row when no sweep is configured, none when trials == 0)."""
    if config.trials == 0:
        return []
    runner = _RUNNERS[config.scheme]
    values = config.sweep.values if config.sweep is not None else (None,)
    rows = []
    for value in values:
        params = dict(config.params)
        if value is not None:
            params[config.sweep.axis] = value
        estimates, std_errors, reference = runner(
            params, config.law, config.trials, config.master_seed,
            config.workers)
        rows.append(ResultRow(
            swept_value=value, estimates=estimates, std_errors=std_errors,
            reference=reference, trials=config.trials))
    return rows
