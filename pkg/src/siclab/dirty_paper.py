"""Feedback coding on the Gaussian channel with additive interference.

Channel model: Y_i = X_i + S_i + Z_i. The interference sequence S is
known to the encoder before transmission starts, the noise Z is i.i.d.
Gaussian, and a noiseless feedback link returns the receiver's running
estimate after every channel use. The message is a point theta in (0, 1);
the encoder aims the receiver at a shifted target theta' whose shift
pre-cancels the interference, so the final estimate (and hence the
decision) is the same as if S were identically zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianFbParams",
    "ShiftState",
    "SkEncoderState",
    "SkReceiverState",
    "Transcript",
    "EpisodeBatch",
    "derive_params",
    "message_to_theta",
    "compute_shift",
    "encode_step",
    "receive_step",
    "decode_message",
    "noise_error_final",
    "analytic_error_power",
    "run_episode",
    "run_episodes_batch",
]


@dataclass(frozen=True)
class GaussianFbParams:
    """Scalars of one channel configuration.

    alpha_sq is stored separately as 1 + power_P/noise_var so that the
    weights 1/alpha^2 and 1 - 1/alpha^2 are exact where the ratio is.
    """

    power_P: float
    noise_var: float
    interference_var: float
    horizon_n: int
    rate_R: float
    num_messages_M: int
    alpha: float
    alpha_sq: float
    gain_g: float
    capacity_C: float


@dataclass(frozen=True)
class ShiftState:
    """Interference pre-cancellation terms for one episode.

    psi has length n + 2 and is indexed by step: psi[i] is the shift used
    at step i, for i = 2 .. n+1; psi[0] and psi[1] are unused zeros.
    """

    psi: np.ndarray
    theta: float
    theta_prime: float


@dataclass
class SkEncoderState:
    """Encoder side of the recursion. estimate_x1 holds X_{i,1}: the
    value fed back by the receiver after step i-1 (0.5 before step 1)."""

    step_i: int = 1
    estimate_x1: float = 0.5


@dataclass
class SkReceiverState:
    step_i: int = 1
    estimate_x1: float = 0.5


@dataclass(frozen=True)
class Transcript:
    """Complete record of one episode, for audit and paired comparison."""

    message: int
    decoded_message: int
    theta: float
    theta_prime: float
    inputs: np.ndarray
    outputs: np.ndarray
    feedback: np.ndarray
    noise: np.ndarray
    interference: np.ndarray
    final_estimate: float
    phi_final: float


@dataclass(frozen=True)
class EpisodeBatch:
    """Vectorized episode results, one row per trial."""

    messages: np.ndarray
    decoded: np.ndarray
    theta: np.ndarray
    final_estimates: np.ndarray
    phi_final: np.ndarray
    inputs: np.ndarray
    outputs: np.ndarray


def derive_params(P: float, noise_var: float, n: int, R: float,
                  interference_var: float = 0.0) -> GaussianFbParams:
    """Derive the per-configuration scalars from power, noise, horizon, rate."""
    for name, value in (("P", P), ("noise_var", noise_var), ("R", R),
                        ("interference_var", interference_var)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
    if P < 0:
        raise ValueError(f"P must be >= 0, got {P}")
    if noise_var <= 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    if interference_var < 0:
        raise ValueError(f"interference_var must be >= 0, got {interference_var}")
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    if R <= 0:
        raise ValueError(f"R must be > 0, got {R}")
    snr = P / noise_var
    alpha_sq = 1.0 + snr
    M = math.ceil(2.0 ** (n * R))  # n >= 2 and R > 0 make this >= 2
    return GaussianFbParams(
        power_P=float(P),
        noise_var=float(noise_var),
        interference_var=float(interference_var),
        horizon_n=int(n),
        rate_R=float(R),
        num_messages_M=M,
        alpha=math.sqrt(alpha_sq),
        alpha_sq=alpha_sq,
        gain_g=math.sqrt(snr),
        capacity_C=0.5 * math.log2(alpha_sq),
    )


def message_to_theta(m: int, M: int) -> float:
    """Map message index m to the interval midpoint (m + 1/2) / M."""
    if not isinstance(m, (int, np.integer)):
        raise ValueError(f"message index must be an integer, got {m!r}")
    if not 0 <= m < M:
        raise ValueError(f"message index {m} out of range [0, {M})")
    return (m + 0.5) / M


def compute_shift(s_seq, params: GaussianFbParams, theta: float) -> ShiftState:
    """Fold the known interference into a per-step shift sequence.

    psi[2] = S_1/alpha, then psi[i+1] = psi[i] + (1 - 1/alpha^2) S_i /
    (alpha^{i-1} g) for i = 2..n, and theta' = theta + psi[n+1].
    """
    s = np.asarray(s_seq, dtype=float)
    n = params.horizon_n
    if s.shape != (n,):
        raise ValueError(f"interference length {s.shape} != horizon ({n},)")
    if params.gain_g == 0.0 and np.any(s[1:] != 0.0):
        raise ValueError("zero power: shift recursion divides by g for i >= 2")
    psi = np.zeros(n + 2)
    psi[2] = s[0] / params.alpha
    weight = 1.0 - 1.0 / params.alpha_sq
    for i in range(2, n + 1):
        if params.gain_g == 0.0:
            psi[i + 1] = psi[i]  # reachable only with S_i = 0
        else:
            psi[i + 1] = psi[i] + weight * s[i - 1] / (params.alpha ** (i - 1) * params.gain_g)
    return ShiftState(psi=psi, theta=float(theta), theta_prime=float(theta) + psi[n + 1])


def encode_step(i: int, state: SkEncoderState, shift: ShiftState,
                params: GaussianFbParams) -> float:
    """Channel input for step i. Advances the encoder state."""
    if i != state.step_i:
        raise ValueError(f"encode step {i} called while expecting step {state.step_i}")
    if i == 1:
        x = params.alpha * (state.estimate_x1 - shift.theta_prime)
    else:
        x = params.alpha ** (i - 1) * params.gain_g * (
            state.estimate_x1 - shift.theta_prime + shift.psi[i])
    state.step_i = i + 1
    return x


def receive_step(i: int, y_i: float, state: SkReceiverState,
                 params: GaussianFbParams) -> float:
    """Receiver update for step i; returns the estimate that is fed back."""
    if i != state.step_i:
        raise ValueError(f"receive step {i} called while expecting step {state.step_i}")
    if i == 1:
        new = state.estimate_x1 - y_i / params.alpha
    else:
        x_i2 = state.estimate_x1 - y_i / (params.alpha ** (i - 1) * params.gain_g)
        new = state.estimate_x1 / params.alpha_sq + (1.0 - 1.0 / params.alpha_sq) * x_i2
    state.estimate_x1 = new
    state.step_i = i + 1
    return new


def decode_message(x_final: float, M: int) -> int:
    """Quantize the final estimate to a message index, clamping to [0, M)."""
    m = math.floor(x_final * M)
    return min(max(m, 0), M - 1)


def noise_error_final(z_seq, params: GaussianFbParams) -> float:
    """Final estimation error due to the noise alone.

    phi_2 = Z_1/alpha, then phi_{i+1} = phi_i/alpha^2 +
    (1 - 1/alpha^2) Z_i / (alpha^{i-1} g); returns phi_{n+1}. The
    receiver's final estimate equals theta - phi_{n+1} regardless of the
    interference, which is what makes paired comparisons exact.
    """
    z = np.asarray(z_seq, dtype=float)
    n = params.horizon_n
    if z.shape != (n,):
        raise ValueError(f"noise length {z.shape} != horizon ({n},)")
    if params.gain_g == 0.0:
        raise ValueError("zero power: error recursion divides by g")
    phi = z[0] / params.alpha
    weight = 1.0 - 1.0 / params.alpha_sq
    for i in range(2, n + 1):
        phi = phi / params.alpha_sq + weight * z[i - 1] / (params.alpha ** (i - 1) * params.gain_g)
    return phi


def analytic_error_power(params: GaussianFbParams) -> np.ndarray:
    """Second moments E[phi_i^2] for i = 2 .. n+1, by the closed recursion.

    The cross term between phi_i and Z_i vanishes because phi_i depends
    only on Z_1..Z_{i-1}. The per-symbol transmit power at step i >= 2 is
    alpha^{2(i-1)} g^2 E[phi_i^2], which this recursion keeps equal to P.
    """
    n = params.horizon_n
    if params.gain_g == 0.0:
        raise ValueError("zero power: recursion divides by g")
    weight = 1.0 - 1.0 / params.alpha_sq
    out = np.zeros(n)
    out[0] = params.noise_var / params.alpha_sq
    for i in range(2, n + 1):
        out[i - 1] = (out[i - 2] / params.alpha_sq ** 2
                      + weight ** 2 * params.noise_var / (params.alpha ** (i - 1) * params.gain_g) ** 2)
    return out


def run_episode(params: GaussianFbParams, m: int, s_seq, z_seq) -> Transcript:
    """Run one full encoder/channel/receiver episode."""
    n = params.horizon_n
    if params.gain_g == 0.0:
        raise ValueError("zero power: episodes need g > 0 for steps i >= 2")
    s = np.asarray(s_seq, dtype=float)
    z = np.asarray(z_seq, dtype=float)
    theta = message_to_theta(m, params.num_messages_M)
    shift = compute_shift(s, params, theta)
    enc = SkEncoderState()
    rx = SkReceiverState()
    inputs = np.zeros(n)
    outputs = np.zeros(n)
    feedback = np.zeros(n)
    for i in range(1, n + 1):
        x = encode_step(i, enc, shift, params)
        y = x + s[i - 1] + z[i - 1]
        fb = receive_step(i, y, rx, params)
        enc.estimate_x1 = fb
        inputs[i - 1] = x
        outputs[i - 1] = y
        feedback[i - 1] = fb
    final = rx.estimate_x1
    return Transcript(
        message=int(m),
        decoded_message=decode_message(final, params.num_messages_M),
        theta=theta,
        theta_prime=shift.theta_prime,
        inputs=inputs,
        outputs=outputs,
        feedback=feedback,
        noise=z.copy(),
        interference=s.copy(),
        final_estimate=final,
        phi_final=noise_error_final(z, params),
    )


def run_episodes_batch(params: GaussianFbParams, messages, s_mat, z_mat) -> EpisodeBatch:
    """Run many episodes at once, vectorized across trials.

    Follows the scalar recursion expression for expression, so results
    are bit-identical to run_episode on each row.
    """
    n = params.horizon_n
    if params.gain_g == 0.0:
        raise ValueError("zero power: episodes need g > 0 for steps i >= 2")
    s = np.asarray(s_mat, dtype=float)
    z = np.asarray(z_mat, dtype=float)
    msgs = np.asarray(messages)
    trials = msgs.shape[0]
    if s.shape != (trials, n) or z.shape != (trials, n):
        raise ValueError("messages, interference, and noise shapes disagree")
    if params.gain_g == 0.0 and np.any(s[:, 1:] != 0.0):
        raise ValueError("zero power: shift recursion divides by g for i >= 2")
    theta = (msgs + 0.5) / params.num_messages_M
    weight = 1.0 - 1.0 / params.alpha_sq

    psi = np.zeros((trials, n + 2))
    psi[:, 2] = s[:, 0] / params.alpha
    for i in range(2, n + 1):
        psi[:, i + 1] = psi[:, i] + weight * s[:, i - 1] / (params.alpha ** (i - 1) * params.gain_g)
    theta_prime = theta + psi[:, n + 1]

    est = np.full(trials, 0.5)
    inputs = np.zeros((trials, n))
    outputs = np.zeros((trials, n))
    for i in range(1, n + 1):
        if i == 1:
            x = params.alpha * (est - theta_prime)
        else:
            x = params.alpha ** (i - 1) * params.gain_g * (est - theta_prime + psi[:, i])
        y = x + s[:, i - 1] + z[:, i - 1]
        if i == 1:
            est = est - y / params.alpha
        else:
            x_i2 = est - y / (params.alpha ** (i - 1) * params.gain_g)
            est = est / params.alpha_sq + (1.0 - 1.0 / params.alpha_sq) * x_i2
        inputs[:, i - 1] = x
        outputs[:, i - 1] = y

    phi = z[:, 0] / params.alpha
    for i in range(2, n + 1):
        phi = phi / params.alpha_sq + weight * z[:, i - 1] / (params.alpha ** (i - 1) * params.gain_g)

    decoded = np.clip(np.floor(est * params.num_messages_M), 0, params.num_messages_M - 1)
    return EpisodeBatch(
        messages=msgs.copy(),
        decoded=decoded.astype(np.int64),
        theta=theta,
        final_estimates=est,
        phi_final=phi,
        inputs=inputs,
        outputs=outputs,
    )
