"""Thermal-relaxation noise on circuit execution.

The relaxation channel for a wall duration dt combines amplitude damping
with probability p1 = 1 - exp(-dt/T1) and pure dephasing with probability
pphi = 1 - exp(-dt (1/T2 - 1/(2 T1))). With the T2 = 2 T1 setting used in
the error study the dephasing rate vanishes and pure damping remains.

Two engines share the plan format from grover.build_execution_plan:

- Monte Carlo trajectories (primary): after every timed step each qubit
  of each trajectory takes one sampled Kraus branch, idle qubits decaying
  for the same wall duration. Trajectories are batched on the leading
  array axis.
- Exact density-matrix propagation (small-n validation oracle).

Gate and readout error hooks (flat depolarizing / bit-flip) exist but
default to off; the study in scope is thermal relaxation only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grover import build_execution_plan
from .hdc import CodebookSet
from .oracle import GateTimes
from .rng import stream
from .statevector import (
    GateOp,
    InjectStep,
    ReflectStep,
    RegisterLayout,
    Span,
    StateVector,
    _kernel_h,
    _kernel_mcx,
    _kernel_x,
    _span_view,
    superposition_vector,
)

__all__ = [
    "NoiseParams",
    "NoisyResult",
    "density_matrix_reference",
    "relaxation_channel",
    "run_noisy",
    "run_noisy_sweep",
    "success_error",
    "tv_distance",
]


@dataclass(frozen=True)
class NoiseParams:
    """Relaxation timescales (seconds) plus optional extra error knobs."""

    t1: float
    t2: float
    gate_times: GateTimes = GateTimes()
    depolarizing_prob: float = 0.0  # per touched qubit per gate, off by default
    readout_flip_prob: float = 0.0  # per measured bit, off by default

    def __post_init__(self) -> None:
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("T1 and T2 must be positive")
        if self.t2 > 2 * self.t1 + 1e-18:
            raise ValueError("unphysical parameters: require T2 <= 2*T1")

    @staticmethod
    def with_t2_ratio(t1: float, ratio: float = 2.0, **kw) -> "NoiseParams":
        return NoiseParams(t1=t1, t2=ratio * t1, **kw)


def _damping_probs(params: NoiseParams, duration: float) -> tuple[float, float]:
    if duration < 0:
        raise ValueError("duration must be >= 0")
    p1 = 1.0 - np.exp(-duration / params.t1)
    rate_phi = 1.0 / params.t2 - 1.0 / (2.0 * params.t1)
    pphi = 1.0 - np.exp(-duration * rate_phi)
    return float(p1), float(max(pphi, 0.0))


def relaxation_channel(params: NoiseParams, duration: float) -> list[np.ndarray]:
    """Kraus operators of the combined damping + dephasing channel.

    Zero-probability operators are dropped; completeness
    sum(K^dag K) = I holds to 1e-12 by construction.
    """
    p1, pphi = _damping_probs(params, duration)
    damp = [
        np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p1)]], dtype=complex),
        np.array([[0.0, np.sqrt(p1)], [0.0, 0.0]], dtype=complex),
    ]
    deph = [
        np.sqrt(1.0 - pphi) * np.eye(2, dtype=complex),
        np.sqrt(pphi) * np.diag([1.0, 0.0]).astype(complex),
        np.sqrt(pphi) * np.diag([0.0, 1.0]).astype(complex),
    ]
    kraus = []
    for d in deph:
        for a in damp:
            k = d @ a
            if np.abs(k).max() > 0.0:
                kraus.append(k)
    return kraus


@dataclass
class NoisyResult:
    """Aggregated measurement outcomes over factor-register patterns."""

    histogram: dict[int, int]
    ideal_histogram: dict[int, int]
    trials: int
    shots_per_trial: int
    noisy_distribution: dict[int, float] = field(default_factory=dict)
    ideal_distribution: dict[int, float] = field(default_factory=dict)


# ----------------------------------------------------- batched execution

def _batch_apply_step(amp: np.ndarray, step, n: int) -> None:
    if isinstance(step, GateOp):
        if step.kind == "X":
            for q in step.targets:
                _kernel_x(amp, q)
        elif step.kind == "H":
            for q in step.targets:
                _kernel_h(amp, q)
        elif step.kind in ("CX", "MCX"):
            _kernel_mcx(amp, step.controls, step.targets[0], n)
        else:
            raise ValueError(f"gate kind {step.kind!r} not supported under noise")
    elif isinstance(step, InjectStep):
        vec = superposition_vector(step.rows, step.span.width)
        a = _span_view(amp, step.span)
        base = a[..., 0, :].copy()
        a[...] = base[..., None, :] * vec[:, None]
    elif isinstance(step, ReflectStep):
        a = _span_view(amp, step.span)
        axis = step.axis
        coef = np.einsum("...hml,m->...hl", a, axis.conj())
        np.negative(a, out=a)
        a += 2.0 * coef[..., :, None, :] * axis[:, None]
    else:
        raise TypeError(f"unknown step {step!r}")


def _batch_relax_qubit(amp: np.ndarray, q: int, p1: float, pphi: float,
                       rng: np.random.Generator) -> None:
    """One sampled relaxation branch per batch row on qubit q (in place)."""
    B = amp.shape[0]
    a = amp.reshape(B, -1, 2, 1 << q)
    w1 = np.sum(np.abs(a[:, :, 1, :]) ** 2, axis=(1, 2)).real
    # amplitude damping branch
    p_decay = p1 * w1
    decay = rng.random(B) < p_decay
    if np.any(decay):
        sub = a[decay]
        sub[:, :, 0, :] = np.sqrt(p1) * sub[:, :, 1, :]
        sub[:, :, 1, :] = 0.0
        a[decay] = sub
    keep = ~decay
    if np.any(keep):
        a[keep, :, 1, :] *= np.sqrt(1.0 - p1)
    nrm = np.sqrt(np.sum(np.abs(amp) ** 2, axis=1))
    amp /= nrm[:, None]
    if pphi > 0.0:
        w1 = np.sum(np.abs(a[:, :, 1, :]) ** 2, axis=(1, 2)).real
        u = rng.random(B)
        proj0 = u < pphi * (1.0 - w1)
        proj1 = (~proj0) & (u < pphi)
        if np.any(proj0):
            a[proj0, :, 1, :] = 0.0
        if np.any(proj1):
            a[proj1, :, 0, :] = 0.0
        nrm = np.sqrt(np.sum(np.abs(amp) ** 2, axis=1))
        amp /= nrm[:, None]


_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _batch_depolarize_qubit(amp: np.ndarray, q: int, p: float,
                            rng: np.random.Generator) -> None:
    B = amp.shape[0]
    a = amp.reshape(B, -1, 2, 1 << q)
    u = rng.random(B)
    # branch thresholds: [0, p/4) X, [p/4, p/2) Y, [p/2, 3p/4) Z, else identity
    for i, pauli in enumerate(("X", "Y", "Z")):
        rows = (u >= i * p / 4.0) & (u < (i + 1) * p / 4.0)
        if not np.any(rows):
            continue
        m = _PAULI[pauli]
        sub0 = a[rows][:, :, 0, :].copy()
        sub1 = a[rows][:, :, 1, :].copy()
        block = a[rows]
        block[:, :, 0, :] = m[0, 0] * sub0 + m[0, 1] * sub1
        block[:, :, 1, :] = m[1, 0] * sub0 + m[1, 1] * sub1
        a[rows] = block


def _touched_qubits(step, n: int) -> list[int]:
    if isinstance(step, GateOp):
        return [*step.targets, *step.controls]
    if isinstance(step, ReflectStep):
        return list(range(step.span.start, step.span.stop))
    return []


def _execute_noisy_batch(steps, n: int, trials: int, params: NoiseParams,
                         rng: np.random.Generator) -> np.ndarray:
    amp = np.zeros((trials, 1 << n), dtype=np.complex128)
    amp[:, 0] = 1.0
    for step in steps:
        _batch_apply_step(amp, step, n)
        duration = getattr(step, "duration", 0.0)
        if duration > 0.0:
            p1, pphi = _damping_probs(params, duration)
            for q in range(n):
                _batch_relax_qubit(amp, q, p1, pphi, rng)
        if params.depolarizing_prob > 0.0 and isinstance(step, GateOp):
            for q in _touched_qubits(step, n):
                _batch_depolarize_qubit(amp, q, params.depolarizing_prob, rng)
    return amp


def _factor_marginals(amp: np.ndarray, span: Span) -> np.ndarray:
    a = _span_view(amp, span)
    return np.einsum("bhml->bm", np.abs(a) ** 2).real


def _sample_rows(marginals: np.ndarray, shots: int, rng: np.random.Generator,
                 flip_prob: float, width: int) -> dict[int, int]:
    hist: dict[int, int] = {}
    cum = np.cumsum(marginals, axis=1)
    cum /= cum[:, -1:]
    for b in range(marginals.shape[0]):
        draws = np.searchsorted(cum[b], rng.random(shots), side="right")
        if flip_prob > 0.0:
            flips = rng.random((shots, width)) < flip_prob
            weights = (1 << np.arange(width, dtype=np.int64))
            draws = draws ^ (flips @ weights)
        for v in np.atleast_1d(draws):
            hist[int(v)] = hist.get(int(v), 0) + 1
    return hist


def run_noisy(books: CodebookSet, target: np.ndarray, iterations: int,
              params: NoiseParams, shots: int, trials: int, seed: int,
              qubit_cap: int = 26) -> NoisyResult:
    """Monte Carlo trajectory execution of the circuit-mode plan.

    Returns sampled histograms plus exact (trajectory-averaged) factor
    distributions for metric evaluation without double sampling noise.
    """
    layout, steps = build_execution_plan(books, target, iterations, params.gate_times)
    n = layout.n_qubits
    if n > qubit_cap:
        raise ValueError(f"qubit budget exceeded: {n} > {qubit_cap}")
    span = layout.factors_span

    ideal = np.zeros((1, 1 << n), dtype=np.complex128)
    ideal[0, 0] = 1.0
    for step in steps:
        _batch_apply_step(ideal, step, n)
    ideal_marginal = _factor_marginals(ideal, span)[0]

    rng = stream(seed, 3)
    amp = _execute_noisy_batch(steps, n, trials, params, rng)
    noisy_marginals = _factor_marginals(amp, span)

    hist = _sample_rows(noisy_marginals, shots, rng, params.readout_flip_prob, span.width)
    ideal_hist = _sample_rows(np.tile(ideal_marginal, (trials, 1)), shots, rng,
                              0.0, span.width)
    mean_noisy = noisy_marginals.mean(axis=0)
    return NoisyResult(
        histogram=hist,
        ideal_histogram=ideal_hist,
        trials=trials,
        shots_per_trial=shots,
        noisy_distribution={i: float(p) for i, p in enumerate(mean_noisy) if p > 0},
        ideal_distribution={i: float(p) for i, p in enumerate(ideal_marginal) if p > 0},
    )


def run_noisy_sweep(books: CodebookSet, target: np.ndarray, iteration_marks,
                    params: NoiseParams, trials: int, seed: int,
                    qubit_cap: int = 26) -> dict[int, tuple[dict[int, float], dict[int, float]]]:
    """Noisy vs ideal factor distributions observed after each marked iteration.

    Executes one batch of trajectories through the deepest plan and snapshots
    at iteration boundaries, so the k-th mark sees the same trajectories
    continued k iterations deep.
    """
    marks = sorted(set(int(k) for k in iteration_marks))
    if not marks or marks[0] < 1:
        raise ValueError("iteration marks must be >= 1")
    layout, steps = build_execution_plan(books, target, marks[-1], params.gate_times)
    n = layout.n_qubits
    if n > qubit_cap:
        raise ValueError(f"qubit budget exceeded: {n} > {qubit_cap}")
    span = layout.factors_span

    boundaries = {}
    count = 0
    for i, step in enumerate(steps):
        if isinstance(step, ReflectStep):
            count += 1
            boundaries[i] = count

    rng = stream(seed, 4)
    amp = np.zeros((trials, 1 << n), dtype=np.complex128)
    amp[:, 0] = 1.0
    ideal = np.zeros((1, 1 << n), dtype=np.complex128)
    ideal[0, 0] = 1.0

    out: dict[int, tuple[dict[int, float], dict[int, float]]] = {}
    for i, step in enumerate(steps):
        _batch_apply_step(amp, step, n)
        _batch_apply_step(ideal, step, n)
        duration = getattr(step, "duration", 0.0)
        if duration > 0.0:
            p1, pphi = _damping_probs(params, duration)
            for q in range(n):
                _batch_relax_qubit(amp, q, p1, pphi, rng)
        k = boundaries.get(i)
        if k is not None and k in marks:
            noisy = _factor_marginals(amp, span).mean(axis=0)
            ref = _factor_marginals(ideal, span)[0]
            out[k] = (
                {j: float(p) for j, p in enumerate(noisy) if p > 0},
                {j: float(p) for j, p in enumerate(ref) if p > 0},
            )
    return out


# ------------------------------------------------------- density matrix

def _step_unitary(step, n: int) -> np.ndarray:
    basis = np.eye(1 << n, dtype=np.complex128)
    _batch_apply_step(basis, step, n)
    return basis.T


def _lift_1q(k: np.ndarray, q: int, n: int) -> np.ndarray:
    hi = np.eye(1 << (n - 1 - q), dtype=complex)
    lo = np.eye(1 << q, dtype=complex)
    return np.kron(np.kron(hi, k), lo)


def density_matrix_reference(steps, n: int, params: NoiseParams | None,
                             size_cap: int = 10) -> np.ndarray:
    """Exact noisy density matrix after the plan (n <= size_cap).

    Injection steps are only legal before any noise has acted (they are
    isometries defined on the baseline span); plans produced by
    build_execution_plan satisfy this.
    """
    if n > size_cap:
        raise ValueError(f"density-matrix reference capped at {size_cap} qubits")
    psi = np.zeros((1, 1 << n), dtype=np.complex128)
    psi[0, 0] = 1.0
    noisy_seen = False
    rho = None
    for step in steps:
        if rho is None:
            if isinstance(step, InjectStep):
                if noisy_seen:
                    raise ValueError("injection after noise is not unitary")
                _batch_apply_step(psi, step, n)
            else:
                rho = np.outer(psi[0], psi[0].conj())
        if rho is not None:
            if isinstance(step, InjectStep):
                raise ValueError("injection after noise is not unitary")
            u = _step_unitary(step, n)
            rho = u @ rho @ u.conj().T
            duration = getattr(step, "duration", 0.0)
            if params is not None and duration > 0.0:
                noisy_seen = True
                kraus = relaxation_channel(params, duration)
                for q in range(n):
                    lifted = [_lift_1q(k, q, n) for k in kraus]
                    rho = sum(kk @ rho @ kk.conj().T for kk in lifted)
    if rho is None:
        rho = np.outer(psi[0], psi[0].conj())
    return rho


def dm_factor_distribution(rho: np.ndarray, span: Span, n: int) -> dict[int, float]:
    """Marginal distribution of the span patterns under the density matrix."""
    probs = np.real(np.diag(rho))
    out: dict[int, float] = {}
    mask = ((1 << span.width) - 1) << span.start
    for i, p in enumerate(probs):
        key = (i & mask) >> span.start
        out[key] = out.get(key, 0.0) + float(p)
    return out


# --------------------------------------------------------------- metrics

def _as_dist(d) -> dict[int, float]:
    if isinstance(d, dict):
        total = sum(d.values())
        if total <= 0:
            raise ValueError("empty distribution")
        return {k: v / total for k, v in d.items()}
    arr = np.asarray(d, dtype=float)
    return {i: float(p) / float(arr.sum()) for i, p in enumerate(arr) if p > 0}


def tv_distance(p, q) -> float:
    """Total variation distance 0.5 * sum |p_i - q_i| in [0, 1]."""
    dp, dq = _as_dist(p), _as_dist(q)
    keys = set(dp) | set(dq)
    return 0.5 * sum(abs(dp.get(k, 0.0) - dq.get(k, 0.0)) for k in keys)


def success_error(noisy, ideal, valid_patterns) -> float:
    """|P_success(noisy) - P_success(ideal)| over the valid pattern set."""
    dp, dq = _as_dist(noisy), _as_dist(ideal)
    s_noisy = sum(dp.get(int(v), 0.0) for v in valid_patterns)
    s_ideal = sum(dq.get(int(v), 0.0) for v in valid_patterns)
    return abs(s_noisy - s_ideal)
