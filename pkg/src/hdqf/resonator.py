"""Classical resonator-network baseline.

Synchronous outer-product dynamics with sign activation: every factor
estimate is refreshed in parallel from

    x_f  <-  sign( C_f C_f^T ( target * prod_{g != f} x_g ) )

with ties broken to +1. Convergence means one full synchronous step
leaves every estimate fixed; a converged state is judged correct when
each estimate equals a codebook row and the selected rows bind back to
the target exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .hdc import CodebookSet, bind_all, bundle, gen_codebooks, sign_threshold
from .rng import stream

__all__ = [
    "Outcome",
    "ResonatorState",
    "ResonatorStats",
    "resonator_init",
    "resonator_step",
    "resonator_stats",
    "run_resonator",
]

DEFAULT_MAX_ITERS = 5000


class Outcome(enum.Enum):
    CORRECT = "correct"
    WRONG = "wrong"
    NON_CONVERGED = "non_converged"


@dataclass
class ResonatorState:
    estimates: np.ndarray  # (F, D) bipolar
    iteration: int = 0


@dataclass
class ResonatorStats:
    p_success: float
    mean_iterations: float | None  # over correct convergences; None if none
    p_nonconverged: float
    p_wrong: float
    effective_steps: float | None  # N_I / P_s; None when P_s == 0 (divergent)
    trials: int
    seed: int


def resonator_init(books: CodebookSet, rng: np.random.Generator | None = None,
                   random_init: bool = False) -> ResonatorState:
    """Superposition start: each estimate is the thresholded bundle of its codebook."""
    if random_init:
        if rng is None:
            raise ValueError("random_init requires an rng")
        est = (rng.integers(0, 2, size=(books.num_factors, books.dim),
                            dtype=np.int8) * 2 - 1)
    else:
        est = np.stack([
            sign_threshold(bundle(list(books.tensor[f])))
            for f in range(books.num_factors)
        ])
    return ResonatorState(estimates=est.astype(np.int8))


def resonator_step(state: ResonatorState, target: np.ndarray,
                   books: CodebookSet) -> ResonatorState:
    """One synchronous update of all factor estimates (deterministic)."""
    est = state.estimates.astype(np.int64)
    target = np.asarray(target, dtype=np.int64)
    if est.shape != (books.num_factors, books.dim) or target.size != books.dim:
        raise ValueError("dimension mismatch between state, target, and codebooks")
    all_bound = np.prod(est, axis=0)
    new = np.empty_like(state.estimates)
    for f in range(books.num_factors):
        others = all_bound * est[f]  # self-inverse binding removes factor f
        unbound = target * others
        book = books.tensor[f].astype(np.int64)
        scores = book @ unbound
        proj = book.T @ scores
        new[f] = sign_threshold(proj)
    return ResonatorState(estimates=new, iteration=state.iteration + 1)


def run_resonator(target: np.ndarray, books: CodebookSet,
                  max_iters: int = DEFAULT_MAX_ITERS,
                  rng: np.random.Generator | None = None,
                  random_init: bool = False) -> tuple[Outcome, int, ResonatorState]:
    """Iterate to a fixed point or the iteration cap.

    Returns (outcome, iterations_used, final_state); the step that
    confirms the fixed point is included in the count.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    state = resonator_init(books, rng=rng, random_init=random_init)
    for _ in range(max_iters):
        nxt = resonator_step(state, target, books)
        if np.array_equal(nxt.estimates, state.estimates):
            state = nxt
            return _judge(state, target, books), state.iteration, state
        state = nxt
    return Outcome.NON_CONVERGED, state.iteration, state


def _judge(state: ResonatorState, target: np.ndarray, books: CodebookSet) -> Outcome:
    indices = []
    for f in range(books.num_factors):
        matches = np.where((books.tensor[f] == state.estimates[f]).all(axis=1))[0]
        if matches.size == 0:
            return Outcome.WRONG
        indices.append(int(matches[0]))
    if np.array_equal(bind_all(indices, books), np.asarray(target)):
        return Outcome.CORRECT
    return Outcome.WRONG


def resonator_stats(D: int, F: int, N: int, trials: int, max_iters: int = DEFAULT_MAX_ITERS,
                    seed: int = 0, random_init: bool = False) -> ResonatorStats:
    """Monte Carlo over fresh codebooks with planted targets."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_correct = n_wrong = n_stuck = 0
    iters_correct: list[int] = []
    for trial in range(trials):
        trial_rng = stream(seed, 10, trial)
        books = gen_codebooks(int(trial_rng.integers(0, 2**63)), F, N, D)
        planted = tuple(int(x) for x in trial_rng.integers(0, N, size=F))
        target = bind_all(planted, books)
        outcome, iters, _ = run_resonator(target, books, max_iters=max_iters,
                                          rng=trial_rng, random_init=random_init)
        if outcome is Outcome.CORRECT:
            n_correct += 1
            iters_correct.append(iters)
        elif outcome is Outcome.WRONG:
            n_wrong += 1
        else:
            n_stuck += 1
    p_s = n_correct / trials
    n_i = float(np.mean(iters_correct)) if iters_correct else None
    return ResonatorStats(
        p_success=p_s,
        mean_iterations=n_i,
        p_nonconverged=n_stuck / trials,
        p_wrong=n_wrong / trials,
        effective_steps=(n_i / p_s) if (n_i is not None and p_s > 0) else None,
        trials=trials,
        seed=seed,
    )
