"""Amplitude-amplified search for hypervector factorizations.

Two interchangeable engines drive the same Grover loop:

- circuit mode: a full statevector over [factors | ancilla | output],
  the reversible oracle circuit, and a diffusion reflection about the
  prepared codebook superposition.
- implicit mode: the loop restricted to the span of the prepared
  codebook patterns. Both the oracle (a diagonal sign flip) and the
  diffusion (a reflection about the prepared state) map that span to
  itself, so tracking the <= N**F support amplitudes is exact while
  scaling far past the dense-qubit budget.

Traces from the two modes agree to float precision; the acceptance suite
pins that equivalence.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import statevector as sv
from .hdc import CodebookSet, bipolar_to_bits, brute_force_factorize, pack_bits
from .oracle import GateTimes, OracleCircuit, build_oracle
from .rng import stream
from .statevector import (
    GateOp,
    InjectStep,
    ReflectStep,
    RegisterLayout,
    Span,
    StateVector,
)

__all__ = [
    "FactorizeResult",
    "HDQFConfig",
    "RunTrace",
    "TraceRow",
    "build_execution_plan",
    "closed_form_success",
    "factorize",
    "optimal_iterations",
    "prepare_all_factors",
    "run_hdqf",
]


@dataclass(frozen=True)
class HDQFConfig:
    """Execution knobs for a factorization run."""

    mode: str = "implicit"  # "circuit" | "implicit"
    iterations: int | None = None  # None = trace to 3x the optimal count
    shots: int = 0  # measurement samples per histogram snapshot
    runs: int = 25  # independent measured repetitions in factorize()
    seed: int = 0
    snapshot_iterations: tuple[int, ...] = ()
    qubit_cap: int = sv.DEFAULT_QUBIT_CAP

    def __post_init__(self) -> None:
        if self.mode not in ("circuit", "implicit"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")


@dataclass
class TraceRow:
    iteration: int
    probabilities: dict[tuple[int, ...], float]  # per valid assignment
    total_success: float


@dataclass
class RunTrace:
    """Per-iteration exact success probabilities plus optional histograms."""

    rows: list[TraceRow]
    assignments: list[tuple[int, ...]]
    histograms: dict[int, dict[int, int]] = field(default_factory=dict)
    mode: str = "implicit"

    @property
    def totals(self) -> list[float]:
        return [r.total_success for r in self.rows]

    @property
    def peak_iteration(self) -> int:
        """First local maximum of total success; ties go to the smaller k."""
        t = self.totals
        for k in range(len(t) - 1):
            if t[k] >= t[k + 1] - 1e-15:
                return k
        return len(t) - 1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "assignment_id", "probability",
                        "total_success_probability"])
            for row in self.rows:
                for aid, a in enumerate(self.assignments):
                    w.writerow([row.iteration, aid, repr(row.probabilities[a]),
                                repr(row.total_success)])
                if not self.assignments:
                    w.writerow([row.iteration, -1, repr(0.0), repr(row.total_success)])


@dataclass
class FactorizeResult:
    assignment: tuple[int, ...] | None
    frequency: float  # fraction of runs voting for the modal assignment
    counts: dict[tuple[int, ...], int]
    discarded: int  # measurements matching no codebook row
    iterations: int
    solution_count: int


def closed_form_success(k: int, S: int, t: int) -> float:
    """sin^2((2k+1) asin sqrt(t/S)): exact Grover success after k rounds."""
    if not 1 <= t <= S:
        raise ValueError("need 1 <= t <= S")
    theta = math.asin(math.sqrt(t / S))
    return math.sin((2 * k + 1) * theta) ** 2


def optimal_iterations(N: int, F: int, t: int) -> int:
    """First-peak iteration count for t solutions among N**F candidates.

    Nearest nonnegative integer to pi/(4 theta) - 1/2 with
    theta = asin sqrt(t / N**F).
    """
    S = N**F
    if not 1 <= t <= S:
        raise ValueError(f"t={t} out of range [1, {S}]")
    theta = math.asin(math.sqrt(t / S))
    return max(0, round(math.pi / (4 * theta) - 0.5))


# ------------------------------------------------------------ circuit mode

def prepare_all_factors(state: StateVector, books: CodebookSet) -> StateVector:
    """Inject every factor register's codebook superposition; arm the output line.

    Leaves the ancilla in |0...0> and the output qubit in |-> (X then H),
    ready for phase kickback.
    """
    layout = state.layout
    if layout is None or layout.num_factors != books.num_factors or layout.dim != books.dim:
        raise ValueError("state layout does not match the codebook shape")
    packed = books.packed_rows()
    for f in range(books.num_factors):
        sv.inject_superposition(state, layout.factor_span(f), packed[f].tolist())
    sv.apply_gate(state, GateOp("X", targets=(layout.output_qubit,)))
    sv.apply_gate(state, GateOp("H", targets=(layout.output_qubit,)))
    return state


def _prepared_axis(books: CodebookSet) -> np.ndarray:
    """Dense prepared superposition over the combined factor span."""
    packed = books.packed_rows()
    axis = sv.superposition_vector(packed[0].tolist(), books.dim)
    for f in range(1, books.num_factors):
        nxt = sv.superposition_vector(packed[f].tolist(), books.dim)
        # little-endian: later factors occupy higher qubits
        axis = np.kron(nxt, axis)
    return axis


def build_execution_plan(books: CodebookSet, target: np.ndarray, iterations: int,
                         gate_times: GateTimes = GateTimes()) -> tuple[RegisterLayout, list]:
    """Full circuit-mode step list: preparation then `iterations` Grover rounds.

    Injection steps carry zero duration (state preparation is modeled as
    exact and instantaneous); the diffusion reflection carries the wall
    time of its standard decomposition (two H and two X layers plus one
    multi-controlled X over the factor block).
    """
    layout = RegisterLayout(num_factors=books.num_factors, dim=books.dim)
    oracle = build_oracle(target, books.num_factors, gate_times)
    packed = books.packed_rows()
    steps: list = []
    for f in range(books.num_factors):
        steps.append(InjectStep(span=layout.factor_span(f), rows=tuple(packed[f].tolist())))
    steps.append(GateOp("X", targets=(layout.output_qubit,), duration=gate_times.one_qubit))
    steps.append(GateOp("H", targets=(layout.output_qubit,), duration=gate_times.one_qubit))
    axis = _prepared_axis(books)
    w = layout.factors_span.width
    reflect_duration = 4 * w * gate_times.one_qubit + gate_times.mcx(max(w - 1, 1))
    for _ in range(iterations):
        steps.extend(oracle.gates)
        steps.append(ReflectStep(span=layout.factors_span, axis=axis,
                                 duration=reflect_duration))
    return layout, steps


class _CircuitEngine:
    def __init__(self, books: CodebookSet, target: np.ndarray, cap: int):
        self.books = books
        self.layout = RegisterLayout(num_factors=books.num_factors, dim=books.dim)
        if self.layout.n_qubits > cap:
            raise ValueError(
                f"qubit budget exceeded: circuit mode needs {self.layout.n_qubits} "
                f"qubits (cap {cap})")
        self.oracle: OracleCircuit = build_oracle(target, books.num_factors)
        self.axis = _prepared_axis(books)
        self.state = new_prepared_state(books, cap=cap)

    def iterate(self) -> None:
        for g in self.oracle.gates:
            sv.apply_gate(self.state, g)
        sv.reflect_about(self.state, self.layout.factors_span, self.axis)

    def pattern_probabilities(self) -> np.ndarray:
        return sv.marginal_probabilities(self.state, self.layout.factors_span)

    def sample(self, shots: int, rng) -> dict[int, int]:
        return sv.sample_span(self.state, self.layout.factors_span, shots, rng)

    def ancilla_zero_probability(self) -> float:
        return sv.probability_of(self.state, self.layout.ancilla_span, 0)


def new_prepared_state(books: CodebookSet, cap: int = sv.DEFAULT_QUBIT_CAP) -> StateVector:
    layout = RegisterLayout(num_factors=books.num_factors, dim=books.dim)
    state = sv.new_zero_state(layout, cap=cap)
    return prepare_all_factors(state, books)


class _ImplicitEngine:
    """Grover loop on the prepared-support subspace.

    The prepared state, the diagonal oracle, and the diffusion all
    preserve the span of the distinct prepared patterns, so amplitudes
    over those patterns describe the factor registers exactly.
    """

    def __init__(self, books: CodebookSet, target: np.ndarray):
        packed = books.packed_rows().tolist()
        D = books.dim
        counts: Counter[tuple[int, int]] = Counter()
        # pattern key: (concatenated factor bits, xor fold)
        def walk(f: int, concat: int, fold: int):
            if f == books.num_factors:
                counts[(concat, fold)] += 1
                return
            for r in packed[f]:
                walk(f + 1, concat | (r << (f * D)), fold ^ r)

        walk(0, 0, 0)
        items = sorted(counts.items())
        self.patterns = np.array([p for (p, _), _ in items], dtype=np.int64)
        self.folds = np.array([fd for (_, fd), _ in items], dtype=np.int64)
        mult = np.array([m for _, m in items], dtype=np.float64)
        self.base = mult / np.linalg.norm(mult)
        self.amps = self.base.astype(np.complex128).copy()
        self.marked = self.folds == pack_bits(bipolar_to_bits(np.asarray(target)))
        self._index = {int(p): i for i, p in enumerate(self.patterns)}

    def iterate(self) -> None:
        self.amps[self.marked] *= -1.0
        coef = np.dot(self.base, self.amps)
        self.amps = 2.0 * coef * self.base - self.amps

    def pattern_probability(self, pattern: int) -> float:
        i = self._index.get(int(pattern))
        return 0.0 if i is None else float(np.abs(self.amps[i]) ** 2)

    def total_marked_probability(self) -> float:
        return float(np.sum(np.abs(self.amps[self.marked]) ** 2))

    def sample(self, shots: int, rng) -> dict[int, int]:
        probs = np.abs(self.amps) ** 2
        cum = np.cumsum(probs)
        cum /= cum[-1]
        draws = np.searchsorted(cum, rng.random(shots), side="right")
        values, counts = np.unique(draws, return_counts=True)
        return {int(self.patterns[v]): int(c) for v, c in zip(values, counts)}


def assignment_pattern(assignment: tuple[int, ...], books: CodebookSet) -> int:
    """Concatenated factor-register bits of an assignment, as an integer."""
    packed = books.packed_rows()
    concat = 0
    for f, i in enumerate(assignment):
        concat |= int(packed[f, i]) << (f * books.dim)
    return concat


def run_hdqf(target: np.ndarray, books: CodebookSet, config: HDQFConfig) -> RunTrace:
    """Prepare, iterate, and record exact per-iteration success probabilities.

    Valid assignments (and the solution count t) come from classical brute
    force; when none exist the trace still runs and reports the total
    probability of the target's basis pattern set (identically small).
    """
    assignments, _ = brute_force_factorize(target, books)
    t = len(assignments)
    k_max = config.iterations
    if k_max is None:
        k_max = 3 * optimal_iterations(books.book_size, books.num_factors, max(t, 1))

    engine = (_CircuitEngine(books, target, cap=config.qubit_cap)
              if config.mode == "circuit" else _ImplicitEngine(books, target))
    patterns = {a: assignment_pattern(a, books) for a in assignments}
    marked_patterns = sorted(set(patterns.values()))
    rng = stream(config.seed, 1)

    trace = RunTrace(rows=[], assignments=assignments, mode=config.mode)

    def record(k: int) -> None:
        if config.mode == "circuit":
            probs = engine.pattern_probabilities()
            per = {a: float(probs[p]) for a, p in patterns.items()}
            total = float(sum(probs[p] for p in marked_patterns))
        else:
            per = {a: engine.pattern_probability(p) for a, p in patterns.items()}
            total = engine.total_marked_probability()
        trace.rows.append(TraceRow(iteration=k, probabilities=per, total_success=total))
        if config.shots > 0 and k in config.snapshot_iterations:
            trace.histograms[k] = engine.sample(config.shots, rng)

    record(0)
    for k in range(1, k_max + 1):
        engine.iterate()
        record(k)
    return trace


def factorize(target: np.ndarray, books: CodebookSet,
              config: HDQFConfig) -> FactorizeResult:
    """Run to the optimal iteration, measure `runs` times, return the mode.

    Noiseless execution is deterministic, so the final state is computed
    once and each of the `runs` repetitions contributes one measurement
    sample drawn from it. Measured factor registers map back to codebook
    indices by exact row match (first matching row wins); patterns that
    match no row are discarded as noise.
    """
    assignments, _ = brute_force_factorize(target, books)
    t = max(len(assignments), 1)
    k_opt = (config.iterations if config.iterations is not None
             else optimal_iterations(books.book_size, books.num_factors, t))

    engine = (_CircuitEngine(books, target, cap=config.qubit_cap)
              if config.mode == "circuit" else _ImplicitEngine(books, target))
    for _ in range(k_opt):
        engine.iterate()
    rng = stream(config.seed, 2)
    samples = engine.sample(config.runs, rng)

    row_index = _row_lookup(books)
    counts: Counter[tuple[int, ...]] = Counter()
    discarded = 0
    for pattern, c in samples.items():
        a = _decode_pattern(pattern, books, row_index)
        if a is None:
            discarded += c
        else:
            counts[a] += c
    if not counts:
        return FactorizeResult(assignment=None, frequency=0.0, counts={},
                               discarded=discarded, iterations=k_opt,
                               solution_count=len(assignments))
    modal, votes = max(counts.items(), key=lambda kv: (kv[1], tuple(-i for i in kv[0])))
    return FactorizeResult(assignment=modal, frequency=votes / config.runs,
                           counts=dict(counts), discarded=discarded,
                           iterations=k_opt, solution_count=len(assignments))


def _row_lookup(books: CodebookSet) -> list[dict[int, int]]:
    packed = books.packed_rows()
    lookup: list[dict[int, int]] = []
    for f in range(books.num_factors):
        d: dict[int, int] = {}
        for i, r in enumerate(packed[f].tolist()):
            d.setdefault(int(r), i)
        lookup.append(d)
    return lookup


def _decode_pattern(pattern: int, books: CodebookSet,
                    row_index: list[dict[int, int]]) -> tuple[int, ...] | None:
    D = books.dim
    mask = (1 << D) - 1
    out = []
    for f in range(books.num_factors):
        chunk = (pattern >> (f * D)) & mask
        i = row_index[f].get(chunk)
        if i is None:
            return None
        out.append(i)
    return tuple(out)
