"""Dense statevector simulator with named register layout.

Conventions, declared once and tested everywhere:

- Basis labels are little-endian: qubit q is bit q of the basis-state
  integer, so qubit 0 is the least-significant bit.
- Register order is [factor 1 | ... | factor F | ancilla | output], i.e.
  factor f occupies qubits [f*D, (f+1)*D), the ancilla the next D qubits,
  and the output line is the top qubit.
- Bit strings are rendered with qubit 0 as the leftmost character, which
  makes a factor register read in hypervector element order.

All gate kernels act on the last axis of the amplitude array so the
noise engine can run batches of trajectories through the same code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GateOp",
    "InjectStep",
    "ReflectStep",
    "RegisterLayout",
    "Span",
    "StateVector",
    "apply_gate",
    "apply_step",
    "dump_amplitudes_csv",
    "inject_superposition",
    "marginal_probabilities",
    "measure_all",
    "new_zero_state",
    "phase_flip_patterns",
    "phase_flip_where",
    "probability_of",
    "reflect_about",
    "sample_span",
    "uninject_superposition",
]

DEFAULT_QUBIT_CAP = 26

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Span:
    """A contiguous block of qubits [start, start + width)."""

    start: int
    width: int

    @property
    def stop(self) -> int:
        return self.start + self.width


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit map for F factor registers of width D, one ancilla block, one output line."""

    num_factors: int
    dim: int

    @property
    def n_qubits(self) -> int:
        return self.num_factors * self.dim + self.dim + 1

    def factor_span(self, f: int) -> Span:
        if not 0 <= f < self.num_factors:
            raise IndexError(f"factor index {f} out of range")
        return Span(f * self.dim, self.dim)

    @property
    def factors_span(self) -> Span:
        """All factor registers as one block starting at qubit 0."""
        return Span(0, self.num_factors * self.dim)

    @property
    def ancilla_span(self) -> Span:
        return Span(self.num_factors * self.dim, self.dim)

    @property
    def output_qubit(self) -> int:
        return self.num_factors * self.dim + self.dim


@dataclass
class GateOp:
    """One primitive gate. kind in {X, H, CX, MCX, PHASE_FLIP_PREDICATE}.

    duration (seconds) feeds the thermal-noise model; it is ignored by
    noiseless execution.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    duration: float = 0.0
    predicate: object = None  # PHASE_FLIP_PREDICATE only

    def __post_init__(self) -> None:
        if set(self.targets) & set(self.controls):
            raise ValueError("control and target sets must be disjoint")


@dataclass
class InjectStep:
    """Direct amplitude injection of a codebook superposition into a span."""

    span: Span
    rows: tuple[int, ...]  # basis rows as little-endian integers, duplicates allowed
    duration: float = 0.0


@dataclass
class ReflectStep:
    """Reflection 2|a><a| - I over a span (the Grover diffusion)."""

    span: Span
    axis: np.ndarray = field(repr=False)
    duration: float = 0.0


class StateVector:
    """2**n complex amplitudes plus an optional register layout."""

    def __init__(self, n_qubits: int, layout: RegisterLayout | None = None,
                 cap: int = DEFAULT_QUBIT_CAP):
        if n_qubits > cap:
            raise ValueError(f"qubit budget exceeded: {n_qubits} > cap {cap}")
        self.n = n_qubits
        self.layout = layout
        self.amp = np.zeros(1 << n_qubits, dtype=np.complex128)
        self.amp[0] = 1.0

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def copy(self) -> "StateVector":
        out = StateVector.__new__(StateVector)
        out.n = self.n
        out.layout = self.layout
        out.amp = self.amp.copy()
        return out


def new_zero_state(layout: RegisterLayout, cap: int = DEFAULT_QUBIT_CAP) -> StateVector:
    return StateVector(layout.n_qubits, layout=layout, cap=cap)


# ---------------------------------------------------------------- kernels
# Each kernel mutates `amp` in place along its last axis.

def _kernel_x(amp: np.ndarray, q: int) -> None:
    shape = amp.shape
    a = amp.reshape(*shape[:-1], -1, 2, 1 << q)
    tmp = a[..., 0, :].copy()
    a[..., 0, :] = a[..., 1, :]
    a[..., 1, :] = tmp


def _kernel_h(amp: np.ndarray, q: int) -> None:
    shape = amp.shape
    a = amp.reshape(*shape[:-1], -1, 2, 1 << q)
    lo = a[..., 0, :].copy()
    hi = a[..., 1, :]
    a[..., 0, :] = (lo + hi) * _INV_SQRT2
    a[..., 1, :] = (lo - hi) * _INV_SQRT2


_index_cache: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}


def _mcx_indices(n: int, controls: tuple[int, ...], target: int) -> tuple[np.ndarray, np.ndarray]:
    cmask = 0
    for c in controls:
        cmask |= 1 << c
    tmask = 1 << target
    key = (n, cmask, tmask)
    hit = _index_cache.get(key)
    if hit is not None:
        return hit
    idx = np.arange(1 << n, dtype=np.int64)
    sel = (idx & tmask) == 0
    if cmask:
        sel &= (idx & cmask) == cmask
    src = idx[sel]
    dst = src | tmask
    if n <= 20 and len(_index_cache) < 4096:
        _index_cache[key] = (src, dst)
    return src, dst


def _kernel_mcx(amp: np.ndarray, controls: tuple[int, ...], target: int, n: int) -> None:
    src, dst = _mcx_indices(n, controls, target)
    tmp = amp[..., src].copy()
    amp[..., src] = amp[..., dst]
    amp[..., dst] = tmp


def _span_view(amp: np.ndarray, span: Span) -> np.ndarray:
    """Reshape so the span's patterns sit on axis -2: (..., high, 2**w, 2**start)."""
    shape = amp.shape
    return amp.reshape(*shape[:-1], -1, 1 << span.width, 1 << span.start)


# ------------------------------------------------------------ public ops

def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Apply one gate in place and return the state."""
    n = state.n
    for q in (*gate.targets, *gate.controls):
        if not 0 <= q < n:
            raise IndexError(f"qubit index {q} out of range for n={n}")
    if gate.kind == "X":
        for q in gate.targets:
            _kernel_x(state.amp, q)
    elif gate.kind == "H":
        for q in gate.targets:
            _kernel_h(state.amp, q)
    elif gate.kind in ("CX", "MCX"):
        (t,) = gate.targets
        _kernel_mcx(state.amp, gate.controls, t, n)
    elif gate.kind == "PHASE_FLIP_PREDICATE":
        phase_flip_where(state, gate.predicate)
    else:
        raise ValueError(f"unknown gate kind {gate.kind!r}")
    return state


def apply_step(state: StateVector, step) -> StateVector:
    """Dispatch a plan step (gate, injection, or reflection)."""
    if isinstance(step, GateOp):
        return apply_gate(state, step)
    if isinstance(step, InjectStep):
        return inject_superposition(state, step.span, step.rows)
    if isinstance(step, ReflectStep):
        return reflect_about(state, step.span, step.axis)
    raise TypeError(f"unknown plan step {step!r}")


def superposition_vector(rows, width: int) -> np.ndarray:
    """Dense unit vector over a width-qubit span holding the codebook rows.

    Duplicate rows add coherently: the amplitude of a distinct row is
    proportional to its multiplicity, then the vector is normalized.
    """
    vec = np.zeros(1 << width, dtype=np.complex128)
    for r in rows:
        r = int(r)
        if not 0 <= r < (1 << width):
            raise ValueError(f"row {r} does not fit in {width} bits")
        vec[r] += 1.0
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValueError("empty row list")
    return vec / nrm


def inject_superposition(state: StateVector, span: Span, rows) -> StateVector:
    """Load a codebook superposition into a span currently in |0...0>.

    The caller guarantees the span is in its baseline state and
    unentangled with the rest; violating that is detected and rejected.
    """
    a = _span_view(state.amp, span)
    rest = a[..., 1:, :]
    if rest.size and float(np.abs(rest).max()) > 1e-12:
        raise ValueError("inject_superposition: span is not in the baseline |0...0> state")
    vec = superposition_vector(rows, span.width)
    base = a[..., 0, :].copy()
    a[...] = base[..., None, :] * vec[:, None]
    return state


def uninject_superposition(state: StateVector, span: Span, rows) -> StateVector:
    """Adjoint of inject_superposition (projects the span back onto |0...0>)."""
    vec = superposition_vector(rows, span.width)
    a = _span_view(state.amp, span)
    coef = np.einsum("...ml,m->...l", a, vec.conj())
    a[...] = 0.0
    a[..., 0, :] = coef
    return state


def reflect_about(state: StateVector, span: Span, axis: np.ndarray) -> StateVector:
    """psi -> 2 <a|psi> |a> - psi on the span subspace (identity elsewhere)."""
    axis = np.asarray(axis, dtype=np.complex128)
    if axis.shape != (1 << span.width,):
        raise ValueError(f"axis must have length {1 << span.width}")
    if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
        raise ValueError("reflection axis must have unit norm")
    a = _span_view(state.amp, span)
    coef = np.einsum("...hml,m->...hl", a, axis.conj())
    np.negative(a, out=a)
    a += 2.0 * coef[..., :, None, :] * axis[:, None]
    return state


def phase_flip_patterns(state: StateVector, span: Span, patterns) -> StateVector:
    """Negate amplitudes of basis states whose span bits match any pattern."""
    a = _span_view(state.amp, span)
    for p in patterns:
        a[..., int(p), :] *= -1.0
    return state


def phase_flip_where(state: StateVector, predicate) -> StateVector:
    """Negate amplitudes where predicate holds on the factor-register bits.

    predicate receives a vector of all factor-register patterns (integers)
    and returns a boolean mask.
    """
    if state.layout is None:
        raise ValueError("phase_flip_where requires a register layout")
    span = state.layout.factors_span
    pats = np.arange(1 << span.width, dtype=np.int64)
    marked = np.asarray(predicate(pats), dtype=bool)
    if marked.shape != pats.shape:
        raise ValueError("predicate must return one boolean per pattern")
    a = _span_view(state.amp, span)
    a[..., marked, :] *= -1.0
    return state


def marginal_probabilities(state: StateVector, span: Span) -> np.ndarray:
    """Probability of each pattern on the span (length 2**width)."""
    a = _span_view(state.amp, span)
    return np.einsum("...hml->m", np.abs(a) ** 2).real


def probability_of(state: StateVector, span: Span, pattern: int) -> float:
    a = _span_view(state.amp, span)
    return float(np.sum(np.abs(a[..., int(pattern), :]) ** 2))


def pattern_to_string(pattern: int, width: int) -> str:
    """Render with qubit 0 (LSB) as the leftmost character."""
    return "".join(str((pattern >> q) & 1) for q in range(width))


def _sample_counts(probs: np.ndarray, shots: int, rng: np.random.Generator) -> dict[int, int]:
    probs = np.maximum(probs.real, 0.0)
    cum = np.cumsum(probs)
    cum /= cum[-1]
    draws = np.searchsorted(cum, rng.random(shots), side="right")
    values, counts = np.unique(draws, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def measure_all(state: StateVector, shots: int, rng: np.random.Generator) -> dict[str, int]:
    """shots i.i.d. samples from |amplitude|^2; the state is not collapsed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    counts = _sample_counts(np.abs(state.amp) ** 2, shots, rng)
    return {pattern_to_string(v, state.n): c for v, c in counts.items()}


def sample_span(state: StateVector, span: Span, shots: int,
                rng: np.random.Generator) -> dict[int, int]:
    """Sample span patterns (integers) from the marginal distribution."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    return _sample_counts(marginal_probabilities(state, span), shots, rng)


def dump_amplitudes_csv(state: StateVector, path) -> None:
    """Debug dump: one (basis_index, re, im) row per amplitude."""
    with open(path, "w", newline="") as fh:
        fh.write("basis_index,re,im\r\n")
        for i, c in enumerate(state.amp):
            fh.write(f"{i},{c.real!r},{c.imag!r}\r\n")
