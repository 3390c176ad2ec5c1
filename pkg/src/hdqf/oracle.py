"""Oracle circuit marking the basis states that factorize a target.

Three-stage reversible construction over the register layout:

1. XOR cascade: for every component d, CNOTs copy the XOR of all factor
   registers' bit d onto ancilla bit d, so the ancilla holds the product
   of the candidate factors in bit form.
2. Equality test: X gates invert the ancilla bits where the target bit
   is 0, turning "ancilla == target" into "ancilla == all-ones"; a single
   MCX over all ancilla bits then kicks a phase onto the output line held
   in |->. The mask is undone immediately after.
3. Uncomputation: the XOR cascade is replayed in reverse so the ancilla
   returns to |0...0> and only the conditional phase survives.

The gate list is a palindrome and the whole circuit is an involution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hdc import bipolar_to_bits
from .statevector import GateOp, RegisterLayout

__all__ = ["GateTimes", "OracleCircuit", "build_oracle"]


@dataclass(frozen=True)
class GateTimes:
    """Wall durations per gate kind, used only by the noise model.

    An m-control MCX is modeled as (2m - 3) back-to-back CX durations
    (never less than one CX).
    """

    one_qubit: float = 35e-9
    cx: float = 300e-9

    def mcx(self, num_controls: int) -> float:
        return max(2 * num_controls - 3, 1) * self.cx


@dataclass
class OracleCircuit:
    """Ordered gate list flipping the phase of exact-factorization states."""

    gates: list[GateOp]
    target_bits: np.ndarray = field(repr=False)
    num_factors: int
    dim: int

    @property
    def gate_count(self) -> int:
        return len(self.gates)


def build_oracle(target: np.ndarray, F: int,
                 gate_times: GateTimes = GateTimes()) -> OracleCircuit:
    """Build the phase oracle for `target` over F factor registers."""
    v = bipolar_to_bits(np.asarray(target))
    D = v.size
    layout = RegisterLayout(num_factors=F, dim=D)
    anc = layout.ancilla_span
    out = layout.output_qubit

    xor_chain = [
        GateOp("CX", targets=(anc.start + d,), controls=(f * D + d,), duration=gate_times.cx)
        for d in range(D)
        for f in range(F)
    ]
    mask = [
        GateOp("X", targets=(anc.start + d,), duration=gate_times.one_qubit)
        for d in range(D)
        if v[d] == 0
    ]
    mcx = GateOp(
        "MCX",
        targets=(out,),
        controls=tuple(anc.start + d for d in range(D)),
        duration=gate_times.mcx(D),
    )
    gates = [*xor_chain, *mask, mcx, *mask, *reversed(xor_chain)]
    return OracleCircuit(gates=gates, target_bits=v, num_factors=F, dim=D)
