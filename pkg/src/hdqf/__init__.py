"""Hypervector factorization by amplitude-amplified quantum search, with the
MAP hyperdimensional-computing algebra, a thermal-noise model, and the
classical resonator-network baseline."""

__version__ = "0.1.0"

from .grover import (  # noqa: F401
    HDQFConfig,
    RunTrace,
    closed_form_success,
    factorize,
    optimal_iterations,
    run_hdqf,
)
from .hdc import (  # noqa: F401
    CodebookSet,
    bind,
    bind_all,
    brute_force_factorize,
    bundle,
    gen_codebooks,
    permute,
    similarity,
)
