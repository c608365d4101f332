"""Consistent-histories analysis of nested-interferometer protocols.

Thin wrapper over the C++ core: model builders, history families,
consistency reports, the brute-force evolve oracle and the reflectivity
sweep.
"""

try:
    from ._qch import (  # type: ignore[attr-defined]
        CircuitModel,
        HistoryFamily,
        InconsistentFamilyErr,
        InvalidArgumentError,
        analyze,
        chain_ket_norms,
        evolve,
        family,
        michelson,
        mzi,
        mzi_reflectivity,
        sweep_fc,
        __version__,
    )
except ImportError:  # module built out of tree (ctest runs)
    from _qch import (  # type: ignore[no-redef]
        CircuitModel,
        HistoryFamily,
        InconsistentFamilyErr,
        InvalidArgumentError,
        analyze,
        chain_ket_norms,
        evolve,
        family,
        michelson,
        mzi,
        mzi_reflectivity,
        sweep_fc,
        __version__,
    )

__all__ = [
    "CircuitModel",
    "HistoryFamily",
    "InconsistentFamilyErr",
    "InvalidArgumentError",
    "analyze",
    "chain_ket_norms",
    "evolve",
    "family",
    "michelson",
    "mzi",
    "mzi_reflectivity",
    "sweep_fc",
    "__version__",
]
