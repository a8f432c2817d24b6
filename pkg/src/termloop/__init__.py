"""Termination proofs and termination preconditions for integer linear loops."""

from .acabar import Config, Verdict, acabar, prove_termination
from .condterm import Precondition, approx_V, approx_Z, precondition
from .lincons import Atom, Conj, Dnf, LinExpr, dnf_entails, dnf_equiv
from .ranking import DwfSet, WfRel, find_dwf_candidate, potential_rfs, synth_lrf
from .relk import Rel, StateSet
from . import lincons as _lincons, ranking as _ranking

__version__ = "0.1.0"


def clear_caches() -> None:
    """Forget every memoized solver result."""
    _lincons.clear_caches()
    _ranking.negate_dwf.cache_clear()


__all__ = [
    "Atom", "Config", "Conj", "Dnf", "DwfSet", "LinExpr", "Precondition", "Rel",
    "StateSet", "Verdict", "WfRel", "acabar", "approx_V", "approx_Z", "clear_caches",
    "dnf_entails",
    "dnf_equiv", "find_dwf_candidate", "potential_rfs", "precondition",
    "prove_termination", "synth_lrf",
]
