"""Antidistinguishability of quantum states via a bespoke barrier SDP solver."""

from .certificate import Certificate, VerificationReport, harden_certificate, verify_certificate
from .hermitian import hermitian_eigen, is_psd, min_eigenvalue, trace
from .sdp import (
    AntidistInstance,
    Povm,
    SolveResult,
    SolverConfig,
    Verdict,
    decide_antidistinguishability,
    solve,
)
from .states import PureState, StateSet, density, gram_report, haar_random_state, load_state_set

__version__ = "0.1.0"
