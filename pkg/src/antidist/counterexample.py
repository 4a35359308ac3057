"""The published d = 4 counterexample: embedded data and regression checks.

``paper_d4.json`` holds the four state vectors exactly as printed (8 decimal
places, so not exactly unit norm); ``paper_y.json`` holds the printed dual
matrix Y. The constants below are the published derived quantities.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .certificate import Certificate, load_certificate, verify_certificate
from .hermitian import hermitian_eigen
from .sdp import AntidistInstance, SolverConfig, Verdict, decide_antidistinguishability, solve
from .states import StateSet, density, gram_report, load_state_set

PUBLISHED_MAX_OVERLAP = 0.64514235
PUBLISHED_TRACE = 0.0003938130288630194
PUBLISHED_TRACE_PRINTED_Y = 0.000393813028863  # sum of the printed diagonal
PUBLISHED_SLACK_EIGENVALUES = np.array(
    [
        [0.000000000780951, 0.000159290602031, 0.007593054347881, 0.991853848824242],
        [0.000000000845682, 0.000170622302504, 0.006501501274832, 0.992934060068367],
        [0.000000000751231, 0.000136742588802, 0.009100561906205, 0.990368883698794],
        [0.000000000905010, 0.000186792438756, 0.007152857760097, 0.992266545011053],
    ]
)

# Tolerances follow from the 8-decimal printing of the state vectors.
OVERLAP_TOL = 1e-6
TRACE_TOL = 1e-12
EIGENVALUE_TOL = 1e-6
RESOLVE_BETA_TOL = 1e-5


def _data_path(name: str):
    return resources.files("antidist") / "data" / name


def states_path():
    return _data_path("paper_d4.json")


def certificate_path():
    return _data_path("paper_y.json")


def load_states() -> StateSet:
    with resources.as_file(states_path()) as p:
        return load_state_set(p)


def load_y() -> Certificate:
    with resources.as_file(certificate_path()) as p:
        return load_certificate(p)


def slack_eigenvalues(states: StateSet, y: np.ndarray) -> np.ndarray:
    return np.array([hermitian_eigen(density(s) - y).eigenvalues for s in states])


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tol: float
    passed: bool
    detail: str = ""

    @property
    def delta(self) -> float:
        return self.value - self.expected

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "expected": self.expected,
            "tol": self.tol,
            "delta": self.delta,
            "passed": self.passed,
            "detail": self.detail,
        }


def reproduce_checks(states: StateSet, y: np.ndarray, config: SolverConfig | None = None) -> list[Check]:
    checks = []
    report = gram_report(states)
    checks.append(
        Check(
            "max pairwise overlap",
            report.max_offdiag,
            PUBLISHED_MAX_OVERLAP,
            OVERLAP_TOL,
            abs(report.max_offdiag - PUBLISHED_MAX_OVERLAP) <= OVERLAP_TOL,
        )
    )
    checks.append(
        Check(
            "overlap bound (d-2)/(d-1)",
            report.bound,
            2 / 3,
            0.0,
            report.bound == 2 / 3 and report.hypothesis_satisfied,
            f"hypothesis_satisfied={report.hypothesis_satisfied}",
        )
    )
    tr = float(np.trace(y).real)
    checks.append(
        Check("Tr(Y)", tr, PUBLISHED_TRACE_PRINTED_Y, TRACE_TOL, abs(tr - PUBLISHED_TRACE_PRINTED_Y) <= TRACE_TOL)
    )

    eigs = slack_eigenvalues(states, y)
    worst = np.unravel_index(np.argmax(np.abs(eigs - PUBLISHED_SLACK_EIGENVALUES)), eigs.shape)
    max_dev = float(np.abs(eigs - PUBLISHED_SLACK_EIGENVALUES).max())
    checks.append(
        Check(
            "slack eigenvalues (16)",
            float(eigs[worst]),
            float(PUBLISHED_SLACK_EIGENVALUES[worst]),
            EIGENVALUE_TOL,
            max_dev <= EIGENVALUE_TOL,
            f"worst entry i={worst[0] + 1}, k={worst[1] + 1}",
        )
    )
    instance = AntidistInstance.from_states(states)
    verification = verify_certificate(y, instance, psd_tol=0.0)
    checks.append(
        Check(
            "printed Y certifies at psd_tol 0",
            min(verification.per_state_min_eig),
            0.0,
            0.0,
            verification.valid,
            verification.failure_reason or "",
        )
    )

    result = solve(instance, config)
    checks.append(
        Check(
            "re-solved dual value",
            result.beta,
            PUBLISHED_TRACE,
            RESOLVE_BETA_TOL,
            abs(result.beta - PUBLISHED_TRACE) <= RESOLVE_BETA_TOL,
            f"gap={result.gap:.3e}",
        )
    )
    decision = decide_antidistinguishability(instance, config)
    checks.append(
        Check(
            "decision",
            float(decision.verdict is Verdict.NOT_ANTIDISTINGUISHABLE),
            1.0,
            0.0,
            decision.verdict is Verdict.NOT_ANTIDISTINGUISHABLE,
            decision.verdict.value,
        )
    )
    return checks
