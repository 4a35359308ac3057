"""Certificates of non-antidistinguishability.

A Hermitian Y with Tr(Y) > 0 and rho_i - Y >= 0 for every i proves that no
POVM excludes every state perfectly. Verification here uses only the Jacobi
eigensolver in ``hermitian``; it never calls the barrier solver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hermitian import as_hermitian, min_eigenvalue, trace
from .states import SchemaError, matrix_from_json, matrix_to_json

DEFAULT_HARDEN_MARGIN = 1e-12


class HardeningError(ValueError):
    """Shifting Y into strict feasibility would make its trace non-positive."""


@dataclass(frozen=True)
class Certificate:
    y: np.ndarray
    trace_value: float
    min_slack_eig: float
    psd_tol_used: float = 0.0
    shift_applied: float = 0.0

    def to_dict(self) -> dict:
        return {
            "dim": int(self.y.shape[0]),
            "y": matrix_to_json(self.y),
            "trace": self.trace_value,
            "min_slack_eig": self.min_slack_eig,
            "shift_applied": self.shift_applied,
        }

    @classmethod
    def from_dict(cls, doc) -> Certificate:
        if not isinstance(doc, dict) or "y" not in doc or "dim" not in doc:
            raise SchemaError("certificate must be an object with 'dim' and 'y'")
        y = matrix_from_json(doc["y"])
        if y.shape != (doc["dim"], doc["dim"]):
            raise SchemaError(f"'y' has shape {y.shape}, 'dim' says {doc['dim']}")
        try:
            y = as_hermitian(y)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
        return cls(
            y=y,
            trace_value=trace(y),
            min_slack_eig=float(doc.get("min_slack_eig", float("nan"))),
            shift_applied=float(doc.get("shift_applied", 0.0)),
        )


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    trace_value: float
    per_state_min_eig: tuple[float, ...]
    psd_tol: float
    failure_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "trace": self.trace_value,
            "per_state_min_eig": list(self.per_state_min_eig),
            "psd_tol": self.psd_tol,
            "failure_reason": self.failure_reason,
        }


def verify_certificate(y, instance, psd_tol: float = 0.0) -> VerificationReport:
    if psd_tol < 0:
        raise ValueError("psd_tol must be non-negative")
    y = as_hermitian(y)
    if y.shape[0] != instance.dim:
        raise ValueError(f"certificate has dimension {y.shape[0]}, states have {instance.dim}")
    tr = trace(y)
    mins = tuple(min_eigenvalue(r - y) for r in instance.rhos)
    reasons = []
    if not tr > 0:
        reasons.append(f"trace not positive ({tr:.3e})")
    bad = [i for i, m in enumerate(mins) if m < -psd_tol]
    if bad:
        worst = min(mins)
        reasons.append(f"rho_i - Y not PSD for i in {bad} (min eigenvalue {worst:.3e})")
    return VerificationReport(not reasons, tr, mins, psd_tol, "; ".join(reasons) or None)


def harden_certificate(y, instance, margin: float = DEFAULT_HARDEN_MARGIN) -> Certificate:
    """Shift ``y`` down by its worst slack violation so that every
    ``rho_i - y`` is PSD; ``margin`` adds headroom for eigensolver rounding.
    """
    y = as_hermitian(y)
    if y.shape[0] != instance.dim:
        raise ValueError(f"certificate has dimension {y.shape[0]}, states have {instance.dim}")
    d = y.shape[0]
    s = min(min_eigenvalue(r - y) for r in instance.rhos)
    if s >= 0:
        return Certificate(y, trace(y), s)
    shift = s - margin
    tr = trace(y) + shift * d
    if not tr > 0:
        raise HardeningError(
            f"shift by {shift:.3e} leaves trace {tr:.3e}; Y is too marginal to certify"
        )
    shifted = as_hermitian(y + shift * np.eye(d))
    new_min = min(min_eigenvalue(r - shifted) for r in instance.rhos)
    return Certificate(shifted, trace(shifted), new_min, shift_applied=shift)


def load_certificate(path) -> Certificate:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return Certificate.from_dict(doc)


def save_certificate(cert: Certificate, path) -> None:
    Path(path).write_text(json.dumps(cert.to_dict(), indent=1) + "\n")
