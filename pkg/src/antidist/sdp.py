"""Antidistinguishability SDP pair and its barrier solver.

Primal:  alpha = min  sum_i Tr(N_i rho_i)   s.t.  sum_i N_i = I,  N_i >= 0
Dual:    beta  = max  Tr(Y)                 s.t.  Y <= rho_i for every i

The solver follows the central path of the dual log-det barrier

    phi_t(Y) = t Tr(Y) + sum_i log det(rho_i - Y),

maximized by damped Newton for an increasing sequence of t. At the maximizer
the gradient condition ``sum_i (rho_i - Y)^{-1} = t I`` means that
``N_i = (rho_i - Y)^{-1} / t`` is a strictly feasible POVM, and the duality
gap ``sum_i Tr(N_i (rho_i - Y))`` equals ``n d / t`` exactly.

The Hessian is assembled and factored in double precision. The iterate, the
slacks, their inverses and the barrier value are kept in extended precision
(see ``_extended``), which removes the ``eps * t`` floor on stationarity that
a pure double implementation hits once t exceeds about 1e6.
"""

from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _extended as ext
from .hermitian import (
    NotPositiveDefiniteError,
    as_hermitian,
    min_eigenvalue,
    solve_hermitian_linear_system,
    trace,
)

log = logging.getLogger(__name__)

DENSITY_TOL = 1e-10
DEFAULT_DECISION_THRESHOLD = 1e-7


class ConvergenceError(RuntimeError):
    """The barrier method failed to reach the requested gap."""

    def __init__(self, message: str, y: np.ndarray | None = None, stages=()):
        super().__init__(message)
        self.y = y
        self.stages = list(stages)


@dataclass(frozen=True)
class AntidistInstance:
    rhos: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.rhos) == 0:
            raise ValueError("an instance needs at least one state")
        rhos = []
        for i, r in enumerate(self.rhos):
            try:
                r = as_hermitian(r)
            except ValueError as exc:
                raise ValueError(f"rho_{i}: {exc}") from exc
            rhos.append(r)
        dims = {r.shape[0] for r in rhos}
        if len(dims) != 1:
            raise ValueError(f"density matrices have mixed dimensions {sorted(dims)}")
        for i, r in enumerate(rhos):
            if abs(trace(r) - 1.0) > DENSITY_TOL:
                raise ValueError(f"rho_{i} has trace {trace(r)!r}, expected 1")
            if min_eigenvalue(r) < -DENSITY_TOL:
                raise ValueError(f"rho_{i} is not positive semidefinite")
        for r in rhos:
            r.setflags(write=False)
        object.__setattr__(self, "rhos", tuple(rhos))

    @classmethod
    def from_states(cls, states) -> AntidistInstance:
        return cls(tuple(states.densities()))

    @property
    def dim(self) -> int:
        return self.rhos[0].shape[0]

    @property
    def n(self) -> int:
        return len(self.rhos)


@dataclass(frozen=True)
class Povm:
    elements: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class SolverConfig:
    gap_tol: float = 1e-9
    t_initial: float = 1.0
    t_growth: float = 10.0
    newton_tol: float = 1e-10
    max_newton_per_stage: int = 50
    max_stages: int = 60
    line_search_backoff: float = 0.5
    precision_bits: int = 128

    def __post_init__(self):
        for name in ("gap_tol", "t_initial", "newton_tol", "line_search_backoff"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.t_growth > 1:
            raise ValueError("t_growth must exceed 1")
        if not 0 < self.line_search_backoff < 1:
            raise ValueError("line_search_backoff must lie in (0, 1)")
        if self.max_newton_per_stage < 1 or self.max_stages < 1:
            raise ValueError("iteration limits must be positive")
        if self.precision_bits < 53:
            raise ValueError("precision_bits must be at least 53")


@dataclass(frozen=True)
class StageRecord:
    t: float
    newton_steps: int
    alpha: float
    beta: float
    gap: float  # computed in extended precision
    stationarity: float  # ||t I - sum_i (rho_i - Y)^{-1}||_F


@dataclass(frozen=True)
class SolveResult:
    alpha: float
    beta: float
    povm: Povm
    y: np.ndarray
    gap: float
    primal_residual: float
    dual_min_slack_eig: float
    stages: tuple[StageRecord, ...] = field(repr=False)


@dataclass(frozen=True)
class PrimalFeasibility:
    min_eig: float
    completeness_residual: float
    feasible: bool


@dataclass(frozen=True)
class DualFeasibility:
    per_state_min_slack: tuple[float, ...]
    min_slack: float
    feasible: bool


@functools.lru_cache(maxsize=16)
def hermitian_basis(d: int) -> np.ndarray:
    """Columns are row-major vectorizations of d^2 Hermitian matrices that are
    orthonormal under <A, B> = Re Tr(A B)."""
    mats = []
    for k in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[k, k] = 1.0
        mats.append(e)
    r = 1.0 / math.sqrt(2.0)
    for j in range(d):
        for k in range(j + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = e[k, j] = r
            mats.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[j, k], e[k, j] = -1j * r, 1j * r
            mats.append(e)
    basis = np.array([m.reshape(-1) for m in mats]).T
    basis.setflags(write=False)
    return basis


def barrier_hessian(inverses: list[np.ndarray]) -> np.ndarray:
    """Negated Hessian of sum_i log det(rho_i - Y) in the real Hermitian basis.

    The quadratic form is sum_i Tr(W_i X W_i X) with W_i the slack inverses;
    in row-major vec form W X W maps to kron(W, W^T) vec(X).
    """
    d = inverses[0].shape[0]
    basis = hermitian_basis(d)
    k = sum(np.kron(w, w.T) for w in inverses)
    m = (basis.conj().T @ k @ basis).real
    return 0.5 * (m + m.T)


def to_coordinates(h: np.ndarray) -> np.ndarray:
    return (hermitian_basis(h.shape[0]).conj().T @ h.reshape(-1)).real


def from_coordinates(x: np.ndarray, d: int) -> np.ndarray:
    m = (hermitian_basis(d) @ x).reshape(d, d)
    return 0.5 * (m + m.conj().T)


def _newton_direction(hess: np.ndarray, grad: np.ndarray) -> np.ndarray:
    # Symmetric diagonal scaling keeps Cholesky usable when the curvature
    # spans many orders of magnitude late on the central path.
    scale = 1.0 / np.sqrt(np.diag(hess))
    scaled = scale[:, None] * hess * scale[None, :]
    ridge = 0.0
    for _ in range(8):
        try:
            x = solve_hermitian_linear_system(scaled + ridge * np.eye(len(grad)), scale * grad)
            return scale * x
        except NotPositiveDefiniteError:
            ridge = 1e-14 if ridge == 0.0 else ridge * 100
    raise NotPositiveDefiniteError("barrier Hessian is not positive definite")


class _Slacks:
    """Cholesky factors and inverses of rho_i - Y at one extended-precision Y."""

    def __init__(self, rhos_hp, y_hp):
        self.y = y_hp
        self.chols = [ext.cholesky(r - y_hp) for r in rhos_hp]
        self.logdet = sum(ext.logdet_from_cholesky(c) for c in self.chols)
        self._inverses = None

    @property
    def inverses(self):
        if self._inverses is None:
            self._inverses = [ext.inverse_from_cholesky(c) for c in self.chols]
        return self._inverses

    def phi(self, t):
        return t * ext.trace_real(self.y) + self.logdet


def _try_slacks(rhos_hp, y_hp):
    try:
        return _Slacks(rhos_hp, y_hp)
    except NotPositiveDefiniteError:
        return None


def _central_povm(slacks: _Slacks, t: float):
    """POVM induced by the slack inverses, congruence-normalized so that it
    sums to the identity exactly (to working precision)."""
    inverses = slacks.inverses
    total = sum(inverses[1:], inverses[0])
    low = ext.cholesky(total)
    linv = ext.tril_inverse(low)
    linv_h = ext.dagger(linv)
    return [ext.hermitize(linv @ w @ linv_h) for w in inverses]


def solve(instance: AntidistInstance, config: SolverConfig | None = None) -> SolveResult:
    """Solve the primal/dual pair to a duality gap of at most ``config.gap_tol``."""
    config = config or SolverConfig()
    n, d = instance.n, instance.dim
    stages: list[StageRecord] = []

    with ext.precision(config.precision_bits):
        rhos_hp = [ext.lift(r) for r in instance.rhos]
        identity = ext.eye(d)
        y = -identity
        slacks = _Slacks(rhos_hp, y)
        t = float(config.t_initial)

        for _ in range(config.max_stages):
            target = config.newton_tol * t * math.sqrt(d)
            steps = 0
            while True:
                inverses = slacks.inverses
                grad_hp = t * identity - sum(inverses[1:], inverses[0])
                stationarity = ext.frobenius(grad_hp)
                if stationarity <= target:
                    break
                if steps >= config.max_newton_per_stage:
                    raise ConvergenceError(
                        f"Newton stalled at t={t:.3g} (stationarity {stationarity:.3e} > {target:.3e})",
                        ext.lower(y),
                        stages,
                    )
                hess = barrier_hessian([ext.lower(w) for w in inverses])
                grad = to_coordinates(ext.lower(grad_hp))
                step = ext.lift(from_coordinates(_newton_direction(hess, grad), d))
                phi0 = slacks.phi(t)
                s = 1.0
                while True:
                    cand = _try_slacks(rhos_hp, ext.hermitize(y + s * step))
                    if cand is not None and cand.phi(t) >= phi0:
                        break
                    s *= config.line_search_backoff
                    if s < 1e-14:
                        raise ConvergenceError(
                            f"line search failed at t={t:.3g}", ext.lower(y), stages
                        )
                y, slacks = cand.y, cand
                steps += 1

            povm_hp = _central_povm(slacks, t)
            alpha_hp = sum(
                ext.trace_real(nm @ r) for nm, r in zip(povm_hp, rhos_hp)
            )
            beta_hp = ext.trace_real(y)
            stages.append(
                StageRecord(
                    t=t,
                    newton_steps=steps,
                    alpha=float(alpha_hp),
                    beta=float(beta_hp),
                    gap=float(alpha_hp - beta_hp),
                    stationarity=stationarity,
                )
            )
            log.debug("stage t=%.3g steps=%d gap=%.3e", t, steps, stages[-1].gap)
            if n * d / t <= config.gap_tol:
                break
            t *= config.t_growth
        else:
            raise ConvergenceError(
                f"gap n*d/t still above {config.gap_tol:g} after {config.max_stages} stages",
                ext.lower(y),
                stages,
            )

        y_out = as_hermitian(ext.lower(y))
        elements = tuple(as_hermitian(ext.lower(nm)) for nm in povm_hp)

    povm = Povm(elements)
    alpha = primal_objective(povm, instance)
    beta = trace(y_out)
    primal = check_primal_feasible(povm)
    dual = check_dual_feasible(y_out, instance)
    return SolveResult(
        alpha=alpha,
        beta=beta,
        povm=povm,
        y=y_out,
        gap=alpha - beta,
        primal_residual=primal.completeness_residual,
        dual_min_slack_eig=dual.min_slack,
        stages=tuple(stages),
    )


def primal_objective(povm: Povm, instance: AntidistInstance) -> float:
    if len(povm.elements) != instance.n:
        raise ValueError(f"POVM has {len(povm.elements)} elements for {instance.n} states")
    total = 0.0
    for nm, r in zip(povm.elements, instance.rhos):
        nm = np.asarray(nm)
        if nm.shape != r.shape:
            raise ValueError(f"POVM element shape {nm.shape} does not match {r.shape}")
        total += float(np.real(np.vdot(nm.conj().T, r)))  # Tr(N rho)
    return total


def check_primal_feasible(povm: Povm, tol: float = 1e-8) -> PrimalFeasibility:
    elements = [as_hermitian(e) for e in povm.elements]
    d = elements[0].shape[0]
    min_eig = min(min_eigenvalue(e) for e in elements)
    residual = float(np.linalg.norm(sum(elements) - np.eye(d)))
    return PrimalFeasibility(min_eig, residual, min_eig >= -tol and residual <= tol)


def check_dual_feasible(y, instance: AntidistInstance, tol: float = 0.0) -> DualFeasibility:
    y = as_hermitian(y)
    if y.shape[0] != instance.dim:
        raise ValueError(f"Y has dimension {y.shape[0]}, instance has {instance.dim}")
    per_state = tuple(min_eigenvalue(r - y) for r in instance.rhos)
    lo = min(per_state)
    return DualFeasibility(per_state, lo, lo >= -tol)


class Verdict(enum.Enum):
    ANTIDISTINGUISHABLE = "Antidistinguishable"
    NOT_ANTIDISTINGUISHABLE = "NotAntidistinguishable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    result: SolveResult | None
    povm: Povm | None = None
    certificate: object | None = None  # certificate.Certificate
    diagnostics: str | None = None


def decide_antidistinguishability(
    instance: AntidistInstance,
    config: SolverConfig | None = None,
    threshold: float = DEFAULT_DECISION_THRESHOLD,
) -> Decision:
    """Classify an instance, attaching a POVM or a hardened certificate as evidence."""
    from .certificate import HardeningError, harden_certificate, verify_certificate

    config = config or SolverConfig()
    if not threshold > config.gap_tol:
        raise ValueError("threshold must exceed the solver gap tolerance")
    try:
        result = solve(instance, config)
    except (ConvergenceError, NotPositiveDefiniteError) as exc:
        return Decision(Verdict.INCONCLUSIVE, None, diagnostics=f"solver failure: {exc}")

    if result.alpha <= threshold:
        if check_primal_feasible(result.povm).feasible:
            return Decision(Verdict.ANTIDISTINGUISHABLE, result, povm=result.povm)
        return Decision(Verdict.INCONCLUSIVE, result, diagnostics="primal POVM failed feasibility")
    try:
        cert = harden_certificate(result.y, instance)
    except HardeningError as exc:
        return Decision(Verdict.INCONCLUSIVE, result, diagnostics=str(exc))
    report = verify_certificate(cert.y, instance, psd_tol=0.0)
    if report.valid:
        return Decision(Verdict.NOT_ANTIDISTINGUISHABLE, result, certificate=cert)
    return Decision(Verdict.INCONCLUSIVE, result, diagnostics=report.failure_reason)
