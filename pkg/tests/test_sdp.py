import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antidist.sdp import (
    AntidistInstance,
    ConvergenceError,
    Povm,
    SolverConfig,
    Verdict,
    barrier_hessian,
    check_dual_feasible,
    check_primal_feasible,
    decide_antidistinguishability,
    from_coordinates,
    hermitian_basis,
    primal_objective,
    solve,
    to_coordinates,
)
from antidist.states import StateSet, haar_random_state, trial_rng

from conftest import basis_states, random_unitary, two_states


def helstrom_alpha(rho1, rho2):
    """n = 2: alpha = 1 + min_{0<=N<=I} Tr(N (rho1 - rho2)) = 1 + (sum of negative eigenvalues)."""
    w = np.linalg.eigvalsh(rho1 - rho2)
    return 1.0 + w[w < 0].sum()


def random_density(d, rank, rng):
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def cvxpy_alpha(rhos):
    cp = pytest.importorskip("cvxpy")
    d = rhos[0].shape[0]
    ns = [cp.Variable((d, d), hermitian=True) for _ in rhos]
    cons = [sum(ns) == np.eye(d)] + [nm >> 0 for nm in ns]
    obj = cp.Minimize(cp.real(sum(cp.trace(nm @ r) for nm, r in zip(ns, rhos))))
    prob = cp.Problem(obj, cons)
    prob.solve(solver="CLARABEL")
    return prob.value


# --- instance validation -------------------------------------------------


def test_instance_rejects_non_density():
    with pytest.raises(ValueError):
        AntidistInstance((np.eye(2),))
    with pytest.raises(ValueError):
        AntidistInstance((np.diag([1.5, -0.5]),))
    with pytest.raises(ValueError):
        AntidistInstance((np.eye(2) / 2, np.eye(3) / 3))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(t_growth=1.0)
    with pytest.raises(ValueError):
        SolverConfig(gap_tol=0)


# --- Newton system ---------------------------------------------------------


def test_basis_is_orthonormal():
    for d in (1, 2, 4):
        b = hermitian_basis(d)
        np.testing.assert_allclose(b.conj().T @ b, np.eye(d * d), atol=1e-15)
        mats = [b[:, k].reshape(d, d) for k in range(d * d)]
        assert all(np.allclose(m, m.conj().T) for m in mats)


def test_coordinates_roundtrip():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    np.testing.assert_allclose(from_coordinates(to_coordinates(h), 4), h, atol=1e-14)


def test_hessian_matches_finite_differences():
    rng = np.random.default_rng(5)
    d = 3
    slacks = [random_density(d, d, rng) + 0.3 * np.eye(d) for _ in range(3)]

    def grad(x):
        # gradient of sum_i log det(S_i - X) is -sum_i (S_i - X)^{-1}
        xm = from_coordinates(x, d)
        return to_coordinates(-sum(np.linalg.inv(s - xm) for s in slacks))

    m = barrier_hessian([np.linalg.inv(s) for s in slacks])
    h = 1e-6
    fd = np.column_stack(
        [(grad(h * e) - grad(-h * e)) / (2 * h) for e in np.eye(d * d)]
    )
    np.testing.assert_allclose(-fd, m, rtol=1e-6, atol=1e-7)
    assert np.all(np.linalg.eigvalsh(m) > 0)


# --- primal/dual helpers ----------------------------------------------------


def test_primal_objective_examples(paper_instance):
    d = 4
    rhos = basis_states(d).densities()
    shift = Povm(tuple(rhos[(i + 1) % d] for i in range(d)))
    assert primal_objective(shift, AntidistInstance(tuple(rhos))) == 0
    uniform = Povm(tuple(np.eye(d) / d for _ in range(d)))
    assert primal_objective(uniform, AntidistInstance(tuple(rhos))) == pytest.approx(1, abs=1e-15)
    assert primal_objective(uniform, paper_instance) == pytest.approx(1, abs=1e-15)
    with pytest.raises(ValueError):
        primal_objective(Povm(uniform.elements[:2]), paper_instance)


def test_check_primal_feasible():
    split = Povm(tuple(np.eye(3) / 3 for _ in range(3)))
    rep = check_primal_feasible(split)
    assert rep.feasible and rep.completeness_residual <= 1e-15
    scaled = Povm((1.1 * split.elements[0],) + split.elements[1:])
    assert check_primal_feasible(scaled).completeness_residual > 0
    bad = np.diag([1e-3 + 1.0, -1e-3])
    rep = check_primal_feasible(Povm((bad, np.eye(2) - bad)))
    assert rep.min_eig == pytest.approx(-1e-3) and not rep.feasible


def test_check_dual_feasible(paper_instance, paper_y):
    rep = check_dual_feasible(-np.eye(4), paper_instance)
    assert rep.feasible and rep.min_slack >= 1 - 1e-12
    rep = check_dual_feasible(paper_y, paper_instance)
    assert rep.min_slack == pytest.approx(7.51231e-10, abs=1e-9) and rep.min_slack > 0
    assert not check_dual_feasible(np.eye(4), paper_instance).feasible


# --- solve -----------------------------------------------------------------


def test_orthonormal_basis_alpha_zero():
    r = solve(AntidistInstance.from_states(basis_states(4)))
    assert 0 <= r.alpha <= 1e-9


def test_identical_states_alpha_one():
    v = haar_random_state(4, trial_rng(9))
    r = solve(AntidistInstance.from_states(StateSet((v,) * 4)))
    assert r.alpha == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("c", [0.0, 0.3, 0.8, 1.0])
def test_two_state_helstrom_oracle(c):
    inst = AntidistInstance.from_states(two_states(c))
    oracle = helstrom_alpha(*inst.rhos)
    assert oracle == pytest.approx(1 - np.sqrt(1 - c * c), abs=1e-12)
    assert solve(inst).alpha == pytest.approx(oracle, abs=1e-7)


def test_paper_instance(paper_instance):
    r = solve(paper_instance)
    assert r.beta == pytest.approx(0.00039381, abs=1e-5)
    assert r.alpha > 0
    assert 0 <= r.gap <= 1e-9
    assert r.primal_residual <= 1e-8
    assert r.dual_min_slack_eig > 0
    assert r.beta == np.trace(r.y).real


@pytest.mark.parametrize("seed,rank", [(1, 1), (2, 2), (3, 3), (4, 1)])
def test_against_cvxpy(seed, rank):
    rng = np.random.default_rng(seed)
    rhos = [random_density(3, rank, rng) for _ in range(4)]
    r = solve(AntidistInstance(tuple(rhos)))
    assert r.alpha == pytest.approx(cvxpy_alpha(rhos), abs=1e-6)


def test_stage_invariants(paper_instance):
    cfg = SolverConfig()
    r = solve(paper_instance, cfg)
    n, d = paper_instance.n, paper_instance.dim
    betas = [s.beta for s in r.stages]
    assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(betas, betas[1:]))
    for s in r.stages:
        assert s.gap == pytest.approx(n * d / s.t, rel=1e-9)
        assert s.stationarity <= cfg.newton_tol * s.t * np.sqrt(d)
        assert s.alpha >= s.beta
    assert r.stages[-1].t * cfg.gap_tol >= n * d


def test_convergence_error_carries_iterate(paper_instance):
    with pytest.raises(ConvergenceError) as exc:
        solve(paper_instance, SolverConfig(max_stages=2))
    assert exc.value.y.shape == (4, 4)
    assert len(exc.value.stages) == 2


@settings(max_examples=8, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_weak_duality_sandwich_random(d, n, seed):
    rng = np.random.default_rng(seed)
    rhos = [random_density(d, int(rng.integers(1, d + 1)), rng) for _ in range(n)]
    inst = AntidistInstance(tuple(rhos))
    r = solve(inst)
    assert r.beta <= r.alpha + 1e-15
    assert r.alpha - r.beta <= 1e-9
    assert check_dual_feasible(r.y, inst).min_slack > -1e-12
    assert check_primal_feasible(r.povm).feasible
    for s in r.stages:
        assert s.gap == pytest.approx(n * d / s.t, rel=1e-9)


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_unitary_covariance(seed):
    rng = np.random.default_rng(seed)
    d = 4
    states = StateSet(tuple(haar_random_state(d, trial_rng(seed + k)) for k in range(d)))
    inst = AntidistInstance.from_states(states)
    u = random_unitary(d, rng)
    rotated = AntidistInstance(tuple(u @ r @ u.conj().T for r in inst.rhos))
    assert solve(rotated).alpha == pytest.approx(solve(inst).alpha, abs=1e-8)


# --- decision ----------------------------------------------------------------


def test_decide_examples(paper_instance):
    dec = decide_antidistinguishability(AntidistInstance.from_states(basis_states(4)))
    assert dec.verdict is Verdict.ANTIDISTINGUISHABLE and dec.povm is not None
    dec = decide_antidistinguishability(AntidistInstance.from_states(basis_states(2)))
    assert dec.verdict is Verdict.ANTIDISTINGUISHABLE
    dec = decide_antidistinguishability(paper_instance)
    assert dec.verdict is Verdict.NOT_ANTIDISTINGUISHABLE
    assert dec.certificate.trace_value > 0 and dec.certificate.min_slack_eig >= 0


def test_decide_threshold_must_exceed_gap_tol(paper_instance):
    with pytest.raises(ValueError):
        decide_antidistinguishability(paper_instance, SolverConfig(gap_tol=1e-6), threshold=1e-7)


def test_decide_reports_solver_failure_as_inconclusive(paper_instance):
    dec = decide_antidistinguishability(paper_instance, SolverConfig(max_stages=1))
    assert dec.verdict is Verdict.INCONCLUSIVE
    assert "solver failure" in dec.diagnostics
