import numpy as np
import pytest

import phs_kit as pk
from phs_kit import discrete_gradient, ham_eval, ham_grad, resistive_check, resistive_residual


def quartic():
    # H(x) = 1/4 |x|^4 test energy
    return pk.GeneralHamiltonian(
        value_fn=lambda x: 0.25 * float(x @ x) ** 2,
        gradient_fn=lambda x: float(x @ x) * x,
        dim=3,
    )


def test_ham_eval_quadratic():
    h = pk.QuadraticHamiltonian(H=np.eye(2))
    assert ham_eval(h, [3.0, 4.0]) == pytest.approx(12.5)
    assert ham_eval(h, [0.0, 0.0]) == 0.0


def test_ham_eval_shape_check():
    h = pk.QuadraticHamiltonian(H=np.eye(2))
    with pytest.raises(pk.StructureError):
        ham_eval(h, [1.0, 2.0, 3.0])


def test_quadratic_requires_symmetry():
    with pytest.raises(pk.StructureError):
        pk.QuadraticHamiltonian(H=[[0.0, 1.0], [0.0, 0.0]])


def test_ham_grad_quadratic():
    h = pk.QuadraticHamiltonian(H=np.eye(2))
    assert ham_grad(h, [3.0, 4.0]) == pytest.approx([3.0, 4.0])
    h2 = pk.QuadraticHamiltonian(H=np.diag([2.0, 0.0]), b=[0.0, 1.0])
    assert ham_grad(h2, [1.0, 1.0]) == pytest.approx([2.0, 1.0])


def test_ham_grad_matches_finite_differences(rng):
    h = quartic()
    points = rng.standard_normal((100, 3))
    assert pk.check_gradient(h, points) < 1e-6


def test_general_hamiltonian_domain():
    h = pk.GeneralHamiltonian(
        value_fn=lambda x: float(np.log(x[0])),
        gradient_fn=lambda x: np.array([1.0 / x[0]]),
        dim=1,
        domain=lambda x: x[0] > 0,
    )
    assert ham_eval(h, [1.0]) == 0.0
    with pytest.raises(pk.DomainError):
        ham_eval(h, [-1.0])


def test_discrete_gradient_coincident_points():
    h = pk.QuadraticHamiltonian(H=np.diag([1.0, 3.0]))
    x = np.array([1.0, 2.0])
    assert discrete_gradient(h, x, x) == pytest.approx(ham_grad(h, x))


def test_discrete_gradient_quadratic_reduces_to_midpoint(rng):
    h = pk.QuadraticHamiltonian(H=np.array([[2.0, 0.5], [0.5, 1.0]]), b=[0.1, -0.2], c=0.3)
    for _ in range(50):
        x, y = rng.standard_normal(2), rng.standard_normal(2)
        g = discrete_gradient(h, x, y)
        expected = h.H @ ((x + y) / 2) + h.b
        assert g == pytest.approx(expected, abs=1e-12)


def test_discrete_gradient_chord_identity(rng):
    h = quartic()
    for _ in range(100):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        g = discrete_gradient(h, x, y)
        chord = g @ (y - x)
        assert chord == pytest.approx(ham_eval(h, y) - ham_eval(h, x), abs=1e-12)


def test_quadratic_self_duality(rng):
    h = pk.QuadraticHamiltonian(H=np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]))
    for _ in range(50):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        assert x @ (h.H @ y) == pytest.approx(y @ (h.H @ x), abs=1e-12)


def test_resistive_check_linear_graph():
    assert resistive_check(pk.LinearGraph(R=[[1.0]])).passed
    assert not resistive_check(pk.LinearGraph(R=[[-1.0]])).passed


def test_resistive_check_diffusion_relation():
    # face-sampled positive coefficient: e_R = -a f_R is passive
    a = np.array([0.5, 1.0, 2.5, 4.0])
    rel = pk.LinearGraph(R=np.diag(a))
    report = resistive_check(rel)
    assert report.passed
    assert report.min_eig == pytest.approx(0.5)
    assert report.max_eig == pytest.approx(4.0)


def test_resistive_check_parametric():
    # f = lambda, e = -lambda: A^T B = -I is NSD
    assert resistive_check(pk.Parametric(A=np.eye(2), B=-np.eye(2))).passed
    assert not resistive_check(pk.Parametric(A=np.eye(2), B=np.eye(2))).passed


def test_resistive_check_modulated_needs_states():
    rel = pk.Modulated(family=lambda x: pk.LinearGraph(R=[[1.0 + x[0] ** 2]]), n_r=1)
    with pytest.raises(pk.StructureError):
        resistive_check(rel)
    report = resistive_check(rel, states=[np.array([0.0]), np.array([2.0])])
    assert report.passed
    assert report.states_checked == 2


def test_resistive_residual_linear_graph():
    rel = pk.LinearGraph(R=[[2.0]])
    assert resistive_residual(rel, None, [1.0], [-2.0]) == pytest.approx(0.0)
    assert resistive_residual(rel, None, [1.0], [0.0]) == pytest.approx(2.0)


def test_resistive_residual_parametric_matches_qr_oracle(rng):
    rel = pk.Parametric(A=rng.standard_normal((3, 3)), B=rng.standard_normal((3, 3)))
    stacked = np.vstack([rel.A, rel.B])
    q, _ = np.linalg.qr(stacked)
    for _ in range(10):
        v = rng.standard_normal(6)
        expected = np.linalg.norm(v - q @ (q.T @ v))
        got = resistive_residual(rel, None, v[:3], v[3:])
        assert got == pytest.approx(expected, abs=1e-12)


def test_passivity_sampling_invariant(rng):
    # every member pair of a validated relation dissipates
    graph = pk.LinearGraph(R=np.array([[1.0, 0.3], [0.3, 0.5]]))
    assert resistive_check(graph).passed
    worst = -np.inf
    for _ in range(500):
        f = rng.standard_normal(2)
        worst = max(worst, float(f @ graph.effort(f)))
    base = rng.standard_normal((2, 2))
    par = pk.Parametric(A=base, B=-base)  # A^T B = -A^T A is NSD
    assert resistive_check(par).passed
    for _ in range(500):
        lam = rng.standard_normal(2)
        worst = max(worst, float((par.A @ lam) @ (par.B @ lam)))
    assert worst <= 1e-12


def test_modulated_residual_uses_state():
    rel = pk.Modulated(family=lambda x: pk.LinearGraph(R=[[abs(x[0]) + 1.0]]), n_r=1)
    # at x = 1 the relation is e = -2 f
    assert resistive_residual(rel, np.array([1.0]), [1.0], [-2.0]) == pytest.approx(0.0)
    assert resistive_residual(rel, np.array([0.0]), [1.0], [-2.0]) == pytest.approx(1.0)
