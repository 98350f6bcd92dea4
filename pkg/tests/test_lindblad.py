import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from milburn.errors import DimensionMismatch, StepSizeUnderflow
from milburn.evolution import (
    build_kernel,
    evolve_series,
    integrate_lindblad,
    lindblad_rhs,
    lindblad_step_size,
    plan_series,
)
from milburn.fock import (
    OscillatorParams,
    TruncationPolicy,
    coherent_state,
    hermitian_eig,
    make_hamiltonian,
    make_number,
    make_quadrature,
)


def _random_rho(n, rng):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = X @ X.conj().T
    return rho / np.trace(rho)


def _exact_lindblad(rho0, params, policy, t, weight):
    dec = hermitian_eig(make_hamiltonian(params, policy))
    V, E = dec.eigenvectors, dec.eigenvalues
    gap = E[:, None] - E[None, :]
    r = V.conj().T @ rho0 @ V * np.exp((-1j * gap - weight / params.gamma * gap**2) * t)
    return V @ r @ V.conj().T


def test_rhs_matches_commutators():
    rng = np.random.default_rng(1)
    policy = TruncationPolicy(12)
    params = OscillatorParams(2.0, 0.5, 3.0)
    H = make_hamiltonian(params, policy)
    rho = _random_rho(12, rng)
    comm = H @ rho - rho @ H
    double = H @ comm - comm @ H
    np.testing.assert_allclose(lindblad_rhs(rho, H, 3.0), -1j * comm - double / 6.0, atol=1e-12)
    np.testing.assert_allclose(lindblad_rhs(rho, H, 3.0, weight=1.0), -1j * comm - double / 3.0,
                               atol=1e-12)
    with pytest.raises(DimensionMismatch):
        lindblad_rhs(rho[:5, :5], H, 3.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rhs_traceless_and_hermitian(seed):
    rng = np.random.default_rng(seed)
    policy = TruncationPolicy(10)
    H = make_hamiltonian(OscillatorParams(1.0, rng.uniform(-1, 1), rng.uniform(1, 50)), policy)
    out = lindblad_rhs(_random_rho(10, rng), H, 7.0)
    assert abs(np.trace(out)) < 1e-10
    np.testing.assert_allclose(out, out.conj().T, atol=1e-10)


def test_rhs_is_second_order_expansion_of_full_map():
    rng = np.random.default_rng(3)
    policy = TruncationPolicy(10, edge_tolerance=0.0)
    rho = _random_rho(10, rng)
    errors = {}
    for gamma in (1e3, 2e3, 4e3):
        params = OscillatorParams(1.0, 0.3, gamma)
        U = build_kernel(params, policy).unitary
        full = gamma * (U @ rho @ U.conj().T - rho)
        H = make_hamiltonian(params, policy)
        errors[gamma] = np.abs(lindblad_rhs(rho, H, gamma) - full).max()
        # a unit coefficient leaves a first-order residue
        assert np.abs(lindblad_rhs(rho, H, gamma, weight=1.0) - full).max() > 10 * errors[gamma]
    # remainder is O(1/gamma^2)
    assert errors[1e3] / errors[2e3] == pytest.approx(4.0, rel=0.02)
    assert errors[2e3] / errors[4e3] == pytest.approx(4.0, rel=0.02)


def test_step_size_rule():
    policy = TruncationPolicy(64)
    params = OscillatorParams(4.0, 0.7, 10.0)
    spec = hermitian_eig(make_hamiltonian(params, policy))
    spread = spec.eigenvalues[-1] - spec.eigenvalues[0]
    assert lindblad_step_size(params, spec) == pytest.approx(
        min(0.01 / 4.0, 0.1 * 10.0 / spread**2, 1 / spread))


@pytest.mark.parametrize("weight", [0.5, 1.0])
def test_integrator_matches_exact_solution(weight):
    policy = TruncationPolicy(32)
    params = OscillatorParams(4.0, 0.7, 10.0)
    psi0 = coherent_state(2.0, policy)
    rho0 = np.outer(psi0, psi0.conj())
    ops = {"quadrature": make_quadrature(policy), "number": make_number(policy)}
    t = np.linspace(0, 1.5, 7)
    ts = integrate_lindblad(psi0, params, policy, t, ops, weight=weight)
    for i, ti in enumerate(t):
        rho = _exact_lindblad(rho0, params, policy, ti, weight)
        for name, op in ops.items():
            assert ts[name, "lindblad"][i] == pytest.approx(np.trace(rho @ op).real, abs=1e-9)
    assert ts.diagnostics["trace_drift"] < 1e-10
    assert ts.diagnostics["lindblad_steps"] > 0


def test_density_matrix_input_and_max_step():
    policy = TruncationPolicy(24)
    params = OscillatorParams(1.0, 0.2, 5.0)
    psi0 = coherent_state(1.0, policy)
    ops = {"number": make_number(policy)}
    t = [0.0, 0.5, 1.0]
    a = integrate_lindblad(psi0, params, policy, t, ops)
    b = integrate_lindblad(np.outer(psi0, psi0.conj()), params, policy, t, ops, max_step=2e-4)
    np.testing.assert_allclose(a["number", "lindblad"], b["number", "lindblad"], atol=1e-10)
    assert b.diagnostics["lindblad_step"] == 2e-4


def test_large_gamma_is_unitary():
    # gamma = 1e12: the dissipator is negligible, compare with exact e^{-iHt}
    policy = TruncationPolicy(32)
    params = OscillatorParams(4.0, 0.7, 1e12)
    psi0 = coherent_state(2.0, policy)
    dec = hermitian_eig(make_hamiltonian(params, policy))
    op = make_quadrature(policy)
    t = np.linspace(0, 1, 5)
    ts = integrate_lindblad(psi0, params, policy, t, {"quadrature": op})
    for i, ti in enumerate(t):
        psi = dec.apply(lambda e: np.exp(-1j * e * ti)) @ psi0
        assert ts["quadrature", "lindblad"][i] == pytest.approx((psi.conj() @ op @ psi).real, abs=1e-8)


def _deviation(gamma, weight, policy):
    params = OscillatorParams(4.0, 0.7, gamma)
    psi0 = coherent_state(4.0, policy)
    ops = {"quadrature": make_quadrature(policy), "number": make_number(policy)}
    lind = integrate_lindblad(psi0, params, policy, [0.0, 1.0], ops, weight=weight)
    ref = evolve_series(psi0, build_kernel(params, policy), plan_series(params, policy, 1.0),
                        list(ops.values()))
    return max(abs(lind["quadrature", "lindblad"][1] - ref[0]), abs(lind["number", "lindblad"][1] - ref[1]))


@pytest.mark.slow
def test_unit_coefficient_converges_at_first_order():
    policy = TruncationPolicy(64)
    devs = [_deviation(g, 1.0, policy) for g in (40.0, 80.0, 160.0)]
    # first order: each doubling roughly halves the error
    assert 0.45 < devs[1] / devs[0] < 0.65
    assert 0.45 < devs[2] / devs[1] < 0.6


@pytest.mark.slow
def test_default_coefficient_converges_at_second_order():
    policy = TruncationPolicy(64)
    devs = [_deviation(g, 0.5, policy) for g in (40.0, 80.0, 160.0)]
    assert 0.2 < devs[1] / devs[0] < 0.3
    assert 0.2 < devs[2] / devs[1] < 0.3


def test_errors():
    policy = TruncationPolicy(64)
    params = OscillatorParams(4.0, 0.7, 10.0)
    psi0 = coherent_state(4.0, policy)
    ops = {"number": make_number(policy)}
    with pytest.raises(ValueError):
        integrate_lindblad(psi0, params, policy, [0.5, 1.0], ops)
    with pytest.raises(ValueError):
        integrate_lindblad(psi0, params, policy, [0.0, 1.0, 1.0], ops)
    with pytest.raises(DimensionMismatch):
        integrate_lindblad(psi0[:10], params, policy, [0.0, 1.0], ops)
    with pytest.raises(StepSizeUnderflow):
        integrate_lindblad(psi0, OscillatorParams(4.0, 0.7, 1e-6), policy, [0.0, 1.0], ops)


def test_rhs_vanishes_on_stationary_states():
    policy = TruncationPolicy(16)
    params = OscillatorParams(4.0, 0.7, 10.0)
    H = make_hamiltonian(params, policy)
    v = hermitian_eig(H).eigenvectors[:, 2]
    assert np.abs(lindblad_rhs(np.outer(v, v.conj()), H, 10.0)).max() < 1e-12
    H0 = make_hamiltonian(OscillatorParams(4.0, 0.0, 10.0), policy)
    vac = np.zeros((16, 16))
    vac[0, 0] = 1
    np.testing.assert_array_equal(lindblad_rhs(vac, H0, 10.0), 0)


def test_stationary_tracks_constant():
    policy = TruncationPolicy(16)
    params = OscillatorParams(4.0, 0.7, 10.0)
    dec = hermitian_eig(make_hamiltonian(params, policy))
    rho0 = sum(p * np.outer(dec.eigenvectors[:, k], dec.eigenvectors[:, k].conj())
               for k, p in ((0, 0.5), (1, 0.3), (3, 0.2)))
    ops = {"quadrature": make_quadrature(policy), "number": make_number(policy)}
    ts = integrate_lindblad(rho0, params, policy, np.linspace(0, 2, 5), ops)
    for name in ops:
        np.testing.assert_allclose(ts[name, "lindblad"], ts[name, "lindblad"][0], atol=1e-9)
