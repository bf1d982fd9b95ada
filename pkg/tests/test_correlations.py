import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discord_bound import measurement as M
from discord_bound import states
from discord_bound.correlations import (
    bound_report,
    mutual_information,
    optimize_classical_correlations,
    quantum_discord,
    qubit_grid_oracle,
    shannon_entropy,
    von_neumann_entropy,
)
from discord_bound.errors import ValidationError
from discord_bound.rng import haar_unitary, stream

# -0.75 log2 0.75 - 0.25 log2 0.25, evaluated by hand-written math calls
H_075 = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25)) / math.log(2)

# qubit_grid_oracle(werner(0.5)) at the default 181 x 360 grid, frozen before
# the optimizer existed.  Werner states are isotropic, so every grid point
# agrees with 1 - h((1 + z) / 2).
WERNER_05_GRID = 0.18872187554086772


def test_entropy_examples():
    assert von_neumann_entropy(states.random_pure_haar((2, 3), 4)) == pytest.approx(0.0, abs=1e-12)
    for d in (2, 3, 5):
        assert von_neumann_entropy(np.eye(d) / d) == pytest.approx(math.log2(d), abs=1e-14)
    assert H_075 == pytest.approx(0.811278124459, abs=1e-12)
    assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(H_075, abs=1e-14)
    assert von_neumann_entropy(np.diag([0.75, 0.25]), method="jacobi") == pytest.approx(H_075, abs=1e-14)


def test_entropy_rejects_invalid_operator():
    with pytest.raises(ValidationError):
        von_neumann_entropy(np.diag([0.7, 0.7]))
    with pytest.raises(ValidationError):
        von_neumann_entropy(np.diag([1.2, -0.2]))


def test_shannon_examples():
    assert shannon_entropy([1, 0]) == 0.0
    for n in (2, 3, 7):
        assert shannon_entropy(np.full(n, 1 / n)) == pytest.approx(math.log2(n), abs=1e-14)
    assert shannon_entropy([0.75, 0.25]) == pytest.approx(H_075, abs=1e-14)
    with pytest.raises(ValidationError):
        shannon_entropy([0.5, 0.6])
    with pytest.raises(ValidationError):
        shannon_entropy([1.5, -0.5])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31))
def test_entropy_bounds_and_unitary_invariance(da, db, seed):
    rho = states.random_mixed_ginibre((da, db), da * db, seed)
    s = von_neumann_entropy(rho)
    assert -1e-12 <= s <= math.log2(da * db) + 1e-12
    u = haar_unitary(da * db, stream(seed, 1))
    rotated = states.from_matrix(u @ rho.matrix @ u.conj().T, rho.dims)
    assert von_neumann_entropy(rotated) == pytest.approx(s, abs=1e-10)


def test_mutual_information_examples(bell):
    prod = states.product(np.diag([0.2, 0.8]), np.diag([0.5, 0.3, 0.2]))
    assert mutual_information(prod) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(bell) == pytest.approx(2.0, abs=1e-12)
    cc = states.family("classical_classical", [[0.5, 0], [0, 0.5]])
    # S_A = S_B = S_AB = 1 bit for the perfectly correlated bit
    assert mutual_information(cc) == pytest.approx(1.0, abs=1e-12)


def test_grid_oracle_examples(bell):
    prod = states.product(np.diag([0.2, 0.8]), np.diag([0.4, 0.6]))
    assert qubit_grid_oracle(prod, 19, 36)[0] == pytest.approx(0.0, abs=1e-12)
    assert qubit_grid_oracle(bell, 19, 36)[0] == pytest.approx(1.0, abs=1e-12)
    assert qubit_grid_oracle(states.werner(0.5))[0] == pytest.approx(WERNER_05_GRID, abs=1e-14)
    assert WERNER_05_GRID == pytest.approx(1 - H_075, abs=1e-12)


def test_grid_oracle_needs_qubit_b():
    with pytest.raises(ValidationError):
        qubit_grid_oracle(states.random_mixed_ginibre((2, 3), 6, 0))


def test_grid_oracle_matches_pointwise_evaluation():
    rho = states.random_mixed_ginibre((2, 2), 3, 4)
    val, (th, ph) = qubit_grid_oracle(rho, 13, 24)
    assert M.fixed_measurement_classical_info(rho, M.qubit_projective(th, ph)) == pytest.approx(val, abs=1e-12)
    brute = max(
        M.fixed_measurement_classical_info(rho, M.qubit_projective(t, p))
        for t in np.linspace(0, np.pi, 13)
        for p in 2 * np.pi * np.arange(24) / 24
    )
    assert val == pytest.approx(brute, abs=1e-12)


def test_optimizer_bell(bell):
    res = optimize_classical_correlations(bell, restarts=8, seed=0)
    assert res.value == pytest.approx(1.0, abs=1e-6)


def test_optimizer_bell_without_grid(bell):
    res = optimize_classical_correlations(bell, restarts=8, seed=0, grid=False)
    assert res.value == pytest.approx(1.0, abs=1e-6)


def test_optimizer_classical_state_picks_diagonal_basis():
    cc = states.family("classical_classical", [[0.5, 0], [0, 0.5]])
    res = optimize_classical_correlations(cc, restarts=4, seed=1)
    assert res.value == pytest.approx(1.0, abs=1e-6)
    theta = res.describe()["theta"]
    assert min(theta, np.pi - theta) < 1e-3
    assert qubit_grid_oracle(cc, 19, 36)[0] == pytest.approx(1.0, abs=1e-12)


def test_optimizer_werner_half():
    res = optimize_classical_correlations(states.werner(0.5), restarts=32, seed=0)
    assert res.value == pytest.approx(WERNER_05_GRID, abs=1e-4)


def test_optimizer_never_below_start_values():
    for s in range(4):
        rho = states.random_mixed_ginibre((2, 3), 6, s)
        res = optimize_classical_correlations(rho, restarts=3, seed=s)
        assert res.value >= max(res.start_values) - 1e-12
        assert res.value >= max(res.candidate_values) - 1e-12


def test_optimizer_matches_fine_grid_on_regression_set():
    for s in range(20):
        rho = states.random_mixed_ginibre((2 + s % 2, 2), 1 + s % 4, 500 + s)
        grid = qubit_grid_oracle(rho, 361, 720)[0]
        res = optimize_classical_correlations(rho, restarts=4, seed=s)
        assert abs(res.value - grid) <= 1e-4


@pytest.mark.parametrize("n", [1, 2, 4])
def test_restarts_monotone(n):
    rho = states.random_mixed_ginibre((3, 3), 9, 77)
    a = optimize_classical_correlations(rho, restarts=n, seed=5)
    b = optimize_classical_correlations(rho, restarts=2 * n, seed=5)
    assert b.value >= a.value - 1e-12


def test_optimizer_deterministic():
    rho = states.random_mixed_ginibre((2, 3), 6, 8)
    a = optimize_classical_correlations(rho, restarts=3, seed=2)
    b = optimize_classical_correlations(rho, restarts=3, seed=2)
    assert a.value == b.value
    assert np.array_equal(a.params, b.params)


def test_povm_class_at_least_projective_on_qubit():
    rho = states.random_mixed_ginibre((2, 2), 2, 31)
    proj = optimize_classical_correlations(rho, "projective", restarts=4, seed=0)
    povm = optimize_classical_correlations(rho, "povm", restarts=4, seed=0)
    assert isinstance(povm.measurement, M.Povm)
    assert povm.measurement.n_outcomes == 4
    assert np.allclose(povm.measurement.elements.sum(axis=0), np.eye(2), atol=1e-10)
    assert povm.value >= proj.value - 1e-4
    bound = min(von_neumann_entropy(rho.rho_a), von_neumann_entropy(rho.rho_b))
    assert povm.value <= bound + 1e-9


def test_optimizer_rejects_bad_options(bell):
    with pytest.raises(ValidationError):
        optimize_classical_correlations(bell, "weak")
    with pytest.raises(ValidationError):
        optimize_classical_correlations(bell, restarts=0)


def test_discord_report_examples(bell):
    prod = states.product(np.diag([0.2, 0.8]), np.diag([0.4, 0.6]))
    rep = quantum_discord(prod, restarts=2)
    for v in (rep.mutual_information, rep.classical_j, rep.discord):
        assert v == pytest.approx(0.0, abs=1e-6)
    rep = quantum_discord(bell, restarts=4)
    assert rep.mutual_information == pytest.approx(2.0, abs=1e-6)
    assert rep.classical_j == pytest.approx(1.0, abs=1e-6)
    assert rep.discord == pytest.approx(1.0, abs=1e-6)
    assert rep.discord + rep.classical_j == rep.mutual_information
    assert rep.measurement_class == "projective"


def test_werner_separable_region_has_discord():
    rep = quantum_discord(states.werner(0.3), restarts=8)
    grid = qubit_grid_oracle(states.werner(0.3))[0]
    assert rep.classical_j == pytest.approx(grid, abs=1e-4)
    assert rep.discord > 1e-3


def test_bound_report_pure_and_product():
    for s in range(3):
        rho = states.random_pure_haar((2, 3), s)
        assert abs(bound_report(rho, restarts=4, seed=s)["bound_margin"]) <= 1e-3
    prod = states.product(np.diag([0.2, 0.8]), np.diag([0.4, 0.6]))
    out = bound_report(prod, restarts=2)
    s_min = min(von_neumann_entropy(np.diag([0.2, 0.8])), von_neumann_entropy(np.diag([0.4, 0.6])))
    assert out["bound_margin"] == pytest.approx(s_min, abs=1e-9)


def test_swap_gives_reverse_direction():
    rho = states.random_mixed_ginibre((3, 2), 6, 3)
    forward = quantum_discord(rho, restarts=2)
    backward = quantum_discord(rho.swapped(), restarts=2)
    assert forward.mutual_information == pytest.approx(backward.mutual_information, abs=1e-12)
    assert backward.s_a == pytest.approx(forward.s_b, abs=1e-12)
