import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discord_bound import states
from discord_bound.errors import ValidationError
from discord_bound.linalg import hermitian_eigensystem


def test_maximally_mixed_accepted():
    rho = states.from_matrix(np.eye(4) / 4, (2, 2))
    assert rho.dims == (2, 2)


def test_psd_violation_named():
    with pytest.raises(ValidationError) as exc:
        states.from_matrix(np.diag([0.6, 0.6, -0.1, -0.1]), (2, 2))
    assert exc.value.invariant == "psd"


def test_trace_violation_named():
    with pytest.raises(ValidationError) as exc:
        states.from_matrix(np.eye(4) / 3, (2, 2))
    assert exc.value.invariant == "trace"


def test_hermitian_violation_named():
    m = np.eye(2) / 2 + np.array([[0, 1e-3], [0, 0]])
    with pytest.raises(ValidationError) as exc:
        states.from_matrix(m, (2,))
    assert exc.value.invariant == "hermitian"


def test_dims_mismatch_rejected():
    with pytest.raises(ValidationError) as exc:
        states.from_matrix(np.eye(4) / 4, (2, 3))
    assert exc.value.invariant == "dimensions"


def test_tiny_negative_eigenvalue_clipped():
    m = np.diag([0.5 + 5e-11, 0.5, -5e-11, 0.0])
    rho = states.from_matrix(m, (2, 2))
    assert rho.eigenvalues().min() >= -1e-15
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-15)


def test_bell_projector_pure(bell):
    rho = states.from_matrix(bell.matrix, (2, 2))
    assert rho.purity() == pytest.approx(1.0, abs=1e-14)


def test_pure_from_vector():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = states.pure_from_vector(v, (2, 2))
    expect = np.zeros((4, 4))
    expect[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(bell.matrix, expect, atol=1e-15)
    prod = states.pure_from_vector([1, 0, 0, 0], (2, 2))
    assert np.allclose(prod.matrix, np.diag([1, 0, 0, 0]))
    assert np.allclose(states.pure_from_vector([2, 0, 0, 2], (2, 2)).matrix, bell.matrix, atol=1e-15)
    with pytest.raises(ValidationError):
        states.pure_from_vector([0, 0, 0, 0], (2, 2))


@pytest.mark.parametrize("seed", [0, 1, 17, 2**40])
def test_haar_pure_contract(seed):
    rho = states.random_pure_haar((2, 3), seed)
    assert rho.purity() == pytest.approx(1.0, abs=1e-12)
    assert rho == states.random_pure_haar((2, 3), seed)
    assert np.array_equal(rho.matrix, states.random_pure_haar((2, 3), seed).matrix)


def test_haar_pure_seeds_differ():
    for s in range(10):
        a = states.random_pure_haar((2, 2), s).matrix
        b = states.random_pure_haar((2, 2), s + 1000).matrix
        assert np.max(np.abs(a - b)) > 1e-6


def test_ginibre_rank_one_is_pure():
    assert states.random_mixed_ginibre((2, 2), 1, 3).purity() == pytest.approx(1.0, abs=1e-12)


def test_ginibre_full_rank_positive_spectrum():
    rho = states.random_mixed_ginibre((2, 2), 4, 5)
    w, _ = hermitian_eigensystem(rho.matrix, "jacobi")
    assert np.all(w > 0)


def test_ginibre_rank_range():
    with pytest.raises(ValidationError):
        states.random_mixed_ginibre((2, 2), 5, 0)
    with pytest.raises(ValidationError):
        states.random_mixed_ginibre((2, 2), 0, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31), st.data())
def test_generated_states_validate(da, db, seed, data):
    rank = data.draw(st.integers(1, da * db))
    for rho in (states.random_mixed_ginibre((da, db), rank, seed), states.random_pure_haar((da, db), seed)):
        again = states.from_matrix(rho.matrix, rho.dims)
        assert np.allclose(again.matrix, rho.matrix, atol=1e-12)
        for part in ("A", "B"):
            marg = rho.marginal(part)
            states.from_matrix(marg.matrix, marg.dims)


def test_werner_boundaries():
    assert np.allclose(states.werner(0).matrix, np.eye(4) / 4)
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(states.werner(1).matrix, np.outer(singlet, singlet), atol=1e-15)
    with pytest.raises(ValidationError):
        states.werner(1.5)
    with pytest.raises(ValidationError):
        states.family("werner", -0.1)


@pytest.mark.parametrize("z", [0.0, 0.5, 1.0])
def test_werner_spectrum(z):
    w, _ = hermitian_eigensystem(states.werner(z).matrix, "jacobi")
    expect = sorted([(1 + 3 * z) / 4] + [(1 - z) / 4] * 3)
    assert np.allclose(w, expect, atol=1e-12)


def test_classical_classical_table():
    rho = states.family("classical_classical", [[0.5, 0.0], [0.0, 0.5]])
    assert np.allclose(rho.matrix, np.diag([0.5, 0, 0, 0.5]))


def test_family_errors():
    with pytest.raises(ValidationError) as exc:
        states.family("ghz")
    assert exc.value.invariant == "family"


def test_product_family_and_marginals():
    ra = np.diag([0.3, 0.7])
    rb = np.diag([0.1, 0.2, 0.7])
    rho = states.family("product", (ra, rb))
    assert rho.dims == (2, 3)
    assert np.allclose(rho.rho_a.matrix, ra)
    assert np.allclose(rho.rho_b.matrix, rb)


def test_swap_exchanges_marginals():
    rho = states.random_mixed_ginibre((2, 3), 6, 8)
    sw = rho.swapped()
    assert sw.dims == (3, 2)
    assert np.allclose(sw.rho_a.matrix, rho.rho_b.matrix, atol=1e-15)
    assert np.allclose(sw.swapped().matrix, rho.matrix)


def test_state_file_round_trip():
    rho = states.random_mixed_ginibre((2, 3), 4, 21)
    text = states.dump_state(rho)
    back = states.load_state(text)
    assert back.dims == (2, 3)
    assert np.array_equal(back.matrix, rho.matrix)
    assert states.dump_state(back) == text


def test_state_file_rejects_bad_input():
    with pytest.raises(ValidationError):
        states.load_state("not json")
    with pytest.raises(ValidationError):
        states.load_state('{"dims": [2, 2], "matrix": [[1, 0]]}')
    with pytest.raises(ValidationError) as exc:
        states.load_state('{"schema_version": "2.0", "dims": [1], "matrix": [[1, 0]]}')
    assert exc.value.invariant == "schema"
