import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entmix.errors import InvalidDensityMatrix, InvalidEnsemble, ZeroVector
from entmix.qstate import (DensityMatrix, PureState, WeightedEnsemble, bell_states,
                           computational_basis, density_from_ensemble, ensemble_from_json,
                           ensemble_to_json, gram, is_independent, normalize, validate_density)
from oracles import haar_complex, haar_real

s2 = 1 / np.sqrt(2)


@pytest.mark.parametrize("raw, expected", [
    ((2, 0, 0, 0), (1, 0, 0, 0)),
    ((1, 0, 0, 1), (s2, 0, 0, s2)),
    ((1, 1, 1, 1), (0.5, 0.5, 0.5, 0.5)),
])
def test_normalize_examples(raw, expected):
    np.testing.assert_allclose(normalize(raw).amplitudes, expected, atol=1e-15)


def test_normalize_zero_vector():
    with pytest.raises(ZeroVector):
        normalize([0, 0, 0, 1e-15])


finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(st.lists(finite, min_size=4, max_size=4))
def test_normalize_preserves_direction(raw):
    raw = np.array(raw)
    n = np.linalg.norm(raw)
    if n <= 1e-14:
        with pytest.raises(ZeroVector):
            normalize(raw)
        return
    v = normalize(raw).amplitudes
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    np.testing.assert_allclose(v * n, raw, atol=1e-9 * max(1, n))


def test_pure_state_real_flag_and_immutability():
    psi = PureState([1, 0, 0, 0])
    assert psi.real
    assert not PureState(np.array([1j, 0, 0, 0])).real
    assert PureState(np.array([1 + 0j, 0, 0, 0])).real
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 2.0


def test_pure_state_rejects_unnormalized():
    with pytest.raises(InvalidEnsemble):
        PureState([1, 1, 0, 0])


def test_density_single_bell_is_projector():
    phi = bell_states()["phi+"]
    rho = density_from_ensemble(WeightedEnsemble((phi,), [1.0])).matrix
    np.testing.assert_allclose(rho, np.outer(phi.amplitudes, phi.amplitudes), atol=1e-15)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 1


def test_density_mixture_of_00_and_11():
    b = computational_basis()
    rho = density_from_ensemble(WeightedEnsemble((b[0], b[3]), [0.5, 0.5])).matrix
    np.testing.assert_allclose(rho, np.diag([0.5, 0, 0, 0.5]))


def test_density_maximally_mixed():
    rho = density_from_ensemble(WeightedEnsemble.uniform(computational_basis())).matrix
    np.testing.assert_allclose(rho, np.eye(4) / 4)


def test_random_ensembles_give_valid_density(rng):
    for _ in range(10_000):
        k = rng.integers(1, 5)
        states = haar_complex(rng, k) if rng.random() < 0.5 else haar_real(rng, k)
        e = WeightedEnsemble(tuple(states), rng.dirichlet(np.ones(k)))
        rho = density_from_ensemble(e).matrix
        validate_density(rho)
        assert np.linalg.matrix_rank(rho, tol=1e-10) <= k


def test_weights_renormalized_within_1e9():
    b = computational_basis()
    e = WeightedEnsemble((b[0], b[1]), [0.5, 0.5 + 5e-10])
    assert abs(e.weights.sum() - 1) < 1e-15


def test_weights_rejected_beyond_1e9():
    b = computational_basis()
    with pytest.raises(InvalidEnsemble):
        WeightedEnsemble((b[0], b[1]), [0.5, 0.5 + 1e-6])
    with pytest.raises(InvalidEnsemble):
        WeightedEnsemble((b[0], b[1]), [1.5, -0.5])


def test_ensemble_size_limits():
    b = computational_basis()
    with pytest.raises(InvalidEnsemble):
        WeightedEnsemble((), [])
    with pytest.raises(InvalidEnsemble):
        WeightedEnsemble(tuple(b) + (b[0],), np.full(5, 0.2))


def test_density_matrix_validation():
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.eye(4))
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(np.diag([1.1, -0.1, 0, 0]))
    bad = np.eye(4) / 4
    bad[0, 1] = 0.1
    with pytest.raises(InvalidDensityMatrix):
        DensityMatrix(bad)


def test_gram_orthonormal_pair():
    b = computational_basis()
    g = gram(WeightedEnsemble((b[0], b[1]), [0.5, 0.5]))
    np.testing.assert_allclose(g.t, np.eye(2))
    np.testing.assert_allclose(g.t_prime, np.eye(2) / 2)


def test_gram_duplicate_state():
    phi = bell_states()["phi+"]
    g = gram(WeightedEnsemble((phi, phi), [0.3, 0.7]))
    np.testing.assert_allclose(g.t, np.ones((2, 2)), atol=1e-15)


def test_gram_random_pair_matches_dot_product(rng):
    x, y = haar_real(rng, 2)
    g = gram(WeightedEnsemble((x, y), [0.25, 0.75]))
    overlap = sum(x[i] * y[i] for i in range(4))
    assert abs(g.t[0, 1] - overlap) < 1e-14
    assert g.t[0, 1] == g.t[1, 0]
    assert abs(g.t_prime[0, 1] - np.sqrt(0.25 * 0.75) * overlap) < 1e-14


def test_gram_complex_is_hermitian(rng):
    x, y = haar_complex(rng, 2)
    g = gram(WeightedEnsemble((x, y), [0.5, 0.5]))
    assert abs(g.t[0, 1] - np.vdot(x, y)) < 1e-14
    np.testing.assert_allclose(g.t, g.t.conj().T)
    np.testing.assert_allclose(np.diag(g.t), 1)


def test_weighted_gram_determinant_identity(rng):
    for _ in range(1000):
        k = rng.integers(1, 5)
        p = rng.dirichlet(np.ones(k))
        g = gram(WeightedEnsemble(tuple(haar_complex(rng, k)), p))
        assert abs(np.linalg.det(g.t_prime) - np.prod(p) * np.linalg.det(g.t)) < 1e-10


def test_is_independent():
    b = computational_basis()
    phi = bell_states()["phi+"]
    assert is_independent(WeightedEnsemble((b[0], b[1]), [0.5, 0.5]))
    assert not is_independent(WeightedEnsemble((phi, phi), [0.5, 0.5]))


def test_random_triple_is_independent(rng):
    assert all(is_independent(WeightedEnsemble.uniform(list(haar_real(rng, 3)))) for _ in range(100))


def test_json_real_and_complex_states():
    e = ensemble_from_json({"states": [[1, 0, 0, 1], [[0, 0], [1, 0], [0, 1], [0, 0]]],
                            "weights": [0.5, 0.5]})
    assert e.states[0].real and not e.states[1].real
    np.testing.assert_allclose(e.states[1].amplitudes, np.array([0, 1, 1j, 0]) / np.sqrt(2))
    again = ensemble_from_json(ensemble_to_json(e))
    for a, b in zip(e.states, again.states):
        np.testing.assert_allclose(a.amplitudes, b.amplitudes)


def test_json_default_weights_are_uniform():
    e = ensemble_from_json('{"states": [[1,0,0,0],[0,1,0,0],[0,0,1,0]]}')
    np.testing.assert_allclose(e.weights, 1 / 3)


@pytest.mark.parametrize("payload", [
    "not json",
    "{}",
    '{"states": []}',
    '{"states": [[1, 0, 0]]}',
    '{"states": [[1, 0, 0, "a"]]}',
    '{"states": [[1, 0, 0, 0]], "weights": [0.5]}',
])
def test_json_malformed(payload):
    with pytest.raises(InvalidEnsemble):
        ensemble_from_json(payload)


def test_ensemble_to_json_is_plain():
    e = WeightedEnsemble.uniform(computational_basis()[:2])
    assert json.loads(ensemble_to_json(e)) == {"states": [[1, 0, 0, 0], [0, 1, 0, 0]],
                                               "weights": [0.5, 0.5]}


@settings(max_examples=200)
@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_density_trace_one(k, seed):
    rng = np.random.default_rng(seed)
    e = WeightedEnsemble(tuple(haar_complex(rng, k)), rng.dirichlet(np.ones(k)))
    assert abs(np.trace(density_from_ensemble(e).matrix) - 1) < 1e-12
