import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from algebra.pauli import Axis, SingleSpinKet, spin_component
from observables.collective import collective
from states.density import DensityOperator, ProductDensity, density_from_ensemble, frobenius_distance, \
    maximally_mixed, polarization_vector, projector, purity
from states.ensembles import Ensemble, balanced_mixture, eigenbasis_mixture, uniform_mixture
from states.product_states import ProductState, SignPattern, balanced_count, balanced_patterns, \
    eigenbasis_patterns, psi_delta
from states.pure import PureState
from states.random_states import haar_random_state, random_ensemble
from utils import DenseCapError, DimensionError, EnumerationError, HermiticityError, NormalizationError


def test_sign_pattern_parse_and_str():
    pattern = SignPattern.parse('+-+-')
    assert pattern.signs == (1, -1, 1, -1)
    assert str(pattern) == '+-+-'
    assert pattern.balanced
    assert pattern.eigenvalue == 0


def test_sign_pattern_rejects_bad_input():
    with pytest.raises(ValueError):
        SignPattern.parse('+0')
    with pytest.raises(DimensionError):
        SignPattern(())


def test_first_balanced():
    assert str(SignPattern.first_balanced(6)) == '+++---'
    with pytest.raises(EnumerationError):
        SignPattern.first_balanced(3)


@pytest.mark.parametrize('n, count', [(2, 2), (4, 6), (6, 20), (20, 184756)])
def test_balanced_count(n, count):
    assert balanced_count(n) == count


def test_balanced_patterns_lexicographic():
    patterns = [str(p) for p in balanced_patterns(4)]
    assert patterns == ['++--', '+-+-', '+--+', '-++-', '-+-+', '--++']


@pytest.mark.parametrize('n', [0, 3, 5])
def test_balanced_patterns_need_even_n(n):
    with pytest.raises(EnumerationError):
        balanced_patterns(n)


def test_balanced_patterns_enumeration_cap():
    with pytest.raises(EnumerationError):
        balanced_patterns(22)


def test_eigenbasis_patterns():
    patterns = eigenbasis_patterns(3)
    assert len(patterns) == 8
    assert len({str(p) for p in patterns}) == 8


def test_product_state_validates_rows():
    with pytest.raises(NormalizationError):
        ProductState(np.array([[1, 1], [1, 0]]))
    with pytest.raises(DimensionError):
        ProductState(np.zeros((0, 2)))


def test_psi_delta_is_collective_eigenstate():
    state = psi_delta(Axis.X, '+-+-').to_pure()
    s_x = collective(Axis.X, 4).to_dense().matrix
    assert_allclose(s_x @ state.amplitudes, 0 * state.amplitudes, atol=1e-12)

    state = psi_delta(Axis.Z, '++').to_pure()
    assert_allclose(state.amplitudes, [1, 0, 0, 0])


def test_psi_delta_site_kets():
    state = psi_delta(Axis.Y, '+-')
    assert_allclose(state.site_ket(2).vector, np.array([1, -1j]) / np.sqrt(2))
    with pytest.raises(DimensionError):
        state.site_ket(3)


def test_psi_delta_large_n_is_cheap():
    state = psi_delta(Axis.X, SignPattern.first_balanced(1_000_000))
    assert state.n_sites == 1_000_000
    with pytest.raises(DenseCapError):
        state.to_pure()


def test_pure_state_validation():
    with pytest.raises(NormalizationError):
        PureState([1, 1])
    with pytest.raises(DimensionError):
        PureState([1, 0, 0])
    assert PureState([0, 1]) == PureState([0, 1 + 1e-14])


def test_ensemble_weights_must_sum_to_one():
    up = psi_delta(Axis.Z, '+')
    with pytest.raises(NormalizationError):
        Ensemble.of([0.5, 0.4], [up, up])
    with pytest.raises(NormalizationError):
        Ensemble.of([1.5, -0.5], [up, up])
    with pytest.raises(DimensionError):
        Ensemble(())


def test_ensemble_rejects_mixed_sizes():
    ens = Ensemble.of([0.5, 0.5], [psi_delta(Axis.Z, '+'), psi_delta(Axis.Z, '++')])
    with pytest.raises(DimensionError):
        ens.n_sites


def test_ensemble_renormalizes_exactly():
    ens = uniform_mixture([psi_delta(Axis.Z, '+')] * 3)
    assert ens.weights.sum() == pytest.approx(1, abs=1e-15)


def test_balanced_mixture_members():
    ens = balanced_mixture(Axis.X, 4)
    assert len(ens) == 6
    assert_allclose(ens.weights, np.full(6, 1 / 6))
    assert ens.is_product
    assert ens.n_sites == 4


@pytest.mark.parametrize('n', [2, 4])
@pytest.mark.parametrize('axis', list(Axis))
def test_balanced_mixture_spectrum(n, axis):
    eigenvalues = density_from_ensemble(balanced_mixture(axis, n)).eigenvalues()
    weight = 1 / balanced_count(n)
    assert np.all(np.isclose(eigenvalues, 0, atol=1e-12) | np.isclose(eigenvalues, weight, atol=1e-12))
    assert np.isclose(eigenvalues, weight, atol=1e-12).sum() == balanced_count(n)


def test_balanced_mixture_z_is_not_maximally_mixed():
    rho = density_from_ensemble(balanced_mixture(Axis.Z, 4))
    # six balanced basis states at 1/6, ten others at 0
    assert frobenius_distance(rho, maximally_mixed(4)) > 0.1
    assert frobenius_distance(rho, maximally_mixed(4)) == pytest.approx(np.sqrt(6 * (1 / 6 - 1 / 16) ** 2 + 10 / 256))


@pytest.mark.parametrize('axis', list(Axis))
def test_eigenbasis_mixture_is_maximally_mixed(axis):
    rho = density_from_ensemble(eigenbasis_mixture(axis, 3))
    assert frobenius_distance(rho, maximally_mixed(3)) < 1e-12


def test_single_spin_mixtures_share_density():
    x_mix = uniform_mixture([psi_delta(Axis.X, '+'), psi_delta(Axis.X, '-')])
    z_mix = uniform_mixture([psi_delta(Axis.Z, '+'), psi_delta(Axis.Z, '-')])
    assert frobenius_distance(density_from_ensemble(x_mix), density_from_ensemble(z_mix)) < 1e-12
    assert_allclose(polarization_vector(density_from_ensemble(x_mix)), np.zeros(3), atol=1e-12)


def test_density_operator_validation():
    with pytest.raises(HermiticityError):
        DensityOperator(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(NormalizationError):
        DensityOperator(np.eye(2))
    with pytest.raises(HermiticityError):
        DensityOperator(np.diag([1.5, -0.5]))


def test_projector_is_pure(v_state):
    rho = projector(v_state)
    assert purity(rho) == pytest.approx(1)
    assert_allclose(polarization_vector(rho), [0, np.sqrt(3) / 2, -0.5], atol=1e-12)


def test_maximally_mixed():
    rho = maximally_mixed(4)
    assert purity(rho) == pytest.approx(1 / 16)
    assert_allclose(rho.eigenvalues(), np.full(16, 1 / 16))
    with pytest.raises(DenseCapError):
        maximally_mixed(13)


def test_polarization_vector_needs_one_spin():
    with pytest.raises(DimensionError):
        polarization_vector(maximally_mixed(2))


def test_product_density_unpolarized():
    rho = ProductDensity.unpolarized(3)
    assert rho.is_unpolarized
    assert frobenius_distance(rho.to_density(), maximally_mixed(3)) == 0


def test_product_density_from_product_state(v_state):
    rho = ProductDensity.from_product_state(v_state)
    assert frobenius_distance(rho.to_density(), projector(v_state)) < 1e-12
    with pytest.raises(NormalizationError):
        ProductDensity(np.array([[1., 1., 0.]]))


def test_product_density_site_density():
    rho = ProductDensity(np.array([[0., 0., 1.], [1., 0., 0.]]))
    assert_allclose(rho.site_density(1).matrix, [[1, 0], [0, 0]])
    assert np.trace(rho.site_density(2).matrix @ spin_component(Axis.X).matrix).real == pytest.approx(0.5)


@settings(max_examples=50, derandomize=True, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4), members=st.integers(1, 6))
def test_random_ensemble_density_is_valid(seed, n, members):
    rng = np.random.default_rng(seed)
    ens = random_ensemble(n, members, rng)
    rho = density_from_ensemble(ens)
    assert rho.n_sites == n
    assert np.trace(rho.matrix).real == pytest.approx(1)
    assert rho.eigenvalues().min() > -1e-10
    assert purity(rho) <= 1 + 1e-12


def test_haar_random_state_is_normalized(rng):
    state = haar_random_state(3, rng)
    assert np.vdot(state.amplitudes, state.amplitudes).real == pytest.approx(1)


def test_custom_kets_product():
    state = ProductState.from_kets([SingleSpinKet(1, 0), SingleSpinKet(0, 1)])
    assert_allclose(state.to_pure().amplitudes, [0, 1, 0, 0])
