import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from algebra.pauli import Axis, DenseOperator, spin_component
from observables.basis import computational_basis, diagonal_shortcut_mean, eigen_residual, matrix_elements
from observables.collective import CollectiveObservable, LocalSpinTerm, collective, random_one_local, single_site
from observables.moments import MomentReport, mean_ensemble, mean_pure_dense, mean_trace, moments_ensemble, \
    moments_pure_dense, moments_trace, variance_ensemble, variance_pure_dense, variance_trace, \
    within_member_variance
from observables.product_fast import moments_product_density_fast, moments_product_fast, \
    moments_product_mixture_fast, site_means
from states.density import ProductDensity, density_from_ensemble, maximally_mixed, projector
from states.ensembles import Ensemble, balanced_mixture, eigenbasis_mixture, uniform_mixture
from states.product_states import SignPattern, balanced_patterns, psi_delta
from states.pure import PureState
from states.random_states import haar_random_state, random_ensemble
from utils import DenseCapError, DimensionError, HermiticityError, NormalizationError

TOL = 1e-10
SQRT3 = np.sqrt(3)


def balanced(axis, n):
    return psi_delta(axis, SignPattern.first_balanced(n))


def test_collective_terms():
    assert len(collective(Axis.X, 1).terms) == 1
    obs = collective(Axis.X, 4)
    assert [t.site for t in obs.terms] == [1, 2, 3, 4]
    assert obs.label == 'S_x'
    with pytest.raises(DimensionError):
        collective(Axis.X, 0)


def test_collective_z_two_sites_dense():
    assert_allclose(collective(Axis.Z, 2).to_dense().matrix, np.diag([1, 0, 0, -1]))


def test_square_dense_matches_matrix_square():
    obs = collective(Axis.X, 2)
    assert_allclose(obs.square_dense().matrix, obs.to_dense().matrix @ obs.to_dense().matrix, atol=1e-12)


def test_coefficient_table_form():
    obs = CollectiveObservable.from_coefficients([[0, 0, 2.], [0, 0, -1.]])
    assert obs == CollectiveObservable(2, (LocalSpinTerm(1, Axis.Z, 2.), LocalSpinTerm(2, Axis.Z, -1.)))
    assert obs.single_axis() is Axis.Z
    assert obs.label == 'O'
    with pytest.raises(DimensionError):
        CollectiveObservable.from_coefficients([[1., 0.]])
    with pytest.raises(ValueError):
        CollectiveObservable.from_coefficients([[np.inf, 0, 0]])


def test_cancelled_terms_are_dropped():
    obs = CollectiveObservable(2, (LocalSpinTerm(1, Axis.X, 0.5), LocalSpinTerm(1, Axis.X, -0.5),
                                   LocalSpinTerm(2, Axis.Y)))
    assert obs.terms == (LocalSpinTerm(2, Axis.Y),)
    assert obs.label == 's_y2'


def test_collective_million_sites_is_cheap():
    start = time.perf_counter()
    obs = collective(Axis.Z, 1_000_000)
    coefficients = obs.site_coefficients()
    elapsed = time.perf_counter() - start
    assert obs.label == 'S_z' and obs.single_axis() is Axis.Z
    assert coefficients.shape == (1_000_000, 3) and coefficients[:, 2].sum() == 1_000_000
    assert elapsed < 0.5


def test_observable_merges_duplicate_terms():
    obs = CollectiveObservable(2, (LocalSpinTerm(1, Axis.X, 0.5), LocalSpinTerm(1, 'x', 0.25),
                                   LocalSpinTerm(2, Axis.Z)))
    assert obs.terms == (LocalSpinTerm(1, Axis.X, 0.75), LocalSpinTerm(2, Axis.Z, 1.))
    with pytest.raises(DimensionError):
        CollectiveObservable(2, (LocalSpinTerm(3, Axis.X),))
    with pytest.raises(ValueError):
        LocalSpinTerm(1, Axis.X, float('nan'))


def test_single_site_label():
    assert single_site(Axis.Y, 2, 3).label == 's_y2'


def test_apply_matches_dense(rng):
    obs = random_one_local(3, rng)
    vector = haar_random_state(3, rng).amplitudes
    assert_allclose(obs.apply(vector), obs.to_dense().matrix @ vector, atol=1e-12)
    assert_allclose(obs.apply(np.eye(8)), obs.to_dense().matrix, atol=1e-12)


def test_swap_axes_relabels():
    obs = collective(Axis.X, 3).swap_axes(Axis.X, Axis.Z)
    assert obs.single_axis() is Axis.Z
    assert obs.label == 'S_z'


@pytest.mark.parametrize('n', [2, 4, 8])
def test_pure_state_table(n):
    state = balanced(Axis.X, n)
    assert abs(mean_pure_dense(state, collective(Axis.X, n))) < TOL
    assert abs(variance_pure_dense(state, collective(Axis.X, n))) < TOL
    assert abs(mean_pure_dense(state, collective(Axis.Z, n))) < TOL
    assert variance_pure_dense(state, collective(Axis.Z, n)) == pytest.approx(n / 4, abs=TOL)

    rho = projector(state)
    report = moments_trace(rho, collective(Axis.Z, n))
    assert report.method == 'trace'
    assert report.variance == pytest.approx(n / 4, abs=TOL)
    assert moments_product_fast(state, Axis.Z).variance == pytest.approx(n / 4, abs=TOL)


@pytest.mark.parametrize('n', [2, 4, 8])
def test_isotropic_pure_state_table(n):
    state = balanced(Axis.Z, n)
    report = moments_pure_dense(state, collective(Axis.Z, n))
    assert abs(report.mean) < TOL and abs(report.variance) < TOL
    report = moments_pure_dense(state, collective(Axis.X, n))
    assert abs(report.mean) < TOL
    assert report.variance == pytest.approx(n / 4, abs=TOL)


def test_v_state_moments(v_state):
    s_y = single_site(Axis.Y, 1, 1)
    assert mean_pure_dense(v_state, s_y) == pytest.approx(SQRT3 / 4, abs=1e-12)
    assert variance_pure_dense(v_state, s_y) == pytest.approx(1 / 16, abs=1e-12)
    assert mean_pure_dense(v_state, spin_component(Axis.Y)) == pytest.approx(SQRT3 / 4, abs=1e-12)
    assert moments_product_fast(v_state, s_y).mean == pytest.approx(SQRT3 / 4, abs=1e-12)
    assert moments_product_fast(v_state, s_y).variance == pytest.approx(1 / 16, abs=1e-12)


def test_balanced_mixture_moments():
    ens = balanced_mixture(Axis.X, 4)
    s_x = collective(Axis.X, 4)
    assert abs(mean_ensemble(ens, s_x)) < TOL
    assert abs(variance_ensemble(ens, s_x)) < TOL
    rho = density_from_ensemble(ens)
    assert abs(mean_trace(rho, s_x)) < TOL
    assert abs(variance_trace(rho, s_x)) < TOL


def test_single_spin_mixture_moments():
    ens = uniform_mixture([psi_delta(Axis.X, '+'), psi_delta(Axis.X, '-')])
    report = moments_ensemble(ens, single_site(Axis.X, 1, 1))
    assert abs(report.mean) < TOL
    assert report.variance == pytest.approx(0.25, abs=TOL)
    # every member is an eigenstate, so the within-member spread is zero
    assert within_member_variance(ens, single_site(Axis.X, 1, 1)) == pytest.approx(0, abs=TOL)


def test_degenerate_ensemble_is_pure(v_state):
    ens = Ensemble.of([1.0], [v_state])
    assert mean_ensemble(ens, single_site(Axis.Y, 1, 1)) == pytest.approx(SQRT3 / 4, abs=1e-12)


@pytest.mark.parametrize('n', [2, 4, 8])
def test_maximally_mixed_moments(n):
    rho = maximally_mixed(n)
    for axis in (Axis.X, Axis.Z):
        report = moments_trace(rho, collective(axis, n))
        assert abs(report.mean) < TOL
        assert report.variance == pytest.approx(n / 4, abs=TOL)


@pytest.mark.parametrize('n', [1, 7, 1000])
def test_product_density_fast_unpolarized(n):
    report = moments_product_density_fast(ProductDensity.unpolarized(n), Axis.Y)
    assert report.mean == 0
    assert report.variance == n / 4


def test_product_density_fast_matches_trace(rng):
    polarizations = rng.uniform(-0.5, 0.5, size=(3, 3))
    rho = ProductDensity(polarizations)
    obs = random_one_local(3, rng)
    fast = moments_product_density_fast(rho, obs)
    exact = moments_trace(rho.to_density(), obs)
    assert fast.mean == pytest.approx(exact.mean, abs=TOL)
    assert fast.variance == pytest.approx(exact.variance, abs=TOL)


def test_projector_route_equals_pure_route():
    state = balanced(Axis.X, 4)
    assert variance_trace(projector(state), collective(Axis.Z, 4)) == pytest.approx(
        variance_pure_dense(state, collective(Axis.Z, 4)), abs=TOL)


def test_product_fast_known_values():
    report = moments_product_fast(balanced(Axis.X, 100), Axis.Z)
    assert report.method == 'product-fast'
    assert report.mean == 0 and report.variance == 25.0
    report = moments_product_fast(balanced(Axis.X, 4), Axis.X)
    assert abs(report.mean) < TOL and report.variance == 0
    report = moments_product_fast(psi_delta(Axis.Z, '++'), Axis.Z)
    assert report.mean == pytest.approx(1.0) and report.variance == 0


def test_product_fast_million_sites():
    state = balanced(Axis.X, 1_000_000)
    start = time.perf_counter()
    report = moments_product_fast(state, Axis.Z)
    elapsed = time.perf_counter() - start
    assert report.variance == 250000.0
    assert report.mean == 0
    assert elapsed < 1.0


def test_site_means():
    assert_allclose(site_means(psi_delta(Axis.X, '+-'), Axis.X), [0.5, -0.5])
    assert_allclose(site_means(psi_delta(Axis.X, '+-'), Axis.Z), [0, 0], atol=1e-15)


@pytest.mark.parametrize('n', [2, 4, 6, 8, 10])
@pytest.mark.parametrize('state_axis', list(Axis))
@pytest.mark.parametrize('obs_axis', list(Axis))
def test_fast_path_matches_dense(n, state_axis, obs_axis):
    obs = collective(obs_axis, n)
    patterns = balanced_patterns(n)
    # every ordering for small n, a spread of them for larger n
    for pattern in patterns[::max(1, len(patterns) // 6)]:
        state = psi_delta(state_axis, pattern)
        fast = moments_product_fast(state, obs_axis)
        dense = moments_pure_dense(state, obs)
        assert fast.mean == pytest.approx(dense.mean, abs=TOL)
        assert fast.variance == pytest.approx(dense.variance, abs=TOL)


def test_mixture_fast_matches_ensemble_route(rng):
    for axis in Axis:
        ens = eigenbasis_mixture(axis, 3)
        obs = random_one_local(3, rng)
        fast = moments_product_mixture_fast(ens, obs)
        exact = moments_ensemble(ens, obs)
        assert fast.mean == pytest.approx(exact.mean, abs=TOL)
        assert fast.variance == pytest.approx(exact.variance, abs=TOL)


@pytest.mark.parametrize('n', [2, 4, 6, 8])
@pytest.mark.parametrize('obs_axis', list(Axis))
def test_isotropy_under_axis_swap(n, obs_axis):
    obs = collective(obs_axis, n)
    swapped = obs.swap_axes(Axis.X, Axis.Z)

    before = moments_product_fast(balanced(Axis.X, n), obs)
    after = moments_product_fast(balanced(Axis.Z, n), swapped)
    assert before.mean == pytest.approx(after.mean, abs=TOL)
    assert before.variance == pytest.approx(after.variance, abs=TOL)

    before = moments_product_mixture_fast(balanced_mixture(Axis.X, n), obs)
    after = moments_product_mixture_fast(balanced_mixture(Axis.Z, n), swapped)
    assert before.mean == pytest.approx(after.mean, abs=TOL)
    assert before.variance == pytest.approx(after.variance, abs=TOL)

    before = moments_trace(maximally_mixed(n), obs)
    after = moments_trace(maximally_mixed(n), swapped)
    assert before.variance == pytest.approx(after.variance, abs=TOL)


@settings(max_examples=200, derandomize=True, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 5), members=st.integers(1, 8))
def test_trace_equals_ensemble(seed, n, members):
    rng = np.random.default_rng(seed)
    ens = random_ensemble(n, members, rng)
    obs = random_one_local(n, rng)
    by_members = moments_ensemble(ens, obs)
    by_trace = moments_trace(density_from_ensemble(ens), obs)
    assert abs(by_members.mean - by_trace.mean) < TOL
    assert abs(by_members.variance - by_trace.variance) < TOL
    assert by_members.variance > -TOL


@settings(max_examples=50, derandomize=True, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4))
def test_eigenstates_have_zero_variance(seed, n):
    rng = np.random.default_rng(seed)
    axis = Axis(int(rng.integers(3)))
    pattern = SignPattern(tuple(rng.choice([1, -1], size=n)))
    state = psi_delta(axis, pattern)
    obs = collective(axis, n)
    eigenvalue, residual = eigen_residual(obs, state)
    assert residual < 1e-12
    assert eigenvalue == pytest.approx(pattern.eigenvalue, abs=1e-12)
    assert abs(variance_pure_dense(state, obs)) < TOL


def test_matrix_elements_in_eigenbasis():
    basis = computational_basis(1)
    assert_allclose(matrix_elements(single_site(Axis.Z, 1, 1), basis), np.diag([0.5, -0.5]))
    elements = matrix_elements(single_site(Axis.Y, 1, 1), basis)
    assert_allclose(np.diag(elements), [0, 0])
    assert elements[0, 1] == pytest.approx(-0.5j)
    assert elements[1, 0] == pytest.approx(0.5j)


def test_matrix_elements_two_sites():
    elements = matrix_elements(collective(Axis.X, 2), computational_basis(2))
    assert_allclose(np.diag(elements), np.zeros(4))
    assert elements.shape == (4, 4)


def test_matrix_elements_rejects_non_orthonormal():
    basis = [PureState([1, 0]), PureState(np.array([1, 1]) / np.sqrt(2))]
    with pytest.raises(NormalizationError, match='orthonormal'):
        matrix_elements(single_site(Axis.Z, 1, 1), basis)


def test_diagonal_shortcut_misses_interference(v_state):
    basis = computational_basis(1)
    s_y, s_z = single_site(Axis.Y, 1, 1), single_site(Axis.Z, 1, 1)
    assert diagonal_shortcut_mean(v_state, s_z, basis) == pytest.approx(mean_pure_dense(v_state, s_z), abs=1e-12)
    shortcut = diagonal_shortcut_mean(v_state, s_y, basis)
    assert shortcut == pytest.approx(0, abs=1e-12)
    assert abs(mean_pure_dense(v_state, s_y) - shortcut) > 0.4


def test_non_hermitian_input_fails(v_state):
    with pytest.raises(HermiticityError):
        mean_pure_dense(v_state, DenseOperator(np.array([[0, 1], [0, 0]])))


def test_dimension_mismatch(v_state):
    with pytest.raises(DimensionError):
        mean_pure_dense(v_state, collective(Axis.X, 2))
    with pytest.raises(DimensionError):
        moments_trace(maximally_mixed(2), np.eye(2))


def test_dense_cap_points_to_fast_route():
    with pytest.raises(DenseCapError, match='use the product-fast route'):
        moments_pure_dense(balanced(Axis.X, 14), collective(Axis.Z, 14))
    report = moments_pure_dense(balanced(Axis.X, 14), collective(Axis.Z, 14), cap=14)
    assert report.variance == pytest.approx(3.5, abs=TOL)


def test_moment_report_rejects_negative_variance():
    with pytest.raises(HermiticityError):
        MomentReport(0., -1e-6, 'dense')
    with pytest.raises(ValueError):
        MomentReport(0., 0., 'guess')
