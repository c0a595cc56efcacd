"""
Structured moments for uncorrelated states in O(N) time.

Sites of a product state carry no correlations, so a one-local observable
sum_i A_i has mean sum_i <A_i> and variance sum_i Var(A_i). With
A_i = sum_alpha c_{i alpha} s_alpha one has A_i^2 = |c_i|^2/4, and for a site
polarization vector a_i:
    <A_i>    = c_i . a_i / 2
    Var(A_i) = |c_i|^2/4 - <A_i>^2
"""
import logging

import numpy as np

from algebra.pauli import Axis
from observables.collective import CollectiveObservable
from observables.moments import MomentReport
from states.density import ProductDensity, bloch_vectors
from utils import DimensionError, SpinModelError

logger = logging.getLogger(__name__)


def _site_moments(polarizations, obs):
    n_sites = polarizations.shape[0]
    if isinstance(obs, CollectiveObservable):
        if obs.n_sites != n_sites:
            raise DimensionError(f'observable on {obs.n_sites} sites does not match {n_sites} sites')
        coefficients = obs.site_coefficients()
        means = np.einsum('ij,ij->i', coefficients, polarizations) / 2
        squares = np.sum(coefficients ** 2, axis=1) / 4
    else:
        means = polarizations[:, Axis.parse(obs)] / 2
        squares = 0.25

    return means, squares - means ** 2


def _pure_polarizations(amplitudes):
    """
    Bloch vectors of pure site kets rescaled to unit length, so eigenkets give exact axis vectors.
    """
    polarizations = bloch_vectors(amplitudes)
    return polarizations / np.linalg.norm(polarizations, axis=1)[:, None]


def site_means(state, axis):
    return _pure_polarizations(state.amplitudes)[:, Axis.parse(axis)] / 2


def moments_product_fast(state, obs):
    """
    Mean and variance of S_axis (or any one-local observable) in a product state.
    """
    means, variances = _site_moments(_pure_polarizations(state.amplitudes), obs)
    # a pure site never has negative spread; clip rounding
    variances = np.maximum(variances, 0.)
    return MomentReport(float(np.sum(means)), float(np.sum(variances)), 'product-fast')


def moments_product_density_fast(rho, obs):
    if not isinstance(rho, ProductDensity):
        raise SpinModelError('the structured route needs an uncorrelated ProductDensity')
    means, variances = _site_moments(rho.polarizations, obs)
    return MomentReport(float(np.sum(means)), float(np.sum(variances)), 'product-fast')


def moments_product_mixture_fast(ens, obs):
    """
    Mixture mean sum_k p_k m_k and second moment sum_k p_k (v_k + m_k^2) over product members.
    """
    if not ens.is_product:
        raise SpinModelError('the structured route needs every ensemble member to be a product state')
    n_sites = ens.n_sites
    member = np.array([[r.mean, r.variance] for r in (moments_product_fast(s, obs) for s in ens.states)])
    logger.debug('structured moments over %d product members on %d sites', len(member), n_sites)
    mean = float(ens.weights @ member[:, 0])
    second = float(ens.weights @ (member[:, 1] + member[:, 0] ** 2))

    return MomentReport(mean, second - mean ** 2, 'product-fast')
