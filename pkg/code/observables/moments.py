"""
Means and variances by definition (pure state or ensemble) and by the density-operator trace.

For an ensemble {p_i, |phi_i>} both routes give
    <O>   = sum_i p_i <phi_i|O|phi_i>     = Tr(rho O)
    <O^2> = sum_i p_i <phi_i|O^2|phi_i>   = Tr(rho O^2)
and the variance is <O^2> - <O>^2 of the mixture as a whole.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from algebra.pauli import DenseOperator
from observables.collective import CollectiveObservable
from utils import DENSE_CAP, PSD_TOL, DimensionError, HermiticityError, check_dense_cap, real_part

logger = logging.getLogger(__name__)

METHODS = ('dense', 'trace', 'product-fast')


@dataclass(frozen=True)
class MomentReport:
    mean: float
    variance: float
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f'unknown method {self.method!r}')
        if self.variance < -PSD_TOL:
            raise HermiticityError(f'negative variance {self.variance!r}')


class OperatorView:
    """
    Uniform view over a CollectiveObservable or a dense matrix.
    """

    def __init__(self, obs, n_sites):
        if isinstance(obs, CollectiveObservable):
            if obs.n_sites != n_sites:
                raise DimensionError(f'observable on {obs.n_sites} sites does not match {n_sites} sites')
            self.apply = obs.apply
        else:
            matrix = obs.matrix if isinstance(obs, DenseOperator) else np.asarray(obs, dtype=complex)
            if matrix.shape != (2 ** n_sites, 2 ** n_sites):
                raise DimensionError(f'operator of shape {matrix.shape} does not match {n_sites} sites')
            self.apply = lambda vectors: matrix @ vectors


def pure_vector(state, cap):
    check_dense_cap(state.n_sites, cap)
    return state.to_pure(cap=cap).amplitudes


def _pure_moments(vector, op):
    o_vector = op.apply(vector)
    first = real_part(np.vdot(vector, o_vector), '<O>')
    second = real_part(np.vdot(vector, op.apply(o_vector)), '<O^2>')
    return first, second


def mean_pure_dense(state, obs, cap=DENSE_CAP):
    vector = pure_vector(state, cap)
    return _pure_moments(vector, OperatorView(obs, state.n_sites))[0]


def variance_pure_dense(state, obs, cap=DENSE_CAP):
    vector = pure_vector(state, cap)
    first, second = _pure_moments(vector, OperatorView(obs, state.n_sites))
    return second - first ** 2


def moments_pure_dense(state, obs, cap=DENSE_CAP):
    vector = pure_vector(state, cap)
    first, second = _pure_moments(vector, OperatorView(obs, state.n_sites))
    return MomentReport(first, second - first ** 2, 'dense')


def _member_moments(ens, obs, cap):
    n_sites = ens.n_sites
    check_dense_cap(n_sites, cap)
    op = OperatorView(obs, n_sites)
    logger.debug('ensemble moments over %d members', len(ens))

    return np.array([_pure_moments(s.to_pure(cap=cap).amplitudes, op) for s in ens.states])


def mean_ensemble(ens, obs, cap=DENSE_CAP):
    moments = _member_moments(ens, obs, cap)
    return float(ens.weights @ moments[:, 0])


def variance_ensemble(ens, obs, cap=DENSE_CAP):
    moments = _member_moments(ens, obs, cap)
    first, second = ens.weights @ moments
    return float(second - first ** 2)


def moments_ensemble(ens, obs, cap=DENSE_CAP):
    moments = _member_moments(ens, obs, cap)
    first, second = ens.weights @ moments
    return MomentReport(float(first), float(second - first ** 2), 'dense')


def within_member_variance(ens, obs, cap=DENSE_CAP):
    """
    sum_i p_i Var_i(O): the average spread inside each member. Not the variance of the mixture.
    """
    moments = _member_moments(ens, obs, cap)
    return float(ens.weights @ (moments[:, 1] - moments[:, 0] ** 2))


def _trace_moments(rho, obs, cap):
    check_dense_cap(rho.n_sites, cap)
    op = OperatorView(obs, rho.n_sites)
    o_rho = op.apply(rho.matrix)
    first = real_part(np.trace(o_rho), 'Tr(rho O)')
    second = real_part(np.trace(op.apply(o_rho)), 'Tr(rho O^2)')
    return first, second


def mean_trace(rho, obs, cap=DENSE_CAP):
    return _trace_moments(rho, obs, cap)[0]


def variance_trace(rho, obs, cap=DENSE_CAP):
    first, second = _trace_moments(rho, obs, cap)
    return second - first ** 2


def moments_trace(rho, obs, cap=DENSE_CAP):
    first, second = _trace_moments(rho, obs, cap)
    return MomentReport(first, second - first ** 2, 'trace')
