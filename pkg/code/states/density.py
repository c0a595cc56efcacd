"""
Density operators rho = sum_i p_i |phi_i><phi_i| and single-spin polarization vectors.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np

from algebra.pauli import Axis, pauli
from utils import ATOL, DENSE_CAP, PSD_TOL, DimensionError, HermiticityError, NormalizationError, \
    check_dense_cap, real_part, sites_from_dim

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f'density matrix must be square, got shape {matrix.shape}')
        sites_from_dim(matrix.shape[0])
        asymmetry = float(np.max(np.abs(matrix - matrix.conj().T)))
        if asymmetry > ATOL:
            raise HermiticityError(f'density matrix is not Hermitian (max deviation {asymmetry:.3e})')
        trace = np.trace(matrix)
        if abs(trace - 1) > ATOL:
            raise NormalizationError(f'density matrix has trace {trace!r}, expected 1')
        smallest = _smallest_eigenvalue(matrix)
        if smallest < -PSD_TOL:
            raise HermiticityError(f'density matrix is not positive semidefinite (eigenvalue {smallest:.3e})')
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def n_sites(self):
        return sites_from_dim(self.dim)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)


def _smallest_eigenvalue(matrix):
    diagonal = np.diag(np.diag(matrix))
    if np.array_equal(matrix, diagonal):
        return float(np.min(np.diag(matrix).real))
    return float(np.linalg.eigvalsh(matrix)[0])


def maximally_mixed(n, cap=DENSE_CAP):
    check_dense_cap(n, cap)
    return DensityOperator(np.eye(2 ** n, dtype=complex) / 2 ** n)


def projector(state, cap=DENSE_CAP):
    vector = state.to_pure(cap=cap).amplitudes
    return DensityOperator(np.outer(vector, vector.conj()))


def density_from_ensemble(ens, cap=DENSE_CAP):
    n_sites = ens.n_sites
    check_dense_cap(n_sites, cap)

    vectors = np.array([s.to_pure(cap=cap).amplitudes for s in ens.states])
    weights = ens.weights
    logger.debug('density operator from %d members on %d sites', len(weights), n_sites)

    return DensityOperator((vectors.T * weights) @ vectors.conj())


def purity(rho):
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def frobenius_distance(a, b):
    return float(np.linalg.norm(a.matrix - b.matrix))


def polarization_vector(rho):
    """
    a with a_alpha = Tr(rho sigma_alpha), so that rho = (1 + a.sigma)/2.
    """
    if rho.n_sites != 1:
        raise DimensionError(f'polarization vector is defined for one spin, got {rho.n_sites} sites')

    return np.array([real_part(np.trace(rho.matrix @ pauli(axis).matrix), f'Tr(rho sigma_{axis.label})')
                     for axis in Axis])


def bloch_vectors(amplitudes):
    """
    Per-row polarization vectors of an (N, 2) table of single-spin kets.
    """
    alpha, beta = amplitudes[:, 0], amplitudes[:, 1]
    cross = np.conj(alpha) * beta

    return np.stack([2 * cross.real, 2 * cross.imag, np.abs(alpha) ** 2 - np.abs(beta) ** 2], axis=1)


@dataclass(frozen=True, eq=False)
class ProductDensity:
    """
    Uncorrelated N-spin state rho = (x)_i (1 + a_i.sigma)/2, one polarization vector per site.
    """
    polarizations: np.ndarray

    def __post_init__(self):
        polarizations = np.array(self.polarizations, dtype=float)
        if polarizations.ndim != 2 or polarizations.shape[1] != 3 or polarizations.shape[0] < 1:
            raise DimensionError(f'polarizations must have shape (N, 3), got {polarizations.shape}')
        longest = float(np.max(np.linalg.norm(polarizations, axis=1)))
        if longest > 1 + ATOL:
            raise NormalizationError(f'polarization vector of length {longest!r} exceeds 1')
        polarizations.setflags(write=False)
        object.__setattr__(self, 'polarizations', polarizations)

    @classmethod
    def unpolarized(cls, n):
        if n < 1:
            raise DimensionError('unpolarized state needs at least one site')
        return cls(np.zeros((n, 3)))

    @classmethod
    def from_product_state(cls, state):
        return cls(bloch_vectors(state.amplitudes))

    @property
    def n_sites(self):
        return self.polarizations.shape[0]

    @property
    def is_unpolarized(self):
        return bool(np.all(np.abs(self.polarizations) <= ATOL))

    def site_density(self, site):
        if not 1 <= site <= self.n_sites:
            raise DimensionError(f'site {site} out of range 1..{self.n_sites}')
        a = self.polarizations[site - 1]
        matrix = np.eye(2, dtype=complex) + sum(a[axis] * pauli(axis).matrix for axis in Axis)
        return DensityOperator(matrix / 2)

    def to_density(self, cap=DENSE_CAP):
        check_dense_cap(self.n_sites, cap)
        sites = [self.site_density(i).matrix for i in range(1, self.n_sites + 1)]
        return DensityOperator(reduce(np.kron, sites))

