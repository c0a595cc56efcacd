"""
Observables written in a chosen orthonormal basis, O_kk' = <k|O|k'>.

`diagonal_shortcut_mean` keeps only the diagonal: sum_k |<k|phi>|^2 O_kk. It is
the mean only when O is diagonal in that basis; the interference terms
O_kk' (k != k') are what it drops.
"""
import numpy as np

from observables.moments import OperatorView, pure_vector
from states.pure import PureState
from utils import DENSE_CAP, IMAG_TOL, DimensionError, NormalizationError, check_dense_cap, real_part


def computational_basis(n, cap=DENSE_CAP):
    check_dense_cap(n, cap)
    return [PureState(row) for row in np.eye(2 ** n, dtype=complex)]


def _basis_matrix(basis, cap):
    basis = list(basis)
    if not basis:
        raise DimensionError('basis must not be empty')
    columns = np.array([pure_vector(state, cap) for state in basis]).T
    dim = columns.shape[0]
    if len(basis) != dim:
        raise DimensionError(f'basis has {len(basis)} vectors for a space of dimension {dim}')
    overlap = np.max(np.abs(columns.conj().T @ columns - np.eye(dim)))
    if overlap > IMAG_TOL:
        raise NormalizationError(f'basis is not orthonormal (max Gram deviation {overlap:.3e})')

    return columns


def matrix_elements(obs, basis, cap=DENSE_CAP):
    columns = _basis_matrix(basis, cap)
    op = OperatorView(obs, columns.shape[0].bit_length() - 1)

    return columns.conj().T @ op.apply(columns)


def diagonal_shortcut_mean(state, obs, basis, cap=DENSE_CAP):
    columns = _basis_matrix(basis, cap)
    vector = pure_vector(state, cap)
    if vector.size != columns.shape[0]:
        raise DimensionError(f'state of dimension {vector.size} does not match basis dimension {columns.shape[0]}')
    probabilities = np.abs(columns.conj().T @ vector) ** 2
    diagonal = np.diag(matrix_elements(obs, basis, cap=cap))

    return real_part(probabilities @ diagonal, 'sum_k p_k O_kk')


def eigen_residual(obs, state, cap=DENSE_CAP):
    """
    (lambda, ||O psi - lambda psi||) with lambda = <psi|O|psi>.
    """
    vector = pure_vector(state, cap)
    o_vector = OperatorView(obs, state.n_sites).apply(vector)
    eigenvalue = real_part(np.vdot(vector, o_vector), '<O>')

    return eigenvalue, float(np.linalg.norm(o_vector - eigenvalue * vector))
