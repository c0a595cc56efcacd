from functools import reduce

import numpy as np

from algebra.pauli import DenseOperator, as_dense
from states.pure import PureState
from utils import DENSE_CAP, DimensionError, check_dense_cap


def tensor_state(kets, cap=DENSE_CAP):
    kets = list(kets)
    if not kets:
        raise DimensionError('tensor_state needs at least one single-spin ket')
    check_dense_cap(len(kets), cap)

    return PureState(reduce(np.kron, [k.vector for k in kets]))


def embed_site_operator(op, site, n, cap=DENSE_CAP):
    op = as_dense(op)
    if op.dim != 2:
        raise DimensionError(f'site operator must be 2x2, got {op.dim}x{op.dim}')
    if not 1 <= site <= n:
        raise DimensionError(f'site {site} out of range 1..{n}')
    check_dense_cap(n, cap)

    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (n - site), dtype=complex)

    return DenseOperator(np.kron(np.kron(left, op.matrix), right))
