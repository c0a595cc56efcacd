"""
Single-spin primitives in the z basis, reduced units (spin eigenvalues +-1/2).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from utils import ATOL, DimensionError, NormalizationError, sites_from_dim


class Axis(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2

    @property
    def label(self):
        return self.name.lower()

    @classmethod
    def parse(cls, text):
        if isinstance(text, Axis):
            return text
        try:
            return cls[str(text).strip().upper()]
        except KeyError:
            raise ValueError(f'unknown axis {text!r}; expected one of x, y, z') from None


_PAULI = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}

_SQRT_HALF = 1 / np.sqrt(2)

# leading amplitude real and positive; |-y> = (|+> - i|->)/sqrt(2)
_EIGENKETS = {
    (Axis.Z, 1): (1, 0),
    (Axis.Z, -1): (0, 1),
    (Axis.X, 1): (_SQRT_HALF, _SQRT_HALF),
    (Axis.X, -1): (_SQRT_HALF, -_SQRT_HALF),
    (Axis.Y, 1): (_SQRT_HALF, 1j * _SQRT_HALF),
    (Axis.Y, -1): (_SQRT_HALF, -1j * _SQRT_HALF),
}


@dataclass(frozen=True)
class SingleSpinKet:
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, 'alpha', complex(self.alpha))
        object.__setattr__(self, 'beta', complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > ATOL:
            raise NormalizationError(f'single-spin ket has squared norm {norm!r}, expected 1')

    @property
    def vector(self):
        return np.array([self.alpha, self.beta], dtype=complex)


@dataclass(frozen=True, eq=False)
class DenseOperator:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f'operator matrix must be square, got shape {matrix.shape}')
        sites_from_dim(matrix.shape[0])
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def n_sites(self):
        return sites_from_dim(self.dim)

    def is_hermitian(self, tol=ATOL):
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0, atol=tol))

    def square(self):
        return DenseOperator(self.matrix @ self.matrix)

    def __matmul__(self, other):
        return DenseOperator(self.matrix @ other.matrix)

    def __sub__(self, other):
        return DenseOperator(self.matrix - other.matrix)


def as_dense(op):
    return op if isinstance(op, DenseOperator) else DenseOperator(op)


def identity(n_sites=1):
    return DenseOperator(np.eye(2 ** n_sites, dtype=complex))


def pauli(axis):
    return DenseOperator(_PAULI[Axis.parse(axis)])


def spin_component(axis):
    return DenseOperator(_PAULI[Axis.parse(axis)] / 2)


def axis_eigenket(axis, sign):
    if sign not in (1, -1):
        raise ValueError(f'sign must be +1 or -1, got {sign!r}')
    return SingleSpinKet(*_EIGENKETS[(Axis.parse(axis), int(sign))])


def eigenket_table(axis):
    """
    (2, 2) array whose row 0 is the +1 eigenket of `axis` and row 1 the -1 eigenket.
    """
    axis = Axis.parse(axis)
    return np.array([_EIGENKETS[(axis, 1)], _EIGENKETS[(axis, -1)]], dtype=complex)


def commutator(a, b):
    return a @ b - b @ a
