"""
One-local spin observables sum_i c_i s_{alpha_i, i}.

They act on state vectors by contracting one 2x2 site operator per site, so the
2^N x 2^N matrix only exists when `to_dense` is asked for.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from algebra.pauli import Axis, DenseOperator, spin_component
from algebra.tensor import embed_site_operator
from utils import DENSE_CAP, DimensionError, check_dense_cap


@dataclass(frozen=True, order=True)
class LocalSpinTerm:
    site: int
    axis: Axis
    coefficient: float = 1.

    def __post_init__(self):
        object.__setattr__(self, 'axis', Axis.parse(self.axis))
        object.__setattr__(self, 'coefficient', float(self.coefficient))
        if int(self.site) != self.site or self.site < 1:
            raise DimensionError(f'term site must be an integer >= 1, got {self.site!r}')
        if not math.isfinite(self.coefficient):
            raise ValueError(f'term coefficient must be finite, got {self.coefficient!r}')


class CollectiveObservable:
    """
    Kept as an (N, 3) table c[i, alpha] of the coefficient on s_alpha at site i+1;
    terms with the same site and axis add up, and zero entries are not terms.
    """
    __hash__ = None

    def __init__(self, n_sites, terms=(), label=''):
        if n_sites < 1:
            raise DimensionError('observables need at least one site')
        coefficients = np.zeros((n_sites, 3))
        for term in terms:
            if term.site > n_sites:
                raise DimensionError(f'term on site {term.site} exceeds {n_sites} sites')
            coefficients[term.site - 1, term.axis] += term.coefficient
        self._init(coefficients, label)

    @classmethod
    def from_coefficients(cls, coefficients, label=''):
        coefficients = np.array(coefficients, dtype=float)
        if coefficients.ndim != 2 or coefficients.shape[1] != 3 or coefficients.shape[0] < 1:
            raise DimensionError(f'coefficient table must have shape (N, 3), got {coefficients.shape}')
        if not np.all(np.isfinite(coefficients)):
            raise ValueError('term coefficients must be finite')
        obs = cls.__new__(cls)
        obs._init(coefficients, label)
        return obs

    def _init(self, coefficients, label):
        coefficients.setflags(write=False)
        self._coefficients = coefficients
        self.label = label or _default_label(coefficients)

    @property
    def n_sites(self):
        return self._coefficients.shape[0]

    @property
    def terms(self):
        sites, axes = np.nonzero(self._coefficients)
        return tuple(LocalSpinTerm(int(i) + 1, Axis(int(a)), self._coefficients[i, a]) for i, a in zip(sites, axes))

    def __eq__(self, other):
        if not isinstance(other, CollectiveObservable):
            return NotImplemented
        return np.array_equal(self._coefficients, other._coefficients)

    def __repr__(self):
        return f'CollectiveObservable(n_sites={self.n_sites}, label={self.label!r})'

    def single_axis(self):
        axes = np.flatnonzero(np.any(self._coefficients != 0, axis=0))
        return Axis(int(axes[0])) if len(axes) == 1 else None

    def site_coefficients(self):
        """
        (N, 3) array c[i, alpha] of the coefficient on s_alpha at site i+1.
        """
        return self._coefficients.copy()

    def site_operators(self):
        components = np.array([spin_component(axis).matrix for axis in Axis])
        return {int(i) + 1: np.tensordot(self._coefficients[i], components, axes=1)
                for i in np.flatnonzero(np.any(self._coefficients != 0, axis=1))}

    def apply(self, vectors):
        """
        O applied to a state vector, or to every column of a (2^N, k) array.
        """
        vectors = np.asarray(vectors, dtype=complex)
        n = self.n_sites
        if vectors.shape[0] != 2 ** n:
            raise DimensionError(f'vector of length {vectors.shape[0]} does not match {n} sites')
        tensor = vectors.reshape((2,) * n + (-1,))
        out = np.zeros_like(tensor)
        for site, op in self.site_operators().items():
            moved = np.tensordot(op, tensor, axes=([1], [site - 1]))
            out += np.moveaxis(moved, 0, site - 1)

        return out.reshape(vectors.shape)

    def to_dense(self, cap=DENSE_CAP):
        check_dense_cap(self.n_sites, cap)
        matrix = np.zeros((2 ** self.n_sites,) * 2, dtype=complex)
        for site, op in self.site_operators().items():
            matrix += embed_site_operator(DenseOperator(op), site, self.n_sites, cap=cap).matrix
        return DenseOperator(matrix)

    def square_dense(self, cap=DENSE_CAP):
        return self.to_dense(cap=cap).square()

    def swap_axes(self, a, b):
        a, b = Axis.parse(a), Axis.parse(b)
        order = [Axis(k) for k in range(3)]
        order[a], order[b] = b, a
        label = self.label.translate(str.maketrans({a.label: b.label, b.label: a.label}))
        return CollectiveObservable.from_coefficients(self._coefficients[:, order], label)


def _default_label(coefficients):
    used = np.flatnonzero(np.any(coefficients != 0, axis=0))
    if len(used) != 1:
        return 'O'
    axis = Axis(int(used[0]))
    column = coefficients[:, axis]
    if np.all(column == 1):
        return f'S_{axis.label}'
    sites = np.flatnonzero(column)
    if len(sites) == 1 and column[sites[0]] == 1:
        return f's_{axis.label}{sites[0] + 1}'
    return 'O'


def collective(axis, n, label=''):
    """
    S_axis = sum_i s_{axis, i} on n sites.
    """
    if n < 1:
        raise DimensionError('collective observables need at least one site')
    coefficients = np.zeros((n, 3))
    coefficients[:, Axis.parse(axis)] = 1.
    return CollectiveObservable.from_coefficients(coefficients, label)


def single_site(axis, site, n, label=''):
    return CollectiveObservable(n, (LocalSpinTerm(site, Axis.parse(axis)),), label)


def random_one_local(n, rng):
    return CollectiveObservable.from_coefficients(rng.uniform(-1, 1, size=(n, 3)))
