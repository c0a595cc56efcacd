"""
Product states of N distinguishable spins and the sign patterns that label them.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import comb

import numpy as np

from algebra.pauli import SingleSpinKet, eigenket_table
from algebra.tensor import tensor_state
from utils import ATOL, DENSE_CAP, ENUMERATION_CAP, DimensionError, EnumerationError, NormalizationError, \
    check_dense_cap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SignPattern:
    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if not signs:
            raise DimensionError('sign pattern must have at least one site')
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f'sign pattern entries must be +1 or -1, got {self.signs!r}')
        object.__setattr__(self, 'signs', signs)

    @classmethod
    def parse(cls, text):
        mapping = {'+': 1, '-': -1}
        try:
            return cls(tuple(mapping[c] for c in str(text).replace(' ', '')))
        except KeyError:
            raise ValueError(f'sign pattern {text!r} may only contain "+" and "-"') from None

    @classmethod
    def first_balanced(cls, n):
        _check_even(n)
        return cls((1,) * (n // 2) + (-1,) * (n // 2))

    @property
    def n_sites(self):
        return len(self.signs)

    @property
    def balanced(self):
        return sum(self.signs) == 0

    @property
    def eigenvalue(self):
        return sum(self.signs) / 2

    def as_array(self):
        return np.fromiter(self.signs, dtype=np.int8, count=len(self.signs))

    def __str__(self):
        return ''.join('+' if s > 0 else '-' for s in self.signs)


def as_pattern(pattern):
    if isinstance(pattern, SignPattern):
        return pattern
    if isinstance(pattern, str):
        return SignPattern.parse(pattern)
    return SignPattern(tuple(pattern))


def _check_even(n):
    if n < 2 or n % 2:
        raise EnumerationError(f'balanced orderings need an even number of spins >= 2, got {n}')


def _check_enumeration(n, cap):
    if n > cap:
        raise EnumerationError(f'{n} sites exceed the enumeration cap of {cap}')


def balanced_count(n):
    _check_even(n)
    return comb(n, n // 2)


def balanced_patterns(n, cap=ENUMERATION_CAP):
    """
    All N!/((N/2)!(N/2)!) balanced patterns in lexicographic order ("+" before "-").
    """
    _check_even(n)
    _check_enumeration(n, cap)

    patterns = []
    for plus_sites in itertools.combinations(range(n), n // 2):
        signs = [-1] * n
        for i in plus_sites:
            signs[i] = 1
        patterns.append(SignPattern(tuple(signs)))
    logger.debug('enumerated %d balanced patterns for n=%d', len(patterns), n)

    return patterns


def eigenbasis_patterns(n, cap=ENUMERATION_CAP):
    if n < 1:
        raise DimensionError('eigenbasis needs at least one site')
    _check_enumeration(n, cap)

    return [SignPattern(signs) for signs in itertools.product((1, -1), repeat=n)]


@dataclass(frozen=True, eq=False)
class ProductState:
    """
    Unentangled N-spin state kept as an (N, 2) table of single-spin kets.
    """
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 2 or amplitudes.shape[1] != 2 or amplitudes.shape[0] < 1:
            raise DimensionError(f'product state table must have shape (N, 2), got {amplitudes.shape}')
        norms = np.sum(np.abs(amplitudes) ** 2, axis=1)
        worst = float(np.max(np.abs(norms - 1)))
        if worst > ATOL:
            raise NormalizationError(f'product state site ket off unit norm by {worst:.3e}')
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def from_kets(cls, kets):
        kets = list(kets)
        if not kets:
            raise DimensionError('product state needs at least one single-spin ket')
        return cls(np.array([k.vector for k in kets]))

    @property
    def n_sites(self):
        return self.amplitudes.shape[0]

    @property
    def kets(self):
        return tuple(SingleSpinKet(a, b) for a, b in self.amplitudes)

    def site_ket(self, site):
        if not 1 <= site <= self.n_sites:
            raise DimensionError(f'site {site} out of range 1..{self.n_sites}')
        return SingleSpinKet(*self.amplitudes[site - 1])

    def to_pure(self, cap=DENSE_CAP):
        check_dense_cap(self.n_sites, cap)
        return tensor_state(self.kets, cap=cap)


def psi_delta(axis, pattern):
    """
    |psi_delta> along `axis`: site i in the eigenket of s_axis with sign pattern[i].
    An eigenstate of the collective S_axis with eigenvalue sum(signs)/2.
    """
    pattern = as_pattern(pattern)
    rows = (1 - pattern.as_array()) // 2

    return ProductState(eigenket_table(axis)[rows])
