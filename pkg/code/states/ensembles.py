"""
Statistical mixtures {p_i, |phi_i>} of pure states. Members need not be orthogonal.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from states.product_states import ProductState, balanced_patterns, eigenbasis_patterns, psi_delta
from states.pure import PureState
from utils import ATOL, ENUMERATION_CAP, DimensionError, NormalizationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Ensemble:
    members: tuple

    def __post_init__(self):
        members = tuple((float(w), s) for w, s in self.members)
        if not members:
            raise DimensionError('ensemble needs at least one member')
        for weight, state in members:
            if not isinstance(state, (PureState, ProductState)):
                raise TypeError(f'ensemble members must be pure or product states, got {type(state).__name__}')
            if not -ATOL <= weight <= 1 + ATOL:
                raise NormalizationError(f'ensemble weight {weight!r} outside [0, 1]')
        total = math.fsum(w for w, _ in members)
        if abs(total - 1) > ATOL:
            raise NormalizationError(f'ensemble weights sum to {total!r}, expected 1')
        members = tuple((min(max(w, 0.), 1.) / total, s) for w, s in members)
        object.__setattr__(self, 'members', members)

    @classmethod
    def of(cls, weights, states):
        return cls(tuple(zip(weights, states)))

    @property
    def weights(self):
        return np.array([w for w, _ in self.members])

    @property
    def states(self):
        return tuple(s for _, s in self.members)

    @property
    def n_sites(self):
        counts = {s.n_sites for s in self.states}
        if len(counts) > 1:
            raise DimensionError(f'ensemble members have different site counts {sorted(counts)}')
        return counts.pop()

    @property
    def is_product(self):
        return all(isinstance(s, ProductState) for s in self.states)

    def __len__(self):
        return len(self.members)


def uniform_mixture(states):
    states = list(states)
    if not states:
        raise DimensionError('uniform mixture needs at least one state')
    weight = 1 / len(states)
    return Ensemble(tuple((weight, s) for s in states))


def balanced_mixture(axis, n, cap=ENUMERATION_CAP):
    """
    Every balanced |psi_delta> along `axis`, each with weight 1/N_{N/2}.
    """
    patterns = balanced_patterns(n, cap=cap)
    logger.debug('building balanced mixture along %s with %d members', axis, len(patterns))

    return uniform_mixture(psi_delta(axis, p) for p in patterns)


def eigenbasis_mixture(axis, n, cap=ENUMERATION_CAP):
    """
    The 2^N product eigenstates of S_axis with equal weight; its density operator is I/2^N.
    """
    patterns = eigenbasis_patterns(n, cap=cap)
    logger.debug('building eigenbasis mixture along %s with %d members', axis, len(patterns))

    return uniform_mixture(psi_delta(axis, p) for p in patterns)
