from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from utils import ATOL, DimensionError, NormalizationError, sites_from_dim


@dataclass(frozen=True, eq=False)
class PureState:
    """
    Unit-norm amplitude vector over the 2^N computational z basis; site 1 is the
    most significant bit of the basis index.
    """
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1:
            raise DimensionError(f'amplitudes must be a vector, got shape {amplitudes.shape}')
        sites_from_dim(amplitudes.size)
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1) > ATOL:
            raise NormalizationError(f'pure state has squared norm {norm!r}, expected 1')
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @property
    def n_sites(self):
        return sites_from_dim(self.amplitudes.size)

    @property
    def dim(self):
        return self.amplitudes.size

    def to_pure(self, cap=None):
        return self

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.dim == other.dim and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=ATOL))

    __hash__ = None
