"""
Monte Carlo Stern-Gerlach runs: prepare the assembly, measure every spin along one
axis, and record the total spin of each shot.

Only uncorrelated sources are sampled (product states, mixtures of product states,
ProductDensity), so every site is an independent Born-rule coin once the member
is chosen.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from algebra.pauli import Axis, eigenket_table
from observables.collective import CollectiveObservable
from states.density import ProductDensity, bloch_vectors
from states.ensembles import Ensemble
from states.product_states import ProductState
from utils import IMAG_TOL, RNG_ID, SIGMA_GATE, DimensionError, MomentMeter, SpinModelError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShotRecord:
    outcomes: tuple
    total: float

    def __post_init__(self):
        outcomes = tuple(int(o) for o in self.outcomes)
        if not outcomes or any(o not in (1, -1) for o in outcomes):
            raise ValueError('shot outcomes must be a non-empty sequence of +1/-1')
        object.__setattr__(self, 'outcomes', outcomes)
        object.__setattr__(self, 'total', float(self.total))

    @classmethod
    def from_outcomes(cls, outcomes):
        return cls(tuple(outcomes), sum(int(o) for o in outcomes) / 2)


@dataclass(frozen=True)
class SampleStats:
    shots: int
    empirical_mean: float
    empirical_variance: float
    stderr_mean: float
    stderr_variance: float = 0.
    ddof: int = 0
    seed: int = None
    rng: str = RNG_ID

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError('statistics need at least one shot')
        if self.empirical_variance < 0:
            raise ValueError(f'negative empirical variance {self.empirical_variance!r}')


def site_outcome_probs(state, site, axis):
    """
    Born probabilities (|<+axis|ket_site>|^2, |<-axis|ket_site>|^2).
    """
    ket = state.site_ket(site).vector
    p_plus, p_minus = np.abs(eigenket_table(axis).conj() @ ket) ** 2

    return float(p_plus), float(p_minus)


def _plus_probabilities(polarizations, axis):
    return np.clip((1 + polarizations[:, axis]) / 2, 0., 1.)


def _site_coefficients(obs, n_sites):
    """
    (axis, per-site coefficients) of a single-axis observable.
    """
    if isinstance(obs, CollectiveObservable):
        axis = obs.single_axis()
        if axis is None:
            raise SpinModelError(f'{obs.label} mixes axes; one measurement setting cannot sample it')
        if obs.n_sites != n_sites:
            raise DimensionError(f'observable on {obs.n_sites} sites does not match {n_sites} sites')
        return axis, obs.site_coefficients()[:, axis]

    return Axis.parse(obs), np.ones(n_sites)


class BornRuleSampler:
    """
    Seeded shot generator. Member choice and site outcomes come from two streams spawned
    from one SeedSequence, so a one-member ensemble reproduces pure-state sampling.
    """

    def __init__(self, seed=9999, batch_size=1_000_000, print_freq=10):
        self.seed = seed
        self.batch_size = batch_size
        self.print_freq = print_freq

    def _streams(self):
        member_seq, site_seq = np.random.SeedSequence(self.seed).spawn(2)
        return np.random.Generator(np.random.PCG64(member_seq)), np.random.Generator(np.random.PCG64(site_seq))

    @staticmethod
    def _source_table(source, axis):
        """
        (weights or None, (K, N) table of per-site P(+1)).
        """
        if isinstance(source, ProductState):
            return None, _plus_probabilities(bloch_vectors(source.amplitudes), axis)[None, :]
        if isinstance(source, ProductDensity):
            return None, _plus_probabilities(source.polarizations, axis)[None, :]
        if isinstance(source, Ensemble):
            if not source.is_product:
                raise SpinModelError('sampling supports ensembles of product states only')
            logger.debug('sampling a %d-member ensemble on %d sites', len(source), source.n_sites)
            table = np.array([_plus_probabilities(bloch_vectors(s.amplitudes), axis) for s in source.states])
            return source.weights, table
        raise SpinModelError(f'cannot sample a {type(source).__name__}; use a product state or product ensemble')

    def _batches(self, source, axis, shots):
        if shots < 1:
            raise ValueError('shots must be >= 1')
        axis = Axis.parse(axis)
        weights, table = self._source_table(source, axis)
        n_sites = table.shape[1]
        rows = max(1, self.batch_size // n_sites)
        member_rng, site_rng = self._streams()

        done = 0
        while done < shots:
            size = min(rows, shots - done)
            if weights is None:
                p_plus = table[0]
            else:
                p_plus = table[member_rng.choice(len(weights), size=size, p=weights)]
            draws = site_rng.random((size, n_sites))
            yield np.where(draws < p_plus, 1, -1).astype(np.int8)
            done += size

    def get_samples(self, source, axis, shots):
        """
        (shots, N) array of +1/-1 outcomes along `axis`.
        """
        return np.concatenate(list(self._batches(source, axis, shots)))

    def get_totals(self, source, obs, shots):
        """
        Per-shot totals sum_i c_i outcome_i / 2 of a single-axis observable (or S_axis).
        """
        axis, coefficients = _site_coefficients(obs, source.n_sites)
        meter = MomentMeter()
        totals = []
        end = time.time()
        for i, outcomes in enumerate(self._batches(source, axis, shots)):
            batch = outcomes @ coefficients / 2
            totals.append(batch)
            meter.update(batch)
            if i % self.print_freq == 0:
                logger.debug('batch %d\tshots %d/%d\tmean %.6f\tvariance %.6f\ttime %.3f',
                             i, meter.count, shots, meter.avg, meter.variance(), time.time() - end)
                end = time.time()

        return np.concatenate(totals)

    def measure(self, source, obs, shots, ddof=0):
        return stats_from_totals(self.get_totals(source, obs, shots), ddof=ddof, seed=self.seed)


def sample_shots(source, axis, shots, seed=9999):
    outcomes = BornRuleSampler(seed).get_samples(source, axis, shots)
    return [ShotRecord.from_outcomes(row) for row in outcomes]


def stats_from_totals(totals, ddof=0, seed=None):
    totals = np.asarray(totals, dtype=float)
    shots = totals.size
    if shots == 0:
        raise ValueError('statistics need at least one shot')
    if ddof not in (0, 1):
        raise ValueError(f'ddof must be 0 or 1, got {ddof!r}')

    mean = float(np.mean(totals))
    centred = totals - mean
    population = float(np.mean(centred ** 2))
    variance = float(np.sum(centred ** 2) / (shots - ddof)) if shots > ddof else 0.
    fourth = float(np.mean(centred ** 4))

    return SampleStats(shots=shots,
                       empirical_mean=mean,
                       empirical_variance=variance,
                       stderr_mean=float(np.sqrt(variance / shots)),
                       stderr_variance=float(np.sqrt(max(fourth - population ** 2, 0.) / shots)),
                       ddof=ddof,
                       seed=seed)


def empirical_stats(records, ddof=0, seed=None):
    return stats_from_totals([r.total for r in records], ddof=ddof, seed=seed)


def consistency_check(stats, mean, variance, gate=SIGMA_GATE):
    """
    (mean_ok, variance_ok): both empirical moments within `gate` standard errors of the
    analytic ones. The variance bound is the larger of the Gaussian-shape bound
    sqrt(2/(shots-1)) * variance and the empirical standard error of the variance.
    """
    mean_ok = abs(stats.empirical_mean - mean) <= gate * stats.stderr_mean + IMAG_TOL
    gaussian = np.sqrt(2 / max(stats.shots - 1, 1)) * abs(variance)
    spread = max(gaussian, stats.stderr_variance)
    variance_ok = abs(stats.empirical_variance - variance) <= gate * spread + IMAG_TOL

    return bool(mean_ok), bool(variance_ok)
