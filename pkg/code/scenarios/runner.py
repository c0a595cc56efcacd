"""
Evaluate a scenario on every requested route and check the routes against each other
and against the pinned expectations.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from observables.collective import CollectiveObservable
from observables.moments import moments_ensemble, moments_pure_dense, moments_trace
from observables.product_fast import moments_product_density_fast, moments_product_fast, \
    moments_product_mixture_fast
from sampling.born_sampler import BornRuleSampler, consistency_check
from scenarios.definition import EXACT_ROUTES
from states.density import ProductDensity, density_from_ensemble, projector
from states.ensembles import Ensemble
from utils import DENSE_CAP, IMAG_TOL, RNG_ID, SIGMA_GATE, DenseCapError, __version__

logger = logging.getLogger(__name__)

COMPARISON_NOTES = {
    'distinct': 'different system and state',
    'same-state': 'same density operator from different ensembles',
}


@dataclass(frozen=True)
class RouteResult:
    observable: str
    route: str
    mean: float = None
    variance: float = None
    stderr: float = None
    shots: int = None
    skip_reason: str = None
    expected_mean: float = None
    expected_variance: float = None
    provenance: str = None
    agrees: bool = None
    passed: bool = None
    failures: tuple = ()

    @property
    def skipped(self):
        return self.skip_reason is not None


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    description: str = ''
    state_kind: str = ''
    n_sites: int = None
    system: str = ''
    notes: tuple = ()
    rows: tuple = ()
    provenance: dict = field(default_factory=dict)
    parts: tuple = ()
    annotation: str = ''

    def failures(self, strict=False):
        """
        Machine-readable list of failed checks; skipped routes count only when strict.
        """
        found = []
        for part in self.parts:
            found.extend(part.failures(strict=strict))
        for row in self.rows:
            reasons = list(row.failures)
            if strict and row.skipped:
                reasons.append(f'skipped: {row.skip_reason}')
            if reasons:
                found.append({'scenario': self.name, 'observable': row.observable, 'route': row.route,
                              'reasons': reasons})
        return found

    def passed(self, strict=False):
        return not self.failures(strict=strict)


class _Source:
    """
    A scenario state with its density operator built at most once.
    """

    def __init__(self, state, cap):
        self.state = state
        self.cap = cap
        self._density = None

    def density(self):
        if self._density is None:
            if isinstance(self.state, ProductDensity):
                self._density = self.state.to_density(cap=self.cap)
            elif isinstance(self.state, Ensemble):
                self._density = density_from_ensemble(self.state, cap=self.cap)
            else:
                self._density = projector(self.state, cap=self.cap)
        return self._density


class _Skip(Exception):
    pass


def _dense(source, obs):
    state = source.state
    if isinstance(state, ProductDensity):
        raise _Skip('no ensemble decomposition to average over; the trace route covers this state')
    if isinstance(state, Ensemble):
        return moments_ensemble(state, obs, cap=source.cap)
    return moments_pure_dense(state, obs, cap=source.cap)


def _trace(source, obs):
    return moments_trace(source.density(), obs, cap=source.cap)


def _product_fast(source, obs):
    if not isinstance(obs, CollectiveObservable):
        raise _Skip('dense matrix observables need the dense or trace route')
    state = source.state
    if isinstance(state, ProductDensity):
        return moments_product_density_fast(state, obs)
    if isinstance(state, Ensemble):
        return moments_product_mixture_fast(state, obs)
    return moments_product_fast(state, obs)


_EXACT = {'dense': _dense, 'trace': _trace, 'product-fast': _product_fast}


def _exact_row(route, source, obs, label):
    try:
        report = _EXACT[route](source, obs)
    except DenseCapError as e:
        logger.info('%s on %s skipped: %s', label, route, e)
        return RouteResult(label, route, skip_reason=str(e))
    except _Skip as e:
        logger.info('%s on %s skipped: %s', label, route, e)
        return RouteResult(label, route, skip_reason=str(e))
    logger.info('%s on %s: mean %.15g variance %.15g', label, route, report.mean, report.variance)

    return RouteResult(label, route, mean=report.mean, variance=report.variance)


def _monte_carlo_row(spec, source, obs, label):
    if not isinstance(obs, CollectiveObservable):
        return RouteResult(label, 'monte-carlo', skip_reason='dense matrix observables cannot be sampled')
    if obs.single_axis() is None:
        return RouteResult(label, 'monte-carlo',
                           skip_reason=f'{label} mixes axes; one measurement setting cannot sample it')
    logger.info('%s on monte-carlo: %d shots, seed %d', label, spec.shots, spec.seed)
    stats = BornRuleSampler(spec.seed).measure(source.state, obs, spec.shots)

    return RouteResult(label, 'monte-carlo', mean=stats.empirical_mean, variance=stats.empirical_variance,
                       stderr=stats.stderr_mean, shots=stats.shots), stats


def _close(value, reference):
    return abs(value - reference) <= IMAG_TOL


def _judge_exact(row, reference, expected_mean, expected_variance):
    failures = []
    if expected_mean is not None and not _close(row.mean, expected_mean):
        failures.append(f'mean {row.mean!r} differs from expected {expected_mean!r}')
    if expected_variance is not None and not _close(row.variance, expected_variance):
        failures.append(f'variance {row.variance!r} differs from expected {expected_variance!r}')
    agrees = None
    if reference is not None:
        agrees = _close(row.mean, reference.mean) and _close(row.variance, reference.variance)
        if not agrees:
            failures.append(f'disagrees with the {reference.route} route beyond {IMAG_TOL:g}')

    return agrees, failures


def _judge_sampled(row, stats, reference, expected_mean, expected_variance):
    failures = []
    if expected_mean is not None or expected_variance is not None:
        mean_ok, variance_ok = consistency_check(stats, expected_mean or 0., expected_variance or 0.)
        if expected_mean is not None and not mean_ok:
            failures.append(f'mean {row.mean!r} outside {SIGMA_GATE:g} sigma of expected {expected_mean!r}')
        if expected_variance is not None and not variance_ok:
            failures.append(f'variance {row.variance!r} outside {SIGMA_GATE:g} sigma of expected '
                            f'{expected_variance!r}')
    agrees = None
    if reference is not None:
        agrees = all(consistency_check(stats, reference.mean, reference.variance))
        if not agrees:
            failures.append(f'outside {SIGMA_GATE:g} sigma of the {reference.route} route')

    return agrees, failures


def _observable_rows(spec, source, ospec):
    obs = ospec.build(spec.n_sites)
    label = ospec.label
    expected_mean, expected_variance = ospec.expected.resolve(spec.n_sites) if ospec.expected else (None, None)
    provenance = ospec.expected.provenance if ospec.expected else None

    computed = {}
    sampled = None
    for route in spec.routes:
        if route == 'monte-carlo':
            result = _monte_carlo_row(spec, source, obs, label)
            if isinstance(result, tuple):
                result, sampled = result
            computed[route] = result
        else:
            computed[route] = _exact_row(route, source, obs, label)

    evaluated = [computed[r] for r in EXACT_ROUTES if r in computed and not computed[r].skipped]
    reference = evaluated[0] if evaluated else None
    rows = []
    for route in spec.routes:
        row = computed[route]
        if row.skipped:
            agrees, failures = None, []
        elif route == 'monte-carlo':
            agrees, failures = _judge_sampled(row, sampled, reference, expected_mean, expected_variance)
        else:
            agrees, failures = _judge_exact(row, reference if row is not reference else None,
                                            expected_mean, expected_variance)
            if row is reference and len(evaluated) > 1:
                agrees = all(_close(r.mean, row.mean) and _close(r.variance, row.variance) for r in evaluated)
        for failure in failures:
            logger.warning('%s %s on %s: %s', spec.name, label, route, failure)
        rows.append(RouteResult(label, route, mean=row.mean, variance=row.variance, stderr=row.stderr,
                                shots=row.shots, skip_reason=row.skip_reason, expected_mean=expected_mean,
                                expected_variance=expected_variance, provenance=provenance, agrees=agrees,
                                passed=None if row.skipped else not failures, failures=tuple(failures)))

    return rows


def _provenance(spec):
    return {'seed': spec.seed, 'rng': RNG_ID, 'version': __version__, 'shots': spec.shots}


def run_scenario(spec, cap=DENSE_CAP):
    """
    ScenarioReport with one row per (observable, route). Comparisons run each system on
    its own and never combine their numbers.
    """
    if spec.is_comparison:
        parts = tuple(run_scenario(s, cap=cap) for s in spec.systems)
        relation = COMPARISON_NOTES[spec.state_params['relation']]
        systems = ' vs '.join(f'{p.name} [{p.system or p.state_kind}]' for p in parts)
        return ScenarioReport(name=spec.name, description=spec.description, state_kind=spec.state_kind,
                              notes=spec.notes, provenance=_provenance(spec), parts=parts,
                              annotation=f'{relation}: {systems}; values are not combined')

    logger.info('running %s: %s on %d sites, routes %s', spec.name, spec.state_kind, spec.n_sites,
                ', '.join(spec.routes))
    source = _Source(spec.build_state(), cap)
    rows = []
    for ospec in spec.observables:
        rows.extend(_observable_rows(spec, source, ospec))

    return ScenarioReport(name=spec.name, description=spec.description, state_kind=spec.state_kind,
                          n_sites=spec.n_sites, system=spec.system, notes=spec.notes, rows=tuple(rows),
                          provenance=_provenance(spec))
