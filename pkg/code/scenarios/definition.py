"""
Scenario documents: JSON, `schema_version` 1.

    {
      "schema_version": 1,
      "name": "ensemble-A-pure",
      "description": "...",
      "n_sites": 4,
      "state": {"kind": "psi-delta", "axis": "x"},
      "observables": [
        {"axis": "x", "expected": {"mean": 0, "variance": 0, "provenance": "reference"}},
        {"axis": "z", "expected": {"mean": 0, "variance_per_site": 0.25, "provenance": "reference"}}
      ],
      "routes": ["dense", "trace", "product-fast"],
      "shots": 100000,
      "seed": 9999,
      "notes": ["..."]
    }

State kinds and their parameters:
    psi-delta           axis, pattern (optional, default: N/2 "+" then N/2 "-")
    balanced-mixture    axis
    eigenbasis-mixture  axis
    maximally-mixed     -
    custom-single-spin  ket: [alpha, beta]
    custom-ensemble     members: [{weight, ket | kets | amplitudes | axis+pattern}, ...]
    comparison          systems: [{system, name, n_sites, state, observables, ...}, ...],
                        relation: "distinct" (default) or "same-state"

Expectation provenance tags where a value comes from:
    reference   quoted from the source treatment of the system
    derived     worked out independently from the model
    trivial     follows from a definition

Complex numbers are written as a number or as [re, im].
"""
from __future__ import annotations

import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from algebra.pauli import Axis, DenseOperator, SingleSpinKet
from observables.collective import CollectiveObservable, LocalSpinTerm, collective, single_site
from states.density import ProductDensity
from states.ensembles import Ensemble, balanced_mixture, eigenbasis_mixture
from states.product_states import ProductState, SignPattern, as_pattern, psi_delta
from states.pure import PureState
from utils import DENSE_CAP, ENUMERATION_CAP, ScenarioSemanticError, ScenarioSyntaxError, SpinModelError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ROUTES = ('dense', 'trace', 'product-fast', 'monte-carlo')
EXACT_ROUTES = ('dense', 'trace', 'product-fast')
PROVENANCES = ('reference', 'derived', 'trivial')
RELATIONS = ('distinct', 'same-state')
BUILTIN_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'builtin')

STATE_KINDS = {
    'psi-delta': {'axis', 'pattern'},
    'balanced-mixture': {'axis'},
    'eigenbasis-mixture': {'axis'},
    'maximally-mixed': set(),
    'custom-single-spin': {'ket'},
    'custom-ensemble': {'members'},
    'comparison': {'systems', 'relation'},
}
# kinds whose size follows n_sites; the others fix it themselves
SCALABLE_KINDS = ('psi-delta', 'balanced-mixture', 'eigenbasis-mixture', 'maximally-mixed')

_TOP_FIELDS = {'schema_version', 'name', 'description', 'n_sites', 'state', 'observables', 'routes', 'shots',
               'seed', 'notes', 'system'}
_OBSERVABLE_FIELDS = {'axis', 'site', 'terms', 'matrix', 'label', 'expected'}
_EXPECTED_FIELDS = {'mean', 'mean_per_site', 'variance', 'variance_per_site', 'provenance'}
_MEMBER_FIELDS = {'weight', 'ket', 'kets', 'amplitudes', 'axis', 'pattern'}


@dataclass(frozen=True)
class Expectation:
    mean: float = None
    mean_per_site: float = None
    variance: float = None
    variance_per_site: float = None
    provenance: str = 'derived'

    def resolve(self, n_sites):
        """
        (mean, variance) pinned for `n_sites`, either may be None.
        """
        mean = self.mean if self.mean is not None else _scaled(self.mean_per_site, n_sites)
        variance = self.variance if self.variance is not None else _scaled(self.variance_per_site, n_sites)
        return mean, variance


def _scaled(value, n_sites):
    return None if value is None else value * n_sites


@dataclass(frozen=True)
class ObservableSpec:
    label: str
    axis: Axis = None
    site: int = None
    terms: tuple = None
    matrix: tuple = None
    expected: Expectation = None

    def build(self, n_sites):
        if self.matrix is not None:
            return DenseOperator(np.array(self.matrix, dtype=complex))
        if self.terms is not None:
            return CollectiveObservable(n_sites, tuple(LocalSpinTerm(*t) for t in self.terms), self.label)
        if self.site is not None:
            return single_site(self.axis, self.site, n_sites, self.label)
        return collective(self.axis, n_sites, self.label)

    def swap_axes(self, a, b):
        if self.matrix is not None:
            raise ScenarioSemanticError(f'observable {self.label} is a dense matrix and cannot be relabelled')
        swap = {a: b, b: a}
        label = self.label.translate(str.maketrans({a.label: b.label, b.label: a.label}))
        if self.terms is not None:
            terms = tuple((site, swap.get(axis, axis), c) for site, axis, c in self.terms)
            return dataclasses.replace(self, label=label, terms=terms)
        return dataclasses.replace(self, label=label, axis=swap.get(self.axis, self.axis))


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    n_sites: int
    state_kind: str
    state_params: dict = field(default_factory=dict)
    observables: tuple = ()
    routes: tuple = EXACT_ROUTES
    shots: int = 100000
    seed: int = 9999
    description: str = ''
    notes: tuple = ()
    system: str = ''
    systems: tuple = ()

    @property
    def is_comparison(self):
        return self.state_kind == 'comparison'

    @property
    def state_axis(self):
        axis = self.state_params.get('axis')
        return None if axis is None else Axis.parse(axis)

    @property
    def is_product_source(self):
        if self.state_kind == 'custom-ensemble':
            return all('amplitudes' not in m for m in self.state_params['members'])
        return self.state_kind != 'comparison'

    def build_state(self, cap=ENUMERATION_CAP):
        """
        The state object for this scenario: ProductState, Ensemble, or ProductDensity.
        """
        kind, params, n = self.state_kind, self.state_params, self.n_sites
        if kind == 'psi-delta':
            return psi_delta(params['axis'], _pattern(params, n))
        if kind == 'balanced-mixture':
            return balanced_mixture(params['axis'], n, cap=cap)
        if kind == 'eigenbasis-mixture':
            return eigenbasis_mixture(params['axis'], n, cap=cap)
        if kind == 'maximally-mixed':
            return ProductDensity.unpolarized(n)
        if kind == 'custom-single-spin':
            return ProductState.from_kets([SingleSpinKet(*params['ket'])])
        if kind == 'custom-ensemble':
            return Ensemble.of([m['weight'] for m in params['members']], [_member_state(m) for m in params['members']])
        raise ScenarioSemanticError(f'{self.name}: a comparison has no single state')


def _pattern(params, n):
    pattern = params.get('pattern')
    return SignPattern.first_balanced(n) if pattern is None else as_pattern(pattern)


def _member_state(member):
    if 'amplitudes' in member:
        return PureState(np.array(member['amplitudes'], dtype=complex))
    if 'kets' in member:
        return ProductState.from_kets([SingleSpinKet(*k) for k in member['kets']])
    if 'ket' in member:
        return ProductState.from_kets([SingleSpinKet(*member['ket'])])
    return psi_delta(member['axis'], member['pattern'])


def _complex(value, where):
    if isinstance(value, bool):
        raise ScenarioSemanticError(f'{where}: expected a number, got {value!r}')
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ScenarioSemanticError(f'{where}: expected a number or [re, im], got {value!r}')


def _real(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioSemanticError(f'{where}: expected a real number, got {value!r}')
    return float(value)


def _count(value, where, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ScenarioSemanticError(f'{where}: expected an integer >= {minimum}, got {value!r}')
    return value


def _check_fields(document, allowed, where):
    if not isinstance(document, dict):
        raise ScenarioSemanticError(f'{where}: expected an object, got {type(document).__name__}')
    unknown = sorted(set(document) - allowed)
    if unknown:
        raise ScenarioSemanticError(f'{where}: unknown field(s) {", ".join(unknown)}')


def _axis(value, where):
    try:
        return Axis.parse(value)
    except ValueError as e:
        raise ScenarioSemanticError(f'{where}: {e}') from None


def _parse_expected(document, where):
    _check_fields(document, _EXPECTED_FIELDS, where)
    if 'mean' in document and 'mean_per_site' in document:
        raise ScenarioSemanticError(f'{where}: give mean or mean_per_site, not both')
    if 'variance' in document and 'variance_per_site' in document:
        raise ScenarioSemanticError(f'{where}: give variance or variance_per_site, not both')
    provenance = document.get('provenance', 'derived')
    if provenance not in PROVENANCES:
        raise ScenarioSemanticError(f'{where}: provenance must be one of {", ".join(PROVENANCES)}')
    values = {k: _real(v, f'{where}.{k}') for k, v in document.items() if k != 'provenance'}

    return Expectation(provenance=provenance, **values)


def _parse_observable(document, n_sites, where):
    _check_fields(document, _OBSERVABLE_FIELDS, where)
    kinds = [k for k in ('axis', 'terms', 'matrix') if k in document]
    if len(kinds) != 1:
        raise ScenarioSemanticError(f'{where}: give exactly one of axis, terms, matrix')
    expected = _parse_expected(document['expected'], f'{where}.expected') if 'expected' in document else None
    label = document.get('label', '')

    if 'matrix' in document:
        rows = document['matrix']
        if not isinstance(rows, list) or not rows:
            raise ScenarioSemanticError(f'{where}.matrix: expected a non-empty list of rows')
        matrix = tuple(tuple(_complex(v, f'{where}.matrix') for v in row) for row in rows)
        dim = 2 ** n_sites if n_sites is not None else None
        if any(len(row) != len(matrix) for row in matrix) or (dim is not None and len(matrix) != dim):
            raise ScenarioSemanticError(f'{where}.matrix: expected a {dim}x{dim} matrix')
        return ObservableSpec(label=label or 'O', matrix=matrix, expected=expected)

    if 'terms' in document:
        if 'site' in document:
            raise ScenarioSemanticError(f'{where}: site goes inside each term')
        terms = []
        for i, term in enumerate(_non_empty(document['terms'], f'{where}.terms')):
            _check_fields(term, {'site', 'axis', 'coefficient'}, f'{where}.terms[{i}]')
            site = _count(term.get('site'), f'{where}.terms[{i}].site')
            terms.append((site, _axis(term.get('axis'), f'{where}.terms[{i}].axis'),
                          _real(term.get('coefficient', 1.), f'{where}.terms[{i}].coefficient')))
        return ObservableSpec(label=label or 'O', terms=tuple(terms), expected=expected)

    axis = _axis(document['axis'], f'{where}.axis')
    if 'site' in document:
        site = _count(document['site'], f'{where}.site')
        return ObservableSpec(label=label or f's_{axis.label}{site}', axis=axis, site=site, expected=expected)
    return ObservableSpec(label=label or f'S_{axis.label}', axis=axis, expected=expected)


def _parse_state(document, where):
    if not isinstance(document, dict) or 'kind' not in document:
        raise ScenarioSemanticError(f'{where}: expected an object with a kind')
    kind = document['kind']
    if not isinstance(kind, str) or kind not in STATE_KINDS:
        raise ScenarioSemanticError(f'{where}.kind: unknown state kind {kind!r}')
    _check_fields(document, STATE_KINDS[kind] | {'kind'}, where)
    params = {k: v for k, v in document.items() if k != 'kind'}

    if 'axis' in STATE_KINDS[kind]:
        if 'axis' not in params:
            raise ScenarioSemanticError(f'{where}: {kind} needs an axis')
        params['axis'] = _axis(params['axis'], f'{where}.axis').label
    if 'pattern' in params:
        try:
            params['pattern'] = str(as_pattern(params['pattern']))
        except (ValueError, TypeError, SpinModelError) as e:
            raise ScenarioSemanticError(f'{where}.pattern: {e}') from None
    if kind == 'custom-single-spin':
        params['ket'] = _ket(params.get('ket'), f'{where}.ket')
    if kind == 'custom-ensemble':
        params['members'] = [_parse_member(m, f'{where}.members[{i}]')
                             for i, m in enumerate(_non_empty(params.get('members'), f'{where}.members'))]

    return kind, params


def _non_empty(value, where):
    if not isinstance(value, list) or not value:
        raise ScenarioSemanticError(f'{where}: expected a non-empty list')
    return value


def _ket(value, where):
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioSemanticError(f'{where}: expected [alpha, beta]')
    return tuple(_complex(v, where) for v in value)


def _parse_member(document, where):
    _check_fields(document, _MEMBER_FIELDS, where)
    member = {'weight': _real(document.get('weight'), f'{where}.weight')}
    given = [k for k in ('ket', 'kets', 'amplitudes', 'pattern') if k in document]
    if len(given) != 1:
        raise ScenarioSemanticError(f'{where}: give exactly one of ket, kets, amplitudes, axis+pattern')
    if 'ket' in document:
        member['ket'] = _ket(document['ket'], f'{where}.ket')
    elif 'kets' in document:
        member['kets'] = [_ket(k, f'{where}.kets') for k in _non_empty(document['kets'], f'{where}.kets')]
    elif 'amplitudes' in document:
        member['amplitudes'] = [_complex(v, f'{where}.amplitudes')
                                for v in _non_empty(document['amplitudes'], f'{where}.amplitudes')]
    else:
        if 'axis' not in document:
            raise ScenarioSemanticError(f'{where}: pattern needs an axis')
        member['axis'] = _axis(document['axis'], f'{where}.axis').label
        try:
            member['pattern'] = str(as_pattern(document['pattern']))
        except (ValueError, TypeError, SpinModelError) as e:
            raise ScenarioSemanticError(f'{where}.pattern: {e}') from None

    return member


def _member_sites(member):
    if 'amplitudes' in member:
        return max(len(member['amplitudes']).bit_length() - 1, 0)
    if 'kets' in member:
        return len(member['kets'])
    if 'ket' in member:
        return 1
    return len(member['pattern'])


def _infer_sites(kind, params, document, where):
    n_sites = document.get('n_sites')
    if kind == 'custom-single-spin':
        implied = 1
    elif kind == 'custom-ensemble':
        sizes = {_member_sites(m) for m in params['members']}
        if len(sizes) != 1:
            raise ScenarioSemanticError(f'{where}: ensemble members have different site counts {sorted(sizes)}')
        implied = sizes.pop()
    elif kind == 'psi-delta' and 'pattern' in params:
        implied = len(params['pattern'])
    else:
        implied = None

    if n_sites is None:
        n_sites = implied if implied is not None else 4
    n_sites = _count(n_sites, f'{where}.n_sites')
    if implied is not None and implied != n_sites:
        raise ScenarioSemanticError(f'{where}: n_sites is {n_sites} but the state fixes {implied} sites')

    return n_sites


def _check_consistency(spec, where):
    """
    Semantic checks that need the whole scenario.
    """
    kind, n = spec.state_kind, spec.n_sites
    if kind in ('balanced-mixture',) or (kind == 'psi-delta' and 'pattern' not in spec.state_params):
        if n % 2:
            raise ScenarioSemanticError(f'{where}: {kind} needs an even number of spins, got n_sites={n}')
    if kind == 'balanced-mixture' and n > ENUMERATION_CAP:
        raise ScenarioSemanticError(f'{where}: {kind} enumerates members; n_sites={n} exceeds {ENUMERATION_CAP}')
    if kind == 'eigenbasis-mixture' and n > DENSE_CAP:
        raise ScenarioSemanticError(f'{where}: {kind} enumerates 2^N members; n_sites={n} exceeds {DENSE_CAP}')
    if 'product-fast' in spec.routes and not spec.is_product_source:
        raise ScenarioSemanticError(f'{where}: product-fast needs a product state or a mixture of product states')
    if 'monte-carlo' in spec.routes and not spec.is_product_source:
        raise ScenarioSemanticError(f'{where}: monte-carlo sampling needs product members')
    for obs in spec.observables:
        if obs.site is not None and obs.site > n:
            raise ScenarioSemanticError(f'{where}: observable {obs.label} acts on site {obs.site} of {n}')
        if obs.terms is not None and max(t[0] for t in obs.terms) > n:
            raise ScenarioSemanticError(f'{where}: observable {obs.label} has a term beyond site {n}')
        if obs.matrix is not None and len(obs.matrix) != 2 ** n:
            raise ScenarioSemanticError(f'{where}: observable {obs.label} does not match {n} sites')
    if kind == 'custom-ensemble':
        try:
            spec.build_state()
        except SpinModelError as e:
            raise ScenarioSemanticError(f'{where}: {e}') from None


def _parse_routes(value, where):
    routes = _non_empty(value, where)
    unknown = [r for r in routes if r not in ROUTES]
    if unknown:
        raise ScenarioSemanticError(f'{where}: unknown route(s) {", ".join(map(str, unknown))}')
    return tuple(r for r in ROUTES if r in routes)


def parse_document(document, where='scenario', nested=False):
    """
    Validated ScenarioSpec from an already decoded JSON object.
    """
    _check_fields(document, _TOP_FIELDS, where)
    if not nested:
        version = document.get('schema_version')
        if version != SCHEMA_VERSION:
            raise ScenarioSemanticError(f'{where}: schema_version must be {SCHEMA_VERSION}, got {version!r}')
    elif 'schema_version' in document:
        raise ScenarioSemanticError(f'{where}: schema_version belongs to the top level only')
    name = document.get('name')
    if not isinstance(name, str) or not name:
        raise ScenarioSemanticError(f'{where}: a non-empty name is required')
    where = f'{name}' if not nested else f'{where}({name})'
    if 'state' not in document:
        raise ScenarioSemanticError(f'{where}: a state is required')

    kind, params = _parse_state(document['state'], f'{where}.state')
    notes = document.get('notes', [])
    if not isinstance(notes, list) or not all(isinstance(n, str) for n in notes):
        raise ScenarioSemanticError(f'{where}.notes: expected a list of strings')
    common = dict(name=name,
                  description=str(document.get('description', '')),
                  notes=tuple(notes),
                  system=str(document.get('system', '')),
                  shots=_count(document.get('shots', 100000), f'{where}.shots'),
                  seed=_count(document.get('seed', 9999), f'{where}.seed', minimum=0))

    if kind == 'comparison':
        for key in ('n_sites', 'observables', 'routes'):
            if key in document:
                raise ScenarioSemanticError(f'{where}: {key} belongs to each compared system')
        systems = tuple(parse_document(s, f'{where}.systems[{i}]', nested=True)
                        for i, s in enumerate(_non_empty(params['systems'], f'{where}.state.systems')))
        if any(s.is_comparison for s in systems):
            raise ScenarioSemanticError(f'{where}: comparisons cannot be nested')
        relation = params.get('relation', 'distinct')
        if relation not in RELATIONS:
            raise ScenarioSemanticError(f'{where}.state.relation: expected one of {", ".join(RELATIONS)}')
        routes = tuple(r for r in ROUTES if any(r in s.routes for s in systems))
        return ScenarioSpec(n_sites=systems[0].n_sites, state_kind=kind, state_params={'relation': relation},
                            routes=routes, systems=systems, **common)

    n_sites = _infer_sites(kind, params, document, where)
    observables = tuple(_parse_observable(o, n_sites, f'{where}.observables[{i}]')
                        for i, o in enumerate(_non_empty(document.get('observables'), f'{where}.observables')))
    labels = [o.label for o in observables]
    if len(set(labels)) != len(labels):
        raise ScenarioSemanticError(f'{where}: observable labels must be unique, got {labels}')
    routes = _parse_routes(document.get('routes', list(EXACT_ROUTES)), f'{where}.routes')

    spec = ScenarioSpec(n_sites=n_sites, state_kind=kind, state_params=params, observables=observables,
                        routes=routes, **common)
    _check_consistency(spec, where)

    return spec


def parse_scenario(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioSyntaxError(e.msg, e.lineno, e.colno) from None

    return parse_document(document)


def builtin_names():
    return sorted(os.path.splitext(f)[0] for f in os.listdir(BUILTIN_DIR) if f.endswith('.json'))


def builtin_path(name):
    return os.path.join(BUILTIN_DIR, f'{name}.json')


def load_scenario(target):
    """
    A scenario from a file path or a built-in name.
    """
    path = target if os.path.isfile(target) else builtin_path(target)
    if not os.path.isfile(path):
        raise ScenarioSemanticError(f'no scenario file or built-in named {target!r}; '
                                    f'built-ins: {", ".join(builtin_names())}')
    logger.debug('loading scenario from %s', path)
    with open(path) as handle:
        return parse_scenario(handle.read())


def _rescale(spec, n):
    if spec.state_kind not in SCALABLE_KINDS:
        logger.info('%s: %s fixes its own size; --n %d ignored', spec.name, spec.state_kind, n)
        return spec
    params = dict(spec.state_params)
    pattern = params.get('pattern')
    if pattern is not None:
        signs = set(pattern)
        if len(signs) == 1:
            params['pattern'] = pattern[0] * n
        elif SignPattern.parse(pattern).balanced:
            params.pop('pattern')
        else:
            raise ScenarioSemanticError(f'{spec.name}: pattern {pattern} cannot be resized to {n} sites')
    rescaled = dataclasses.replace(spec, n_sites=n, state_params=params)
    _check_consistency(rescaled, spec.name)

    return rescaled


def _relabel(spec, axis):
    current = spec.state_axis
    if current is None:
        logger.info('%s: %s has no state axis; --axis %s ignored', spec.name, spec.state_kind, axis.label)
        return spec
    if current == axis:
        return spec
    params = dict(spec.state_params, axis=axis.label)
    observables = tuple(o.swap_axes(current, axis) for o in spec.observables)

    return dataclasses.replace(spec, state_params=params, observables=observables)


def apply_overrides(spec, n=None, axis=None, routes=None, shots=None, seed=None):
    """
    Command-line overrides. `axis` relabels the state axis and transposes the same two
    axes in every observable, so pinned expectations stay valid.
    """
    if spec.is_comparison:
        systems = tuple(apply_overrides(s, n=n, axis=axis, routes=routes, shots=shots, seed=seed)
                        for s in spec.systems)
        updates = dict(systems=systems, n_sites=systems[0].n_sites,
                       routes=tuple(r for r in ROUTES if any(r in s.routes for s in systems)))
        if shots is not None:
            updates['shots'] = shots
        if seed is not None:
            updates['seed'] = seed
        return dataclasses.replace(spec, **updates)

    if n is not None:
        spec = _rescale(spec, _count(n, '--n'))
    if axis is not None:
        spec = _relabel(spec, Axis.parse(axis))
    updates = {}
    if routes is not None:
        updates['routes'] = _parse_routes(list(routes), '--routes')
    if shots is not None:
        updates['shots'] = _count(shots, '--shots')
    if seed is not None:
        updates['seed'] = _count(seed, '--seed', minimum=0)
    if updates:
        spec = dataclasses.replace(spec, **updates)
        _check_consistency(spec, spec.name)

    return spec
