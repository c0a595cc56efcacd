import logging
import os
import sys

import numpy as np

__version__ = '1.0.0'

logger = logging.getLogger(__name__)

ATOL = 1e-12
IMAG_TOL = 1e-10
PSD_TOL = 1e-10
DENSE_CAP = 12
ENUMERATION_CAP = 20
SIGMA_GATE = 5.0

RNG_ID = 'numpy.PCG64'
REPORT_DIR_ENV = 'SPIN_REPORT_DIR'


class SpinModelError(ValueError):
    pass


class DimensionError(SpinModelError):
    pass


class DenseCapError(SpinModelError):
    def __init__(self, n_sites, cap):
        super().__init__(f'{n_sites} sites exceed the dense cap of {cap}; use the product-fast route')
        self.n_sites = n_sites
        self.cap = cap


class NormalizationError(SpinModelError):
    pass


class HermiticityError(SpinModelError):
    pass


class EnumerationError(SpinModelError):
    pass


class ScenarioSyntaxError(SpinModelError):
    def __init__(self, message, line=None, column=None):
        location = f' (line {line}, column {column})' if line is not None else ''
        super().__init__(f'{message}{location}')
        self.line = line
        self.column = column


class ScenarioSemanticError(SpinModelError):
    pass


def check_dense_cap(n_sites, cap=DENSE_CAP):
    if n_sites > cap:
        raise DenseCapError(n_sites, cap)


def sites_from_dim(dim):
    n_sites = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n_sites != dim:
        raise DimensionError(f'dimension {dim} is not a power of two >= 2')
    return n_sites


def real_part(value, what='value'):
    value = complex(value)
    if abs(value.imag) > IMAG_TOL:
        raise HermiticityError(f'{what} has imaginary part {value.imag:.3e}; operator is not Hermitian')
    return value.real


class MomentMeter(object):
    """
    Running mean and variance over batches of values (Chan's pairwise update).
    """

    def __init__(self):
        self.count = 0
        self.avg = 0.
        self.m2 = 0.

    def reset(self):
        self.count = 0
        self.avg = 0.
        self.m2 = 0.

    def update(self, values):
        values = np.atleast_1d(np.asarray(values, dtype=float))
        n = values.size
        if n == 0:
            return
        batch_avg = float(values.mean())
        batch_m2 = float(np.sum((values - batch_avg) ** 2))
        total = self.count + n
        delta = batch_avg - self.avg
        self.avg = self.avg + delta * n / total
        self.m2 = self.m2 + batch_m2 + delta ** 2 * self.count * n / total
        self.count = total

    def variance(self, ddof=0):
        if self.count - ddof <= 0:
            return 0.
        return self.m2 / (self.count - ddof)


def print_args(spec, args):
    print('Scenario:\n'
          f'Name: {spec.name}\t'
          f'Sites: {spec.n_sites}\t'
          f'State: {spec.state_kind}\n'
          f'Observables: {", ".join(o.label for o in spec.observables)}\n'
          f'Routes: {", ".join(spec.routes)}\t'
          f'Shots: {spec.shots}\t'
          f'Seed: {spec.seed}\n'
          f'Dense cap: {args.dense_cap}\t'
          f'Format: {args.format}', file=sys.stderr)


def report_target(args, name, extension):
    """
    Resolve where a report goes: an explicit --out file (shared by every scenario of the run),
    an --out directory, the SPIN_REPORT_DIR directory, or None for stdout.
    """
    out = args.out
    if out and os.path.splitext(out)[1]:
        return out
    directory = out or os.environ.get(REPORT_DIR_ENV)
    if not directory:
        return None

    return os.path.join(directory, f'{name}.{extension}')


def store_report(document, filename):
    directory = os.path.dirname(filename)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(filename, 'w') as handle:
        handle.write(document)
    logger.info('report written to %s', filename)

    return filename
