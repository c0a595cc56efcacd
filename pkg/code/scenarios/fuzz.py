"""
Random check that ensemble averages and density-operator traces give the same moments.
"""
import logging

import numpy as np
import pandas as pd

from observables.collective import random_one_local
from observables.moments import moments_ensemble, moments_trace
from states.density import density_from_ensemble
from states.random_states import random_ensemble
from utils import IMAG_TOL

logger = logging.getLogger(__name__)


def trace_ensemble_fuzz(cases=200, max_sites=5, max_members=8, seed=9999, print_freq=50):
    """
    One row per random (ensemble, one-local observable) pair with the absolute deviations
    between the two routes.
    """
    rng = np.random.default_rng(seed=seed)
    records = []
    for case in range(cases):
        n = int(rng.integers(1, max_sites + 1))
        members = int(rng.integers(1, max_members + 1))
        ens = random_ensemble(n, members, rng)
        obs = random_one_local(n, rng)

        by_members = moments_ensemble(ens, obs)
        by_trace = moments_trace(density_from_ensemble(ens), obs)
        records.append({'case': case,
                        'n_sites': n,
                        'members': members,
                        'mean_deviation': abs(by_members.mean - by_trace.mean),
                        'variance_deviation': abs(by_members.variance - by_trace.variance)})
        if case % print_freq == 0:
            logger.debug('fuzz case %d/%d: %d sites, %d members', case, cases, n, members)

    return pd.DataFrame.from_records(records, columns=['case', 'n_sites', 'members', 'mean_deviation',
                                                       'variance_deviation'])


def fuzz_summary(frame, tol=IMAG_TOL):
    worst_mean = float(frame['mean_deviation'].max()) if len(frame) else 0.
    worst_variance = float(frame['variance_deviation'].max()) if len(frame) else 0.

    return {'cases': int(len(frame)),
            'max_mean_deviation': worst_mean,
            'max_variance_deviation': worst_variance,
            'tolerance': tol,
            'passed': worst_mean < tol and worst_variance < tol}
