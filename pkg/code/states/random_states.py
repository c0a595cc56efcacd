import numpy as np

from states.ensembles import Ensemble
from states.pure import PureState


def haar_random_state(n, rng):
    vector = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return PureState(vector / np.linalg.norm(vector))


def random_ensemble(n, members, rng):
    """
    `members` Haar-random pure states with Dirichlet(1) weights.
    """
    weights = rng.dirichlet(np.ones(members))
    return Ensemble.of(weights, [haar_random_state(n, rng) for _ in range(members)])
