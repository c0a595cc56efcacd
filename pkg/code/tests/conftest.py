import numpy as np
import pytest

from algebra.pauli import SingleSpinKet
from states.product_states import ProductState
from utils import REPORT_DIR_ENV

SQRT3 = np.sqrt(3)


@pytest.fixture
def v_state():
    """
    |V> = (|+> + i sqrt(3) |->)/2.
    """
    return ProductState.from_kets([SingleSpinKet(0.5, 0.5j * SQRT3)])


@pytest.fixture
def rng():
    return np.random.default_rng(seed=9999)


@pytest.fixture(autouse=True)
def no_report_dir(monkeypatch):
    monkeypatch.delenv(REPORT_DIR_ENV, raising=False)
