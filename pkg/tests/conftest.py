import math

import numpy as np
import pytest

from atomphase.atomlattice import atom_factors
from atomphase.qstate import StateVector

SQ2 = math.sqrt(2.0)
LN2 = math.log(2.0)


def ket(*labels_amps, count=None):
    """ket(("eg", 1), ("ge", 1)) -> normalized two-atom state."""
    count = count or len(labels_amps[0][0])
    return StateVector.from_terms(atom_factors(count), {tuple(l): a for l, a in labels_amps})


@pytest.fixture
def rng():
    return np.random.default_rng(20020204)
