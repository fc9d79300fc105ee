import os
import sys

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)
sys.path.insert(0, os.path.join(HERE, "..", "src"))

import pytest

from gammastat import groups as gr
from gammastat.gamma import GammaGroup, LevelSet, gamma_group_from_matrices


@pytest.fixture(scope="session")
def C2():
    return gr.cyclic(2)


@pytest.fixture(scope="session")
def z3inv():
    C2 = gr.cyclic(2)
    return GammaGroup(gr.cyclic(3), C2, {C2.generators[0]: [0, 2, 1]}, name="Z3 inv")


@pytest.fixture(scope="session")
def v4():
    C3 = gr.cyclic(3)
    return gamma_group_from_matrices(2, C3, {C3.generators[0]: [[0, 1], [1, 1]]})


@pytest.fixture
def level3(z3inv):
    # fresh each time: LevelSet carries caches
    return LevelSet([z3inv])


@pytest.fixture(scope="session")
def small_groups():
    return {"1": gr.trivial_group(), "Z2": gr.cyclic(2), "Z3": gr.cyclic(3), "Z4": gr.cyclic(4),
            "V4": gr.abelian_group([2, 2]), "S3": gr.symmetric(3), "Z6": gr.cyclic(6),
            "D8": gr.dihedral(4), "Q8": gr.quaternion(), "A4": gr.alternating(4)}
