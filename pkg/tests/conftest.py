import numpy as np
import pytest

from nilweier.pipeline import Pipeline, pair_potential, translate_potential


@pytest.fixture(scope="session")
def cyl_pipe():
    """Cylinder potential on a small grid, three spectral angles."""
    pot = translate_potential("1", "0", "0.0625", "0")
    return Pipeline(
        pot,
        np.linspace(-1, 1, 11),
        np.linspace(-1, 1, 11),
        trunc_n=20,
        steps_per_cell=8,
        thetas=(0.0, 0.1, -0.1),
    ).run()


@pytest.fixture(scope="session")
def hyp_pipe():
    pot = translate_potential("1", "0", "-0.0625", "0")
    return Pipeline(
        pot,
        np.linspace(-1, 1, 11),
        np.linspace(-1, 1, 11),
        trunc_n=20,
        steps_per_cell=8,
        thetas=(0.0, 0.1),
    ).run()


@pytest.fixture(scope="session")
def plane_pipe():
    pot = translate_potential("4", "0", "0", "0")
    return Pipeline(
        pot,
        np.linspace(-2, 2, 21),
        np.linspace(-2, 2, 21),
        trunc_n=16,
        steps_per_cell=8,
        thetas=(0.0, 0.1),
    ).run()


@pytest.fixture(scope="session")
def bscroll_pipe():
    pot = pair_potential("1", "1", "0", "t")
    return Pipeline(
        pot,
        np.linspace(-1, 1, 11),
        np.linspace(-1, 1, 11),
        trunc_n=20,
        steps_per_cell=8,
        thetas=(0.0,),
    ).run()
