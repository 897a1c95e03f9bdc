import math

import pytest

from vibcav import catalog


@pytest.fixture(scope="session")
def lf():
    return catalog.make_linear_finite(2, math.pi / 4)


@pytest.fixture(scope="session")
def lo():
    return catalog.make_linear_odd(2, 0.3)


@pytest.fixture(scope="session")
def inv():
    return catalog.make_inversion(1, math.pi / 6)


@pytest.fixture(scope="session")
def hom():
    return catalog.make_homographic(1, 1.0, 2.0)


@pytest.fixture(scope="session")
def static():
    return catalog.make_static()


@pytest.fixture(scope="session")
def canonical(lf, lo, inv, hom):
    """The four oscillating reference models, keyed by family tag."""
    return {"lf": lf, "lo": lo, "inv": inv, "hom": hom}
