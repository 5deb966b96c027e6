import pytest
from fractions import Fraction

from dunklriesz.reflection import root_system
from dunklriesz.hermite import build_basis


@pytest.fixture(scope="session")
def z2_half():
    return root_system("z2", multiplicity=Fraction(1, 2))


@pytest.fixture(scope="session")
def z2_half_basis8(z2_half):
    return build_basis(z2_half, 8)


@pytest.fixture(scope="session")
def z2_zero():
    return root_system("z2", multiplicity=0)


@pytest.fixture(scope="session")
def z2_zero_basis8(z2_zero):
    return build_basis(z2_zero, 8)


@pytest.fixture(scope="session")
def z2sq_ones():
    return root_system("z2^2", multiplicity=[1, 1])


@pytest.fixture(scope="session")
def a2_one():
    return root_system("a2", multiplicity=1)
