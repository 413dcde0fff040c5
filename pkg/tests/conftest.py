import numpy as np
import pytest

from bnls import spectral as sp


@pytest.fixture(scope="session")
def grid1d():
    return sp.make_grid(1, 16.0, 256)


@pytest.fixture(scope="session")
def gaussian(grid1d):
    """exp(-x^2/2); every closed-form oracle below is a Gaussian moment."""
    return sp.field_from_function(grid1d, lambda x: np.exp(-x**2 / 2))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def band_limited(grid, rng, modes=40):
    """Random field supported on the lowest Fourier modes."""
    coef = np.zeros(grid.shape, dtype=complex)
    if grid.dim == 1:
        coef[:modes] = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    else:
        coef[:modes, :modes] = (rng.standard_normal((modes, modes))
                                + 1j * rng.standard_normal((modes, modes)))
    return sp.to_physical(sp.Field(grid, coef, sp.FOURIER))
