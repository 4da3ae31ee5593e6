import numpy as np
import pytest

from opencavity import CavityModel, LatticeSpec, LeadSpec

# Notch mask: a 3x2 block removed from the bottom edge, 44 sites kept.
NOTCH_MASK = tuple(
    tuple(0 if (4 <= ix <= 6 and iy <= 1) else 1 for iy in range(5))
    for ix in range(10)
)


def single_site_model(alpha=1.0, w=0.5):
    lat = LatticeSpec(1, 1)
    leads = (LeadSpec((0, 0), w), LeadSpec((0, 0), w))
    return CavityModel(lat, leads, alpha)


def reference_models():
    """The five transmission reference models with their energy grids.

    Grids with even point counts avoid the symmetry-protected real
    eigenvalues of the larger lattices (E = 0 among them), which would
    otherwise sit exactly on a grid point.
    """
    cases = [
        (
            "single_site",
            single_site_model(),
            np.linspace(-1.9, 1.9, 201),
        ),
        (
            "dimer",
            CavityModel(
                LatticeSpec(2, 1),
                (LeadSpec((0, 0), 1.0), LeadSpec((1, 0), 0.6)),
                0.8,
            ),
            np.linspace(-1.9, 1.9, 201),
        ),
        (
            "chain3",
            CavityModel(
                LatticeSpec(3, 1),
                (LeadSpec((0, 0), 1.0), LeadSpec((2, 0), 1.0)),
                0.3,
            ),
            np.linspace(-1.9, 1.9, 201),
        ),
        (
            "square4",
            CavityModel(
                LatticeSpec(4, 4),
                (LeadSpec((0, 0), 1.0), LeadSpec((3, 3), 1.0)),
                1.0,
            ),
            np.linspace(-1.9, 1.9, 200),
        ),
        (
            "notched10x5",
            CavityModel(
                LatticeSpec(10, 5, mask=NOTCH_MASK),
                (LeadSpec((0, 2), 1.0), LeadSpec((9, 2), 1.0)),
                0.6,
            ),
            np.linspace(-1.9, 1.9, 200),
        ),
    ]
    return cases


@pytest.fixture(scope="session")
def reference_cases():
    return reference_models()
