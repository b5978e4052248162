import math

import pytest

from chanrad.kinematics import BeamCrystalConfig, make_kinematics
from chanrad.pipeline import build_problem
from chanrad.validation import reference_run

# reference beam/channel: 1 GeV positrons, dp = 1.92 A, U0 = 23 eV, L = 20 um
REF_ENERGY = 1.0e9
REF_DP = 1.92
REF_U0 = 23.0
REF_LENGTH = 2.0e5
PSI_C = math.sqrt(2.0 * REF_U0 / REF_ENERGY)


@pytest.fixture(scope="session")
def ref_cfg():
    return BeamCrystalConfig(total_energy=REF_ENERGY, dp=REF_DP, U0=REF_U0,
                             crystal_length=REF_LENGTH, theta_in=PSI_C / 2.0)


@pytest.fixture(scope="session")
def ref_kin(ref_cfg):
    return make_kinematics(ref_cfg)


@pytest.fixture(scope="session")
def ref_problem():
    """Full harmonic pipeline at theta_in = psi_c/2."""
    return build_problem(reference_run(PSI_C / 2.0))


@pytest.fixture(scope="session")
def forward_problem():
    """Full harmonic pipeline at forward incidence (theta_in = 0)."""
    return build_problem(reference_run(0.0))


@pytest.fixture(scope="session")
def pt_problem():
    """Non-equidistant (Poschl-Teller) pipeline at theta_in = psi_c/2."""
    return build_problem(reference_run(PSI_C / 2.0, potential="poschl_teller"))
