"""Kinematics: relativistic factors, Omega, Doppler exact vs forward cone."""

import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from chanrad.constants import ELECTRON_MASS_EV
from chanrad.errors import AboveBarrier, EmptyChannel, NonRelativistic
from chanrad.kinematics import (
    BeamCrystalConfig,
    acceptance_angle,
    check_channeling,
    doppler_exact,
    doppler_forward,
    make_kinematics,
)

getcontext().prec = 50

# frozen from 50-digit decimal arithmetic on the reference inputs
GAMMA_REF = 1956.9511835591834
OMEGA_REF = 0.44085335775275724          # eV
PSI_C_REF = 2.144761058952722e-4         # rad
OMEGA_FWD0 = 3376635.1192318434          # 2*gamma^2*Omega [eV]
OMEGA_EXACT0 = 3376634.8988051502        # Omega/(1-beta) [eV]
REL_DIFF0 = 6.5279985986752195e-8        # (1-beta)/2 at the reference gamma
W_LITERAL = 3376988.061694486            # 0.4409/(1-beta) at gamma = 1956.95


def test_gamma_matches_decimal_oracle(ref_kin):
    gamma_hp = float(Decimal("1e9") / Decimal("510998.95"))
    assert abs(ref_kin.gamma / gamma_hp - 1.0) < 1e-15
    assert abs(ref_kin.gamma / GAMMA_REF - 1.0) < 1e-15


def test_omega_matches_decimal_oracle(ref_kin):
    two = Decimal(2)
    omega_hp = float((two / Decimal("1.92"))
                     * (two * Decimal(23) / Decimal(10) ** 9).sqrt()
                     * Decimal("1973.269804"))
    assert abs(ref_kin.omega_osc / omega_hp - 1.0) < 1e-15
    assert abs(ref_kin.omega_osc / OMEGA_REF - 1.0) < 1e-15


def test_effective_mass_is_total_energy(ref_kin, ref_cfg):
    # m_eff = gamma*m = E for gamma = E/m
    assert abs(ref_kin.effective_mass / ref_cfg.total_energy - 1.0) < 1e-15


def test_gamma_beta_consistency(ref_kin):
    # gamma = 1/sqrt(1-beta^2), checked through the cancellation-free
    # equivalent |beta^2 + 1/gamma^2 - 1|: the direct form would lose
    # ~gamma^2 digits to rounding of the stored beta.
    assert abs(ref_kin.beta**2 + 1.0 / ref_kin.gamma**2 - 1.0) < 1e-12
    assert 0.0 < ref_kin.beta < 1.0


def test_nonrelativistic_rejected():
    cfg = BeamCrystalConfig(total_energy=ELECTRON_MASS_EV)
    with pytest.raises(NonRelativistic):
        make_kinematics(cfg)


@pytest.mark.parametrize("field", ["dp", "U0", "crystal_length"])
def test_empty_channel_rejected(field):
    cfg = BeamCrystalConfig(**{field: 0.0})
    with pytest.raises(EmptyChannel):
        make_kinematics(cfg)


def test_omega_scaling_quadrupled_energy_exact():
    kin1 = make_kinematics(BeamCrystalConfig(total_energy=1.0e9))
    kin4 = make_kinematics(BeamCrystalConfig(total_energy=4.0e9))
    assert kin4.omega_osc == kin1.omega_osc / 2.0


def test_make_kinematics_pure():
    cfg = BeamCrystalConfig()
    a = make_kinematics(cfg)
    b = make_kinematics(cfg)
    assert (a.gamma, a.beta, a.omega_osc, a.effective_mass) == \
        (b.gamma, b.beta, b.omega_osc, b.effective_mass)


def test_doppler_exact_zero_gap(ref_kin):
    assert doppler_exact(0.0, ref_kin, 0.3) == 0.0


def test_doppler_exact_transverse(ref_kin):
    # cos(pi/2) = 0 forces omega = delta_eps
    assert abs(doppler_exact(1.7, ref_kin, math.pi / 2.0) / 1.7 - 1.0) < 1e-12


def test_doppler_exact_forward_frozen(ref_kin):
    assert abs(doppler_exact(ref_kin.omega_osc, ref_kin, 0.0) / OMEGA_EXACT0 - 1.0) < 1e-12


def test_doppler_exact_literal_example():
    kin = make_kinematics(BeamCrystalConfig(total_energy=1956.95 * ELECTRON_MASS_EV))
    assert abs(doppler_exact(0.4409, kin, 0.0) / W_LITERAL - 1.0) < 1e-12


def test_doppler_exact_monotone_decreasing(ref_kin):
    theta = np.linspace(0.0, math.pi, 4001)
    omega = doppler_exact(1.0, ref_kin, theta)
    assert np.all(np.diff(omega) < 0)


def test_doppler_exact_domain(ref_kin):
    with pytest.raises(ValueError):
        doppler_exact(-1.0, ref_kin, 0.0)
    with pytest.raises(ValueError):
        doppler_exact(1.0, ref_kin, -0.1)
    with pytest.raises(ValueError):
        doppler_exact(1.0, ref_kin, math.pi + 0.1)


def test_doppler_forward_frozen(ref_kin):
    assert abs(doppler_forward(1, ref_kin, 0.0) / OMEGA_FWD0 - 1.0) < 1e-12


def test_doppler_forward_half_at_one_over_gamma(ref_kin):
    full = doppler_forward(1, ref_kin, 0.0)
    half = doppler_forward(1, ref_kin, 1.0 / ref_kin.gamma)
    assert abs(half / (full / 2.0) - 1.0) < 1e-12


def test_doppler_forward_linear_in_dn(ref_kin):
    assert abs(doppler_forward(2, ref_kin, 0.0) / (2.0 * doppler_forward(1, ref_kin, 0.0))
               - 1.0) < 1e-15


def test_doppler_forward_monotone(ref_kin):
    theta = np.linspace(1e-6, 5e-3, 2001)
    omega = doppler_forward(1, ref_kin, theta)
    assert np.all(np.diff(omega) < 0)


def test_doppler_forward_domain(ref_kin):
    with pytest.raises(ValueError):
        doppler_forward(0, ref_kin, 0.0)
    with pytest.raises(ValueError):
        doppler_forward(1, ref_kin, -1e-4)


def test_exact_vs_forward_relative_difference(ref_kin):
    ratio = doppler_exact(ref_kin.omega_osc, ref_kin, 0.0) / doppler_forward(1, ref_kin, 0.0)
    # measured difference is (1-beta)/2, about 1/(4 gamma^2)
    assert abs(abs(ratio - 1.0) / REL_DIFF0 - 1.0) < 1e-6
    assert abs(ratio - 1.0) < 1.0 / ref_kin.gamma**2


@pytest.mark.parametrize("gamma", [100.0, 1956.95, 1.0e4])
def test_exact_vs_forward_bound_across_gammas(gamma):
    kin = make_kinematics(BeamCrystalConfig(total_energy=gamma * ELECTRON_MASS_EV))
    ratio = doppler_exact(kin.omega_osc, kin, 0.0) / doppler_forward(1, kin, 0.0)
    assert abs(ratio - 1.0) < 1.0 / (gamma * gamma)


def test_acceptance_angle_frozen():
    cfg = BeamCrystalConfig()
    assert abs(acceptance_angle(cfg) / PSI_C_REF - 1.0) < 1e-15


def test_acceptance_angle_zero_depth():
    assert acceptance_angle(BeamCrystalConfig(U0=0.0)) == 0.0


def test_acceptance_angle_joint_scaling():
    a = acceptance_angle(BeamCrystalConfig(U0=23.0, total_energy=1e9))
    b = acceptance_angle(BeamCrystalConfig(U0=92.0, total_energy=4e9))
    assert a == b


def test_above_barrier_rejected():
    psi_c = acceptance_angle(BeamCrystalConfig())
    with pytest.raises(AboveBarrier):
        check_channeling(BeamCrystalConfig(theta_in=psi_c))
    check_channeling(BeamCrystalConfig(theta_in=0.99 * psi_c))
