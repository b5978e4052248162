"""Relativistic factors, channel oscillation frequency and Doppler kinematics.

The photon energy emitted in a transition with transverse level gap
``delta_eps`` at emission angle ``theta`` is

    omega = delta_eps / (1 - beta*cos(theta))

evaluated here with the exact beta.  The small-angle form
``2*gamma^2*dn*Omega / (1 + theta^2*gamma^2)`` is provided separately as a
cross-check target, never as the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import ELECTRON_MASS_EV, HBARC_EV_ANG
from .errors import AboveBarrier, EmptyChannel, NonRelativistic


@dataclass(frozen=True)
class BeamCrystalConfig:
    """Beam species/energy plus planar-channel geometry.

    Attributes
    ----------
    species_charge_sign : int
        +1 for positrons, -1 for electrons.  Metadata only; no formula in
        this package depends on it.
    total_energy : float
        Total beam energy [eV].
    rest_mass : float
        Rest energy [eV].
    dp : float
        Interplanar distance [Angstrom].
    U0 : float
        Depth of the transverse potential well [eV].
    crystal_length : float
        Crystal thickness along the beam [Angstrom].
    theta_in : float
        Incidence angle with respect to the planes [rad].
    """

    species_charge_sign: int = +1
    total_energy: float = 1.0e9
    rest_mass: float = ELECTRON_MASS_EV
    dp: float = 1.92
    U0: float = 23.0
    crystal_length: float = 2.0e5
    theta_in: float = 0.0


@dataclass(frozen=True)
class Kinematics:
    """Derived relativistic factors for one beam/channel configuration."""

    gamma: float            # E/m
    beta: float             # p_parallel / E, exact
    omega_osc: float        # transverse oscillation quantum [eV]
    effective_mass: float   # gamma*m [eV]


def acceptance_angle(cfg: BeamCrystalConfig) -> float:
    """Critical channeling angle psi_c = sqrt(2*U0/E) [rad]."""
    if cfg.U0 < 0 or cfg.total_energy <= 0:
        raise EmptyChannel("U0 and total_energy must be positive")
    return math.sqrt(2.0 * cfg.U0 / cfg.total_energy)


def make_kinematics(cfg: BeamCrystalConfig) -> Kinematics:
    """Compute gamma, beta, the oscillation quantum Omega and gamma*m.

    Omega = (2/dp)*sqrt(2*U0/E) in inverse Angstrom, converted to eV with
    hbar*c.  Pure function: identical inputs give bitwise-identical output.

    Raises
    ------
    NonRelativistic
        if total_energy <= rest_mass.
    EmptyChannel
        if dp, U0 or crystal_length is non-positive.
    """
    if cfg.total_energy <= cfg.rest_mass:
        raise NonRelativistic(
            f"total_energy {cfg.total_energy} eV must exceed rest mass {cfg.rest_mass} eV"
        )
    if cfg.dp <= 0 or cfg.U0 <= 0 or cfg.crystal_length <= 0:
        raise EmptyChannel("dp, U0 and crystal_length must all be positive")
    gamma = cfg.total_energy / cfg.rest_mass
    beta = math.sqrt(1.0 - 1.0 / (gamma * gamma))
    omega_osc = (2.0 / cfg.dp) * math.sqrt(2.0 * cfg.U0 / cfg.total_energy) * HBARC_EV_ANG
    return Kinematics(
        gamma=gamma,
        beta=beta,
        omega_osc=omega_osc,
        effective_mass=gamma * cfg.rest_mass,
    )


def check_channeling(cfg: BeamCrystalConfig) -> None:
    """Reject above-barrier incidence (|theta_in| >= psi_c)."""
    psi_c = acceptance_angle(cfg)
    if abs(cfg.theta_in) >= psi_c:
        raise AboveBarrier(
            f"|theta_in| = {abs(cfg.theta_in):.6e} rad >= psi_c = {psi_c:.6e} rad"
        )


def one_minus_beta_cos(kin: Kinematics, theta):
    """1 - beta*cos(theta) without cancellation at small theta.

    Uses 1 - beta = 1/(gamma^2*(1+beta)) and 1 - cos(theta) = 2*sin^2(theta/2),
    so both addends are positive and carry full precision at any gamma.
    """
    one_minus_beta = 1.0 / (kin.gamma * kin.gamma * (1.0 + kin.beta))
    return one_minus_beta + kin.beta * 2.0 * np.square(np.sin(np.asarray(theta) / 2.0))


def doppler_exact(delta_eps, kin: Kinematics, theta):
    """Photon energy delta_eps/(1 - beta*cos(theta)) [eV], exact beta.

    Accepts scalars or arrays in ``delta_eps``/``theta``.  Strictly
    decreasing in theta on [0, pi].
    """
    deps = np.asarray(delta_eps, dtype=float)
    th = np.asarray(theta, dtype=float)
    if np.any(deps < 0):
        raise ValueError("delta_eps must be >= 0")
    if np.any(th < 0) or np.any(th > math.pi):
        raise ValueError("theta must lie in [0, pi]")
    out = deps / one_minus_beta_cos(kin, th)
    if out.ndim == 0:
        return float(out)
    return out


def doppler_forward(delta_n, kin: Kinematics, theta):
    """Small-angle photon energy 2*gamma^2*dn*Omega/(1 + theta^2*gamma^2) [eV]."""
    if np.any(np.asarray(delta_n) < 1):
        raise ValueError("delta_n must be >= 1")
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0):
        raise ValueError("theta must be >= 0")
    g2 = kin.gamma * kin.gamma
    out = 2.0 * g2 * np.asarray(delta_n) * kin.omega_osc / (1.0 + th * th * g2)
    if out.ndim == 0:
        return float(out)
    return out
