"""Assembly of one channeling problem: levels -> populations -> lines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .errors import BadValue
from .kinematics import BeamCrystalConfig, Kinematics, make_kinematics
from .populations import AmplitudeVector, entry_amplitudes
from .spectrum import TransitionLine, build_lines
from .states import (
    GridSpec,
    LevelSet,
    PoschlTellerWell,
    TabulatedPotential,
    Wavefunction,
    default_harmonic_grid,
    dipole_matrix,
    harmonic_dipole_matrix,
    harmonic_levels,
    harmonic_wavefunctions,
    load_tabulated_potential,
    solve_bound_states,
)


@dataclass(frozen=True)
class ChannelProblem:
    """Everything needed to evaluate spectra for one configuration."""

    cfg: BeamCrystalConfig
    kin: Kinematics
    levels: LevelSet
    wavefns: list[Wavefunction]
    matels: np.ndarray
    populations: AmplitudeVector
    lines: list[TransitionLine]


def beam_config(run: RunConfig) -> BeamCrystalConfig:
    return BeamCrystalConfig(
        species_charge_sign=run.charge_sign,
        total_energy=run.energy_ev,
        rest_mass=run.mass_ev,
        dp=run.dp_angstrom,
        U0=run.u0_ev,
        crystal_length=run.length_angstrom,
        theta_in=run.theta_in_rad,
    )


def _poschl_teller_grid(well: PoschlTellerWell, kin, dp: float) -> GridSpec:
    """Wide enough that the most weakly bound level decays below ~1e-5
    at the walls: kappa_top*W >= 12 with kappa_top = frac(s)/a."""
    s = well.strength(kin.effective_mass)
    if s <= 0:
        raise BadValue("pt_width_angstrom", "well too shallow for any bound state")
    frac = s - np.floor(s)
    if frac == 0.0:
        frac = 1.0   # integer s: top level sits exactly at threshold; drop it
    w_min = max(12.0 / frac * well.a, dp / 2.0 * 1.001)
    return GridSpec.for_channel(dp, w_min)


def build_problem(run: RunConfig) -> ChannelProblem:
    """Levels, wavefunctions, matrix elements, populations and lines.

    The harmonic channel takes the analytic route (exact ladder, closed-form
    dipole matrix); other potentials go through the finite-difference solver
    with quadrature matrix elements.
    """
    cfg = beam_config(run)
    kin = make_kinematics(cfg)
    if run.potential == "harmonic":
        levels = harmonic_levels(kin, cfg.U0)
        grid = default_harmonic_grid(kin, levels, cfg.dp)
        wavefns = harmonic_wavefunctions(levels, kin, grid)
        matels = harmonic_dipole_matrix(levels, kin)
    else:
        if run.potential == "poschl_teller":
            well = PoschlTellerWell(U0=cfg.U0, a=run.pt_width_angstrom)
            grid = _poschl_teller_grid(well, kin, cfg.dp)
        else:
            well = load_tabulated_potential(run.potential_file)
            half_span = min(-well.x_table[0], well.x_table[-1])
            if half_span < cfg.dp / 2.0:
                raise BadValue("potential_file",
                               "table must span at least [-dp/2, +dp/2]")
            spec = GridSpec.for_channel(cfg.dp, half_span)
            # shrink back inside the table if the ceil overshot
            while spec.half_width > half_span:
                spec = GridSpec(step=spec.step, n_points=spec.n_points - 2)
            grid = spec
        levels, wavefns = solve_bound_states(well, kin, grid)
        matels = dipole_matrix(wavefns)
    populations = entry_amplitudes(cfg, levels, wavefns)
    lines = build_lines(populations, levels, matels, cfg)
    return ChannelProblem(cfg=cfg, kin=kin, levels=levels, wavefns=wavefns,
                          matels=matels, populations=populations, lines=lines)


def theta_axis(run: RunConfig) -> np.ndarray:
    if run.theta_count == 1:
        return np.asarray([run.theta_min_rad])
    return np.linspace(run.theta_min_rad, run.theta_max_rad, run.theta_count)


def omega_axis(run: RunConfig) -> np.ndarray:
    if run.omega_count == 1:
        return np.asarray([run.omega_min_ev])
    return np.linspace(run.omega_min_ev, run.omega_max_ev, run.omega_count)
