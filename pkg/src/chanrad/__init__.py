"""Channeling radiation from relativistic positrons in a planar crystal channel.

Builds the transverse bound-state ladder, the complex entry populations and
the radiative transition lines, then assembles photon spectral-angular
distributions under two summation rules: the incoherent sum of squared
transition amplitudes and the coherent square of the summed amplitudes.
"""

from .config import RunConfig, parse_config, serialize_config
from .kinematics import (
    BeamCrystalConfig,
    Kinematics,
    acceptance_angle,
    doppler_exact,
    doppler_forward,
    make_kinematics,
)
from .pipeline import ChannelProblem, build_problem
from .populations import AmplitudeVector, captured_fraction, entry_amplitudes
from .spectrum import (
    SpectrumGrid,
    TransitionLine,
    amplitude_profile,
    build_lines,
    build_spectrum_grid,
    find_peaks,
    intensity_coherent,
    intensity_incoherent,
    interference_summary,
)
from .states import (
    GridSpec,
    HarmonicChannelWell,
    LevelSet,
    PoschlTellerWell,
    TabulatedPotential,
    Wavefunction,
    dipole_matrix,
    dipole_matrix_element,
    harmonic_dipole_matrix,
    harmonic_levels,
    harmonic_wavefunction,
    harmonic_wavefunctions,
    load_tabulated_potential,
    oscillator_length,
    solve_bound_states,
)

__version__ = "0.1.0"
