"""Entry amplitudes c_n: plane wave matched to the bound ladder at z = 0.

The incident state is a single transverse plane wave exp(i*p_x*x/hbar*c)
with p_x = E*theta_in, projected onto each bound eigenfunction over one
channel period [-dp/2, +dp/2] with 1/sqrt(dp) normalization, then
renormalized onto the bound subspace.  Complex phases are kept: the
coherent spectrum depends on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .constants import HBARC_EV_ANG
from .errors import GridMismatch
from .kinematics import BeamCrystalConfig, check_channeling
from .states import LevelSet, Wavefunction

# Renormalized populations below this bound-subspace weight get flagged.
LOW_CAPTURE = 0.9


@dataclass(frozen=True)
class AmplitudeVector:
    """Complex entry amplitudes, index-aligned with LevelSet.levels."""

    amplitudes: np.ndarray      # c_n, sum |c_n|^2 = 1
    captured_fraction: float    # bound-subspace weight before renormalization
    theta_in: float             # [rad]
    low_capture: bool = False


def _window_slice(grid: np.ndarray, dp: float) -> slice:
    """Indices spanning [-dp/2, +dp/2]; endpoints must sit on grid nodes."""
    half = dp / 2.0
    lo = int(np.argmin(np.abs(grid + half)))
    hi = int(np.argmin(np.abs(grid - half)))
    if abs(grid[lo] + half) > 1.0e-9 * dp or abs(grid[hi] - half) > 1.0e-9 * dp:
        raise GridMismatch(
            "channel edges +-dp/2 do not sit on grid nodes; "
            "build the grid with GridSpec.for_channel"
        )
    if (hi - lo) % 2 != 0:
        raise GridMismatch("entry window must contain an even number of intervals")
    return slice(lo, hi + 1)


def entry_amplitudes(cfg: BeamCrystalConfig, levels: LevelSet,
                     wavefns: list[Wavefunction]) -> AmplitudeVector:
    """Project the incident plane wave onto every bound level.

    Raw overlaps c^_n = (1/sqrt(dp)) * integral over one channel of
    psi_n(x) * exp(i*E*theta_in*x/hbar*c), by composite Simpson quadrature
    on the shared wavefunction grid; the returned amplitudes are
    c^_n / sqrt(sum |c^|^2).

    Raises
    ------
    AboveBarrier
        if |theta_in| >= psi_c.
    GridMismatch
        if wavefunctions disagree on their grid or the channel edges
        miss the grid nodes.
    """
    check_channeling(cfg)
    if len(wavefns) != levels.n_max + 1:
        raise GridMismatch(
            f"need {levels.n_max + 1} wavefunctions, got {len(wavefns)}"
        )
    grid = wavefns[0].grid
    for w in wavefns[1:]:
        if w.grid is not grid and not np.array_equal(w.grid, grid):
            raise GridMismatch("wavefunctions sampled on different grids")
    win = _window_slice(grid, cfg.dp)
    xw = grid[win]
    k = cfg.total_energy * cfg.theta_in / HBARC_EV_ANG   # [1/Angstrom]
    wave = np.exp(1j * k * xw)
    psi = np.vstack([w.values[win] for w in wavefns])
    raw = simpson(psi * wave[np.newaxis, :], x=xw, axis=1) / math.sqrt(cfg.dp)
    captured = float(np.sum(np.abs(raw) ** 2))
    amplitudes = raw / math.sqrt(captured)
    return AmplitudeVector(
        amplitudes=amplitudes,
        captured_fraction=captured,
        theta_in=cfg.theta_in,
        low_capture=captured < LOW_CAPTURE,
    )


def captured_fraction(av: AmplitudeVector) -> float:
    """Pre-normalization weight of the bound subspace."""
    return av.captured_fraction
