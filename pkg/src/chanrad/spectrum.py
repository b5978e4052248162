"""Spectral-angular distributions under the two summation rules.

Each radiative channel n -> n' contributes the complex amplitude
``c_n * <n'|x|n> * a(omega - omega_line(theta), T)`` where ``a`` is the
finite-interaction-time line profile.  The incoherent rule sums
|contribution|^2 over channels; the coherent rule squares the summed
contributions, keeping the cross terms between channels.  Both carry the
same pluggable angular-spectral kernel K(omega, theta), which cancels in
the ratio.  Intensities are in arbitrary units throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import HBARC_EV_ANG
from .errors import AxisEmpty
from .kinematics import BeamCrystalConfig, Kinematics, doppler_exact
from .populations import AmplitudeVector
from .states import LevelSet

# Matrix elements below this fraction of the largest one count as forbidden.
MATEL_CUTOFF = 1.0e-9

# Cells where both intensities sit below this floor report ratio 1 (0/0 rule).
RATIO_FLOOR = 1.0e-300


@dataclass(frozen=True)
class TransitionLine:
    """One radiative channel n_initial -> n_final."""

    n_initial: int
    n_final: int
    delta_eps: float          # level gap [eV]
    amplitude: complex        # c_n * <n_final|x|n_initial> [arb*Angstrom]
    interaction_time: float   # T = L/(hbar*c) [1/eV]


@dataclass(frozen=True)
class SpectrumGrid:
    """Dense (theta, omega) lattice with both intensity fields and their ratio."""

    theta_axis: np.ndarray
    omega_axis: np.ndarray
    I_incoherent: np.ndarray  # shape (n_theta, n_omega) [arb]
    I_coherent: np.ndarray    # shape (n_theta, n_omega) [arb]
    ratio: np.ndarray         # I_coherent / I_incoherent, 0/0 -> 1


def build_lines(av: AmplitudeVector, levels: LevelSet, matels: np.ndarray,
                cfg: BeamCrystalConfig) -> list[TransitionLine]:
    """One line per downward transition with a nonzero matrix element.

    For the analytic harmonic matrix this yields exactly n_max lines
    (n -> n-1, all sharing delta_eps = Omega); general matrices keep every
    pair whose element survives the relative cutoff.  Amplitudes may still
    be zero when the initial level is unpopulated.
    """
    n_levels = levels.n_max + 1
    if matels.shape != (n_levels, n_levels):
        raise ValueError(f"matrix element shape {matels.shape} != ({n_levels}, {n_levels})")
    t_int = cfg.crystal_length / HBARC_EV_ANG
    cutoff = MATEL_CUTOFF * np.abs(matels).max()
    lines = []
    for n_i in range(1, n_levels):
        for n_f in range(n_i):
            m = matels[n_f, n_i]
            if abs(m) <= cutoff:
                continue
            lines.append(TransitionLine(
                n_initial=n_i,
                n_final=n_f,
                delta_eps=float(levels.levels[n_i] - levels.levels[n_f]),
                amplitude=complex(av.amplitudes[n_i] * m),
                interaction_time=t_int,
            ))
    return lines


def amplitude_profile(detuning, t_int: float):
    """Finite-time emission amplitude a(delta, T) = exp(i*delta*T/2)*2*sin(delta*T/2)/delta.

    a(0, T) = T; |a|^2 is the sinc^2 line shape whose first zero sits at
    delta = 2*pi/T.  sin(z)/z is evaluated at z itself (not via numpy's
    normalized sinc) so the far side lobes keep full relative accuracy.
    """
    if t_int <= 0:
        raise ValueError("interaction time must be positive")
    z = np.asarray(detuning, dtype=float) * (t_int / 2.0)
    zero = z == 0.0
    sinc = np.where(zero, 1.0, np.sin(z) / np.where(zero, 1.0, z))
    out = t_int * np.exp(1j * z) * sinc
    if out.ndim == 0:
        return complex(out)
    return out


def _kernel_factor(kernel, omega_axis: np.ndarray, theta: float) -> np.ndarray:
    if callable(kernel):
        return np.broadcast_to(np.asarray(kernel(omega_axis, theta), dtype=float),
                               omega_axis.shape)
    if kernel == "omega2":
        return omega_axis * omega_axis
    if kernel == "unit":
        return np.ones_like(omega_axis)
    raise ValueError(f"unknown kernel {kernel!r}")


def _intensity_row(lines, kin: Kinematics, theta: float, omega_axis: np.ndarray,
                   kernel) -> tuple[np.ndarray, np.ndarray]:
    """Both intensity fields along one theta row, lines summed in list order."""
    inc = np.zeros(omega_axis.size)
    coh_sum = np.zeros(omega_axis.size, dtype=complex)
    for line in lines:
        center = doppler_exact(line.delta_eps, kin, theta)
        prof = amplitude_profile(omega_axis - center, line.interaction_time)
        coh_sum += line.amplitude * prof
        inc += (abs(line.amplitude) ** 2) * np.square(np.abs(prof))
    k = _kernel_factor(kernel, omega_axis, theta)
    return inc * k, np.square(np.abs(coh_sum)) * k


def intensity_incoherent(lines, kin: Kinematics, theta: float, omega: float,
                         kernel="omega2") -> float:
    """Sum of |amplitude * profile|^2 over lines, times the kernel [arb]."""
    inc, _ = _intensity_row(lines, kin, theta, np.asarray([float(omega)]), kernel)
    return float(inc[0])


def intensity_coherent(lines, kin: Kinematics, theta: float, omega: float,
                       kernel="omega2") -> float:
    """|sum of amplitude * profile|^2 over lines, times the kernel [arb]."""
    _, coh = _intensity_row(lines, kin, theta, np.asarray([float(omega)]), kernel)
    return float(coh[0])


def build_spectrum_grid(lines, kin: Kinematics, theta_axis, omega_axis,
                        kernel="omega2", workers: int = 1) -> SpectrumGrid:
    """Evaluate both rules over the full lattice.

    Rows (fixed theta) are always evaluated whole, in a fixed per-row line
    order, so the result is bitwise independent of the worker count.
    """
    theta_axis = np.asarray(theta_axis, dtype=float)
    omega_axis = np.asarray(omega_axis, dtype=float)
    if theta_axis.size == 0 or omega_axis.size == 0:
        raise AxisEmpty("theta and omega axes must be non-empty")
    if np.any(np.diff(theta_axis) < 0) or np.any(np.diff(omega_axis) < 0):
        raise ValueError("axes must be ordered ascending")
    inc = np.empty((theta_axis.size, omega_axis.size))
    coh = np.empty_like(inc)

    def run_row(i):
        inc[i], coh[i] = _intensity_row(lines, kin, float(theta_axis[i]),
                                        omega_axis, kernel)

    if workers <= 1 or theta_axis.size == 1:
        for i in range(theta_axis.size):
            run_row(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_row, range(theta_axis.size)))

    both_tiny = (inc < RATIO_FLOOR) & (coh < RATIO_FLOOR)
    ratio = coh / np.where(inc == 0.0, 1.0, inc)
    ratio[both_tiny] = 1.0
    return SpectrumGrid(theta_axis=theta_axis, omega_axis=omega_axis,
                        I_incoherent=inc, I_coherent=coh, ratio=ratio)


def find_peaks(omega_axis, values) -> list[tuple[float, float]]:
    """Strict local maxima of one intensity row, tallest first.

    A plateau higher than both flanking values counts once, at its leftmost
    cell.  Ties in height are broken by ascending omega.
    """
    omega_axis = np.asarray(omega_axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        raise ValueError("slice must hold at least 3 samples")
    peaks = []
    i = 1
    n = values.size
    while i < n - 1:
        if values[i] <= values[i - 1]:
            i += 1
            continue
        # rising edge at i; skip over any plateau
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        if j < n - 1 and values[j + 1] < values[i]:
            peaks.append((float(omega_axis[i]), float(values[i])))
        i = j + 1
    peaks.sort(key=lambda p: (-p[1], p[0]))
    return peaks


def interference_summary(grid: SpectrumGrid) -> dict:
    """Trapezoid omega-integrals per theta row plus scalar diagnostics.

    Rows are reduced in axis order, so the summary is deterministic.
    ``integrated_rel_diff`` is |sum_coh - sum_inc| / sum_inc over all rows.
    """
    int_inc_rows = np.trapezoid(grid.I_incoherent, grid.omega_axis, axis=1)
    int_coh_rows = np.trapezoid(grid.I_coherent, grid.omega_axis, axis=1)
    integrated_inc = float(sum(int_inc_rows.tolist()))
    integrated_coh = float(sum(int_coh_rows.tolist()))
    if integrated_inc == 0.0:
        rel = 0.0 if integrated_coh == 0.0 else math.inf
    else:
        rel = abs(integrated_coh - integrated_inc) / integrated_inc
    return {
        "max_ratio": float(grid.ratio.max()),
        "min_ratio": float(grid.ratio.min()),
        "integrated_coh": integrated_coh,
        "integrated_inc": integrated_inc,
        "integrated_rel_diff": rel,
    }
