"""Transverse bound-state ladders and dipole matrix elements.

Two routes to the level ladder:

* analytic harmonic ladder eps_n = Omega*(n + 1/2) with Hermite-recurrence
  eigenfunctions, for the positron channel well U(x) = U0*(2x/dp)^2;
* a three-point finite-difference eigensolver for arbitrary symmetric or
  tabulated wells (the non-equidistant, electron-like case).

All wavefunctions are sampled on mirror-symmetric uniform grids so that
parity selection rules survive in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .constants import HBARC_EV_ANG
from .errors import (
    ConvergenceFailure,
    EmptyWell,
    GridMismatch,
    GridTooNarrow,
    NoBoundStates,
)
from .kinematics import Kinematics

# Boundary amplitude (relative to peak) above which a grid is rejected.
TAIL_LIMIT = 1.0e-8


@dataclass(frozen=True)
class GridSpec:
    """Uniform symmetric sampling grid on [-half_width, +half_width]."""

    step: float       # spacing [Angstrom]
    n_points: int

    @property
    def half_width(self) -> float:
        return self.step * (self.n_points - 1) / 2.0

    def points(self) -> np.ndarray:
        # exact mirror symmetry: x[i] = -x[N-1-i] bitwise
        n = self.n_points
        return self.step * (np.arange(n) - (n - 1) / 2.0)

    @staticmethod
    def uniform(half_width: float, n_points: int) -> "GridSpec":
        return GridSpec(step=2.0 * half_width / (n_points - 1), n_points=n_points)

    @staticmethod
    def for_channel(dp: float, min_half_width: float,
                    intervals_per_half_channel: int = 4500) -> "GridSpec":
        """Grid whose nodes hit +-dp/2 exactly, for entry-window quadrature."""
        step = (dp / 2.0) / intervals_per_half_channel
        k = max(int(math.ceil(min_half_width / step)), intervals_per_half_channel + 1)
        return GridSpec(step=step, n_points=2 * k + 1)


@dataclass(frozen=True)
class LevelSet:
    """Ordered transverse energy levels, measured from the well bottom."""

    model_tag: str                 # "harmonic" | "numeric"
    omega_osc: float | None        # level spacing [eV], harmonic only
    effective_mass: float          # gamma*m [eV]
    levels: np.ndarray             # strictly increasing [eV]
    n_max: int                     # index of the highest bound level
    well_depth: float              # escape threshold above the bottom [eV]


@dataclass(frozen=True)
class Wavefunction:
    """Real sampled eigenfunction, L2-normalized on its grid [1/sqrt(Angstrom)]."""

    grid: np.ndarray
    values: np.ndarray
    level_index: int


def oscillator_length(kin: Kinematics) -> float:
    """Harmonic length scale x1 = hbar*c / sqrt(m_eff * Omega) [Angstrom]."""
    return HBARC_EV_ANG / math.sqrt(kin.effective_mass * kin.omega_osc)


def turning_point(kin: Kinematics, n: int) -> float:
    """Classical turning point of harmonic level n: x1*sqrt(2n+1) [Angstrom]."""
    return oscillator_length(kin) * math.sqrt(2.0 * n + 1.0)


def harmonic_levels(kin: Kinematics, U0: float) -> LevelSet:
    """Equidistant ladder eps_n = Omega*(n + 1/2) up to n_max = floor(U0/Omega - 1/2).

    Raises EmptyWell if not even the ground state fits below the well depth.
    """
    omega = kin.omega_osc
    if omega <= 0:
        raise EmptyWell("oscillation quantum must be positive")
    if U0 <= omega / 2.0:
        raise EmptyWell(f"U0 = {U0} eV <= Omega/2 = {omega / 2.0} eV binds no state")
    n_max = int(math.floor(U0 / omega - 0.5))
    levels = omega * (np.arange(n_max + 1) + 0.5)
    return LevelSet(
        model_tag="harmonic",
        omega_osc=omega,
        effective_mass=kin.effective_mass,
        levels=levels,
        n_max=n_max,
        well_depth=U0,
    )


def _hermite_ladder(xi: np.ndarray, n_top: int) -> np.ndarray:
    """Normalized oscillator eigenfunctions phi_0..phi_n_top of the scaled
    coordinate, via the stable recurrence
    phi_n = sqrt(2/n)*xi*phi_{n-1} - sqrt((n-1)/n)*phi_{n-2}."""
    out = np.zeros((n_top + 1, xi.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n_top >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(2, n_top + 1):
        out[n] = math.sqrt(2.0 / n) * xi * out[n - 1] - math.sqrt((n - 1) / n) * out[n - 2]
    return out


def harmonic_wavefunction(n: int, kin: Kinematics, grid_spec: GridSpec) -> Wavefunction:
    """Sampled harmonic eigenfunction, normalized, positive leading lobe.

    Raises GridTooNarrow when the grid stops short of the classical turning
    point plus 5*x1/sqrt(2), or when the boundary tail exceeds 1e-8 of peak.
    """
    x1 = oscillator_length(kin)
    need = turning_point(kin, n) + 5.0 * x1 / math.sqrt(2.0)
    if grid_spec.half_width < need:
        raise GridTooNarrow(
            f"grid half-width {grid_spec.half_width:.4f} A < required {need:.4f} A for n={n}"
        )
    x = grid_spec.points()
    values = _hermite_ladder(x / x1, n)[n] / math.sqrt(x1)
    tail = abs(values[-1]) / np.abs(values).max()
    if tail > TAIL_LIMIT:
        raise GridTooNarrow(f"boundary tail {tail:.2e} of peak exceeds {TAIL_LIMIT:.0e}")
    return Wavefunction(grid=x, values=values, level_index=n)


def harmonic_wavefunctions(levels: LevelSet, kin: Kinematics,
                           grid_spec: GridSpec) -> list[Wavefunction]:
    """All bound harmonic eigenfunctions on a shared grid (vectorized ladder)."""
    x1 = oscillator_length(kin)
    need = turning_point(kin, levels.n_max) + 5.0 * x1 / math.sqrt(2.0)
    if grid_spec.half_width < need:
        raise GridTooNarrow(
            f"grid half-width {grid_spec.half_width:.4f} A < required {need:.4f} A "
            f"for n={levels.n_max}"
        )
    x = grid_spec.points()
    ladder = _hermite_ladder(x / x1, levels.n_max) / math.sqrt(x1)
    tail = np.abs(ladder[:, -1]) / np.abs(ladder).max(axis=1)
    if np.any(tail > TAIL_LIMIT):
        worst = int(np.argmax(tail))
        raise GridTooNarrow(
            f"boundary tail {tail[worst]:.2e} of peak exceeds {TAIL_LIMIT:.0e} for n={worst}"
        )
    return [Wavefunction(grid=x, values=ladder[n], level_index=n)
            for n in range(levels.n_max + 1)]


def default_harmonic_grid(kin: Kinematics, levels: LevelSet, dp: float) -> GridSpec:
    """Channel-aligned grid wide enough for every bound harmonic level."""
    w_min = turning_point(kin, levels.n_max) + 6.0 * oscillator_length(kin)
    return GridSpec.for_channel(dp, w_min)


# ---------------------------------------------------------------------------
# potential models for the general eigensolver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicChannelWell:
    """U(x) = U0*(2x/dp)^2, the unique harmonic well with U(+-dp/2) = U0."""

    U0: float
    dp: float
    kind: str = field(default="harmonic", init=False)
    symmetric: bool = field(default=True, init=False)
    floor: float = field(default=0.0, init=False)   # true well bottom [eV]

    def energy(self, x):
        return self.U0 * np.square(2.0 * np.asarray(x) / self.dp)


@dataclass(frozen=True)
class PoschlTellerWell:
    """U(x) = U0*(1 - sech^2(x/a)): bottom at zero, asymptote U0."""

    U0: float
    a: float
    kind: str = field(default="poschl_teller", init=False)
    symmetric: bool = field(default=True, init=False)
    floor: float = field(default=0.0, init=False)

    def energy(self, x):
        sech = 1.0 / np.cosh(np.asarray(x) / self.a)
        return self.U0 * (1.0 - sech * sech)

    def strength(self, effective_mass: float) -> float:
        """Dimensionless s with s(s+1) = 2*m_eff*U0*a^2/(hbar c)^2."""
        lam = 2.0 * effective_mass * self.U0 * self.a * self.a / HBARC_EV_ANG**2
        return (-1.0 + math.sqrt(1.0 + 4.0 * lam)) / 2.0


@dataclass(frozen=True)
class TabulatedPotential:
    """Potential interpolated linearly from (x [Angstrom], U [eV]) samples."""

    x_table: np.ndarray
    u_table: np.ndarray
    kind: str = field(default="tabulated", init=False)
    symmetric: bool = field(default=False, init=False)

    @property
    def floor(self) -> float:
        return float(self.u_table.min())

    def energy(self, x):
        xa = np.asarray(x, dtype=float)
        if xa.min() < self.x_table[0] or xa.max() > self.x_table[-1]:
            raise GridTooNarrow(
                f"grid [{xa.min():.4f}, {xa.max():.4f}] A exceeds tabulated range "
                f"[{self.x_table[0]:.4f}, {self.x_table[-1]:.4f}] A"
            )
        return np.interp(xa, self.x_table, self.u_table)


def load_tabulated_potential(path) -> TabulatedPotential:
    """Read a two-column (x_Angstrom, U_eV) text table; '#' lines are comments."""
    xs, us = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            xs.append(float(parts[0]))
            us.append(float(parts[1]))
    x = np.asarray(xs)
    u = np.asarray(us)
    if x.size < 2 or np.any(np.diff(x) <= 0):
        raise ValueError(f"{path}: x column must be strictly increasing with >= 2 rows")
    return TabulatedPotential(x_table=x, u_table=u)


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    """Make the leading lobe at largest x positive (fixes matrix-element phases)."""
    big = np.nonzero(np.abs(psi) > 1.0e-6 * np.abs(psi).max())[0]
    if big.size and psi[big[-1]] < 0:
        return -psi
    return psi


def solve_bound_states(pot, kin: Kinematics,
                       grid_spec: GridSpec) -> tuple[LevelSet, list[Wavefunction]]:
    """All bound states of -hbar^2c^2/(2 m_eff) psi'' + U psi = eps psi.

    Three-point finite differences with Dirichlet walls at the grid ends;
    symmetric tridiagonal eigenproblem.  Bound means eps below the potential
    at the lower grid boundary value; levels are reported relative to the
    potential minimum on the grid.

    Raises
    ------
    NoBoundStates
        if nothing lies below the escape threshold.
    ConvergenceFailure
        if the tridiagonal eigen-iteration fails.
    """
    if grid_spec.n_points < 2000:
        raise ValueError("grid must have at least 2000 points")
    x = grid_spec.points()
    u = np.asarray(pot.energy(x), dtype=float)
    # potentials that know their true bottom avoid an O(h^2) reporting bias
    # when the grid has no node at the minimum
    u_min = float(getattr(pot, "floor", u.min()))
    threshold = float(min(u[0], u[-1]))
    if threshold <= u_min:
        raise NoBoundStates("potential does not rise toward the grid boundary")
    h = grid_spec.step
    t = HBARC_EV_ANG**2 / (2.0 * kin.effective_mass * h * h)
    diag = u[1:-1] + 2.0 * t
    off = np.full(grid_spec.n_points - 3, -t)
    try:
        w, v = eigh_tridiagonal(diag, off, select="v",
                                select_range=(u_min - 1.0, threshold))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    if w.size == 0:
        raise NoBoundStates(
            f"no level below the boundary potential {threshold:.4f} eV"
        )
    wavefns = []
    for i in range(w.size):
        psi = np.zeros(grid_spec.n_points)
        psi[1:-1] = v[:, i]
        psi /= math.sqrt(np.trapezoid(psi * psi, x))
        wavefns.append(Wavefunction(grid=x, values=_fix_sign(psi), level_index=i))
    level_set = LevelSet(
        model_tag="numeric",
        omega_osc=None,
        effective_mass=kin.effective_mass,
        levels=w - u_min,
        n_max=w.size - 1,
        well_depth=threshold - u_min,
    )
    return level_set, wavefns


# ---------------------------------------------------------------------------
# dipole matrix elements
# ---------------------------------------------------------------------------

def _require_same_grid(psi_a: Wavefunction, psi_b: Wavefunction) -> None:
    if psi_a.grid is psi_b.grid:
        return
    if psi_a.grid.shape != psi_b.grid.shape or not np.array_equal(psi_a.grid, psi_b.grid):
        raise GridMismatch("wavefunctions sampled on different grids")


def dipole_matrix_element(psi_a: Wavefunction, psi_b: Wavefunction) -> float:
    """Trapezoid value of the coordinate matrix element <a|x|b> [Angstrom].

    The integrand is formed as (psi_a*psi_b)*x, so swapping the operands
    returns a bitwise-identical value.
    """
    _require_same_grid(psi_a, psi_b)
    integrand = (psi_a.values * psi_b.values) * psi_a.grid
    return float(np.trapezoid(integrand, psi_a.grid))


def dipole_matrix(wavefns: list[Wavefunction]) -> np.ndarray:
    """Full symmetric matrix of <i|x|j> over a shared grid."""
    for w in wavefns[1:]:
        _require_same_grid(wavefns[0], w)
    x = wavefns[0].grid
    psi = np.vstack([w.values for w in wavefns])
    h = x[1] - x[0]
    weights = np.full(x.size, h)
    weights[0] = weights[-1] = h / 2.0
    mat = psi @ ((psi * (weights * x)).T)
    return (mat + mat.T) / 2.0


def harmonic_dipole_matrix(levels: LevelSet, kin: Kinematics) -> np.ndarray:
    """Closed-form <n-1|x|n> = sqrt(n)*x1/sqrt(2); every other entry exactly zero."""
    x1 = oscillator_length(kin)
    n = levels.n_max + 1
    mat = np.zeros((n, n))
    vals = np.sqrt(np.arange(1, n)) * x1 / math.sqrt(2.0)
    idx = np.arange(n - 1)
    mat[idx, idx + 1] = vals
    mat[idx + 1, idx] = vals
    return mat
