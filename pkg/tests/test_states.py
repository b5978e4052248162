"""Level ladders, eigensolver vs closed forms, dipole matrix elements."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chanrad.constants import HBARC_EV_ANG
from chanrad.errors import EmptyWell, GridMismatch, GridTooNarrow, NoBoundStates
from chanrad.states import (
    GridSpec,
    HarmonicChannelWell,
    PoschlTellerWell,
    TabulatedPotential,
    dipole_matrix,
    dipole_matrix_element,
    harmonic_dipole_matrix,
    harmonic_levels,
    harmonic_wavefunction,
    harmonic_wavefunctions,
    load_tabulated_potential,
    oscillator_length,
    solve_bound_states,
    turning_point,
)

# frozen reference values (50-digit decimal arithmetic)
X1_REF = 0.09398085541688809          # oscillator length [A]
X1_OVER_SQRT2 = 0.06645450016699405   # ground-state rms width [A]
EPS0_REF = 0.22042667887637862        # eV

SOLVER_RTOL = 1.0e-4
PT_WIDTH = 0.0458                     # Poschl-Teller scale [A]


def pt_exact_levels(well, m_eff):
    """Closed-form Poschl-Teller spectrum, shifted so the bottom is zero:
    eps_n = U0 - (hbar c)^2 (s - n)^2 / (2 m_eff a^2)."""
    lam = 2.0 * m_eff * well.U0 * well.a**2 / HBARC_EV_ANG**2
    s = (-1.0 + math.sqrt(1.0 + 4.0 * lam)) / 2.0
    n = np.arange(int(math.floor(s)) + 1)
    return well.U0 - HBARC_EV_ANG**2 * (s - n) ** 2 / (2.0 * m_eff * well.a**2)


@pytest.fixture(scope="module")
def grid(ref_kin):
    levels = harmonic_levels(ref_kin, 23.0)
    w_min = turning_point(ref_kin, levels.n_max) + 6.0 * oscillator_length(ref_kin)
    return GridSpec.for_channel(1.92, w_min)


@pytest.fixture(scope="module")
def wavefns(ref_kin, grid):
    return harmonic_wavefunctions(harmonic_levels(ref_kin, 23.0), ref_kin, grid)


class TestHarmonicLevels:
    def test_reference_ladder(self, ref_kin):
        levels = harmonic_levels(ref_kin, 23.0)
        assert levels.n_max == 51
        assert abs(levels.levels[0] / EPS0_REF - 1.0) < 1e-15
        assert levels.model_tag == "harmonic"
        assert levels.well_depth == 23.0

    def test_construction_is_the_definition(self, ref_kin):
        levels = harmonic_levels(ref_kin, 23.0)
        expected = ref_kin.omega_osc * (np.arange(52) + 0.5)
        assert np.array_equal(levels.levels, expected)

    def test_equidistance(self, ref_kin):
        levels = harmonic_levels(ref_kin, 23.0)
        gaps = np.diff(levels.levels)
        # constructed ladder: gaps equal Omega to the last few ulp
        assert_allclose(gaps, ref_kin.omega_osc, rtol=1e-14)

    def test_all_below_depth(self, ref_kin):
        levels = harmonic_levels(ref_kin, 23.0)
        assert np.all(np.diff(levels.levels) > 0)
        assert levels.levels[-1] < levels.well_depth

    def test_empty_well(self, ref_kin):
        with pytest.raises(EmptyWell):
            harmonic_levels(ref_kin, ref_kin.omega_osc / 4.0)


class TestHarmonicWavefunctions:
    def test_ground_state_rms_width(self, ref_kin, wavefns):
        psi0 = wavefns[0]
        var = np.trapezoid(psi0.values**2 * psi0.grid**2, psi0.grid)
        assert abs(math.sqrt(var) / X1_OVER_SQRT2 - 1.0) < 1e-9

    def test_first_excited_node_at_origin(self, ref_kin, grid):
        psi1 = harmonic_wavefunction(1, ref_kin, grid)
        center = grid.n_points // 2
        assert psi1.grid[center] == 0.0
        assert psi1.values[center] == 0.0

    @pytest.mark.parametrize("n", [0, 10, 51])
    def test_normalization(self, n, wavefns):
        psi = wavefns[n]
        norm = np.trapezoid(psi.values**2, psi.grid)
        assert abs(norm - 1.0) < 1e-10

    @pytest.mark.parametrize("n", [0, 1, 17, 51])
    def test_parity(self, n, wavefns):
        psi = wavefns[n]
        peak = np.abs(psi.values).max()
        sym = psi.values[::-1] - (-1) ** n * psi.values
        assert np.abs(sym).max() < 1e-10 * peak

    def test_leading_lobe_positive(self, wavefns):
        for psi in wavefns:
            big = np.nonzero(np.abs(psi.values) > 1e-6 * np.abs(psi.values).max())[0]
            assert psi.values[big[-1]] > 0

    def test_grid_too_narrow(self, ref_kin):
        with pytest.raises(GridTooNarrow):
            harmonic_wavefunction(51, ref_kin, GridSpec.uniform(0.9, 4001))

    def test_turning_point_inside_channel(self, ref_kin):
        # containment: harmonic well reaching U0 at the planes keeps every
        # bound turning point inside dp/2
        assert turning_point(ref_kin, 51) < 1.92 / 2.0


class TestEigensolver:
    def test_harmonic_first_20(self, ref_kin):
        well = HarmonicChannelWell(U0=23.0, dp=1.92)
        levels, wfs = solve_bound_states(well, ref_kin, GridSpec.uniform(1.0, 4000))
        exact = ref_kin.omega_osc * (np.arange(20) + 0.5)
        assert_allclose(levels.levels[:20], exact, rtol=SOLVER_RTOL)
        assert levels.model_tag == "numeric"
        assert levels.omega_osc is None

    def test_h_squared_convergence(self, ref_kin):
        well = HarmonicChannelWell(U0=23.0, dp=1.92)
        exact = ref_kin.omega_osc * (np.arange(20) + 0.5)
        errs = []
        for n_pts in (4000, 7999):
            levels, _ = solve_bound_states(well, ref_kin, GridSpec.uniform(1.0, n_pts))
            errs.append(np.abs(levels.levels[:20] - exact))
        ratio = errs[0] / errs[1]
        assert np.all((ratio > 3.5) & (ratio < 4.5))

    def test_poschl_teller_levels(self, ref_kin):
        well = PoschlTellerWell(U0=23.0, a=PT_WIDTH)
        exact = pt_exact_levels(well, ref_kin.effective_mass)
        levels, _ = solve_bound_states(well, ref_kin, GridSpec.uniform(1.095, 4000))
        assert levels.n_max + 1 == exact.size
        assert_allclose(levels.levels, exact, rtol=SOLVER_RTOL)
        # escape threshold: the boundary value of U, here U0 to double precision
        assert levels.well_depth <= well.U0
        assert levels.levels[-1] < levels.well_depth

    def test_poschl_teller_gaps_distinct(self, ref_kin):
        well = PoschlTellerWell(U0=23.0, a=PT_WIDTH)
        exact = pt_exact_levels(well, ref_kin.effective_mass)
        gaps = np.diff(exact)
        assert np.unique(np.round(gaps, 9)).size == gaps.size

    def test_parities_alternate(self, ref_kin):
        well = PoschlTellerWell(U0=23.0, a=PT_WIDTH)
        _, wfs = solve_bound_states(well, ref_kin, GridSpec.uniform(1.095, 4001))
        for n, psi in enumerate(wfs):
            peak = np.abs(psi.values).max()
            sym = psi.values[::-1] - (-1) ** n * psi.values
            assert np.abs(sym).max() < 1e-10 * peak

    def test_normalized_and_sign_fixed(self, ref_kin):
        well = PoschlTellerWell(U0=23.0, a=PT_WIDTH)
        _, wfs = solve_bound_states(well, ref_kin, GridSpec.uniform(1.095, 4000))
        for psi in wfs:
            assert abs(np.trapezoid(psi.values**2, psi.grid) - 1.0) < 1e-10
            big = np.nonzero(np.abs(psi.values) > 1e-6 * np.abs(psi.values).max())[0]
            assert psi.values[big[-1]] > 0

    def test_no_bound_states(self, ref_kin):
        flat = TabulatedPotential(x_table=np.linspace(-2, 2, 9),
                                  u_table=np.zeros(9))
        with pytest.raises(NoBoundStates):
            solve_bound_states(flat, ref_kin, GridSpec.uniform(1.5, 2001))

    def test_grid_minimum_size(self, ref_kin):
        well = HarmonicChannelWell(U0=23.0, dp=1.92)
        with pytest.raises(ValueError):
            solve_bound_states(well, ref_kin, GridSpec.uniform(1.0, 1999))


class TestTabulated:
    def test_round_trip(self, tmp_path, ref_kin):
        x = np.linspace(-1.3, 1.3, 2401)
        u = 23.0 * (2.0 * x / 1.92) ** 2
        path = tmp_path / "well.txt"
        lines = ["# x_A  U_eV"] + [f"{xi:.17g} {ui:.17g}" for xi, ui in zip(x, u)]
        path.write_text("\n".join(lines))
        pot = load_tabulated_potential(path)
        levels, _ = solve_bound_states(pot, ref_kin, GridSpec.uniform(1.25, 5001))
        exact = ref_kin.omega_osc * (np.arange(10) + 0.5)
        assert_allclose(levels.levels[:10], exact, rtol=5e-4)

    def test_rejects_non_increasing(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0.0 1.0\n0.0 2.0\n")
        with pytest.raises(ValueError):
            load_tabulated_potential(path)

    def test_rejects_wrong_columns(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0.0 1.0 2.0\n")
        with pytest.raises(ValueError):
            load_tabulated_potential(path)

    def test_grid_beyond_table(self, ref_kin):
        pot = TabulatedPotential(x_table=np.linspace(-1, 1, 11),
                                 u_table=np.linspace(0, 1, 11))
        with pytest.raises(GridTooNarrow):
            pot.energy(np.asarray([1.5]))


class TestDipole:
    def test_closed_form_0_1(self, wavefns):
        val = dipole_matrix_element(wavefns[0], wavefns[1])
        assert abs(val / X1_OVER_SQRT2 - 1.0) < 1e-6

    def test_parity_forbidden_0_2(self, wavefns):
        val = dipole_matrix_element(wavefns[0], wavefns[2])
        assert abs(val) < 1e-10 * X1_REF

    def test_sqrt_ladder(self, wavefns):
        base = dipole_matrix_element(wavefns[0], wavefns[1])
        for n in (2, 7, 20, 51):
            val = dipole_matrix_element(wavefns[n - 1], wavefns[n])
            assert abs(val / (base * math.sqrt(n)) - 1.0) < 1e-6

    def test_symmetry_bitwise(self, wavefns):
        assert dipole_matrix_element(wavefns[3], wavefns[4]) == \
            dipole_matrix_element(wavefns[4], wavefns[3])

    def test_grid_mismatch(self, ref_kin, wavefns):
        other = harmonic_wavefunction(0, ref_kin, GridSpec.uniform(1.6, 12001))
        with pytest.raises(GridMismatch):
            dipole_matrix_element(wavefns[0], other)

    def test_matrix_matches_elementwise(self, wavefns):
        mat = dipole_matrix(wavefns[:8])
        for i in range(8):
            for j in range(8):
                elem = dipole_matrix_element(wavefns[i], wavefns[j])
                assert abs(mat[i, j] - elem) < 1e-12 * X1_REF + 1e-12 * abs(elem)

    def test_equal_parity_block_vanishes(self, wavefns):
        mat = dipole_matrix(wavefns[:21])
        idx = np.arange(21)
        same = (idx[:, None] + idx[None, :]) % 2 == 0
        assert np.abs(mat[same]).max() < 1e-10 * X1_REF

    def test_analytic_matrix(self, ref_kin, wavefns):
        levels = harmonic_levels(ref_kin, 23.0)
        mat = harmonic_dipole_matrix(levels, ref_kin)
        assert mat.shape == (52, 52)
        assert mat[0, 1] == mat[1, 0]
        assert abs(mat[0, 1] / X1_OVER_SQRT2 - 1.0) < 1e-15
        # quadrature agrees with the closed form
        quad = dipole_matrix(wavefns)
        sub = slice(0, 21)
        assert_allclose(quad[sub, sub], mat[sub, sub], atol=1e-10 * X1_REF, rtol=1e-6)
