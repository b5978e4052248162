"""Command-line interface.

    chanrad <subcommand> --config <path> [--out <prefix>] [--workers N]

Subcommands: levels, populate, lines, spectrum, peaks, validate.
Exit codes: 0 success, 1 usage/config error, 2 physics precondition error,
3 validation failure.
"""

from __future__ import annotations

import argparse
import sys

from . import csvio, validation
from .config import parse_config, with_overrides
from .errors import ChannelingError, ConfigError, IoFailure
from .pipeline import build_problem, omega_axis, theta_axis
from .spectrum import build_spectrum_grid, find_peaks


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="chanrad",
                     description="Channeling-radiation spectra: incoherent vs "
                                 "coherent transition sums.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, text in (
        ("levels", "write the transverse level ladder"),
        ("populate", "write the complex entry amplitudes"),
        ("lines", "write the radiative transition lines"),
        ("spectrum", "write both intensity fields on the (theta, omega) grid"),
        ("peaks", "write per-angle spectral peaks of the coherent field"),
        ("validate", "run the verification suite"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=(name != "validate"),
                         help="path to a key = value run configuration")
        cmd.add_argument("--out", default=None, help="output path prefix")
        cmd.add_argument("--workers", type=int, default=None,
                         help="worker threads for grid evaluation")
    return parser


def _load_config(args):
    with open(args.config, "r", encoding="utf-8") as fh:
        run = parse_config(fh.read())
    return with_overrides(run, out_prefix=args.out, workers=args.workers)


def _cmd_levels(run):
    prob = build_problem(run)
    rows = [(n, float(e)) for n, e in enumerate(prob.levels.levels)]
    path = run.out_prefix + "levels.csv"
    csvio.write_csv(path, ["n", "energy_eV"], rows)
    print(f"wrote {path} ({len(rows)} levels)")


def _cmd_populate(run):
    prob = build_problem(run)
    if prob.populations.low_capture:
        print(f"note: captured fraction "
              f"{prob.populations.captured_fraction:.4f} < 0.9", file=sys.stderr)
    rows = [(n, c.real, c.imag, abs(c) ** 2)
            for n, c in enumerate(prob.populations.amplitudes)]
    path = run.out_prefix + "populations.csv"
    csvio.write_csv(path, ["n", "re_c", "im_c", "abs2_c"], rows)
    print(f"wrote {path} (captured fraction "
          f"{prob.populations.captured_fraction:.6f})")


def _cmd_lines(run):
    prob = build_problem(run)
    rows = [(l.n_initial, l.n_final, l.delta_eps, l.amplitude.real, l.amplitude.imag)
            for l in prob.lines]
    path = run.out_prefix + "lines.csv"
    csvio.write_csv(path, ["n_initial", "n_final", "delta_eps_eV", "re_amp", "im_amp"],
                    rows)
    print(f"wrote {path} ({len(rows)} lines)")


def _make_grid(run):
    prob = build_problem(run)
    grid = build_spectrum_grid(prob.lines, prob.kin, theta_axis(run),
                               omega_axis(run), kernel=run.kernel,
                               workers=run.workers)
    return prob, grid


def _cmd_spectrum(run):
    _, grid = _make_grid(run)
    path = run.out_prefix + "spectrum.csv"
    csvio.write_csv(path, ["theta_rad", "omega_eV", "I_incoherent_arb",
                           "I_coherent_arb", "ratio"], csvio.spectrum_rows(grid))
    print(f"wrote {path} ({grid.theta_axis.size * grid.omega_axis.size} cells)")


def _cmd_peaks(run):
    _, grid = _make_grid(run)
    rows = []
    for i, theta in enumerate(grid.theta_axis):
        for rank, (omega, height) in enumerate(
                find_peaks(grid.omega_axis, grid.I_coherent[i]), start=1):
            rows.append((float(theta), omega, height, rank))
    path = run.out_prefix + "peaks.csv"
    csvio.write_csv(path, ["theta_rad", "omega_eV", "height_arb", "rank"], rows)
    print(f"wrote {path} ({len(rows)} peaks)")


_COMMANDS = {
    "levels": _cmd_levels,
    "populate": _cmd_populate,
    "lines": _cmd_lines,
    "spectrum": _cmd_spectrum,
    "peaks": _cmd_peaks,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.subcommand == "validate":
        return validation.run_all()
    try:
        run = _load_config(args)
    except OSError as exc:
        print(f"chanrad: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"chanrad: {exc}", file=sys.stderr)
        return 1
    try:
        _COMMANDS[args.subcommand](run)
    except ChannelingError as exc:
        print(f"chanrad: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, IoFailure) as exc:
        print(f"chanrad: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
