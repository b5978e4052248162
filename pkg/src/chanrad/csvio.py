"""Bit-exact CSV emission: 17 significant digits, atomic writes."""

from __future__ import annotations

import os
import tempfile

from .errors import IoFailure

UNIT_NOTE = ("units: energies in eV, angles in rad, lengths in Angstrom; "
             "intensities in arbitrary units")


def format_value(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return f"{value:.17g}"


def render_csv(columns, rows) -> str:
    out = ["# " + ",".join(columns), "# " + UNIT_NOTE]
    for row in rows:
        out.append(",".join(format_value(v) for v in row))
    return "\n".join(out) + "\n"


def write_csv(path, columns, rows) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    text = render_csv(columns, rows)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc


def spectrum_rows(grid):
    """Row iterator for spectrum.csv: theta outer, omega inner."""
    for i, theta in enumerate(grid.theta_axis):
        for j, omega in enumerate(grid.omega_axis):
            yield (float(theta), float(omega), float(grid.I_incoherent[i, j]),
                   float(grid.I_coherent[i, j]), float(grid.ratio[i, j]))
