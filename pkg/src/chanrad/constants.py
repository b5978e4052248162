"""Unit system: energies in eV, lengths in Angstrom, angles in rad.

Every natural-units conversion goes through HBARC_EV_ANG; no other
conversion constant appears anywhere in the package.
"""

HBARC_EV_ANG = 1973.269804       # hbar*c [eV*Angstrom]
ELECTRON_MASS_EV = 510998.95     # electron rest energy [eV]
