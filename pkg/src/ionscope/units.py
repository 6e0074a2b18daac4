"""Physical constants and unit conversions.

Everything inside the package works in hartree / bohr / electron masses.
Conversions to cm^-1, Debye or seconds happen only when values are presented.
"""

HARTREE_TO_CM = 219474.63137054  # cm^-1 per hartree (2 R_inf)
BOHR_TO_NM = 0.052917720859
DEBYE_PER_AU = 2.54158
AU_TIME_S = 2.4188843265e-17  # seconds per atomic unit of time
FINE_STRUCTURE = 7.2973525693e-3
AMU_TO_ME = 1822.888486209  # electron masses per unified atomic mass unit
KELVIN_TO_HARTREE = 3.1668115634556e-6  # k_B in hartree / K


def hartree_to_cm(e):
    return e * HARTREE_TO_CM


def cm_to_hartree(e):
    return e / HARTREE_TO_CM


def au_to_debye(d):
    return d * DEBYE_PER_AU
