import math

import numpy as np
import pytest

from ionscope.curvekit import load_curve
from ionscope.rovib import reduced_mass
from ionscope.units import HARTREE_TO_CM, cm_to_hartree

MU_LISR = reduced_mass("6Li", "87Sr")

# (Re bohr, De cm^-1, we cm^-1, dissociation energy hartree) per ASr+ state
X_STATES = {
    "Li": (6.37, 11126, 246, -0.61548),
    "Na": (6.92, 8330, 121, -0.61548),
    "K": (7.86, 4977, 81, -0.61548),
    "Rb": (8.49, 3638, 55, -0.61548),
    "Cs": (9.05, 2714, 44, -0.61548),
}
A3_STATES = {
    "Li": (7.48, 4865, 163, -0.60350),
    "Na": (8.03, 4363, 83, -0.594215),
    "K": (8.75, 6427, 65, -0.56487),
    "Rb": (9.41, 6121, 48, -0.55886),
    "Cs": (9.90, 7003, 41, -0.54845),
}
ISOTOPES = {"Li": "6Li", "Na": "23Na", "K": "39K", "Rb": "85Rb", "Cs": "133Cs"}
# LiSr+ excited states used for the photoassociation surrogate set
LISR_A = (15.33, 277, 35.4, -0.60350)  # (2)1Sigma+
LISR_D = (6.64, 2460, 198, -0.53559)  # (2)1Pi


def make_curve(fn, R, species="test", state="X", asym=0.0, **meta):
    R = np.asarray(R, dtype=float)
    return load_curve(
        np.column_stack([R, fn(R)]), dict(species=species, state=state, asymptote_energy=asym, **meta)
    )


def morse_a(De_cm, we_cm, mu):
    """Range parameter giving harmonic wavenumber ``we_cm`` for depth ``De_cm``."""
    D = cm_to_hartree(De_cm)
    return (we_cm / HARTREE_TO_CM) / math.sqrt(2 * D / mu)


def morse_fn(D, a, Re, asym=0.0):
    return lambda R: asym + D * ((1 - np.exp(-a * (R - Re))) ** 2 - 1)


def morse_levels(D, a, mu, nmax):
    w = a * math.sqrt(2 * D / mu)
    return np.array([-D + w * (v + 0.5) - w * w / (4 * D) * (v + 0.5) ** 2 for v in range(nmax)])


def table_morse(state, consts, mu, species="ASr+", R=None):
    Re, De, we, asym = consts
    if R is None:
        R = np.linspace(3.0, 80.0, 3000)
    D = cm_to_hartree(De)
    return make_curve(morse_fn(D, morse_a(De, we, mu), Re, asym), R, species, state, asym)


@pytest.fixture(scope="session")
def lisr_set():
    R = np.linspace(3.0, 80.0, 3000)
    return (
        table_morse("X", X_STATES["Li"], MU_LISR, "LiSr+", R),
        table_morse("(2)1Sigma+", LISR_A, MU_LISR, "LiSr+", R),
        table_morse("(2)1Pi", LISR_D, MU_LISR, "LiSr+", R),
    )


@pytest.fixture(scope="session")
def harmonic():
    """V = mu w^2 (R - 10)^2 / 2 with w = 1e-3, mu = 1000."""
    mu, w = 1000.0, 1e-3
    R = np.linspace(2.0, 18.0, 1601)
    return make_curve(lambda r: 0.5 * mu * w * w * (r - 10.0) ** 2, R, asym=0.02), mu, w


MORSE_D, MORSE_A, MORSE_RE = 0.0507, 0.85, 6.37


@pytest.fixture(scope="session")
def morse_curve():
    R = np.arange(3.0, 30.0 + 1e-9, 0.05)
    return make_curve(morse_fn(MORSE_D, MORSE_A, MORSE_RE), R, "LiSr+", "X")


def double_well_fn():
    base = morse_fn(MORSE_D, MORSE_A, MORSE_RE)
    return lambda R: base(R) + 0.003 * np.exp(-((R - 9.8) ** 2) / (2 * 0.25))


@pytest.fixture(scope="session")
def double_well():
    R = np.arange(3.0, 30.0 + 1e-9, 0.05)
    return make_curve(double_well_fn(), R, "LiSr+", "DW")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
