"""Dipole-moment functions, Franck-Condon overlaps, Einstein coefficients and
photoassociation / stabilization pathway search.

Axis convention: atom A (the alkali, first isotope label) sits at z = 0 and
atom B (strontium, second label) at z = R.  A dipole d = sum_i q_i (z_i - z0)
is therefore positive when electron density is in excess on A.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from . import _numerov, fileio
from .config import DEFAULTS
from .errors import (
    DomainError,
    FrameError,
    GridOverlapError,
    InsufficientDataError,
    PairingError,
)
from .rovib import bound_levels, default_isotopes, effective_potential, solver_grid
from .units import (
    AU_TIME_S,
    FINE_STRUCTURE,
    HARTREE_TO_CM,
    KELVIN_TO_HARTREE,
    cm_to_hartree,
)

DIPOLE_UNITS = "bohr au"
AMPLITUDE_NOISE = 1e-9  # |overlap| / integral of |integrand|


@dataclass(frozen=True)
class Frame:
    """Origin of the body-fixed frame along the internuclear axis.

    ``kind`` is one of ``"com"`` (needs ``isotopes=(A, B)``), ``"mid-bond"``,
    ``"atom-a"`` or ``"atom-b"``.
    """

    kind: str
    isotopes: tuple | None = None

    def fraction(self, table=None):
        """Origin position as a fraction of R measured from atom A."""
        if self.kind == "atom-a":
            return 0.0
        if self.kind == "atom-b":
            return 1.0
        if self.kind == "mid-bond":
            return 0.5
        if self.kind == "com":
            if not self.isotopes or len(self.isotopes) != 2:
                raise FrameError("center-of-mass frame needs an isotope pair")
            table = default_isotopes() if table is None else table
            ma, mb = table[self.isotopes[0]], table[self.isotopes[1]]
            return mb / (ma + mb)
        raise FrameError(f"unknown frame '{self.kind}'")

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text.startswith("com:"):
            pair = tuple(p.strip() for p in re.split(r"[,\-]", text[4:]))
            if len(pair) != 2 or not all(pair):
                raise FrameError(f"bad center-of-mass frame '{text}' (want com:A-B)")
            return cls("com", pair)
        if text in ("mid-bond", "atom-a", "atom-b"):
            return cls(text)
        raise FrameError(f"unknown frame descriptor '{text}'")

    def __str__(self):
        return f"com:{'-'.join(self.isotopes)}" if self.kind == "com" else self.kind


@dataclass(frozen=True)
class DipoleFunction:
    species: str
    bra_state: str
    ket_state: str
    R: np.ndarray
    d: np.ndarray
    origin: Frame
    total_charge: int = 1
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        R = np.array(self.R, dtype=float)
        d = np.array(self.d, dtype=float)
        if R.ndim != 1 or R.shape != d.shape or len(R) < 2:
            raise DomainError("dipole needs matching 1-D R and d arrays")
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(d))):
            raise DomainError("dipole values must be finite")
        bad = np.flatnonzero(np.diff(R) <= 0)
        if bad.size:
            raise DomainError(f"non-monotonic at index {bad[0] + 1}")
        R.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "d", d)
        if isinstance(self.origin, str):
            object.__setattr__(self, "origin", Frame.parse(self.origin))
        kind = "not-a-knot" if len(R) >= 4 else "natural"
        object.__setattr__(self, "_spline", CubicSpline(R, d, bc_type=kind))

    @property
    def is_permanent(self):
        return self.bra_state == self.ket_state

    def evaluate(self, R):
        """Spline inside the tabulated range, linear continuation outside."""
        R = np.asarray(R, dtype=float)
        out = self._spline(np.clip(R, self.R[0], self.R[-1]))
        lo, hi = R < self.R[0], R > self.R[-1]
        if np.any(lo):
            out = np.where(lo, self.d[0] + self._spline(self.R[0], 1) * (R - self.R[0]), out)
        if np.any(hi):
            out = np.where(hi, self.d[-1] + self._spline(self.R[-1], 1) * (R - self.R[-1]), out)
        return out


def constant_dipole(value, species="", bra_state="", ket_state="", R_range=(0.1, 1e4)):
    R = np.linspace(R_range[0], R_range[1], 4)
    return DipoleFunction(species, bra_state, ket_state, R, np.full(4, float(value)), Frame("mid-bond"))


def read_dipole(path):
    header, rows, _ = fileio.read_table(path, 2)
    fileio.check_units(header, path, DIPOLE_UNITS)
    try:
        charge = int(fileio.require(header, "total_charge", path))
    except ValueError:
        raise fileio.ParseError(path, 1, "total_charge must be an integer") from None
    if len(rows) < 2:
        raise fileio.ParseError(path, 1, "need at least two data rows")
    pts = np.asarray(rows)
    try:
        return DipoleFunction(
            species=fileio.require(header, "species", path),
            bra_state=fileio.require(header, "bra_state", path),
            ket_state=fileio.require(header, "ket_state", path),
            R=pts[:, 0],
            d=pts[:, 1],
            origin=Frame.parse(fileio.require(header, "origin", path)),
            total_charge=charge,
        )
    except (DomainError, FrameError) as exc:
        raise fileio.ParseError(path, 1, str(exc)) from None


def write_dipole(dip, path):
    header = {
        "species": dip.species,
        "bra_state": dip.bra_state,
        "ket_state": dip.ket_state,
        "origin": str(dip.origin),
        "total_charge": str(dip.total_charge),
        "units": DIPOLE_UNITS,
    }
    fileio.write_table(path, header, zip(dip.R, dip.d), fmt="%.17g")


def shift_dipole_origin(d, new_origin, table=None):
    """Re-express a dipole function about a different origin.

    For a permanent dipole of a system with charge q, d'(R) = d(R) + q * dz(R) with
    dz = z0_old - z0_new.  Transition dipoles are origin independent (orthogonal
    states), so only the frame label changes.
    """
    if isinstance(new_origin, str):
        new_origin = Frame.parse(new_origin)
    dz_per_R = d.origin.fraction(table) - new_origin.fraction(table)
    values = d.d
    if d.is_permanent and d.total_charge != 0:
        values = d.d + d.total_charge * dz_per_R * d.R
    return replace(d, d=values, origin=new_origin)


def asymptotic_pdm_slope(d, R_fit_min):
    """Least-squares slope of d(R) over points with R >= ``R_fit_min``."""
    mask = d.R >= R_fit_min
    if mask.sum() < 4:
        raise InsufficientDataError(
            f"need >= 4 dipole points beyond R={R_fit_min}, found {int(mask.sum())}"
        )
    slope, _ = np.polyfit(d.R[mask], d.d[mask], 1)
    return float(slope)


def _on_common_grid(a, b):
    if a.R is b.R or (a.R.shape == b.R.shape and np.array_equal(a.R, b.R)):
        return a.R, a.psi, b.psi
    lo, hi = max(a.R[0], b.R[0]), min(a.R[-1], b.R[-1])
    if lo >= hi:
        raise GridOverlapError(
            f"wavefunction grids [{a.R[0]}, {a.R[-1]}] and [{b.R[0]}, {b.R[-1]}] do not overlap"
        )
    step = min(a.R[1] - a.R[0], b.R[1] - b.R[0])
    start, stop = min(a.R[0], b.R[0]), max(a.R[-1], b.R[-1])
    R = np.linspace(start, stop, int(math.ceil((stop - start) / step)) + 1)

    def resample(level):
        out = np.zeros_like(R)
        inside = (R >= level.R[0]) & (R <= level.R[-1])
        out[inside] = CubicSpline(level.R, level.psi)(R[inside])
        return out

    return R, resample(a), resample(b)


def matrix_element(psi_lower, psi_upper, d=None):
    """<psi_lower| d(R) |psi_upper> by trapezoidal quadrature (d = 1 when None)."""
    R, a, b = _on_common_grid(psi_lower, psi_upper)
    dR = 1.0 if d is None else d.evaluate(R)
    return float(trapezoid(a * dR * b, R))


def franck_condon(psi_lower, psi_upper):
    return matrix_element(psi_lower, psi_upper) ** 2


def fcf_matrix(lowers, uppers):
    """FCF[i, j] between ``lowers[i]`` and ``uppers[j]``."""
    return np.array([[franck_condon(lo, up) for up in uppers] for lo in lowers])


def einstein_A(delta_E, dme):
    """Spontaneous emission rate (s^-1) for transition energy ``delta_E`` (hartree)
    and dipole matrix element ``dme`` (a.u.): A = 4/3 alpha^3 dE^3 |d|^2."""
    if not delta_E > 0:
        raise DomainError(f"transition energy must be positive, got {delta_E}")
    return 4.0 / 3.0 * FINE_STRUCTURE**3 * delta_E**3 * abs(dme) ** 2 / AU_TIME_S


@dataclass(frozen=True)
class DecayChannel:
    target_state: str
    v: int
    energy: float  # hartree
    rate: float  # s^-1
    fcf: float
    fraction: float


@dataclass(frozen=True)
class DecayBranching:
    channels: tuple
    total_rate: float
    bound_fraction: float
    continuum_fraction: float
    fcf_sums: dict


def decay_branching(upper_level, targets):
    """Branching of ``upper_level`` into the bound levels of each target.

    ``targets`` is a sequence of ``(state_label, levels, tdm)``.  The decay into a
    target's continuum is estimated by closure: (1 - sum of bound FCFs) times the
    bound-bound rate per unit FCF for that target.
    """
    rows = []
    cont_rate = 0.0
    fcf_sums = {}
    for label, levels, tdm in targets:
        rates, fcfs = [], []
        for lo in levels:
            overlap = matrix_element(lo, upper_level)
            fcf = overlap * overlap
            fcfs.append(fcf)
            dE = upper_level.E - lo.E
            if dE <= 0:
                continue
            rate = einstein_A(dE, matrix_element(lo, upper_level, tdm))
            rates.append(rate)
            rows.append((label, lo.v, lo.E, rate, fcf))
        fcf_total = float(sum(fcfs))
        fcf_sums[label] = fcf_total
        accessible = sum(r[4] for r in rows if r[0] == label)
        if accessible > 0:
            per_fcf = sum(rates) / accessible
            cont_rate += max(0.0, 1.0 - fcf_total) * per_fcf
    bound_rate = sum(r[3] for r in rows)
    total = bound_rate + cont_rate
    if total <= 0:
        return DecayBranching((), 0.0, 0.0, 0.0, fcf_sums)
    channels = tuple(DecayChannel(lab, v, e, rate, fcf, rate / total) for lab, v, e, rate, fcf in rows)
    return DecayBranching(channels, total, bound_rate / total, cont_rate / total, fcf_sums)


def continuum_wavefunction(curve, mu, collision_energy, R, J=0):
    """Energy-normalized scattering function at ``collision_energy`` above the asymptote.

    Outward Numerov from the inner edge of ``R``; the amplitude is fixed from the
    local WKB wavenumber over the outer tenth of the grid so that psi behaves as
    sqrt(2 mu / (pi k)) sin(kR + delta).
    """
    R = np.asarray(R, dtype=float)
    E = curve.asymptote_energy + collision_energy
    V = effective_potential(curve, mu, J, R)
    h = R[1] - R[0]
    c = h * h * 2.0 * mu / 12.0
    F = _numerov.outward(V, E, c, len(R) - 1)
    y = F / (1.0 - c * (V - E))
    k = np.sqrt(2 * mu * np.clip(E - V, 1e-300, None))
    dy = np.gradient(y, h)
    tail = slice(int(0.9 * len(R)), len(R) - 1)
    amp = np.sqrt(y[tail] ** 2 + (dy[tail] / k[tail]) ** 2) * np.sqrt(k[tail])
    target = math.sqrt(2 * mu / math.pi)
    return y * target / float(np.median(amp))


@dataclass(frozen=True)
class PAScheme:
    lower_state: str
    upper_state: str
    v: int
    J: int
    level_energy: float  # hartree
    detuning_cm1: float  # level energy relative to the upper asymptote (negative = red)
    R_window: tuple  # bohr
    amplitude: float
    decay: tuple  # DecayChannel records
    bound_fraction: float
    continuum_fraction: float
    score: float


def _find_tdm(tdms, a, b):
    for d in tdms:
        if {d.bra_state, d.ket_state} == {a, b} and (a != b or d.is_permanent):
            return d
    raise PairingError(f"no transition dipole between '{a}' and '{b}'")


def _window(detuning_window):
    if np.ndim(detuning_window) == 0:
        w = abs(float(detuning_window))
        return (-w, 0.0)
    lo, hi = detuning_window
    return (min(lo, hi), max(lo, hi))


def shared_grid(curves, mu, J=0, **grid_kw):
    """Uniform grid fine and wide enough for the bound levels of every curve."""
    grids = [solver_grid(c, mu, J, **grid_kw) for c in curves]
    step = min(g[1] - g[0] for g in grids)
    lo = max(min(g[0] for g in grids), max(c.R[0] for c in curves))
    hi = min(max(g[-1] for g in grids), min(c.r_max for c in curves))
    return lo + step * np.arange(int(math.floor((hi - lo) / step)) + 1)


def pa_pathways(
    lower,
    uppers,
    tdms,
    mu,
    detuning_window,
    targets=None,
    J=0,
    temperature_K=DEFAULTS.pa_temperature_K,
    grid=None,
):
    """Rank photoassociation + spontaneous-decay schemes.

    Parameters
    ----------
    lower : PotentialCurve
        Entrance channel of the colliding pair.
    uppers : list of PotentialCurve
        Candidate excited curves.
    tdms : list of DipoleFunction
        Must contain lower-upper and target-upper transition dipoles.
    mu : float
        Reduced mass (electron masses).
    detuning_window : float or (lo, hi)
        cm^-1 relative to each upper asymptote; a single number w means (-w, 0),
        i.e. red detuning up to w.
    targets : list of PotentialCurve, optional
        Curves receiving the spontaneous decay; defaults to ``[lower]``.
    temperature_K : float
        Collision energy of the entrance-channel surrogate, k_B T above its asymptote.

    Returns
    -------
    list of PAScheme sorted by score = amplitude^2 * bound-bound branching.
    """
    targets = [lower] if targets is None else list(targets)
    species = {c.species for c in [lower, *uppers, *targets]}
    if len(species) > 1:
        raise PairingError(f"curves belong to different species: {sorted(species)}")
    excitation_tdm = {u.state: _find_tdm(tdms, lower.state, u.state) for u in uppers}
    decay_tdm = {(t.state, u.state): _find_tdm(tdms, t.state, u.state) for t in targets for u in uppers}
    lo_det, hi_det = _window(detuning_window)

    if grid is None:
        grid = shared_grid([lower, *uppers, *targets], mu, J)
    target_levels = {t.state: bound_levels(t, mu, J, grid=grid) for t in targets}
    psi_c = continuum_wavefunction(lower, mu, temperature_K * KELVIN_TO_HARTREE, grid, J)

    schemes = []
    for up in uppers:
        e_top = min(up.asymptote_energy + cm_to_hartree(hi_det), up.asymptote_energy - DEFAULTS.marginal_gap)
        levels = bound_levels(up, mu, J, E_max=e_top, grid=grid)
        for lev in levels:
            det = (lev.E - up.asymptote_energy) * HARTREE_TO_CM
            # levels touching the grid edge have untrustworthy wavefunctions
            if lev.marginal or not lo_det <= det <= hi_det:
                continue
            integrand = psi_c * excitation_tdm[up.state].evaluate(grid) * lev.psi
            amp = float(trapezoid(integrand, grid))
            # below this the overlap is cancellation noise; treat as zero so ties order deterministically
            if abs(amp) < AMPLITUDE_NOISE * float(trapezoid(np.abs(integrand), grid)):
                amp = 0.0
            strong = np.flatnonzero(np.abs(integrand) >= 0.5 * np.abs(integrand).max())
            window = (float(grid[strong[0]]), float(grid[strong[-1]]))
            br = decay_branching(
                lev, [(t.state, target_levels[t.state], decay_tdm[(t.state, up.state)]) for t in targets]
            )
            schemes.append(
                PAScheme(
                    lower_state=lower.state,
                    upper_state=up.state,
                    v=lev.v,
                    J=J,
                    level_energy=lev.E,
                    detuning_cm1=det,
                    R_window=window,
                    amplitude=amp,
                    decay=br.channels,
                    bound_fraction=br.bound_fraction,
                    continuum_fraction=br.continuum_fraction,
                    score=amp * amp * br.bound_fraction,
                )
            )
    schemes.sort(key=lambda s: (-s.score, s.upper_state, s.v))
    return schemes
