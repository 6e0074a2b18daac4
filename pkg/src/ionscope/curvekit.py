"""Potential energy curves: storage, interpolation, long-range tails and spectroscopic constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import fileio
from .config import DEFAULTS
from .errors import (
    CurveError,
    DomainError,
    InsufficientDataError,
    NoBoundWellError,
    OutOfDomainError,
    StitchError,
)
from .units import HARTREE_TO_CM, cm_to_hartree

MIN_POINTS = 8
CURVE_UNITS = "bohr hartree"


@dataclass(frozen=True)
class LongRangeTail:
    """Asymptotic form E(R) = E_inf - C4/R^4 - C6/R^6 used beyond ``R_match``."""

    C4: float
    C6: float
    R_match: float

    def energy(self, R, asymptote_energy):
        R = np.asarray(R, dtype=float)
        return asymptote_energy - self.C4 / R**4 - self.C6 / R**6


@dataclass(frozen=True)
class PotentialCurve:
    """Pointwise adiabatic curve with a C2 cubic-spline interpolant.

    ``R`` (bohr) must be strictly increasing and ``E`` (hartree) finite.  Instances
    are immutable; :func:`attach_tail` returns a new curve.
    """

    species: str
    state: str
    R: np.ndarray
    E: np.ndarray
    asymptote_energy: float
    asymptote_label: str = ""
    label: str = ""
    tail: LongRangeTail | None = None
    metadata: dict = field(default_factory=dict, compare=False)
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        R = np.array(self.R, dtype=float)
        E = np.array(self.E, dtype=float)
        _validate_points(R, E)
        R.setflags(write=False)
        E.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "asymptote_energy", float(self.asymptote_energy))
        # not-a-knot keeps C2 continuity and reproduces cubics exactly
        object.__setattr__(self, "_spline", CubicSpline(R, E, bc_type="not-a-knot"))

    @property
    def r_min(self):
        return float(self.R[0])

    @property
    def r_max(self):
        """Largest R at which the curve can be evaluated."""
        return math.inf if self.tail is not None else float(self.R[-1])

    def evaluate(self, R):
        """Energy at ``R`` (scalar or array); see :func:`evaluate`."""
        Rarr = np.asarray(R, dtype=float)
        if np.any(Rarr <= 0):
            raise DomainError(f"R must be positive, got {Rarr[Rarr <= 0].flat[0]}")
        if np.any(Rarr < self.R[0]) or (self.tail is None and np.any(Rarr > self.R[-1])):
            bad = Rarr[(Rarr < self.R[0]) | (Rarr > self.R[-1])].flat[0]
            raise OutOfDomainError(
                f"R={bad} outside tabulated range [{self.R[0]}, {self.R[-1]}] and no tail attached"
            )
        out = self._spline(Rarr)
        if self.tail is not None:
            far = Rarr > self.tail.R_match
            if np.any(far):
                out = np.where(far, self.tail.energy(np.where(far, Rarr, 1.0), self.asymptote_energy), out)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, R, order=1):
        """Spline derivative inside the tabulated range, analytic tail derivative beyond."""
        Rarr = np.asarray(R, dtype=float)
        out = self._spline(Rarr, order)
        if self.tail is not None:
            t = self.tail
            Rs = np.where(Rarr > t.R_match, Rarr, 1.0)
            if order == 1:
                dt = 4 * t.C4 / Rs**5 + 6 * t.C6 / Rs**7
            elif order == 2:
                dt = -20 * t.C4 / Rs**6 - 42 * t.C6 / Rs**8
            else:
                raise ValueError("order must be 1 or 2")
            out = np.where(Rarr > t.R_match, dt, out)
        return float(out) if np.ndim(out) == 0 else out


def _validate_points(R, E):
    if R.ndim != 1 or R.shape != E.shape:
        raise CurveError("R and E must be 1-D arrays of equal length")
    if len(R) < MIN_POINTS:
        raise CurveError(f"need at least {MIN_POINTS} points, got {len(R)}")
    if not np.all(np.isfinite(R)):
        raise CurveError("non-finite R value")
    bad_e = np.flatnonzero(~np.isfinite(E))
    if bad_e.size:
        raise CurveError(f"non-finite energy at index {bad_e[0]}")
    if R[0] <= 0:
        raise CurveError("all R must be positive")
    bad = np.flatnonzero(np.diff(R) <= 0)
    if bad.size:
        raise CurveError(f"non-monotonic at index {bad[0] + 1}")


def load_curve(raw_points, metadata):
    """Build a :class:`PotentialCurve` from ``(R, E)`` pairs and a header mapping.

    ``metadata`` needs ``species``, ``state`` and ``asymptote_energy``; ``asymptote_label``
    and ``label`` are optional and every other key is kept verbatim.
    """
    pts = np.asarray(raw_points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise CurveError("raw_points must be a sequence of (R, E) pairs")
    meta = dict(metadata)
    try:
        species = meta.pop("species")
        state = meta.pop("state")
        asym = float(meta.pop("asymptote_energy"))
    except KeyError as exc:
        raise CurveError(f"missing metadata field {exc.args[0]!r}") from None
    return PotentialCurve(
        species=species,
        state=state,
        R=pts[:, 0],
        E=pts[:, 1],
        asymptote_energy=asym,
        asymptote_label=meta.pop("asymptote_label", ""),
        label=meta.pop("label", ""),
        metadata=meta,
    )


def read_curve(path):
    """Parse a curve file (text or JSON) into a :class:`PotentialCurve`."""
    header, rows, linenos = fileio.read_table(path, 2)
    fileio.check_units(header, path, CURVE_UNITS)
    meta = {
        "species": fileio.require(header, "species", path),
        "state": fileio.require(header, "state", path),
        "asymptote_energy": fileio.header_float(header, "asymptote_energy_au", path),
    }
    for key, value in header.items():
        if key not in ("species", "state", "asymptote_energy_au", "units"):
            meta[key] = value
    try:
        return load_curve(rows, meta)
    except CurveError as exc:
        msg = str(exc)
        lineno = linenos[0] if linenos else 1
        if msg.startswith("non-monotonic at index"):
            lineno = linenos[int(msg.rsplit(" ", 1)[1])]
        raise fileio.ParseError(path, lineno, msg) from None


def write_curve(curve, path):
    header = {
        "species": curve.species,
        "state": curve.state,
        "units": CURVE_UNITS,
        "asymptote_energy_au": repr(curve.asymptote_energy),
    }
    if curve.asymptote_label:
        header["asymptote_label"] = curve.asymptote_label
    if curve.label:
        header["label"] = curve.label
    header.update(curve.metadata)
    fileio.write_table(path, header, zip(curve.R, curve.E), fmt="%.17g")


def evaluate(curve, R):
    """Energy (hartree) of ``curve`` at ``R`` bohr.

    Uses the spline inside the tabulated range and the tail beyond ``R_match``.
    Raises :class:`OutOfDomainError` past the grid without a tail and
    :class:`DomainError` for R <= 0.
    """
    return curve.evaluate(R)


def attach_tail(curve, alpha_neutral, C6, R_match, stitch_tol=DEFAULTS.stitch_tol):
    """Join a charge-induced-dipole tail to the curve at ``R_match``.

    C4 = alpha_neutral / 2 for a unit charge interacting with a neutral partner
    of polarizability ``alpha_neutral`` (bohr^3).
    """
    if alpha_neutral < 0:
        raise DomainError(f"alpha_neutral must be >= 0, got {alpha_neutral}")
    return attach_tail_coefficients(curve, alpha_neutral / 2.0, C6, R_match, stitch_tol)


def attach_tail_coefficients(curve, C4, C6, R_match, stitch_tol=DEFAULTS.stitch_tol):
    if not curve.R[0] < R_match <= curve.R[-1]:
        raise DomainError(f"R_match={R_match} not inside grid ({curve.R[0]}, {curve.R[-1]}]")
    tail = LongRangeTail(float(C4), float(C6), float(R_match))
    spline_value = float(curve._spline(R_match))
    tail_value = float(tail.energy(R_match, curve.asymptote_energy))
    if abs(spline_value - tail_value) > stitch_tol:
        raise StitchError(R_match, spline_value, tail_value, stitch_tol)
    return _with_tail(curve, tail)


def _with_tail(curve, tail):
    return PotentialCurve(
        species=curve.species,
        state=curve.state,
        R=curve.R,
        E=curve.E,
        asymptote_energy=curve.asymptote_energy,
        asymptote_label=curve.asymptote_label,
        label=curve.label,
        tail=tail,
        metadata=dict(curve.metadata),
    )


def stitch_residual(curve):
    """|spline - tail| at the matching radius (0 for curves without a tail)."""
    if curve.tail is None:
        return 0.0
    t = curve.tail
    return abs(float(curve._spline(t.R_match)) - float(t.energy(t.R_match, curve.asymptote_energy)))


class TailFit(NamedTuple):
    C4: float
    C6: float
    rms: float


def fit_tail(curve, R_fit_min):
    """Least-squares C4, C6 from the tabulated points with R >= ``R_fit_min``.

    Fits ``asymptote_energy - E`` to ``C4/R^4 + C6/R^6``.
    """
    mask = curve.R >= R_fit_min
    if mask.sum() < 4:
        raise InsufficientDataError(
            f"fit_tail needs >= 4 points with R >= {R_fit_min}, found {int(mask.sum())}"
        )
    R = curve.R[mask]
    y = curve.asymptote_energy - curve.E[mask]
    basis = np.column_stack([R**-4, R**-6])
    scale = np.abs(basis).max(axis=0)
    coef, *_ = np.linalg.lstsq(basis / scale, y, rcond=None)
    coef = coef / scale
    rms = float(np.sqrt(np.mean((basis @ coef - y) ** 2)))
    return TailFit(float(coef[0]), float(coef[1]), rms)


class StationaryPoint(NamedTuple):
    R: float
    E: float
    kind: str  # "min" or "max"


def stationary_points(
    curve,
    prominence_cm1=DEFAULTS.prominence_cm1,
    subdivisions=DEFAULTS.stationary_subdivisions,
):
    """Interior extrema of the interpolant, ordered by R.

    Sign changes of the spline derivative are bracketed on a sub-sampled grid and
    refined by bracketing root search.  Extremum pairs whose energy difference is
    below ``prominence_cm1`` (spline ripple) are removed, as are extrema within
    that distance of an end-point value.
    """
    R = curve.R
    fine = np.concatenate(
        [np.linspace(R[i], R[i + 1], subdivisions, endpoint=False) for i in range(len(R) - 1)]
        + [R[-1:]]
    )
    d1 = curve._spline(fine, 1)
    nz = np.flatnonzero(d1 != 0.0)
    flips = np.flatnonzero(np.sign(d1[nz[:-1]]) != np.sign(d1[nz[1:]]))
    slope = lambda r: float(curve._spline(r, 1))  # noqa: E731
    points = []
    for j in flips:
        lo, hi = fine[nz[j]], fine[nz[j + 1]]
        r0 = brentq(slope, lo, hi, xtol=1e-14)
        kind = "min" if d1[nz[j]] < 0 else "max"
        points.append(StationaryPoint(float(r0), float(curve._spline(r0)), kind))
    return _prune(points, float(curve.E[0]), float(curve.E[-1]), cm_to_hartree(prominence_cm1))


def _prune(points, e_left, e_right, floor):
    pts = list(points)
    while pts:
        diffs = [abs(pts[i + 1].E - pts[i].E) for i in range(len(pts) - 1)]
        edge = [abs(pts[0].E - e_left), abs(pts[-1].E - e_right)]
        best_pair = int(np.argmin(diffs)) if diffs else -1
        small_pair = diffs[best_pair] if diffs else math.inf
        if min(small_pair, *edge) >= floor:
            break
        if small_pair <= min(edge):
            del pts[best_pair : best_pair + 2]
        elif edge[0] <= edge[1]:
            del pts[0]
        else:
            del pts[-1]
    return pts


@dataclass(frozen=True)
class Well:
    R_min: float
    depth_signed: float  # cm^-1 relative to the asymptote, negative below
    we: float | None


@dataclass(frozen=True)
class Barrier:
    R_top: float
    height_signed: float  # cm^-1 relative to the asymptote


@dataclass(frozen=True)
class SpectroscopicConstants:
    Re: float  # bohr
    De: float  # cm^-1
    we: float  # cm^-1
    extra_wells: tuple = ()
    barriers: tuple = ()


def harmonic_constant(curve, R, mu):
    """Harmonic wavenumber (cm^-1) from the curvature at ``R``; None where V'' <= 0."""
    k = curve.derivative(R, 2)
    if k <= 0:
        return None
    return math.sqrt(k / mu) * HARTREE_TO_CM


def spectroscopic_constants(curve, mu, prominence_cm1=DEFAULTS.prominence_cm1):
    if mu <= 0:
        raise DomainError(f"reduced mass must be positive, got {mu}")
    extrema = stationary_points(curve, prominence_cm1=prominence_cm1)
    minima = [p for p in extrema if p.kind == "min"]
    if not minima:
        raise NoBoundWellError(f"{curve.species} {curve.state}: no interior minimum")
    glob = min(minima, key=lambda p: p.E)
    if glob.E >= curve.asymptote_energy:
        raise NoBoundWellError(f"{curve.species} {curve.state}: no minimum below the asymptote")
    we = harmonic_constant(curve, glob.R, mu)
    rel = lambda e: (e - curve.asymptote_energy) * HARTREE_TO_CM  # noqa: E731
    wells = tuple(
        Well(p.R, rel(p.E), harmonic_constant(curve, p.R, mu)) for p in minima if p is not glob
    )
    barriers = tuple(Barrier(p.R, rel(p.E)) for p in extrema if p.kind == "max")
    return SpectroscopicConstants(
        Re=glob.R,
        De=(curve.asymptote_energy - glob.E) * HARTREE_TO_CM,
        we=we,
        extra_wells=wells,
        barriers=barriers,
    )
