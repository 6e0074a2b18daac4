"""Bound rovibrational levels of a single potential curve.

Eigenvalues are located by bisection on a Sturm count of the Numerov scheme, which
makes it impossible to skip a level; wavefunctions are built by outward and
inward Numerov propagation matched at the outermost classical turning point.
"""

from __future__ import annotations

import bisect
import math
from collections.abc import Mapping
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from . import _numerov
from .config import DEFAULTS
from .curvekit import harmonic_constant, stationary_points
from .errors import (
    DomainError,
    IsotopeLookupError,
    NoAllowedRegionError,
    NoBoundWellError,
    OutOfDomainError,
    ParseError,
    ResolutionError,
)
from .units import AMU_TO_ME, HARTREE_TO_CM

REQUIRED_ISOTOPES = ("6Li", "23Na", "39K", "85Rb", "133Cs", "87Sr")


class IsotopeTable(Mapping):
    """Isotope label -> atomic mass in electron masses."""

    def __init__(self, masses):
        self._masses = {}
        for label, m in dict(masses).items():
            if not m > 0:
                raise ValueError(f"mass of {label} must be positive, got {m}")
            self._masses[label] = float(m)

    def __getitem__(self, label):
        try:
            return self._masses[label]
        except KeyError:
            raise IsotopeLookupError(label, self._masses) from None

    def __iter__(self):
        return iter(self._masses)

    def __len__(self):
        return len(self._masses)

    @classmethod
    def from_file(cls, path=None):
        """Read a ``isotope mass_u`` file; the bundled table when ``path`` is None."""
        if path is None:
            text = resources.files("ionscope").joinpath("data/isotopes.txt").read_text("utf-8")
            path = "isotopes.txt"
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        masses = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].split()
            if not body:
                continue
            if len(body) != 2:
                raise ParseError(path, lineno, "expected 'isotope mass_u'")
            try:
                masses[body[0]] = float(body[1]) * AMU_TO_ME
            except ValueError:
                raise ParseError(path, lineno, f"bad mass {body[1]!r}") from None
        return cls(masses)


_default_table = None


def default_isotopes():
    global _default_table
    if _default_table is None:
        _default_table = IsotopeTable.from_file()
    return _default_table


def reduced_mass(a, b, table=None):
    """m_a m_b / (m_a + m_b) in electron masses."""
    table = default_isotopes() if table is None else table
    ma, mb = table[a], table[b]
    return ma * mb / (ma + mb)


@dataclass(frozen=True, eq=False)
class VibLevel:
    v: int
    J: int
    E: float  # hartree, same reference as the curve
    R: np.ndarray  # solver grid (bohr)
    psi: np.ndarray  # normalized so that trapezoid(psi**2, R) == 1
    node_count: int
    binding: float  # asymptote_energy - E (hartree)
    marginal: bool = False
    edge_ratio: float = 0.0

    @property
    def binding_cm1(self):
        return self.binding * HARTREE_TO_CM


def effective_potential(curve, mu, J, R):
    R = np.asarray(R, dtype=float)
    return curve.evaluate(R) + J * (J + 1) / (2.0 * mu * R**2)


def _survey_points(curve, E_max, mu, J):
    """Dense sample covering the tabulated range and, with a tail, far enough out."""
    R = np.linspace(curve.R[0], curve.R[-1], 16 * len(curve.R))
    if curve.tail is not None:
        kappa_inf = math.sqrt(2 * mu * max(curve.asymptote_energy - E_max, 1e-300))
        r_out = float(curve.R[-1])
        while effective_potential(curve, mu, J, r_out) <= E_max and r_out < 1e6:
            r_out *= 2.0
        r_far = min(1e6, r_out + 4 * DEFAULTS.decay_exponent / kappa_inf)
        if r_far > curve.R[-1]:
            R = np.concatenate([R, np.geomspace(curve.R[-1], r_far, 4000)[1:]])
    return R


def _decay_edge(R, kappa, start, direction, target):
    """Walk from index ``start`` until the integrated decay constant reaches ``target``."""
    acc = 0.0
    i = start
    while 0 <= i + direction < len(R) and acc < target:
        j = i + direction
        acc += 0.5 * (kappa[i] + kappa[j]) * abs(R[j] - R[i])
        i = j
    return R[i]


def solver_grid(
    curve,
    mu,
    J=0,
    E_max=None,
    step=None,
    steps_per_wavelength=DEFAULTS.steps_per_wavelength,
    min_points_per_wavelength=DEFAULTS.min_points_per_wavelength,
    decay_exponent=DEFAULTS.decay_exponent,
    max_points=DEFAULTS.max_grid_points,
    marginal_gap=DEFAULTS.marginal_gap,
):
    """Uniform grid suited to levels up to ``E_max``.

    The step defaults to the shortest local de Broglie wavelength divided by
    ``steps_per_wavelength``.  The range extends past both classical turning points
    at ``E_max`` until the WKB attenuation exp(-integral of kappa) reaches
    exp(-decay_exponent), limited by the tabulated range (or ``max_points``).
    """
    if mu <= 0:
        raise DomainError(f"reduced mass must be positive, got {mu}")
    if E_max is None:
        E_max = curve.asymptote_energy - marginal_gap
    Rs = _survey_points(curve, E_max, mu, J)
    V = effective_potential(curve, mu, J, Rs)
    vmin = float(V.min())
    if vmin >= E_max:
        raise NoBoundWellError(f"potential never falls below E_max={E_max}")
    k_max = math.sqrt(2 * mu * (E_max - vmin))
    wavelength = 2 * math.pi / k_max
    suggested = wavelength / steps_per_wavelength
    if step is None:
        step = suggested
    elif step > wavelength / min_points_per_wavelength:
        raise ResolutionError(step, suggested)
    allowed = np.flatnonzero(V <= E_max)
    kappa = np.sqrt(2 * mu * np.clip(V - E_max, 0.0, None))
    r_lo = _decay_edge(Rs, kappa, allowed[0], -1, decay_exponent)
    r_hi = _decay_edge(Rs, kappa, allowed[-1], +1, decay_exponent)
    n = int(math.floor((r_hi - r_lo) / step)) + 1
    n = min(n, max_points)
    return r_lo + step * np.arange(n)


def _check_grid(R, mu, V, E_max, min_points_per_wavelength, steps_per_wavelength):
    h = R[1] - R[0]
    if not np.allclose(np.diff(R), h, rtol=1e-9, atol=0):
        raise DomainError("solver grid must be uniform")
    k_max = math.sqrt(2 * mu * max(E_max - V.min(), 0.0))
    if k_max > 0:
        wavelength = 2 * math.pi / k_max
        if h > wavelength / min_points_per_wavelength:
            raise ResolutionError(h, wavelength / steps_per_wavelength)
    qmax = h * h * 2 * mu * (V.max() - V.min()) / 12.0
    if qmax >= 1.0:
        raise ResolutionError(h, h * 0.5 / math.sqrt(qmax))
    return h


def _count_nodes(psi):
    big = np.abs(psi) > 1e-8 * np.abs(psi).max()
    s = np.sign(psi[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def bound_levels(
    curve,
    mu,
    J=0,
    E_max=None,
    step=None,
    grid=None,
    steps_per_wavelength=DEFAULTS.steps_per_wavelength,
    min_points_per_wavelength=DEFAULTS.min_points_per_wavelength,
    decay_exponent=DEFAULTS.decay_exponent,
    marginal_gap=DEFAULTS.marginal_gap,
    edge_ratio_max=DEFAULTS.edge_ratio_max,
    max_points=DEFAULTS.max_grid_points,
):
    """All bound levels with energy below ``E_max`` for rotational quantum number ``J``.

    Parameters
    ----------
    curve : PotentialCurve
    mu : float
        Reduced mass in electron masses.
    J : int
        Adds J(J+1)/(2 mu R^2) to the potential.
    E_max : float, optional
        Defaults to ``asymptote_energy - marginal_gap``.
    step, grid :
        Override the automatic grid (``grid`` must be uniform and inside the
        curve's domain).

    Returns
    -------
    list of VibLevel ordered by energy.  Levels within ``marginal_gap`` of the
    asymptote, or whose wavefunction has not decayed to ``edge_ratio_max`` of its
    peak at the grid ends, carry ``marginal=True``.
    """
    if J < 0 or int(J) != J:
        raise DomainError(f"J must be a non-negative integer, got {J}")
    J = int(J)
    if E_max is None:
        E_max = curve.asymptote_energy - marginal_gap
    if E_max > curve.asymptote_energy:
        raise DomainError("E_max must not exceed the asymptote energy")
    if grid is None:
        try:
            R = solver_grid(
                curve, mu, J, E_max, step,
                steps_per_wavelength, min_points_per_wavelength, decay_exponent, max_points,
            )
        except NoBoundWellError:
            return []
    else:
        R = np.asarray(grid, dtype=float)
    V = effective_potential(curve, mu, J, R)
    h = _check_grid(R, mu, V, E_max, min_points_per_wavelength, steps_per_wavelength)
    c = h * h * 2.0 * mu / 12.0

    vmin = float(V.min())
    if vmin >= E_max:
        return []
    n_levels = _numerov.sturm_count(V, E_max, c)
    samples_E = [vmin, E_max]
    samples_N = [0, n_levels]
    levels = []
    for v in range(n_levels):
        # tightest bracket from previous counts: N(lo) <= v < N(hi)
        k = bisect.bisect_right(samples_N, v)
        lo, hi = samples_E[k - 1], samples_E[k]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            cnt = _numerov.sturm_count(V, mid, c)
            pos = bisect.bisect_left(samples_E, mid)
            samples_E.insert(pos, mid)
            samples_N.insert(pos, cnt)
            if cnt <= v:
                lo = mid
            else:
                hi = mid
        E = 0.5 * (lo + hi)
        levels.append(_make_level(curve, R, V, E, c, v, J, marginal_gap, edge_ratio_max))
    return levels


def _make_level(curve, R, V, E, c, v, J, marginal_gap, edge_ratio_max):
    inside = np.flatnonzero(V <= E)
    m = int(inside[-1]) if inside.size else int(np.argmin(V))
    m = min(max(m, 2), len(R) - 3)
    y = _numerov.matched(V, E, c, m)
    y /= math.sqrt(trapezoid(y * y, R))
    peak = np.abs(y).max()
    first = np.flatnonzero(np.abs(y) > 1e-3 * peak)[0]
    if y[first] < 0:
        y = -y
    edge = max(abs(y[1]), abs(y[-2])) / peak
    binding = curve.asymptote_energy - E
    y.setflags(write=False)
    return VibLevel(
        v=v,
        J=J,
        E=float(E),
        R=R,
        psi=y,
        node_count=_count_nodes(y),
        binding=float(binding),
        marginal=bool(binding < marginal_gap or edge > edge_ratio_max),
        edge_ratio=float(edge),
    )


def vibrational_spacing(curve, mu, J=0):
    """G(1) - G(0) in cm^-1, a level-based counterpart of the curvature constant."""
    glob = min((p for p in stationary_points(curve) if p.kind == "min"), key=lambda p: p.E, default=None)
    if glob is None:
        raise NoBoundWellError("curve has no minimum")
    we = harmonic_constant(curve, glob.R, mu)
    e_top = curve.asymptote_energy - DEFAULTS.marginal_gap
    if we is not None:
        e_top = min(e_top, glob.E + 3.0 * we / HARTREE_TO_CM)
    levels = bound_levels(curve, mu, J, E_max=e_top)
    if len(levels) < 2:
        raise NoBoundWellError("fewer than two bound levels")
    return (levels[1].E - levels[0].E) * HARTREE_TO_CM


def turning_points(curve, E, tol=DEFAULTS.turning_point_tol):
    """Classically allowed intervals ``[(R_in, R_out), ...]`` where V(R) <= E."""
    R = np.linspace(curve.R[0], curve.R[-1], 32 * len(curve.R))
    V = curve.evaluate(R)
    if E <= V.min():
        raise NoAllowedRegionError(f"E={E} lies below the potential minimum {V.min()}")
    if V[0] <= E:
        raise OutOfDomainError("allowed region extends below the first tabulated point")
    g = V - E
    if g[-1] <= 0:
        if curve.tail is None or E >= curve.asymptote_energy:
            raise OutOfDomainError("allowed region extends past the last tabulated point")
        r_far = R[-1]
        while curve.evaluate(r_far) <= E:
            r_far *= 2.0
        R = np.append(R, r_far)
        g = np.append(g, curve.evaluate(r_far) - E)
    f = lambda r: float(curve.evaluate(r)) - E  # noqa: E731
    roots = []
    for i in np.flatnonzero(np.sign(g[:-1]) != np.sign(g[1:])):
        if g[i] == 0.0:
            roots.append(float(R[i]))
        elif g[i + 1] != 0.0:
            roots.append(brentq(f, R[i], R[i + 1], xtol=tol))
    return [(roots[k], roots[k + 1]) for k in range(0, len(roots) - 1, 2)]
