"""Finite-field static dipole polarizabilities and molecular asymptote checks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import fileio
from .config import DEFAULTS
from .errors import ComponentCountError, DomainError, InsufficientDataError, RankError


@dataclass(frozen=True)
class StarkSamples:
    """Energies of the components of one atomic state in static fields.

    ``samples`` rows are ``(m, F, E)`` with F in a.u. and E in hartree.
    """

    state_label: str
    ell: int
    samples: np.ndarray
    core_alpha: float = DEFAULTS.core_alpha_au

    def __post_init__(self):
        s = np.array(self.samples, dtype=float).reshape(-1, 3)
        if self.ell < 0:
            raise DomainError(f"ell must be >= 0, got {self.ell}")
        if np.any(s[:, 1] < 0):
            raise DomainError("field magnitudes must be non-negative")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def components(self):
        return tuple(int(m) for m in np.unique(self.samples[:, 0]))

    def component(self, m):
        rows = self.samples[self.samples[:, 0] == m]
        return rows[:, 1], rows[:, 2]


@dataclass(frozen=True)
class ComponentFit:
    alpha: float
    E0: float
    residual: float  # rms, hartree
    flagged: bool
    linear: float | None = None  # dipole-like term, diagnostic mode only
    symmetry_warning: bool = False


def fit_component_alpha(
    F,
    E,
    linear_term=False,
    residual_flag=DEFAULTS.residual_flag,
    symmetry_ratio=DEFAULTS.symmetry_ratio,
):
    """Least-squares fit of E(F) = E0 - alpha F^2 / 2.

    Parameters
    ----------
    F, E : array_like
        Field magnitudes (a.u.) and energies (hartree); at least three pairs.
    linear_term : bool
        Diagnostic mode: also fit a term linear in F and flag it when its
        response at the largest field exceeds ``symmetry_ratio`` times the
        quadratic one.

    Returns
    -------
    ComponentFit
    """
    F = np.asarray(F, dtype=float)
    E = np.asarray(E, dtype=float)
    if F.shape != E.shape or F.size < 3:
        raise InsufficientDataError(f"need >= 3 (F, E) pairs, got {F.size}")
    cols = [np.ones_like(F), -0.5 * F**2]
    if linear_term:
        cols.append(F)
    A = np.column_stack(cols)
    # scale columns so the rank test is not fooled by F^2 ~ 1e-5
    scale = np.abs(A).max(axis=0)
    scale[scale == 0] = 1.0
    coef, _, rank, _ = np.linalg.lstsq(A / scale, E, rcond=None)
    if rank < A.shape[1]:
        raise RankError(f"field set {np.unique(F).tolist()} cannot determine {A.shape[1]} coefficients")
    coef = coef / scale
    resid = float(np.sqrt(np.mean((A @ coef - E) ** 2)))
    E0, alpha = float(coef[0]), float(coef[1])
    linear, warn = None, False
    if linear_term:
        linear = float(coef[2])
        Fmax = F.max()
        quad = abs(0.5 * alpha) * Fmax**2
        warn = abs(linear) * Fmax > symmetry_ratio * quad
        if warn:
            warnings.warn(f"linear field response {linear:.3e} breaks inversion symmetry", stacklevel=2)
    return ComponentFit(alpha, E0, resid, resid > residual_flag, linear, warn)


def average_components(alphas, ell):
    """Scalar average over the 2l+1 magnetic components."""
    alphas = list(alphas)
    expected = 2 * ell + 1
    if len(alphas) != expected:
        raise ComponentCountError(f"expected 2l+1 = {expected} components for l={ell}, got {len(alphas)}")
    return float(np.mean(alphas))


def total_alpha(valence, core_alpha=DEFAULTS.core_alpha_au):
    return valence + core_alpha


@dataclass(frozen=True)
class PolarizabilityReport:
    state_label: str
    ell: int
    component_alpha: dict  # |m| -> alpha
    component_fits: dict
    valence: float  # fit-then-average
    valence_avg_first: float  # average-then-fit
    order_difference: float
    tensor_spread: float  # max - min over components
    core_alpha: float
    total: float
    flagged: bool


def _expand_components(samples):
    """Per-m (F, E) arrays for all 2l+1 components.

    A file may list only m >= 0; the -m partner is then taken as identical.
    """
    present = samples.components
    ms = range(-samples.ell, samples.ell + 1)
    out = {}
    for m in ms:
        if m in present:
            out[m] = samples.component(m)
        elif -m in present and m < 0:
            out[m] = samples.component(-m)
        else:
            raise ComponentCountError(
                f"state {samples.state_label}: missing component m={m} of 2l+1 = {2 * samples.ell + 1}"
            )
    extra = set(present) - set(ms)
    if extra:
        raise ComponentCountError(
            f"state {samples.state_label}: components {sorted(extra)} outside 2l+1 = {2 * samples.ell + 1}"
        )
    return out


def polarizability(samples, **fit_kw):
    """Fit each component, average, add the core; also report the other order."""
    comps = _expand_components(samples)
    fits = {m: fit_component_alpha(F, E, **fit_kw) for m, (F, E) in comps.items()}
    valence = average_components([f.alpha for f in fits.values()], samples.ell)

    # average energies over components at each field, then fit once
    fields = np.unique(np.concatenate([F for F, _ in comps.values()]))
    mean_E = []
    for f in fields:
        vals = [E[F == f] for F, E in comps.values()]
        if any(v.size != 1 for v in vals):
            raise DomainError(f"field {f} is not sampled exactly once for every component")
        mean_E.append(np.mean([v[0] for v in vals]))
    avg_first = fit_component_alpha(fields, np.array(mean_E), **fit_kw).alpha

    alphas = [f.alpha for f in fits.values()]
    by_abs_m = {abs(m): fits[m].alpha for m in sorted(fits, key=abs)}
    return PolarizabilityReport(
        state_label=samples.state_label,
        ell=samples.ell,
        component_alpha=by_abs_m,
        component_fits=fits,
        valence=valence,
        valence_avg_first=avg_first,
        order_difference=valence - avg_first,
        tensor_spread=max(alphas) - min(alphas),
        core_alpha=samples.core_alpha,
        total=total_alpha(valence, samples.core_alpha),
        flagged=any(f.flagged for f in fits.values()),
    )


def read_stark(path):
    header, rows, _ = fileio.read_table(path, 3)
    state = fileio.require(header, "state", path)
    try:
        ell = int(fileio.require(header, "ell", path))
    except ValueError:
        raise fileio.ParseError(path, 1, "ell must be an integer") from None
    core = fileio.header_float(header, "core_alpha_au", path) if "core_alpha_au" in header else DEFAULTS.core_alpha_au
    try:
        return StarkSamples(state, ell, np.asarray(rows, dtype=float), core)
    except DomainError as exc:
        raise fileio.ParseError(path, 1, str(exc)) from None


def write_stark(samples, path):
    header = {"state": samples.state_label, "ell": str(samples.ell), "core_alpha_au": repr(samples.core_alpha)}
    rows = [(int(m), F, E) for m, F, E in samples.samples]
    fileio.write_table(path, header, rows, fmt="%.17g")


def synthetic_stark(state_label, ell, alphas, fields=DEFAULTS.fields_au, E0=0.0, core_alpha=DEFAULTS.core_alpha_au):
    """Pure-quadratic Stark samples; ``alphas`` maps m >= 0 to the valence alpha."""
    rows = [(m, F, E0 - 0.5 * alphas[abs(m)] * F * F) for m in range(-ell, ell + 1) for F in fields]
    return StarkSamples(state_label, ell, rows, core_alpha)


@dataclass(frozen=True)
class MolecularAlpha:
    species: str
    state: str
    R: np.ndarray
    parallel: np.ndarray
    perpendicular: np.ndarray
    atomic_limit: float

    def __post_init__(self):
        arrs = [np.array(a, dtype=float) for a in (self.R, self.parallel, self.perpendicular)]
        if arrs[0].size == 0:
            raise InsufficientDataError("empty polarizability component lists")
        if not (arrs[0].shape == arrs[1].shape == arrs[2].shape):
            raise DomainError("R, parallel and perpendicular must have equal length")
        if np.any(np.diff(arrs[0]) <= 0):
            raise DomainError("R must be strictly increasing")
        for name, a in zip(("R", "parallel", "perpendicular"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)


@dataclass(frozen=True)
class AsymptoteReport:
    parallel_residual: float
    perpendicular_residual: float
    passed: bool
    ordering_violations: tuple = field(default=())  # R values with alpha_perp > alpha_par


def check_molecular_asymptote(ma, tol, R_asym=None):
    """Compare both tensor components at the largest R with the atomic limit.

    ``R_asym`` (default: start of the last 10% of the grid) only checks that the
    data reach far enough out.
    """
    if R_asym is None:
        R_asym = ma.R[0] + 0.9 * (ma.R[-1] - ma.R[0])
    tail = ma.R >= R_asym
    if not tail.any():
        raise InsufficientDataError(f"no points beyond R_asym = {R_asym}")
    par = abs(float(ma.parallel[-1]) - ma.atomic_limit)
    perp = abs(float(ma.perpendicular[-1]) - ma.atomic_limit)
    bad = tuple(float(r) for r in ma.R[ma.perpendicular > ma.parallel])
    return AsymptoteReport(par, perp, par <= tol and perp <= tol, bad)
