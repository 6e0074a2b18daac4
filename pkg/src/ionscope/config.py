"""Single home for every numerical default used by the library and the CLI.

Functions take these as keyword defaults; the CLI builds an overridden copy
with ``--set key=value``.
"""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Defaults:
    # curvekit
    stitch_tol: float = 1e-6  # hartree
    prominence_cm1: float = 1.0
    stationary_subdivisions: int = 16  # derivative samples per spline interval
    # rovib
    steps_per_wavelength: float = 40.0
    min_points_per_wavelength: float = 10.0
    decay_exponent: float = 20.0  # WKB attenuation exp(-x) required past turning points
    marginal_gap: float = 1e-8  # hartree below the asymptote
    edge_ratio_max: float = 1e-6
    max_grid_points: int = 400_000
    turning_point_tol: float = 1e-10  # bohr
    # radiate
    pa_temperature_K: float = 1e-3
    # polarfit
    fields_au: tuple = (0.002, 0.003, 0.004)
    core_alpha_au: float = 5.67
    residual_flag: float = 1e-10
    symmetry_ratio: float = 1e-6
    # stability
    exchange_margin_cm1: float = 50.0

    def override(self, assignments):
        """Return a copy with ``key=value`` strings applied."""
        types = {f.name: type(f.default) for f in fields(self)}
        changes = {}
        for item in assignments:
            key, sep, value = item.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in types:
                raise ValueError(f"unknown setting '{item}'; known: {', '.join(types)}")
            if types[key] is tuple:
                changes[key] = tuple(float(v) for v in value.split(","))
            else:
                changes[key] = types[key](value)
        return replace(self, **changes)


DEFAULTS = Defaults()
