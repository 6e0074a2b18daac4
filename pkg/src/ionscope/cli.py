"""Command-line front end.

Exit statuses
-------------
0  success
2  usage error (bad flags, unknown setting, missing required option)
3  input file could not be read or parsed (message names file and line)
4  unit mismatch in an input header
5  computation error (no bound well, resolution too coarse, ...)
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import __version__, curvekit, polarfit, radiate, rovib, stability
from .config import DEFAULTS
from .errors import IonscopeError, PairingError

COMMANDS = ("constants", "levels", "fcf", "pa", "polfit", "stability", "tailfit", "pdm-slope")


class UsageError(Exception):
    pass


def _fmt_we(we):
    if we is None:
        return "-"
    return f"{we:.0f}" if we >= 100 else f"{we:.1f}"


def _tsv(header, rows):
    lines = ["\t".join(header)]
    lines += ["\t".join(str(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _isotopes(args):
    if not args.isotopes:
        raise UsageError(f"'{args.command}' needs --isotopes A,B")
    pair = [p.strip() for p in args.isotopes.split(",")]
    if len(pair) != 2 or not all(pair):
        raise UsageError(f"--isotopes wants two labels 'A,B', got {args.isotopes!r}")
    table = rovib.IsotopeTable.from_file(args.isotope_file) if args.isotope_file else None
    return rovib.reduced_mass(pair[0], pair[1], table)


def _curves(args, at_least=1):
    if len(args.curve) < at_least:
        raise UsageError(f"'{args.command}' needs at least {at_least} --curve")
    return [curvekit.read_curve(p) for p in args.curve]


def _grid_kw(cfg):
    return dict(
        steps_per_wavelength=cfg.steps_per_wavelength,
        min_points_per_wavelength=cfg.min_points_per_wavelength,
        decay_exponent=cfg.decay_exponent,
        max_points=cfg.max_grid_points,
        marginal_gap=cfg.marginal_gap,
    )


def cmd_constants(args, cfg):
    mu = _isotopes(args)
    records = []
    for c in _curves(args):
        sc = curvekit.spectroscopic_constants(c, mu, prominence_cm1=cfg.prominence_cm1)
        records.append((c, sc))
    if args.format == "json":
        return _json([{"species": c.species, "state": c.state, **asdict(sc)} for c, sc in records])
    rows = []
    for c, sc in records:
        wells = ";".join(f"{w.R_min:.2f}/{w.depth_signed:.0f}" for w in sc.extra_wells) or "-"
        bars = ";".join(f"{b.R_top:.2f}/{b.height_signed:.0f}" for b in sc.barriers) or "-"
        rows.append((c.state, f"{sc.Re:.2f}", f"{sc.De:.0f}", _fmt_we(sc.we), wells, bars))
    return _tsv(("State", "Re", "De", "we", "2nd-well", "barrier"), rows)


def cmd_levels(args, cfg):
    mu = _isotopes(args)
    out = []
    for c in _curves(args):
        levels = rovib.bound_levels(
            c, mu, args.J, edge_ratio_max=cfg.edge_ratio_max, **_grid_kw(cfg)
        )
        out.append((c, levels))
    if args.format == "json":
        return _json(
            [
                {
                    "state": c.state,
                    "v": lv.v,
                    "J": lv.J,
                    "E": lv.E,
                    "binding_cm1": lv.binding_cm1,
                    "marginal": bool(lv.marginal),
                }
                for c, levels in out
                for lv in levels
            ]
        )
    rows = [
        (c.state, lv.v, lv.J, f"{lv.E:.10f}", f"{lv.binding_cm1:.4f}" + ("*" if lv.marginal else ""))
        for c, levels in out
        for lv in levels
    ]
    return _tsv(("State", "v", "J", "E", "binding"), rows)


def cmd_fcf(args, cfg):
    mu = _isotopes(args)
    if len(args.curve) != 2:
        raise UsageError("'fcf' needs exactly two --curve (lower, upper)")
    lower, upper = _curves(args, 2)
    grid = radiate.shared_grid([lower, upper], mu, args.J, **_grid_kw(cfg))
    lo = rovib.bound_levels(lower, mu, args.J, grid=grid, edge_ratio_max=cfg.edge_ratio_max)
    up = rovib.bound_levels(upper, mu, args.J, grid=grid, edge_ratio_max=cfg.edge_ratio_max)
    F = radiate.fcf_matrix(lo, up)
    if args.format == "json":
        return _json({"lower": lower.state, "upper": upper.state, "fcf": F.tolist()})
    header = [f"{lower.state}\\{upper.state}"] + [f"v'={lv.v}" for lv in up]
    rows = [[f"v''={lv.v}"] + [f"{x:.6e}" for x in F[i]] for i, lv in enumerate(lo)]
    return _tsv(header, rows)


def _window(text):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--window wants numbers in cm^-1, got {text!r}") from None
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return tuple(parts)
    raise UsageError(f"--window wants W or LO,HI in cm^-1, got {text!r}")


def cmd_pa(args, cfg):
    mu = _isotopes(args)
    curves = _curves(args, 2)
    if not args.dipole:
        raise UsageError("'pa' needs --dipole transition-dipole files")
    tdms = [radiate.read_dipole(p) for p in args.dipole]
    lower, uppers = curves[0], curves[1:]
    targets = None
    if args.target:
        by_state = {c.state: c for c in curves}
        missing = [t for t in args.target if t not in by_state]
        if missing:
            raise PairingError(f"--target states {missing} not among the --curve inputs")
        targets = [by_state[t] for t in args.target]
        uppers = [u for u in uppers if u.state not in args.target]
    window = _window(args.window) if args.window else 1000.0
    schemes = radiate.pa_pathways(
        lower, uppers, tdms, mu, window, targets=targets, J=args.J, temperature_K=cfg.pa_temperature_K
    )
    if args.format == "json":
        recs = []
        for rank, s in enumerate(schemes, 1):
            d = asdict(s)
            d["rank"] = rank
            d["R_window"] = list(s.R_window)
            d["decay"] = [
                {"target_state": ch.target_state, "v": ch.v, "fraction": ch.fraction, "rate": ch.rate}
                for ch in s.decay
            ]
            recs.append(d)
        return _json(recs)
    rows = []
    for rank, s in enumerate(schemes, 1):
        best = max(s.decay, key=lambda ch: ch.fraction, default=None)
        rows.append(
            (
                rank,
                s.upper_state,
                s.v,
                f"{s.detuning_cm1:.3f}",
                f"{s.R_window[0]:.2f}-{s.R_window[1]:.2f}",
                f"{s.amplitude:.6e}",
                f"{s.bound_fraction:.6f}",
                f"{s.continuum_fraction:.6f}",
                f"{best.target_state}:{best.v}:{best.fraction:.4f}" if best else "-",
                f"{s.score:.6e}",
            )
        )
    return _tsv(
        ("rank", "upper", "v", "detuning", "R_window", "amplitude", "bound", "continuum", "top_decay", "score"),
        rows,
    )


def cmd_polfit(args, cfg):
    if not args.stark:
        raise UsageError("'polfit' needs --stark")
    reports = []
    for path in args.stark:
        samples = polarfit.read_stark(path)
        reports.append(
            polarfit.polarizability(samples, residual_flag=cfg.residual_flag, symmetry_ratio=cfg.symmetry_ratio)
        )
    if args.format == "json":
        recs = []
        for r in reports:
            recs.append(
                {
                    "state": r.state_label,
                    "ell": r.ell,
                    "component_alpha": {str(m): a for m, a in r.component_alpha.items()},
                    "valence": r.valence,
                    "valence_avg_first": r.valence_avg_first,
                    "order_difference": r.order_difference,
                    "tensor_spread": r.tensor_spread,
                    "core": r.core_alpha,
                    "total": r.total,
                    "flagged": r.flagged,
                }
            )
        return _json(recs)
    lines = []
    for r in reports:
        lines.append(f"state\t{r.state_label}")
        lines.append(f"ell\t{r.ell}")
        lines += [f"alpha_m{m}\t{a:.4f}" for m, a in r.component_alpha.items()]
        lines.append(f"valence\t{r.valence:.4f}")
        lines.append(f"valence_avg_first\t{r.valence_avg_first:.4f}")
        lines.append(f"order_difference\t{r.order_difference:.3e}")
        lines.append(f"tensor_spread\t{r.tensor_spread:.4f}")
        lines.append(f"core\t{r.core_alpha:.2f}")
        lines.append(f"total\t{r.total:.2f}")
        lines.append(f"residual_flag\t{'yes' if r.flagged else 'no'}")
        lines.append("")
    return "\n".join(lines)


def cmd_stability(args, cfg):
    rows = stability.evaluate(stability.load_constants(args.dataset), margin=cfg.exchange_margin_cm1)
    if args.format == "json":
        return _json({"records": [r.as_record() for r in rows]})
    return _tsv(
        ("Alkali", "IP_atom", "De_neutral", "De_ion", "IP_molecule", "Delta", "verdict"),
        [(r.alkali, r.IP_atom, r.De_neutral, r.De_ion, r.IP_molecule, r.delta, r.verdict) for r in rows],
    )


def cmd_tailfit(args, cfg):
    if args.r_fit_min is None:
        raise UsageError("'tailfit' needs --r-fit-min")
    fits = [(c, curvekit.fit_tail(c, args.r_fit_min)) for c in _curves(args)]
    if args.format == "json":
        return _json([{"state": c.state, "C4": f.C4, "C6": f.C6, "rms": f.rms} for c, f in fits])
    return _tsv(("State", "C4", "C6", "rms"), [(c.state, f"{f.C4:.6g}", f"{f.C6:.6g}", f"{f.rms:.3e}") for c, f in fits])


def cmd_pdm_slope(args, cfg):
    if args.r_fit_min is None:
        raise UsageError("'pdm-slope' needs --r-fit-min")
    if not args.dipole:
        raise UsageError("'pdm-slope' needs --dipole")
    table = rovib.IsotopeTable.from_file(args.isotope_file) if args.isotope_file else None
    out = []
    for path in args.dipole:
        d = radiate.read_dipole(path)
        if args.frame:
            d = radiate.shift_dipole_origin(d, args.frame, table)
        out.append((d, radiate.asymptotic_pdm_slope(d, args.r_fit_min)))
    if args.format == "json":
        return _json([{"state": d.bra_state, "origin": str(d.origin), "slope": s} for d, s in out])
    return _tsv(("State", "origin", "slope"), [(d.bra_state, str(d.origin), f"{s:.6f}") for d, s in out])


HANDLERS = {
    "constants": cmd_constants,
    "levels": cmd_levels,
    "fcf": cmd_fcf,
    "pa": cmd_pa,
    "polfit": cmd_polfit,
    "stability": cmd_stability,
    "tailfit": cmd_tailfit,
    "pdm-slope": cmd_pdm_slope,
}


def build_parser():
    p = argparse.ArgumentParser(prog="ionscope", description="Diatomic molecular-ion curve analysis.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--curve", action="append", default=[], metavar="PATH", help="potential curve file (repeatable)")
    p.add_argument("--dipole", action="append", default=[], metavar="PATH", help="dipole file (repeatable)")
    p.add_argument("--stark", action="append", default=[], metavar="PATH", help="Stark sample file (repeatable)")
    p.add_argument("--dataset", metavar="PATH", help="stability constants (text or JSON); default: bundled")
    p.add_argument("--isotopes", metavar="A,B", help="isotope pair, e.g. 6Li,87Sr")
    p.add_argument("--isotope-file", metavar="PATH", help="alternative isotope mass table (label mass_u)")
    p.add_argument("--J", type=int, default=0, help="rotational quantum number (default 0)")
    p.add_argument("--window", metavar="CM1", help="PA detuning window: W (red, -W..0) or LO,HI")
    p.add_argument("--target", action="append", default=[], metavar="STATE", help="PA decay target state")
    p.add_argument("--frame", metavar="FRAME", help="re-express dipoles in this frame before fitting")
    p.add_argument("--r-fit-min", type=float, metavar="BOHR", help="inner edge of the asymptotic fit region")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a numerical default")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = DEFAULTS.override(args.set)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"ionscope: error: {exc}", file=sys.stderr)
        return 2
    try:
        text = HANDLERS[args.command](args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ionscope: error: {exc}", file=sys.stderr)
        return 2
    except IonscopeError as exc:
        print(f"ionscope: error: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"ionscope: error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 3
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
