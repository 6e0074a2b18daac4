"""Molecular ionization potentials and charge-exchange stability of ASr+ ions.

A + Sr+ -> ASr+ is stable against A + Sr+ -> A+ + Sr when the ionization
potential of the neutral ASr molecule lies below that of the free alkali atom.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .config import DEFAULTS
from .errors import DomainError, ParseError

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"


@dataclass(frozen=True)
class SpeciesConstants:
    """Energies in cm^-1; ``provenance`` maps field name to a source tag."""

    alkali: str
    IP_atom: int | float
    De_neutral: int | float
    De_ion: int | float
    provenance: tuple = ()

    def __post_init__(self):
        for name in ("IP_atom", "De_neutral", "De_ion"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{self.alkali}: {name} must be non-negative, got {getattr(self, name)}")


def molecular_ip(c):
    """IP(ASr) = IP(A) + De(ASr) - De(ASr+), exact for integer inputs."""
    return c.IP_atom + c.De_neutral - c.De_ion


@dataclass(frozen=True)
class Verdict:
    status: str
    delta: float  # IP(atom) - IP(molecule), cm^-1


def exchange_verdict(ip_molecule, ip_atom, margin=DEFAULTS.exchange_margin_cm1):
    delta = ip_atom - ip_molecule
    if delta > margin:
        return Verdict(STABLE, delta)
    if delta < -margin:
        return Verdict(UNSTABLE, delta)
    return Verdict(MARGINAL, delta)


def _number(token):
    value = float(token)
    return int(value) if value.is_integer() and "." not in token and "e" not in token.lower() else value


def _parse_text(text, path):
    records = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(path, lineno, f"expected 4 fields (alkali IP_atom De_neutral De_ion), got {len(parts)}")
        values, tags = [], []
        for name, tok in zip(("IP_atom", "De_neutral", "De_ion"), parts[1:]):
            num, _, tag = tok.partition("@")
            try:
                values.append(_number(num))
            except ValueError:
                raise ParseError(path, lineno, f"{name} is not a number: {num!r}") from None
            tags.append((name, tag or "unspecified"))
        try:
            records.append(SpeciesConstants(parts[0], *values, provenance=tuple(tags)))
        except DomainError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    return records


def _parse_json(text, path):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, f"invalid JSON: {exc.msg}") from None
    rows = doc.get("records", doc) if isinstance(doc, dict) else doc
    records = []
    for i, row in enumerate(rows):
        try:
            prov = tuple((k, v) for k, v in row.get("provenance", {}).items())
            records.append(
                SpeciesConstants(row["alkali"], row["IP_atom"], row["De_neutral"], row["De_ion"], prov)
            )
        except (KeyError, TypeError, AttributeError, DomainError) as exc:
            raise ParseError(path, 1, f"record {i}: {exc}") from None
    return records


def load_constants(path=None):
    """Read a constants dataset (bundled file when ``path`` is None).

    Both the tagged text format and the JSON emitted by ``ionscope stability
    --format json`` are accepted.
    """
    if path is None:
        text = resources.files("ionscope").joinpath("data/asr_constants.txt").read_text(encoding="utf-8")
        return _parse_text(text, "asr_constants.txt")
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return _parse_json(text, path)
    return _parse_text(text, path)


@dataclass(frozen=True)
class StabilityRow:
    alkali: str
    IP_atom: int | float
    De_neutral: int | float
    De_ion: int | float
    IP_molecule: int | float
    delta: int | float
    verdict: str
    provenance: dict

    def as_record(self):
        return asdict(self)


def evaluate(records, margin=DEFAULTS.exchange_margin_cm1):
    rows = []
    for c in records:
        ip = molecular_ip(c)
        v = exchange_verdict(ip, c.IP_atom, margin)
        rows.append(StabilityRow(c.alkali, c.IP_atom, c.De_neutral, c.De_ion, ip, v.delta, v.status, dict(c.provenance)))
    return rows
