"""Exception hierarchy shared by all modules.

The CLI maps each class to a distinct exit status (see ``ionscope.cli``).
"""


class IonscopeError(Exception):
    """Base class for all package errors."""

    exit_status = 5


class ParseError(IonscopeError):
    """Malformed input file; the message names file and line."""

    exit_status = 3

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{self.path}:{lineno}: {message}")


class UnitMismatchError(IonscopeError):
    exit_status = 4

    def __init__(self, path, declared, expected):
        self.declared = declared
        self.expected = expected
        super().__init__(f"{path}: declared units '{declared}', expected '{expected}'")


class CurveError(IonscopeError):
    """Curve data violate the PotentialCurve invariants."""


class DomainError(IonscopeError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class OutOfDomainError(DomainError):
    """Evaluation requested outside the tabulated range with no tail attached."""


class StitchError(IonscopeError):
    def __init__(self, R_match, spline_value, tail_value, tol):
        self.R_match = R_match
        self.spline_value = spline_value
        self.tail_value = tail_value
        super().__init__(
            f"tail does not join the curve at R={R_match}: spline={spline_value!r}, "
            f"tail={tail_value!r}, |diff|={abs(spline_value - tail_value):.3e} > {tol:.1e}"
        )


class InsufficientDataError(IonscopeError):
    pass


class NoBoundWellError(IonscopeError):
    pass


class NoAllowedRegionError(IonscopeError):
    pass


class ResolutionError(IonscopeError):
    def __init__(self, step, suggested):
        self.step = step
        self.suggested = suggested
        super().__init__(
            f"step {step:.4g} bohr is too coarse to resolve the requested levels; "
            f"use at most {suggested:.4g} bohr"
        )


class IsotopeLookupError(IonscopeError, KeyError):
    def __init__(self, label, known):
        self.label = label
        super().__init__(f"unknown isotope '{label}'; known: {', '.join(sorted(known))}")

    def __str__(self):
        return self.args[0]


class FrameError(IonscopeError):
    pass


class GridOverlapError(IonscopeError):
    pass


class PairingError(IonscopeError):
    pass


class RankError(IonscopeError):
    pass


class ComponentCountError(IonscopeError):
    pass
