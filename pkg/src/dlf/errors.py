"""Exception hierarchy shared by all dlf modules.

Every failure that a caller can act on derives from :class:`DlfError`, so the
command line layer can map any library failure to a single exit code while
keeping the specific condition in the exception type and payload.
"""

from __future__ import annotations


class DlfError(Exception):
    """Base class for all errors raised by this package."""

    #: short machine-readable tag used in CLI error reports
    code = "error"

    def payload(self) -> dict:
        """Extra key/value details for machine-readable error reports."""
        return {}


class InvalidParameterError(DlfError):
    """A constructor argument is out of range or malformed."""

    code = "invalid-parameter"


class UnsupportedKindError(DlfError):
    """An unknown family kind, scheme, or variant name was requested."""

    code = "unsupported-kind"


class SeparationError(DlfError):
    """Two nodes collapse under some map: psi_i(x_j) is too close to psi_i(x_i)."""

    code = "node-separation"

    def __init__(self, i: int, j: int, gap: float, tau: float):
        self.i, self.j, self.gap, self.tau = i, j, gap, tau
        super().__init__(
            f"map {i} does not separate node {j} from node {i}: "
            f"|psi_{i}(x_{j}) - psi_{i}(x_{i})| = {gap:.3e} <= {tau:.1e}"
        )

    def payload(self) -> dict:
        return {"i": self.i, "j": self.j, "gap": self.gap, "tau": self.tau}


class DegenerateDerivativeError(DlfError):
    """A map has (numerically) zero slope at its own node."""

    code = "degenerate-derivative"

    def __init__(self, i: int, slope: float, tau: float):
        self.i, self.slope, self.tau = i, slope, tau
        super().__init__(
            f"|psi_{i}'(x_{i})| = {abs(slope):.3e} <= {tau:.1e}; "
            "the basis is not defined at this node"
        )

    def payload(self) -> dict:
        return {"i": self.i, "slope": self.slope, "tau": self.tau}


class DomainError(DlfError):
    """An evaluation point lies outside the declared domain."""

    code = "domain-violation"


class DerivativeOrderError(DlfError):
    """A derivative order beyond what the family provides in closed form."""

    code = "insufficient-derivative-order"


class FdStepError(DlfError):
    """The finite-difference oracle detected catastrophic cancellation."""

    code = "fd-step"

    def __init__(self, message: str, disagreement: float):
        self.disagreement = disagreement
        super().__init__(message)

    def payload(self) -> dict:
        return {"richardson_disagreement": self.disagreement}


class AssemblyError(DlfError):
    """A collocation system cannot be formed from the given problem/basis."""

    code = "assembly"


class SingularSystemError(DlfError):
    """The collocation matrix is singular or numerically unusable."""

    code = "singular-system"

    def __init__(self, message: str, cond_estimate: float):
        self.cond_estimate = cond_estimate
        super().__init__(f"{message} (condition estimate {cond_estimate:.3e})")

    def payload(self) -> dict:
        return {"cond_estimate": self.cond_estimate}


class NewtonError(DlfError):
    """Damped Newton failed to reach the residual tolerance."""

    code = "newton"

    def __init__(self, message: str, residual_norm: float, iterations: int):
        self.residual_norm = residual_norm
        self.iterations = iterations
        super().__init__(
            f"{message}: residual {residual_norm:.3e} after {iterations} iterations"
        )

    def payload(self) -> dict:
        return {"residual_norm": self.residual_norm, "iterations": self.iterations}


class ContourError(DlfError):
    """A contour fails enclosure, clearance, or analyticity requirements."""

    code = "contour"


class ExprError(DlfError):
    """Base class for expression language failures."""

    code = "expr"


class ExprSyntaxError(ExprError):
    """Malformed expression text; carries the byte offset of the failure."""

    code = "expr-syntax"

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at offset {offset})")

    def payload(self) -> dict:
        return {"offset": self.offset}


class ExprEvalError(ExprError):
    """Unbound variable or numeric domain failure during evaluation."""

    code = "expr-eval"


class ExprDiffError(ExprError):
    """Differentiation of an expression that has no derivative rule."""

    code = "expr-diff"
