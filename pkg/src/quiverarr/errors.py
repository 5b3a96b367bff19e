"""Exception types shared across the package.

The CLI maps these onto exit codes: ParseError -> 2, UnsupportedError and
HypothesisError -> 3, InternalInconsistencyError -> 4.
"""


class QuiverArrError(Exception):
    pass


class ShapeError(QuiverArrError):
    """Dimension mismatch in a matrix or quiver operation."""


class InvalidComplexError(QuiverArrError):
    """d composed with d is not zero."""


class InvalidQuiverError(QuiverArrError):
    """Quiver data violates the defining relations."""


class MissingLoopError(QuiverArrError):
    """Loop data requested for a loop that does not exist in the graph."""


class UnsupportedError(QuiverArrError):
    """Operation requires a hypothesis the input does not satisfy
    (typically centrality of the arrangement)."""


class HypothesisError(QuiverArrError):
    """A theorem hypothesis (non-resonance, smallness) fails and the
    operation refuses to proceed."""


class SymmetryError(QuiverArrError):
    """An affine map does not preserve the arrangement, or group data
    is not closed."""


class NotFiniteError(QuiverArrError):
    """Group closure exceeded the search bound."""


class InternalInconsistencyError(QuiverArrError):
    """A uniqueness or solvability guarantee failed; signals a bug."""


class ParseError(QuiverArrError):
    """Malformed input file."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)
