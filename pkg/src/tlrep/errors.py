"""Exception hierarchy shared by all modules."""


class TLRepError(Exception):
    """Base class for every error raised by :mod:`tlrep`."""


class DimensionError(TLRepError, ValueError):
    """Operands have incompatible shapes."""


class DegenerateInputError(TLRepError, ValueError):
    """A vector became (numerically) linearly dependent on its predecessors.

    ``index`` is 0-based.
    """

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(
            f"vector #{index + 1} is linearly dependent on the preceding ones "
            f"(residual norm {residual:.3e})"
        )


class InvalidCoeffSetError(TLRepError, ValueError):
    """Coefficient matrices are not orthonormal or have the wrong shape."""


class InvalidBasisError(InvalidCoeffSetError):
    """A scan basis is not orthonormal."""


class OrthogonalLegsError(TLRepError, ArithmeticError):
    """``P12 P23`` vanishes, so no value of Q can be extracted."""


class RankOneImpossibleError(TLRepError, ValueError):
    """A singular coefficient matrix cannot carry a rank-one solution."""


class UndefinedProjectorError(TLRepError, ArithmeticError):
    """The Jones-Wenzl recursion hit an infinite coefficient."""


class SizeLimitError(TLRepError, MemoryError):
    """A dense matrix would exceed the configured size cap."""


class BranchError(TLRepError, ValueError):
    """Q lies outside the range covered by the R-matrix construction."""


class NotInCatalogError(TLRepError, KeyError):
    """The requested labels are not a known solution (use ``force=True``)."""
