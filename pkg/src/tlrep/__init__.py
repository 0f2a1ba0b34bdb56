"""Unitary tensor space representations of the Temperley-Lieb algebra.

Submodules:

* :mod:`tlrep.densec`  - dense complex matrix helpers and JSON format
* :mod:`tlrep.tlcore`  - projections, TL relations, trace and W criteria, bounds on Q
* :mod:`tlrep.qsu2`    - q-numbers, U_q(su2) Clebsch-Gordan coefficients, TL vectors/pairs
* :mod:`tlrep.jwtower` - Jones-Wenzl projectors, their traces, admissible Q
* :mod:`tlrep.braid`   - R-matrices and Yang-Baxter residuals
* :mod:`tlrep.catalog` - named explicit solutions
* :mod:`tlrep.scanner` - exhaustive basis-subset search
"""

from .densec import DEFAULT_TOL, Tolerance
from .errors import TLRepError
from .tlcore import CoeffSet, TLVerdict, check_axioms

__all__ = ["DEFAULT_TOL", "Tolerance", "TLRepError", "CoeffSet", "TLVerdict", "check_axioms"]
__version__ = "0.1.0"
