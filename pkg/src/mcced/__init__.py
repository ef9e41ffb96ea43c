"""Relativistic point-charge electrodynamics with selectable coupling topology.

mcced simulates N classical charged particles interacting through retarded,
advanced, or mixed Lienard-Wiechert fields, with radiation reaction handled
by an integro-differential kernel integrator, a local third-order integrator,
and a reduction-of-order integrator.  Two coupling topologies are supported:
a conventional one in which every charge couples to the total field plus a
configured free radiation field, and a measurement-color one in which each
charge omits its own singular field and couples to its own half-difference
(radiative) field with a sign set by the arrow parameter p.  An exact
rational realization of the associated single-mode photon operator algebra
is included, together with a scenario runner, a verification suite, and a
command line interface.

Natural units with c = 1 and Heaviside-Lorentz field normalization are used
throughout; the metric signature is (+, -, -, -).
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    HorizonError,
    MccedError,
    NumericalLimitError,
    ParseError,
    SingularityError,
)
from .minkowski import FourVector, boost, minkowski_dot

__all__ = [
    "__version__",
    "MccedError",
    "ParseError",
    "ConvergenceError",
    "HorizonError",
    "SingularityError",
    "NumericalLimitError",
    "FourVector",
    "minkowski_dot",
    "boost",
]
