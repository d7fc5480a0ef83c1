"""All complex solutions of lossless zero-injection power flow equations.

Monodromy in susceptance space over the nontrivial solution variety, with a
total-degree homotopy solver as an independent cross-check, and the solution
symmetry group for quotient counting.
"""

from ._monoflow import *  # noqa: F401,F403
from ._monoflow import __version__  # noqa: F401
