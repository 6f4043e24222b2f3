"""szego_borel - numerical laboratory for the Szegő and Bergman kernels of Im z2 = (Re z1)^{2m}."""

from .phi import ModelOrder, phi
from .zeros import ZeroTable, locate_zeros
from .singular import EvalPoint
from .nagel import K_nagel, KB_nagel
from .borel import K_borel, KB_borel
from .cache import TableCache
from .errors import ConvergenceError, DomainError, LabError

__version__ = "0.1.0"
__all__ = ['ModelOrder', 'phi', 'ZeroTable', 'locate_zeros', 'EvalPoint', 'K_nagel', 'KB_nagel',
           'K_borel', 'KB_borel', 'TableCache', 'LabError', 'DomainError', 'ConvergenceError']
