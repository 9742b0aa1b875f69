"""Wightman correlators of the harmonic and quartic oscillator in general states."""
from .core import (ConvergenceError, ExpSum, PhysicalParams, SignVector, TimeLabel,
                   TruncationError, eval_expsum, make_F, make_f)
from .diagrams import (Diagram, canonicalize, correlator_diagrammatic, enumerate_diagrams,
                       evaluate_diagram, label_assignments, step_weight, symmetry_factor)
from .perturbation import correlator_perturbative, enumerate_insertions, perturbative_orders
from .quadrature import QuadratureSpec, integrate
from .states import (ChiTable, Coherent, CustomDensity, CustomXi, Mixture, Number,
                     Thermal, Vacuum, XiTable, bose_factor, chi_table, xi_table)
from .transforms import chi_to_xi, xi_to_chi
from .wick import wightman_free, wightman_free_xi

__version__ = "0.1.0"
