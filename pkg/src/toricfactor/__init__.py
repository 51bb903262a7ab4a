"""Exact toric fan computations for birational cobordisms and torific blowups."""

from .lattice import LatticeError, QuotientLattice, quotient_by, smith_normal_form
from .fans import (
    Cone,
    ConeError,
    Fan,
    FanError,
    barycentric_subdivision,
    desingularize,
    dual_cone,
    fans_equal,
    is_refinement,
    star_subdivision,
)
from .monomials import MonomialIdeal, hilbert_basis, ideal_product, newton_subdivision, torific_generators
from .cobordism import BoundaryPair, CobordismFan, CycleError, boundary_fans, build_cobordism
from .torific import TorificRun, elementary_factor, tor_isom_check, torify_chart, toroidal_certificate

__version__ = "0.1.0"
