"""Lipschitz normal embedding tests for complex curve and hypersurface germs."""

from .cone import TangentCone, cone_contains_line, has_multiple_component, tangent_cone
from .curves import Reason, Status, Verdict, plane_curve_ne, space_curve_ne
from .errors import (DomainError, LipneError, ParseError, PrecisionError, PreconditionError,
                     SearchExhausted, StructuralError, TruncationError)
from .parser import parse_polynomial
from .poly import Polynomial, gcd, resultant, squarefree_part
from .puiseux import PuiseuxBranch, SpaceBranch, puiseux_expand, separation_exponent
from .revalidate import revalidate
from .slicer import SliceCertificate, SliceConfig, brieskorn_test, is_general, sectional_test
from .witness import WitnessConfig, WitnessReport, witness

__version__ = "0.1.0"
