"""Exact computation of canonical scattering diagrams, broken lines, theta
functions and cyclic-quotient deformation data for log Calabi-Yau surface
pairs presented by a toric model."""

from .broken import (BrokenLine, check_consistency, enumerate_broken_lines,
                     lift, transport_lift)
from .classes import ClassLattice, DegreeFunctional
from .cyclic import (ChainPair, ChainSpec, PResolution, TSingularity,
                     dual_singularity_type, family_equations, hj_resolve,
                     normalize_cone, p_resolution)
from .lattice import angular_order, primitive, wedge
from .scattering import (ScatteringDiagram, Wall, extract_invariants,
                         initial_diagram, loop_identity_holds, nu_forward,
                         pull_back_canonical, scatter_complete)
from .series import (TruncatedElement, WallFunction, apply_wall_crossing,
                     transport_element, transport_monomial)
from .theta import (ORIGIN, Relation, ThetaElement, canonical_point,
                    central_structure_constants, chart_equation,
                    check_weight_homogeneity, find_relations,
                    multiply_expand, mumford_product_toric, potential,
                    structure_constants, theta_multiply)
from .tropical import (PairError, PairSpec, TropicalPair, build_pair,
                       looijenga_check, model_factorization)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"


def canonical_diagram(pair, order, ample=None, epsilon=None):
    """Convenience pipeline: functional, completion, pullback to B."""
    functional = DegreeFunctional(pair, ample=ample, epsilon=epsilon)
    init = initial_diagram(pair, functional, order)
    completed = scatter_complete(init)
    return pull_back_canonical(completed)
