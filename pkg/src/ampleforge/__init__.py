"""ampleforge: exact cohomology and ampleness certification for coherent
sheaves on projective space over prime fields."""

from .amplitude import (
    FilterSpec,
    ampleness_chain,
    amplitude_level_bound,
    estimate_f_amplitude,
    fujita_m0_search,
    p_ample_check,
    restriction_sandwich,
    t_ample_prefix,
    tensor_reg_bound,
)
from .functors import (
    BundleCatalog,
    direct_sum,
    frobenius_pullback,
    frobenius_pushforward,
    globally_generated,
    ideal_of_point,
    make_bundle,
    nlf_locus_dim,
    restrict_hyperplane,
    sym_power,
    twist,
)
from .groebner import (
    GroebnerBasis,
    buchberger,
    hilbert,
    hilbert_value,
    normal_form,
    saturate,
    support_dim,
    syzygies,
)
from .modfile import format_module, parse_module
from .modules import FreeModule, GradedMap, PresentedModule, line_bundle, structure_sheaf
from .resolve import betti, ext_module, linear_resolution, min_free_resolution, tensor_module, tor_dims
from .ring import GradedRing, Monomial, Polynomial, monomial_compare, parse_poly, poly_arith
from .sentinel import NEG_INF
from .sheafcoh import cech_oracle, cohomology_table, complex_reg_bound, h_dim, level, reg_t

__version__ = "0.1.0"
