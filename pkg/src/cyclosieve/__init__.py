"""cyclosieve: p-th power residue symbols and cyclotomic congruence criteria.

Submodules mirror the layers of the tool: ``cyclotomy`` (integer side),
``finite_field``, ``residue_symbol``, ``criteria``, ``survey`` (bounds,
batch scans, searches) and ``cli``.  Hot loops live in ``kernels``.
"""

from .cyclotomy import (
    CycloParams,
    IntPair,
    attach_pair,
    cyclotomic_poly,
    mult_order,
    phi_homogeneous,
    residue_frame,
    split_n,
)
from .finite_field import (
    ExtField,
    FieldElement,
    build_extension,
    dlog_small_subgroup,
    element_of_order,
    exact_order,
    find_generator,
)
from .residue_symbol import EmbeddingContext, galois_transport, make_context, symbol
from .criteria import (
    CriterionVerdict,
    EpsilonFamily,
    audit_pair,
    check_main,
    check_special,
    check_twisted,
    epsilon_family,
    product_identity,
)

__version__ = "0.1.0"
