"""Exact invariant-field toolkit for GL(n,q), SL(n,q) and U(n,q) acting on
vectors and covectors: invariant constructors, relation verification,
coefficient recovery, and derivation certificates."""

__version__ = "0.1.0"

from invfield.gf import FieldCtx, FieldElem, FieldError, enumerate_field, make_field
from invfield.mpoly import (MPoly, PolyError, RatExpr, RingEndo, Space,
                            apply_endo, frobenius_endo, involution_endo,
                            jacobian_rank, parse_poly, poly_det, rat_eq)
from invfield.groups import (GroupElem, GroupError, GroupSpec, action_endo,
                             group_enumerate, group_generators, group_order)
from invfield.invariants import (GeneratorSet, InvariantError, Label,
                                 build_invariant, dickson, dickson_star,
                                 generating_set, moore, mui, mui_star,
                                 pairing_u, pairing_v, parse_label,
                                 resolved_conventions)
from invfield.relations import (Certificate, CoeffSolution, RelationError,
                                build_certificate, certificate_from_json,
                                certificate_to_json, check_T, check_T_star,
                                check_det_identity, check_hypersurface_n2,
                                make_r_template, solve_relation_coeffs,
                                verify_certificate)
