"""Exact Appell hypergeometric series, the Fuchsian ODEs of their
univariate specializations, and a verified catalog of identities."""

from .exactnum import BiPoly, GenSeries, RatFunc, TruncSeries, UniPoly, ratfunc_normalize
from .hyperseries import AppellSpec, PfqSpec, appell_series, appell_terminating_eval, expr_expand, pfq_series, pochhammer
from .fuchsode import (Lode, builtin_ode, euler, f2sep, hpg32, kato, local_exponents, lode_apply, lode_equal,
                       projective_transform, pullback_transform, symmetric_square, xy2)
from .appellpde import (Curve, NoOdeFound, SystemId, WeylOp, appell_system, f1_curve_residual, minimal_ode,
                        order2_obstruction, reducibility_predicate, singular_locus, solves_system)
from .catalog import IdentityRecord, VerificationReport, catalog_entries, sample_parameters, verify_identity

__version__ = "0.1.0"
