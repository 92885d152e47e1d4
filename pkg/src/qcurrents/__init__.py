"""Exact symbolic verification of free-field current algebras: oscillator
kernels, trigonometric and elliptic currents, screening operators, vertex
operators, and the relation suites tying them together."""

from .scalars import ParameterContext, Scalar, scalar, qpow, qint, qnum, E
from .qseries import (QProductForm, TruncSeries, DeltaTerm, ZeroFactorError,
                      theta_prod, theta_ratio, q_difference, jackson_integral,
                      rational_reconstruct)
from .oscillators import (GeneratorId, gid, ModeCoefficient, LogForm,
                          CommutatorTable, StructureError,
                          verify_cartan_inverse)
from .currents import CurrentCatalog
from .noexp import (NormalOrderedOperator, OperatorExpression, wick_pair,
                    wick_product, exchange_ratio, commutator_delta,
                    collapse_delta_terms, serre_check, p_limit)
from .verify import (RunConfig, RelationReport, SUITE_IDS, run_suite,
                     emit_report, list_relations,
                     check_screening_difference)

__all__ = [
    "ParameterContext", "Scalar", "scalar", "qpow", "qint", "qnum", "E",
    "QProductForm", "TruncSeries", "DeltaTerm", "ZeroFactorError",
    "theta_prod", "theta_ratio", "q_difference", "jackson_integral",
    "rational_reconstruct",
    "GeneratorId", "gid", "ModeCoefficient", "LogForm", "CommutatorTable",
    "StructureError", "verify_cartan_inverse",
    "CurrentCatalog",
    "NormalOrderedOperator", "OperatorExpression", "wick_pair",
    "wick_product", "exchange_ratio", "commutator_delta",
    "collapse_delta_terms", "serre_check", "p_limit",
    "RunConfig", "RelationReport", "SUITE_IDS", "run_suite", "emit_report",
    "list_relations", "check_screening_difference",
]
