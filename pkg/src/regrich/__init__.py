"""Richness, transitivity and rigidity of matrix data for projective control systems."""
from .errors import (ConstructionError, DimensionError, ExactnessError, FormatError, OrderingError,
                     PartitionError, RegrichError, SingularMatrixError, UnsupportedClassError,
                     ZeroVectorError)
from .linalg import (DEFAULT_CFG, LinearOperator, MatrixSpace, ToleranceConfig, adjoint_operator,
                     krylov_reach, span_basis)
from .transitivity import (INCONCLUSIVE, NOT_TRANSITIVE, TRANSITIVE, TransitivityVerdict,
                           exact_oracle_source2, is_transitive, sudoku_transitive, witness_search)
from .spectral import (JordanType, ModTClasses, acyclicity, jordan_basis, jordan_type,
                       mod_t_classes, normal_order, rectangle_decomposition)
from .richness import (Datum, conspicuous_poor_check, is_rich, lambda_space, regularity_rank,
                       regularity_report, singular_states, stabilization_index)
from .constraints import adapted_basis, classify, elementary_constraints, good_match
from .rigidity import (RigidityReport, construct_witness, fiber_codim_lower_bound,
                       rigidity_upper_bound)
from .schubert import (RankTable, YoungDiagram, cup_nonzero, diagram_from_jumps,
                       fiber_codim_formula, min_area_partner)
from .scanner import ParamSystem, ScanReport, eval_system, scan

__version__ = "0.1.0"
