"""Finite-rank Hilbert C*-module complexes: Dirac operators, Hodge theory and K0-valued indices."""

from .algebra import AlgebraDescriptor, AlgebraElement, K0Class, k0_add, k0_class, k0_neg, k0_sub, make_algebra
from .complex import (Complex, DiracPair, adjoint_complex, bounded_transform_complex, complex_from_matrices,
                      dirac, graph_norm_complex, laplace, laplace_k, make_complex, structural_checks,
                      zero_complex)
from .exceptions import (ComplexPropertyError, ExactnessError, HilbertComplexError, SingularOperatorError,
                         ValidationError)
from .fredholm import (ChainMap, Parametrix, associated_parametrix, chain_homotopy_check, euler_index,
                       index_complex, index_operator, index_with_adjoint_of_parametrix_check,
                       induced_cohomology_map, kdim_index, psi_restrict, pseudo_inverse_parametrix,
                       putinar_tev, quasicomplex_parametrix, ses_index_check, validate_chain_map,
                       verify_joint_parametrix, weak_index)
from .hodge import HodgeSplit, check_hodge_equivalences, cohomology, hodge_split
from .module import HilbertModule, ModuleElement, direct_sum, graph_module, inner_product, orthonormal_dimension
from .operator import (BoundedTransformPair, Operator, adjoint, bounded_transform, check_bt_identities,
                       closed_range_report, compose, herm_funcalc, kernel_projection, operator_norm,
                       polar_decompose, range_projection)
from .perturbation import (PerturbationReport, gap_metric, hat_operator, homotopy_path_check, perturb_sweep,
                           relative_bound, riesz_metric, v_lemma_check, v_operator)
from .products import direct_sum_complex, sharp_dirac, tensor_algebra, tensor_complex, tensor_parametrix
from .report import Report

__version__ = "0.1.0"
