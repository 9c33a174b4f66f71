"""Numerical laboratory for differential Harnack estimates under Ricci flow."""
from .entropy import EntropyValue, MonotonicityReport, eval_entropy, monotonicity_report
from .errors import (BlowUpRangeError, CoefficientDomainError, ConfigError, HarnackLabError,
                     NoAdmissibleDError, ParameterMismatchError, PositivityError,
                     ShapeMismatchError, StepSizeError, TimeRangeError, UnknownPresetError)
from .geometry import (ManifoldSpec, MetricState, grad_inner, hessian_defect, hessian_norm_sq,
                       integrate, laplacian, rm_norm_constant)
from .harnack import (PRESET_NAMES, HarnackParams, HarnackReport, check_nonpositivity,
                      choose_type1_d, eval_H, eval_rhs, harnack_field, harnack_rhs, preset,
                      residual_study, rhs_gradient)
from .heat_family import (LogSolution, init_near_delta, pairing_series, solve_backward,
                          solve_forward_heat, total_mass)
from .oracles import (SphereOracle, flat_heat_kernel, kernel_on_grid, li_yau_check,
                      sphere_closed_forms)
from .path_action import (ActionValue, SpaceTimePath, action, minimize_action,
                          verify_integrated, weight_form_crosscheck)
from .ricci_flow import FlowTrajectory, evolve, type_one_bound

__version__ = "0.1.0"
