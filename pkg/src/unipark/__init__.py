"""Feedback laws, certificates, and simulation tools for unicycle parking."""

from .adaptive import (AdaptiveSpec, AdaptiveState, SlipParams, adaptive_control,
                       adaptive_lyapunov, quadratic_sandwich, slip_dynamics,
                       update_law, upsilon_bound)
from .backstepping import (BacksteppingAux, Direction, GesControllerSpec,
                           bidirectional_aux, bidirectional_control, c_underline,
                           psi, psi2, unidirectional_aux, unidirectional_control)
from .clf import (ClfGains, ClfKind, LiePair, UNITY_GAINS, clf_gradient,
                  clf_state_space, clf_value, lie_derivatives, lie_from_gradient)
from .errors import (DeadbandParked, DegenerateTransform, DomainLimit, DomainViolation,
                     HorizonExceeded, InadmissibleInitialCondition, InsufficientDecay,
                     NonFiniteState, ParkError, QuadratureFailure, ScenarioError,
                     SingularRho, TailNotConverged)
from .inverse_optimal import (ConstantEpsilon, CostFunction, CostKind, Epsilon,
                              IocControllerSpec, IocVariant, RhoEpsilon,
                              evaluate_cost_J, eta_prime_inverse, eta_value,
                              ioc_control, legendre_ratio, running_cost,
                              saturation_schedules, squared_quadratic_running_cost)
from .model import (CartesianPose, InputPair, ORIGIN_POSE, PolarState, PolarDerivative,
                    RHO_MIN, StateSpace, cartesian_dynamics, in_state_space,
                    polar_dynamics, state_norm, to_cartesian, to_polar, wrap_angle)
from .safety import (SafetySpec, curb_metrics, curb_psi, initial_offset,
                     k2_admissible_interval, k2_midpoint, nonovershoot_control)
from .sim import (LyapunovReport, Metrics, Scenario, Trajectory, ZeroControl,
                  compute_metrics, fit_exponential, integrate, verify_lyapunov)
from .timed import (FxtSpec, PtSpec, V_DEAD, fxt_control, fxt_scale, inverse_dilation,
                    pt_control, pt_scale, settling_time_bound, time_dilation)

__version__ = "0.1.0"
