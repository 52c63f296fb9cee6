"""Numerical laboratory for averaging operators on two-step nilpotent
groups over tilted submanifolds: rank invariants, thin-slab scaling
ratios, dyadic stacks at the critical exponent, and the rank-one planar
blow-up geometry."""

from .averaging import (TimeInterval, average, chart_average, dilate_field,
                        maximal, orbit_points, scaling_identity_check,
                        witness_t)
from .config import ScenarioConfig, load_config, parse_config, serialize_config
from .fields import (Field, GridSpec, indicator_R_delta, lp_norm, mc_lp_norm,
                     mc_volume, projection_Pi, slab_volume, stack_field)
from .group import (GroupPoint, GroupStructure, HypothesisResult,
                    ThetaFunctional, check_hypothesis, dilate, inverse,
                    is_metivier, multiply, point, rank_r, reduce_to_m1,
                    s_matrix)
from .nikodym import (NikodymApprox, NikodymConfig, PerronTree,
                      approx_from_json, approx_to_json, nikodym_approx,
                      nikodym_experiment, perron_tree, rotate_measure,
                      sector_slope, slope_time, verify_assignment)
from .reports import FitResult, ScalingReport, loglog_fit, read_csv, write_csv
from .slab import (SlabConfig, admissible_eps, sample_U_eps, slab_experiment,
                   stack_experiment)
from .surface import (Chart, SurfaceMeasure, bump, chart_at, disk_measure,
                      integrate_shell, lebesgue_measure, shell_center,
                      sphere_measure, w_delta_measure, w_delta_measure_mc)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
