"""
Model: N/A (setup).
Purpose: Central numerical configs from yaml for easy tuning without code changes.
Dependencies: pyyaml.
Ext Hooks: Point HOMOG_CONFIG at an alternative yaml file.
"""
import os

import yaml

current_dir = os.path.dirname(__file__)
config_file = os.environ.get('HOMOG_CONFIG', os.path.join(current_dir, 'config.yaml'))

with open(config_file, 'r') as f:
    config = yaml.safe_load(f)

# Torus fields
TORUS_MIN_POINTS = config['torus']['min_points']
EVAL_CHUNK = config['torus']['eval_chunk']

# Cell problem
CELL_MIN_POINTS = config['cell']['min_points']
CELL_DEFAULT_POINTS = config['cell']['default_points']
P_MAX = config['cell']['p_max']
DENSE_LIMIT_1D = config['cell']['dense_limit_1d']
DENSE_LIMIT_2D = config['cell']['dense_limit_2d']
SHIFT_MARGIN = config['cell']['shift_margin']
EIGEN_MAX_ITERATIONS = config['cell']['max_iterations']
EIGEN_TOLERANCE = config['cell']['eigen_tolerance']
HESSIAN_STEP = config['cell']['hessian_step']
POSITIVITY_FLOOR = config['cell']['positivity_floor']

# Legendre transform
NEWTON_TOLERANCE = config['legendre']['newton_tolerance']
NEWTON_MAX_ITERATIONS = config['legendre']['newton_max_iterations']
CACHE_DECIMALS = config['legendre']['cache_decimals']
TABLE_STEP_1D = config['legendre']['table_step_1d']
TABLE_STEP_2D = config['legendre']['table_step_2d']

# Hopf-Lax
GRID_DIVISIONS = config['hopflax']['grid_divisions']
RADIUS_INFLATION = config['hopflax']['radius_inflation']
REFINE_TOLERANCE = config['hopflax']['refine_tolerance']
PROFILE_POINTS = config['hopflax']['profile_points']
GROWTH_SAMPLES = config['hopflax']['growth_samples']
GROWTH_LEVELS = config['hopflax']['growth_levels']

# Viscous solvers and kernels
POINTS_PER_PERIOD = config['viscous']['points_per_period']
TAIL_BUDGET = config['viscous']['tail_budget']
POTENTIAL_STEP_BOUND = config['viscous']['potential_step_bound']
SPACING_FACTOR = config['viscous']['spacing_factor']
RENORMALIZE_EVERY = config['viscous']['renormalize_every']
FD_POINTS_PER_PERIOD = config['viscous']['fd_points_per_period']
KERNEL_POINTS_PER_UNIT = config['viscous']['kernel_points_per_unit']
KERNEL_BUMP_WIDTH = config['viscous']['kernel_bump_width']
KERNEL_WINDOW_SIGMAS = config['viscous']['kernel_window_sigmas']
BRIDGE_STEPS = config['viscous']['bridge_steps']
MC_CHUNK = config['viscous']['mc_chunk']
MAX_BOX_POINTS = config['viscous']['max_box_points']
FD_MAX_POINTS = config['viscous']['fd_max_points']

# Bloch / Gaussian asymptotics
BLOCH_DEFAULT_POINTS = config['bloch']['default_points']
FIBER_STEP = config['bloch']['fiber_step']
WINDOW_SIGMAS = config['bloch']['window_sigmas']
PIVOT_TOLERANCE = config['bloch']['pivot_tolerance']
FIBER_SPARSE_LIMIT = config['bloch']['sparse_limit']

# Harness
WORKERS = config['harness']['workers']
OUTPUT_DIR = config['harness']['output_dir']
OUTPUT_ENV = 'HOMOG_OUTPUT_DIR'

# Server
SERVER_DATA_DIR = config['server']['data_dir']
SERVER_MAX_POINTS_1D = config['server']['max_points_1d']
SERVER_MAX_POINTS_2D = config['server']['max_points_2d']

# Logging
LOG_LEVEL = config['logging']['level']
LOG_FORMAT = config['logging']['format']
