"""3D placement and antenna orientation of mmWave UAV base stations for
guaranteed line-of-sight coverage of users with limited line of view."""

from .channel import RadioParams, max_range, path_loss, snr
from .coverage import UavPose, User, f_los, in_lov_region, user_sees, uav_covers
from .scenario import Region, Scenario, generate_grid, generate_users, load_scenario, save_scenario
from .solver import Solution, audit, baseline_solve, evaluate, greedy_solve, oracle_solve

__version__ = "0.1.0"
