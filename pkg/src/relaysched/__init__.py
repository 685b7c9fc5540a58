"""Relay-aided vehicular downlink scheduling.

Vehicles near a roadside base station can relay downlink data to vehicles
with poor direct links over short-range V2V radio.  This package models the
links, integrates their service amounts over a scheduling period, and selects
relay/aided/common roles plus relay pairings under several policies, with a
batch experiment CLI on top (`relaysched --help`).
"""

from .assignment import Assignment, BenefitMatrix, brute_force_assignment, pad_to_square, solve_max_assignment
from .channel import (
    DSRC_PATH_LOSS,
    LTE_PATH_LOSS,
    PathLossModel,
    RadioConfig,
    default_radio_config,
    path_loss,
    rate_two_hop,
    rate_v2i,
    rate_v2v,
    snr_linear,
    to_bits_per_second,
)
from .mobility import BasePosition, VehicleState, distance_between, distance_to_bs, predict_position
from .scenario import Scenario, ScenarioFormatError, ScenarioSpec, generate, load_scenario, save_scenario
from .scheduler import (
    InvalidScheduleError,
    Schedule,
    ServiceTables,
    build_rate_tables,
    build_service_tables,
    evaluate_schedule,
    solve_irrs,
    solve_msrs,
    solve_noncooperative,
    solve_optimal_bruteforce,
    validate_schedule,
)
from .service import (
    Period,
    QuadratureResult,
    QuadratureSpec,
    integrate_rate,
    service_two_hop,
    service_v2i,
    service_v2v,
)

__version__ = "0.1.0"
