"""Saturation throughput of coexisting Wi-Fi (DCF) and LTE-LAA (LBT) networks.

The analytical side couples two per-technology backoff chains through their
mutual collision probabilities, optionally weighted by energy-detection
probabilities; the Monte-Carlo side replays the same slotted protocol event
by event as an independent cross-check.
"""

__version__ = "0.1.0"

from .core import (LaaParams, Scenario, Solution, ThroughputReport,
                   WifiParams, derived_durations, load_priority_class,
                   load_scenario, save_scenario, scenario_from_dict,
                   scenario_from_yaml, scenario_to_dict, scenario_to_yaml)
from .ed import EdConfig, dbm_to_mw, detection_probability
from .markov import (StationaryDistribution, laa_stationary, laa_tau,
                     wifi_stationary, wifi_tau)
from .mcsim import SimConfig, SimReport, simulate, simulate_with_detection
from .solver import (ConvergenceError, SolverConfig, solve_coexistence,
                     solve_wifi_only)
from .throughput import (EventDurations, EventProbabilities,
                         coexistence_throughput, event_durations,
                         event_probabilities, expected_event_time,
                         wifi_only_throughput)

__all__ = [
    "__version__",
    "WifiParams", "LaaParams", "Scenario", "Solution", "ThroughputReport",
    "load_priority_class", "derived_durations",
    "scenario_to_dict", "scenario_from_dict", "scenario_to_yaml",
    "scenario_from_yaml", "load_scenario", "save_scenario",
    "StationaryDistribution", "wifi_tau", "laa_tau",
    "wifi_stationary", "laa_stationary",
    "SolverConfig", "ConvergenceError", "solve_coexistence", "solve_wifi_only",
    "EventProbabilities", "EventDurations", "event_probabilities",
    "event_durations", "expected_event_time", "coexistence_throughput",
    "wifi_only_throughput",
    "EdConfig", "dbm_to_mw", "detection_probability",
    "SimConfig", "SimReport", "simulate", "simulate_with_detection",
]
