"""Radar-assisted beam training for 802.11ad vehicle-to-infrastructure links."""

from .channel import DopplerConvention, EchoConfig, PulseTrain, Target, simulate_echo
from .config import ConfigError, build_experiment, load_config
from .estimator import CACFARDetector, DelayDopplerMap, Detection, PulseDopplerRadar, cfar_detect
from .golay import FrameKind, GolayPair, default_preamble, generate_golay_pair, standard_cef_pairs
from .link import LinkParams, PassGeometry, average_rate, default_mcs_table, select_mcs
from .mac import BeamGeometry, MacConfig, Scenario, run_comparison, simulate_misalignment
from .planner import RadarTiming, SectorGeometry, SweepPlan, plan_sweep, validate_plan

__version__ = "0.1.0"
