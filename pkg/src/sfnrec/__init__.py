"""Random subgraphs of scale-free networks and network-assisted distributed recommendation."""

from .theory import BETA0, PowerLawParams, beta_prime, critical_failure_rate, subgraph_report
from .graph import Graph, generate, percolate_report
from .scenario import Scenario, SIGSpec, build_scenario, reference_scenario
from .protocols import ProtocolConfig, SimMetrics, run_baseline, run_mailing_list, run_word_of_mouth
from .predictors import predict_baseline, predict_mailing_list, predict_word_of_mouth

__version__ = "0.1.0"
