"""Deep Q-learning for sales time series: extra-price optimisation and supply control."""
from .agent import AgentConfig, DQNAgent
from .config import RunConfig, default_config, load_config, parse_config
from .demand import DataError, DemandSeries, load_csv, normalize, save_csv, synth_generate
from .nn import ConfigurationError, NetworkParams, adam_step, backward, forward, init_network
from .pricing import PricingConfig, PricingEnv, f_sales, oracle_optimal_action
from .replay import Experience, NotReady, ReplayBuffer
from .reporting import write_report
from .supply import EpisodeTrace, SupplyConfig, SupplyEnv
from .trainer import EpisodeMetrics, TrainingReport, evaluate_policy, run_training

__version__ = "0.1.0"
