"""Prime-residue scheduling for discovering single-hop network topologies."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .experiments import (
    AggregateStats, ExperimentConfig, ExperimentResult, TrialRecord, bound_curve,
    linear_fit, run_trials,
)
from .primes import (
    LemmaViolation, PrimeList, dusart_bound, find_distinguishing_prime, prime_count,
    schedule_length_bound, sieve_upto, theorem1_bound,
)
from .schedule import Schedule, active_set, build_local_schedule, build_schedule, rounds_elapsed
from .simulator import (
    SimResult, TraceRound, oracle_no_ic_link_round, run_discovery, run_with_trace,
)
from .topology import Topology, apply_erasures, build_local, generate_random
