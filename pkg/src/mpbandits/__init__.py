"""Decentralized adversarial multi-armed bandits on a collision channel:
strategies, adversaries, and a Monte Carlo harness.
"""

from .adversaries import (
    AdaptiveProp1,
    AdversarySpec,
    adaptive_prop1_losses,
    remark_sequence,
    stochastic_losses,
)
from .channel import run_pair_collision_wrapped, send_bits_via_collision
from .codec import PrgStream, RandomShared, dequantize, prg_expand, quantize
from .env import (
    Feedback,
    Game,
    GameTranscript,
    LossSequence,
    RegretReport,
    best_fixed_subset_loss,
    compute_regret,
    effective_loss,
)
from .errors import (
    ConfigurationError,
    FilteringAssumptionError,
    InvariantViolation,
    ProtocolViolationError,
    StateError,
)
from .harness import (
    ExperimentConfig,
    fit_slope,
    run_experiment,
    tv_distance,
)
from .learners import (
    AnytimeExp3,
    Exp3,
    SwapRegretLearner,
    anytime_learning_rate,
    exp3_step,
    stationary_distribution,
    swap_regret_step,
)
from .multiplayer import (
    block_schedule,
    phi_assign,
    phi_assignment,
    run_multiplayer,
)
from .pair_collision import (
    CollisionInfoPair,
    build_estimator,
    conditional_second,
    filter_resample,
    marginal_first,
    ordered_assignment,
    phase_params,
    run_pair_collision_oracle,
    sample_coupled_bits,
    unordered_pair_probs,
)
from .pair_no_collision import (
    BlockSchedule,
    make_no_collision_pair,
    run_no_collision,
)
from .rng import Stream, derive_seed, numpy_generator

__version__ = "0.1.0"
