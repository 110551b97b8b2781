"""pareval: deterministic evaluation and multi-criteria leaderboards for
explainable question answering systems."""

from .corpus import (
    Article,
    Corpus,
    Direction,
    FactRef,
    Instance,
    Prediction,
    PredictionSet,
    RatingTable,
    ScoreTable,
    SubmissionLog,
    ValueTable,
    load_directions,
    load_gold,
    load_predictions,
    load_ratings,
    load_score_table,
    load_submissions,
    save_gold,
    save_predictions,
)
from .errors import InfeasibleSamplingError, InputError
from .leaderboard import (
    ParetoRanking,
    RankGroup,
    RankingInput,
    dominates,
    rank_average,
    rank_single,
    rank_weighted,
    ranked_pareto_fronts,
)
from .metrics import (
    InstanceScores,
    Location,
    SystemEvaluation,
    SystemScores,
    answer_inside,
    answer_scores,
    evaluate_system,
    joint_scores,
    loca,
    normalize_answer,
    sp_scores,
    surface_stats,
)
from .synth import SyntheticVariant, derive_synthetic

__version__ = "0.1.0"
