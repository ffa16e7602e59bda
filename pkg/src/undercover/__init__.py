"""Social-deduction arena with attribution-aware agent pipelines."""

from .agents import (
    AgentAction,
    AgentKind,
    AgentSpec,
    AttributiveAgent,
    Hypothesis,
    IdentityAttribution,
    NaiveAgent,
    NeuroSymbolicAgent,
    ScriptedAgent,
)
from .game import (
    GameConfig,
    GameOutcome,
    GameState,
    Phase,
    Reason,
    Role,
    TranscriptView,
    VoteTally,
    Winner,
    apply_votes,
    new_game,
    outcome,
    submit_description,
    tally_votes,
    transcript_view,
)
from .metrics import (
    AttributionReport,
    GameMetrics,
    Transcript,
    aggregate_game_metrics,
    attribution_report,
    attributional_alignment,
    attributional_score,
    attributional_soundness,
    round_weights,
)
from .neurosym import (
    GuessWord,
    KnowledgeBase,
    LogicalRecord,
    Theory,
    autoformalize,
    build_knowledge_base,
    build_logical_record,
    early_stop_majority,
    initial_guess,
    refine_syntax,
    update_guess,
    verify_description,
)
from .prover import MockProver, ProofTrace, ProverVerdict, VerdictKind
from .similarity import MockEmbedder, ServiceEmbedder, SimilarityIndex
from .tournament import (
    ContestReport,
    ContestSpec,
    GameRecord,
    MockRuntime,
    replay,
    run_contest,
    run_game,
    score_records,
)
from .words import DEFAULT_WORD_PAIRS, WordPair

__version__ = "0.1.0"
