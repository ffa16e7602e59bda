from __future__ import annotations

import pytest

from conftest import GOLDEN_DESCRIBE_REPLIES, TEA_PAIR
from undercover.agents import (
    AgentKind,
    AgentSpec,
    AttributiveAgent,
    Hypothesis,
    NaiveAgent,
    NeuroSymbolicAgent,
    ScriptedAgent,
)
from undercover.backends import QueueBackend, ScriptedBackend, SyntheticBackend
from undercover.errors import BackendUnavailable, IncompleteRecord
from undercover.game import (
    GameConfig,
    Phase,
    new_game,
    submit_description,
    transcript_view,
)
from undercover.neurosym import GuessWord, LogicalRecord, RecordEntry
from undercover.prover import ProofTrace, ProverVerdict, VerdictKind


def fresh_state(seed=19, n_players=6):
    return new_game(GameConfig(word_pair=TEA_PAIR, seed=seed, n_players=n_players))


def view_for(state, player):
    return transcript_view(state, player)


def voting_state(seed=19):
    state = fresh_state(seed)
    while state.phase is Phase.DESCRIBING:
        state = submit_description(
            state, state.next_speaker, f"clue {state.round}-{state.next_speaker}"
        )
    return state


class TestAgentSpec:
    def test_script_required_iff_scripted(self):
        with pytest.raises(ValueError):
            AgentSpec(kind=AgentKind.SCRIPTED)
        with pytest.raises(ValueError):
            AgentSpec(kind=AgentKind.NAIVE, script={})
        AgentSpec(kind=AgentKind.SCRIPTED, script={(1, "describing"): "x"})


class TestNaiveAgent:
    def test_clean_describe(self):
        agent = NaiveAgent(1, QueueBackend(["Description: A fragrant drink."]))
        action = agent.act(view_for(fresh_state(), 1), Phase.DESCRIBING)
        assert action.kind == "described"
        assert action.text == "A fragrant drink."
        assert action.parse_attempts == 1
        assert not action.fallback_used

    def test_vote_fallback_after_garbage(self):
        # four unusable replies exhaust 1 + 3 retries; lowest other id wins
        backend = QueueBackend(["???", "no idea", "hmm", "still nothing"])
        agent = NaiveAgent(3, backend)
        state = voting_state(seed=2)  # spy at 1; all six alive
        # build an alive set {2,3,5} by viewing a shrunken game instead
        view = view_for(state, 3)
        object.__setattr__(view, "alive", (2, 3, 5))
        action = agent.act(view, Phase.VOTING)
        assert action.kind == "voted"
        assert action.target == 2
        assert action.fallback_used
        assert action.parse_attempts == 4

    def test_self_vote_reply_is_retried(self):
        backend = QueueBackend(["Vote: Player 3", "Vote: Player 5"])
        agent = NaiveAgent(3, backend)
        action = agent.act(view_for(voting_state(), 3), Phase.VOTING)
        assert action.target == 5
        assert action.parse_attempts == 2

    def test_describe_fallback_uses_own_reference(self):
        backend = QueueBackend(["step 1...\nstep 2...", "x.\ny.", "a.\nb.", "c.\nd."])
        agent = NaiveAgent(1, backend, own_reference=TEA_PAIR.citizen_reference)
        action = agent.act(view_for(fresh_state(), 1), Phase.DESCRIBING)
        assert action.fallback_used
        assert action.text == TEA_PAIR.citizen_reference  # already one sentence

    def test_backend_outage_propagates(self):
        agent = NaiveAgent(1, QueueBackend([]))
        with pytest.raises(BackendUnavailable):
            agent.act(view_for(fresh_state(), 1), Phase.DESCRIBING)

    def test_history_accumulates_privately(self):
        agent = NaiveAgent(1, QueueBackend(["Description: one.", "Vote: Player 2"]))
        agent.act(view_for(fresh_state(), 1), Phase.DESCRIBING)
        agent.act(view_for(voting_state(), 1), Phase.VOTING)
        roles = [m["role"] for m in agent.history]
        assert roles == ["system", "user", "assistant", "user", "assistant"]


class TestAttributiveAgent:
    def test_case_study_reply_parses_to_citizen(self):
        state = fresh_state()
        state = submit_description(state, 1, "A tea named after a nobleman.")
        state = submit_description(state, 2, "A tea with lemon, noble name.")
        agent = AttributiveAgent(3, QueueBackend([GOLDEN_DESCRIBE_REPLIES[3]]))
        attribution, action = agent.act(view_for(state, 3), Phase.DESCRIBING)
        assert attribution.self_hypothesis is Hypothesis.CITIZEN
        assert action.text == (
            "A type of tea that is often served with milk and sugar and named "
            "after a British nobleman."
        )

    def test_spy_claim_reply(self):
        raw = (
            "Reasoning Process:\nstep 1: nothing matches my card.\n"
            "step 2: I am likely the spy.\nDescription:\nA warm drink."
        )
        agent = AttributiveAgent(6, QueueBackend([raw]))
        attribution, _ = agent.act(view_for(fresh_state(), 6), Phase.DESCRIBING)
        assert attribution.self_hypothesis is Hypothesis.SPY

    def test_missing_reasoning_section_retries(self):
        backend = QueueBackend(
            [
                "Description: missing the reasoning part.",
                "Reasoning Process:\nstep 1: fine.\nDescription:\nA better clue.",
            ]
        )
        agent = AttributiveAgent(1, backend)
        attribution, action = agent.act(view_for(fresh_state(), 1), Phase.DESCRIBING)
        assert action.parse_attempts == 2
        assert action.text == "A better clue."

    def test_attribution_produced_even_on_fallback(self):
        backend = QueueBackend(["junk"] * 4)
        agent = AttributiveAgent(2, backend, own_reference=TEA_PAIR.citizen_reference)
        attribution, action = agent.act(view_for(fresh_state(), 2), Phase.DESCRIBING)
        assert action.fallback_used
        assert attribution.self_hypothesis is Hypothesis.CITIZEN
        assert set(attribution.others) == {1, 3, 4, 5, 6}

    def test_vote_with_suspect_map(self):
        raw = (
            "Reasoning Process:\nstep 1: Player 6 is likely the spy.\n"
            "step 2: I am not the spy.\nVote:\nPlayer 6"
        )
        agent = AttributiveAgent(1, QueueBackend([raw]))
        attribution, action = agent.act(view_for(voting_state(), 1), Phase.VOTING)
        assert action.target == 6
        assert attribution.others[6] is Hypothesis.SPY
        assert attribution.others[2] is Hypothesis.CITIZEN


def entry(player, verdict_kind, round_no=1):
    verdict = (
        ProverVerdict(VerdictKind.VALID)
        if verdict_kind is VerdictKind.VALID
        else ProverVerdict(verdict_kind, ProofTrace(("why not",)))
    )
    return RecordEntry(
        player=player,
        round=round_no,
        verdict=verdict,
        theory_digest="d" * 64,
        facts=(f"clue from {player}",),
        rules=(f"rule about {player}",),
    )


class TestNeuroSymbolicAgent:
    def test_prompt_carries_verdict_lines(self):
        state = fresh_state()
        state = submit_description(state, 1, "clue one")
        state = submit_description(state, 2, "clue two")
        view = view_for(state, 3)
        record = LogicalRecord(
            entries=(entry(1, VerdictKind.VALID), entry(2, VerdictKind.INVALID))
        )
        raw = (
            "Reasoning Process:\nstep 1: player 2 fails the prover.\n"
            "step 2: I am not the spy.\nDescription:\nA gentle clue."
        )
        agent = NeuroSymbolicAgent(3, QueueBackend([raw]))
        guess = GuessWord(word="signal-x", round_set=1)
        attribution, action = agent.act(view, Phase.DESCRIBING, record, guess)
        prompt = agent.history[1]["content"]
        assert "Player 1: logically valid" in prompt
        assert "Player 2: logically invalid" in prompt
        assert "signal-x" in prompt
        assert "rule about 1" in prompt
        assert action.text == "A gentle clue."

    def test_incomplete_record_rejected(self):
        state = fresh_state()
        state = submit_description(state, 1, "clue one")
        view = view_for(state, 3)
        agent = NeuroSymbolicAgent(3, QueueBackend(["unused"]))
        guess = GuessWord(word="signal-x", round_set=1)
        with pytest.raises(IncompleteRecord):
            agent.act(view, Phase.DESCRIBING, LogicalRecord(), guess)

    def test_empty_history_allows_empty_record(self):
        view = view_for(fresh_state(), 1)  # nobody has spoken
        raw = (
            "Reasoning Process:\nstep 1: no clues yet.\n"
            "step 2: I cannot tell.\nDescription:\nAn opening clue."
        )
        agent = NeuroSymbolicAgent(1, QueueBackend([raw]))
        guess = GuessWord(word="signal-y", round_set=1)
        attribution, action = agent.act(view, Phase.DESCRIBING, LogicalRecord(), guess)
        assert action.text == "An opening clue."
        prompt = agent.history[1]["content"]
        assert "None" in prompt  # empty validity and reasoning sections


class TestScriptedAgent:
    def test_table_script(self):
        agent = ScriptedAgent(
            1, {(1, "describing"): "scripted clue", (1, "voting"): 6}
        )
        action = agent.act(view_for(fresh_state(), 1), Phase.DESCRIBING)
        assert action.text == "scripted clue"
        action = agent.act(view_for(voting_state(), 1), Phase.VOTING)
        assert action.target == 6

    def test_policy_callable(self):
        agent = ScriptedAgent(
            2, lambda view, phase: min(view.others_alive())
        )
        action = agent.act(view_for(voting_state(), 2), Phase.VOTING)
        assert action.target == 1


class TestBackends:
    def test_scripted_backend_round_trip(self, tmp_path):
        backend = ScriptedBackend()
        backend.add("hello prompt", "canned reply")
        path = tmp_path / "replies.json"
        backend.save(path)
        loaded = ScriptedBackend.from_file(path)
        reply = loaded.complete([{"role": "user", "content": "hello prompt"}])
        assert reply == "canned reply"

    def test_scripted_backend_misses_loudly(self):
        with pytest.raises(BackendUnavailable):
            ScriptedBackend().complete([{"role": "user", "content": "unknown"}])

    def test_synthetic_backend_is_deterministic(self):
        view = view_for(fresh_state(), 2)
        from undercover.prompts import build_context, render_prompt

        prompt = render_prompt("naive_describe", build_context(view))
        messages = [{"role": "user", "content": prompt}]
        a = SyntheticBackend(seed=9).complete(messages)
        b = SyntheticBackend(seed=9).complete(messages)
        assert a == b
        assert SyntheticBackend(seed=10).complete(messages) != a

    def test_synthetic_vote_is_legal(self):
        from undercover.prompts import build_context, render_prompt

        state = voting_state()
        for voter in state.alive:
            view = view_for(state, voter)
            prompt = render_prompt("naive_vote", build_context(view))
            reply = SyntheticBackend(seed=1).complete(
                [{"role": "user", "content": prompt}]
            )
            from undercover.parsing import parse_vote

            target = parse_vote(reply, valid_targets=view.others_alive())
            assert target in view.others_alive()
