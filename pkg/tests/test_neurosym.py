from __future__ import annotations

import itertools

import pytest

from conftest import TEA_PAIR
from undercover.backends import QueueBackend, SyntheticBackend
from undercover.game import GameConfig, new_game, submit_description, transcript_view
from undercover.neurosym import (
    GUESS_FALLBACK,
    MAX_REPAIR_ITERATIONS,
    GuessWord,
    assemble_theory_text,
    autoformalize,
    build_knowledge_base,
    build_logical_record,
    early_stop_majority,
    initial_guess,
    refine_syntax,
    run_verification,
    update_guess,
    verify_description,
)
from undercover.prompts import build_context
from undercover.prover import (
    SYNTAX_MARKER,
    AlwaysBrokenProver,
    MockProver,
    ProofTrace,
    ProverVerdict,
    SequenceProver,
    VerdictKind,
    word_predicate,
)


class CountingBackend:
    """Wraps a reply policy and counts calls."""

    def __init__(self, reply="ALL x. Stub x"):
        self.calls = 0
        self.reply = reply

    def complete(self, messages):
        self.calls += 1
        return self.reply


def make_view(seed=19, descriptions=()):
    state = new_game(GameConfig(word_pair=TEA_PAIR, seed=seed))
    for text in descriptions:
        state = submit_description(state, state.next_speaker, text)
    return state, transcript_view(state, state.next_speaker or 1)


class TestKnowledgeBase:
    def test_facts_verbatim_rules_split_by_line(self):
        backend = QueueBackend(["rule one about squirrels\nrule two about trees"])
        kb = build_knowledge_base(
            ["An animal eats nuts and lives on the tree."], "Squirrel", backend
        )
        assert kb.facts == ("An animal eats nuts and lives on the tree.",)
        assert kb.rules == ("rule one about squirrels", "rule two about trees")

    def test_synthetic_rules_mention_the_goal(self):
        backend = SyntheticBackend(seed=0)
        kb = build_knowledge_base(
            ["An animal eats nuts and lives on the tree."], "Squirrel", backend
        )
        assert any("Squirrel" in rule for rule in kb.rules)

    def test_empty_reply_means_no_rules(self):
        kb = build_knowledge_base(["a clue"], "Word", QueueBackend(["\n\n"]))
        assert kb.rules == ()

    def test_empty_descriptions_rejected(self):
        with pytest.raises(ValueError):
            build_knowledge_base([], "Word", QueueBackend([]))


class TestAutoformalize:
    def test_one_axiom_per_sentence(self):
        backend = QueueBackend(["rule a\nrule b", "F1", "F2", "F3"])
        kb = build_knowledge_base(["fact one"], "Ceylon Tea", backend)
        theory = autoformalize(kb, "Ceylon Tea", backend)
        assert len(theory.axioms) == len(kb.facts) + len(kb.rules) == 3
        assert theory.axioms == ("F1", "F2", "F3")

    def test_theorem_names_target_predicate(self):
        backend = QueueBackend(["", "F1"])
        kb = build_knowledge_base(["fact one"], "Ceylon Tea", backend)
        theory = autoformalize(kb, "Ceylon Tea", backend)
        assert 'shows "EX x. CeylonTea x"' in theory.text
        assert theory.theorem == "EX x. CeylonTea x"

    def test_theory_text_is_byte_stable(self):
        def build():
            backend = SyntheticBackend(seed=4)
            kb = build_knowledge_base(["a steady clue"], "Sweet Orange", backend)
            return autoformalize(kb, "Sweet Orange", backend).text

        assert build() == build()

    def test_word_predicate_shapes(self):
        assert word_predicate("Ceylon Tea") == "CeylonTea"
        assert word_predicate("Earl Grey Tea") == "EarlGreyTea"
        assert word_predicate("Impatiens hawkeri") == "ImpatiensHawkeri"


class TestRefineSyntax:
    def make_theory(self, marker=False):
        axiom = f"ALL x. Clue x {SYNTAX_MARKER}" if marker else "ALL x. Clue x"
        text = assemble_theory_text(
            [("Fact 1", "a clue", axiom)], "Earl Grey Tea"
        )
        backend = QueueBackend(["rules"])
        kb = build_knowledge_base(["a clue"], "Earl Grey Tea", backend)
        from undercover.neurosym import Theory

        return Theory(
            axioms=(axiom,),
            theorem="EX x. EarlGreyTea x",
            target_word="Earl Grey Tea",
            text=text,
            source_kb=kb,
        )

    def test_clean_theory_checked_once_unchanged(self):
        theory = self.make_theory()
        prover = MockProver(TEA_PAIR)
        backend = CountingBackend()
        out, clean, _ = refine_syntax(theory, prover, backend)
        assert clean
        assert out.text == theory.text
        assert backend.calls == 0

    def test_never_clean_stops_after_five_repairs(self):
        theory = self.make_theory(marker=True)
        prover = AlwaysBrokenProver()
        backend = CountingBackend(reply=f"still broken {SYNTAX_MARKER}")
        out, clean, messages = refine_syntax(theory, prover, backend)
        assert not clean
        assert backend.calls == MAX_REPAIR_ITERATIONS == 5
        assert prover.calls == 5
        assert messages  # last error report retained

    def test_repair_fixed_on_second_try(self):
        theory = self.make_theory(marker=True)
        prover = SequenceProver(["syntax_error", "syntax_error", "valid"])
        backend = CountingBackend(reply="repaired text")
        out, clean, _ = refine_syntax(theory, prover, backend)
        assert clean
        assert backend.calls == 2
        assert out.text == "repaired text"

    def test_synthetic_repair_strips_marker(self):
        theory = self.make_theory(marker=True)
        prover = MockProver(TEA_PAIR)
        backend = SyntheticBackend(seed=0)
        out, clean, _ = refine_syntax(theory, prover, backend)
        assert clean
        assert SYNTAX_MARKER not in out.text


class TestEarlyStopMajority:
    def test_immediate_double(self):
        prover = SequenceProver(["valid", "valid"])
        verdict = early_stop_majority("any theory", prover)
        assert verdict.kind is VerdictKind.VALID
        assert prover.calls == 2

    def test_flake_then_majority(self):
        prover = SequenceProver(["valid", "invalid", "valid"])
        verdict = early_stop_majority("any theory", prover)
        assert verdict.kind is VerdictKind.VALID
        assert prover.calls == 3

    def test_exhaustive_all_prefixes_halt_with_majority(self):
        statuses = ("valid", "invalid", "syntax_error")
        for sequence in itertools.product(statuses, repeat=4):
            prover = SequenceProver(list(sequence))
            verdict = early_stop_majority("theory", prover)
            consumed = sequence[: prover.calls]
            assert prover.calls <= 4
            assert consumed.count(verdict.kind.value) >= 2

    def test_fourth_run_breaks_three_way_tie(self):
        for last in ("valid", "invalid", "syntax_error"):
            prover = SequenceProver(["valid", "invalid", "syntax_error", last])
            verdict = early_stop_majority("theory", prover)
            assert prover.calls == 4
            assert verdict.kind.value == last


class TestVerifyDescription:
    def test_citizen_clues_prove_citizen_word(self):
        backend = SyntheticBackend(seed=0)
        clues = ["A black tea flavoured with bergamot for a British nobleman."]
        verdict = verify_description(
            2, clues, TEA_PAIR.citizen_word, backend, MockProver(TEA_PAIR)
        )
        assert verdict.kind is VerdictKind.VALID
        assert verdict.trace is None

    def test_spy_clues_fail_citizen_word(self):
        backend = SyntheticBackend(seed=0)
        clues = ["A tea grown on the island of Ceylon, now Sri Lanka."]
        verdict = verify_description(
            6, clues, TEA_PAIR.citizen_word, backend, MockProver(TEA_PAIR)
        )
        assert verdict.kind is VerdictKind.INVALID
        assert verdict.trace is not None

    def test_unrepairable_theory_reports_syntax_error(self):
        backend = CountingBackend(reply=f"junk {SYNTAX_MARKER}")
        # formalization emits the marker and repair keeps it broken
        verdict = verify_description(
            2, ["a clue"], TEA_PAIR.citizen_word, backend, MockProver(TEA_PAIR)
        )
        assert verdict.kind is VerdictKind.SYNTAX_ERROR
        assert verdict.trace is not None


class TestLogicalRecord:
    def test_one_entry_per_speaking_opponent(self):
        state = new_game(GameConfig(word_pair=TEA_PAIR, seed=19))
        for text in ("clue a", "clue b", "clue c"):
            state = submit_description(state, state.next_speaker, text)
        view = transcript_view(state, 4)
        record = build_logical_record(
            view, view.own_word, SyntheticBackend(seed=0), MockProver(TEA_PAIR)
        )
        assert sorted(e.player for e in record.entries) == [1, 2, 3]
        assert record.covers(view)

    def test_round_two_uses_cumulative_history(self):
        from undercover.game import Phase, apply_votes

        state = new_game(GameConfig(word_pair=TEA_PAIR, seed=19))
        while state.phase is Phase.DESCRIBING:
            state = submit_description(
                state, state.next_speaker, f"r1 clue {state.next_speaker}"
            )
        state, _ = apply_votes(state, {1: 2, 2: 1, 3: 1, 4: 1, 5: 2, 6: 2})
        state = submit_description(state, 1, "r2 clue 1")

        captured = []

        class SpyBackend(SyntheticBackend):
            def complete(self, messages):
                captured.append(messages[-1]["content"])
                return super().complete(messages)

        view = transcript_view(state, 2)
        record = build_logical_record(
            view, view.own_word, SpyBackend(seed=0), MockProver(TEA_PAIR)
        )
        entry = record.entry_for(1)
        assert entry.facts == ("r1 clue 1", "r2 clue 1")
        assert entry.round == 2

    def test_per_entry_error_markers(self):
        class FailingBackend:
            def complete(self, messages):
                from undercover.errors import BackendUnavailable

                raise BackendUnavailable("down for repairs")

        state = new_game(GameConfig(word_pair=TEA_PAIR, seed=19))
        state = submit_description(state, 1, "clue a")
        view = transcript_view(state, 2)
        record = build_logical_record(
            view, view.own_word, FailingBackend(), MockProver(TEA_PAIR)
        )
        entry = record.entry_for(1)
        assert entry.verdict is None
        assert "down for repairs" in entry.error


class TestGuessOps:
    def test_initial_guess_from_fixture(self):
        _, view = make_view(descriptions=["a first clue"])
        guess = initial_guess(view, TEA_PAIR.citizen_word, QueueBackend(["Ceylon Tea"]))
        assert guess.word == "Ceylon Tea"
        assert guess.history[0][2] == "initial"
        assert not guess.flagged

    def test_own_word_reply_reprompts(self):
        _, view = make_view()
        backend = QueueBackend([TEA_PAIR.citizen_word, "Ceylon Tea"])
        guess = initial_guess(view, TEA_PAIR.citizen_word, backend)
        assert guess.word == "Ceylon Tea"

    def test_two_bad_replies_fall_back_to_sentinel(self):
        _, view = make_view()
        backend = QueueBackend(["", ""])
        guess = initial_guess(view, TEA_PAIR.citizen_word, backend)
        assert guess.word == GUESS_FALLBACK
        assert guess.flagged

    def update_context(self, view):
        return build_context(
            view,
            {
                "voted_out_player_number": 9,
                "voted_out_player_descriptions": "Player 9 (round 1): gone clue",
                "guessed_word": "signal-a",
                "isabelle_code": "theory text here",
                "error_code": "step 3 failed",
            },
        )

    def test_valid_verdict_keeps_word_without_backend(self):
        _, view = make_view()
        guess = GuessWord(word="signal-a", round_set=1)
        backend = QueueBackend([])  # would raise if consulted
        updated = update_guess(
            guess,
            "spy",
            ProverVerdict(VerdictKind.VALID),
            backend,
            self.update_context(view),
            own_word=TEA_PAIR.citizen_word,
            round_no=2,
        )
        assert updated.word == "signal-a"
        assert updated.history[-1][2] == "kept: guess verified"

    def test_spy_invalid_updates_word(self):
        _, view = make_view()
        guess = GuessWord(word="signal-a", round_set=1)
        backend = QueueBackend(["opponent's word: Navel Orange"])
        updated = update_guess(
            guess,
            "spy",
            ProverVerdict(VerdictKind.INVALID, ProofTrace(("no proof",))),
            backend,
            self.update_context(view),
            own_word=TEA_PAIR.citizen_word,
            round_no=2,
        )
        assert updated.word == "Navel Orange"
        assert "updated by model [spy/invalid]" in updated.history[-1][2]

    def test_citizen_keep_branch(self):
        _, view = make_view()
        guess = GuessWord(word="signal-a", round_set=1)
        backend = QueueBackend(["opponent's word: signal-a"])
        updated = update_guess(
            guess,
            "citizen",
            ProverVerdict(VerdictKind.INVALID, ProofTrace(("no proof",))),
            backend,
            self.update_context(view),
            own_word=TEA_PAIR.citizen_word,
            round_no=2,
        )
        assert updated.word == "signal-a"
        assert "kept by model [citizen/invalid]" in updated.history[-1][2]

    def test_own_word_proposal_rejected(self):
        _, view = make_view()
        guess = GuessWord(word="signal-a", round_set=1)
        backend = QueueBackend([f"opponent's word: {TEA_PAIR.citizen_word}"])
        updated = update_guess(
            guess,
            "citizen",
            ProverVerdict(VerdictKind.INVALID, ProofTrace(("no proof",))),
            backend,
            self.update_context(view),
            own_word=TEA_PAIR.citizen_word,
            round_no=2,
        )
        assert updated.word == "signal-a"
        assert updated.flagged

    def test_backend_outage_keeps_word_flagged(self):
        _, view = make_view()
        guess = GuessWord(word="signal-a", round_set=1)
        updated = update_guess(
            guess,
            "spy",
            ProverVerdict(VerdictKind.INVALID, ProofTrace(("no proof",))),
            QueueBackend([]),
            self.update_context(view),
            own_word=TEA_PAIR.citizen_word,
            round_no=2,
        )
        assert updated.word == "signal-a"
        assert updated.flagged


class TestVerificationDump:
    def test_theories_dump_to_thy_files(self, tmp_path):
        backend = SyntheticBackend(seed=0)
        run_verification(
            3,
            ["a clue about tea"],
            TEA_PAIR.citizen_word,
            backend,
            MockProver(TEA_PAIR),
            dump_dir=tmp_path,
        )
        files = list(tmp_path.glob("*.thy"))
        assert len(files) == 1
        assert "theory Verification" in files[0].read_text()


class TestFlakyProver:
    def test_seeded_flakiness_is_deterministic(self):
        from undercover.prover import FlakyProver

        def run():
            prover = FlakyProver(MockProver(TEA_PAIR), seed=3, flake_rate=0.5)
            theory = assemble_theory_text(
                [("Fact 1", "a black tea with bergamot and a nobleman", "F")],
                TEA_PAIR.citizen_word,
            )
            return [prover.check(theory)[0] for _ in range(8)]

        first, second = run(), run()
        assert first == second
        assert len(set(first)) > 1  # flakiness actually perturbs something

    def test_majority_vote_absorbs_flakiness(self):
        from undercover.prover import FlakyProver

        theory = assemble_theory_text(
            [("Fact 1", "a black tea with bergamot and a nobleman", "F")],
            TEA_PAIR.citizen_word,
        )
        for seed in range(20):
            prover = FlakyProver(MockProver(TEA_PAIR), seed=seed, flake_rate=0.3)
            verdict = early_stop_majority(theory, prover)
            assert prover.calls <= 4
            assert verdict.kind in (
                VerdictKind.VALID,
                VerdictKind.INVALID,
                VerdictKind.SYNTAX_ERROR,
            )
