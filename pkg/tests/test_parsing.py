from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GOLDEN_DESCRIBE_REPLIES, GOLDEN_VOTE_REPLIES
from undercover.errors import OutOfRange, Unparseable
from undercover.parsing import (
    parse_description,
    parse_guess_word,
    parse_self_hypothesis,
    parse_suspected_spies,
    parse_vote,
    reasoning_section,
)


class TestParseDescription:
    def test_marker_extraction(self):
        raw = "Reasoning...\nDescription:\nA fruit that is red."
        assert parse_description(raw) == "A fruit that is red."

    def test_marker_same_line(self):
        raw = "Description:A type of tea served warm."
        assert parse_description(raw) == "A type of tea served warm."

    def test_last_marker_wins(self):
        raw = "Description: draft one.\nActually no.\nDescription: final clue."
        assert parse_description(raw) == "final clue."

    def test_single_sentence_without_marker(self):
        raw = (
            "A type of tea that originates from the island formerly known as "
            "Ceylon, now Sri Lanka."
        )
        assert parse_description(raw) == raw

    def test_multi_sentence_without_marker_fails(self):
        with pytest.raises(Unparseable):
            parse_description("Step 1...\nStep 2...")

    def test_empty_reply_fails(self):
        with pytest.raises(Unparseable):
            parse_description("   ")

    def test_case_study_replies_all_parse(self):
        for seat, raw in GOLDEN_DESCRIBE_REPLIES.items():
            text = parse_description(raw)
            assert text and "\n" not in text


class TestParseVote:
    def test_structured_vote(self):
        assert parse_vote("Vote:\nPlayer 6") == 6

    def test_inline_vote_sentence(self):
        assert parse_vote("I vote Player 3 because...") == 3

    def test_case_study_vote_phrase(self):
        assert parse_vote("Vote:I will vote for player 6.") == 6

    def test_bare_number_reply(self):
        assert parse_vote("4") == 4

    def test_abstention_is_unparseable(self):
        with pytest.raises(Unparseable):
            parse_vote("I abstain")

    def test_out_of_range_target(self):
        with pytest.raises(OutOfRange):
            parse_vote("Vote: Player 9", valid_targets=(1, 2, 3))

    def test_self_vote_rejected_via_targets(self):
        with pytest.raises(OutOfRange):
            parse_vote("Vote: Player 4", valid_targets=(1, 2, 3, 5, 6))

    def test_case_study_votes_all_parse(self):
        expected = {1: 6, 2: 6, 3: 6, 4: 6, 5: 6, 6: 5}
        for seat, raw in GOLDEN_VOTE_REPLIES.items():
            assert parse_vote(raw) == expected[seat]

    @given(st.integers(min_value=1, max_value=9), st.sampled_from([
        "Vote:\nPlayer {n}",
        "I will vote for player {n}.",
        "Vote: after much thought, Player {n}",
        "vote player {n}",
    ]))
    @settings(max_examples=100)
    def test_common_phrasings(self, n, shape):
        assert parse_vote(shape.format(n=n)) == n


class TestReasoningSection:
    def test_template_format(self):
        raw = "Reasoning Process:\nstep 1: x\nstep 2: y\nDescription:\nA clue."
        assert reasoning_section(raw) == "step 1: x\nstep 2: y"

    def test_stage_header_format(self):
        raw = GOLDEN_DESCRIBE_REPLIES[3]
        section = reasoning_section(raw)
        assert "I am not the spy" in section
        assert "milk and sugar" not in section  # description excluded

    def test_missing_header_yields_empty(self):
        assert reasoning_section("just a sentence") == ""

    def test_vote_marker_bounds_section(self):
        raw = GOLDEN_VOTE_REPLIES[1]
        section = reasoning_section(raw)
        assert "I will vote for player 6" not in section


class TestSelfHypothesis:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("Therefore, I am not the spy.", "citizen"),
            ("Therefore, I am likely not the spy.", "citizen"),
            ("I am likely the spy, so I will blend in.", "spy"),
            ("I think I am the spy here.", "spy"),
            ("I cannot deduce if I am the spy or not.", "citizen"),
            ("Since I am not certain if I am the spy or not, I describe.", "citizen"),
            ("", "citizen"),
            ("The clues are all about fruit.", "citizen"),
        ],
    )
    def test_classification(self, text, expected):
        assert parse_self_hypothesis(text) == expected

    def test_case_study_self_claims(self):
        assert parse_self_hypothesis(reasoning_section(GOLDEN_DESCRIBE_REPLIES[1])) == "citizen"
        assert parse_self_hypothesis(reasoning_section(GOLDEN_DESCRIBE_REPLIES[3])) == "citizen"
        for seat in (1, 2, 3, 4, 5):
            section = reasoning_section(GOLDEN_VOTE_REPLIES[seat])
            assert parse_self_hypothesis(section) == "citizen"


class TestSuspectedSpies:
    def test_finds_asserted_suspects(self):
        text = "Player 6 is likely the spy. Player 2 seems honest."
        assert parse_suspected_spies(text) == (6,)

    def test_multiple_suspects_sorted(self):
        text = "Player 4 is the spy? No, Player 2 must be the spy."
        assert parse_suspected_spies(text) == (2, 4)

    def test_no_suspects(self):
        assert parse_suspected_spies("everyone aligns with my card") == ()


class TestParseGuess:
    def test_bare_word(self):
        assert parse_guess_word("Ceylon Tea") == "Ceylon Tea"

    def test_labelled_reply(self):
        raw = "Reasoning...\nopponent's word: Navel Orange"
        assert parse_guess_word(raw) == "Navel Orange"

    def test_bracketed_reply(self):
        assert parse_guess_word("opponent's word: [Peach Blossom]") == "Peach Blossom"

    def test_empty_fails(self):
        with pytest.raises(Unparseable):
            parse_guess_word("opponent's word:\n")
