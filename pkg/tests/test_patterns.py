import csv
import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opspace.corpus import Label, SentencePair, tokenize
from opspace.patterns import (
    VAR_X,
    VAR_Y,
    Pattern,
    PatternGroup,
    distinct_pattern_count,
    extract_pattern,
    extract_template,
    filter_groups,
    group_patterns,
    is_identity,
    longest_common_substring,
    read_group_manifest,
    render_template,
    sort_groups,
    substitute,
    write_group_manifest,
    write_pattern_report,
)
from oracles import lcs_bruteforce

PREMISE = tokenize("A man with a tattoo behind his ear is playing a guitar.")
HYPOTHESIS = tokenize("A woman with a tattoo behind her ear is playing a guitar.")

tokens = st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=10)


class TestLongestCommonSubstring:
    def test_worked_example_run(self):
        sa, sb, length = longest_common_substring(PREMISE, HYPOTHESIS)
        assert length == 6
        run = ("ear", "is", "playing", "a", "guitar", ".")
        assert tuple(PREMISE[sa : sa + length]) == run
        assert tuple(HYPOTHESIS[sb : sb + length]) == run

    def test_identical_sequences(self):
        seq = ("a", "b", "c")
        assert longest_common_substring(seq, seq) == (0, 0, 3)

    def test_offset_run(self):
        assert longest_common_substring(("x", "p", "q"), ("p", "q", "x")) == (1, 0, 2)

    def test_no_common_token(self):
        assert longest_common_substring(("a",), ("b",)) is None

    def test_forbidden_tokens_break_runs(self):
        a = ("u", "v", "w")
        b = ("u", "v", "w")
        assert longest_common_substring(a, b, forbidden={"v"}) == (0, 0, 1)

    def test_forbidden_token_never_matches_itself(self):
        assert longest_common_substring(("z",), ("z",), forbidden={"z"}) is None

    @given(tokens, tokens)
    def test_matches_bruteforce(self, a, b):
        got = longest_common_substring(a, b)
        assert got == lcs_bruteforce(a, b)

    @given(tokens, tokens)
    def test_matches_bruteforce_with_forbidden(self, a, b):
        forbidden = frozenset("ab")
        got = longest_common_substring(a, b, forbidden=forbidden)
        assert got == lcs_bruteforce(a, b, forbidden=forbidden)


class TestExtractTemplate:
    def test_worked_example(self):
        extraction = extract_template(PREMISE, HYPOTHESIS)
        pattern = extraction.pattern
        assert render_template(pattern.premise_template) == "a man X his Y"
        assert render_template(pattern.hypothesis_template) == "a woman X her Y"
        assert pattern.num_variables == 2
        assert extraction.x_tokens == ("with", "a", "tattoo", "behind")
        assert extraction.y_tokens == ("ear", "is", "playing", "a", "guitar", ".")

    def test_identical_pair_gives_identity(self):
        extraction = extract_template(("a", "b"), ("a", "b"))
        assert extraction.pattern.premise_template == (VAR_X,)
        assert extraction.pattern.hypothesis_template == (VAR_X,)
        assert is_identity(extraction.pattern)

    def test_prefix_drop(self):
        extraction = extract_template(("two", "dogs", "run"), ("dogs", "run"))
        assert render_template(extraction.pattern.premise_template) == "two X"
        assert render_template(extraction.pattern.hypothesis_template) == "X"

    def test_disjoint_pair_stays_verbatim(self):
        extraction = extract_template(("a", "b"), ("c", "d"))
        assert extraction.pattern.premise_template == ("a", "b")
        assert extraction.pattern.hypothesis_template == ("c", "d")
        assert extraction.pattern.num_variables == 0
        assert extraction.x_tokens is None

    def test_single_variable_when_second_pass_finds_nothing(self):
        extraction = extract_template(("a", "b"), ("a", "c"))
        assert extraction.pattern.num_variables == 1
        assert extraction.pattern.premise_template == (VAR_X, "b")

    @given(tokens, tokens)
    def test_round_trip(self, premise, hypothesis):
        extraction = extract_template(premise, hypothesis)
        rebuilt_p = substitute(
            extraction.pattern.premise_template, extraction.x_tokens, extraction.y_tokens
        )
        rebuilt_h = substitute(
            extraction.pattern.hypothesis_template, extraction.x_tokens, extraction.y_tokens
        )
        assert rebuilt_p == tuple(premise)
        assert rebuilt_h == tuple(hypothesis)

    @given(tokens, tokens)
    def test_deterministic(self, premise, hypothesis):
        first = extract_template(premise, hypothesis)
        second = extract_template(premise, hypothesis)
        assert first == second

    @given(tokens, tokens)
    def test_canonical_variable_order(self, premise, hypothesis):
        pattern = extract_template(premise, hypothesis).pattern
        if pattern.num_variables == 2:
            assert pattern.premise_template.index(VAR_X) < pattern.premise_template.index(VAR_Y)
            assert pattern.premise_template.count(VAR_X) == 1
            assert pattern.hypothesis_template.count(VAR_X) == 1
            assert pattern.premise_template.count(VAR_Y) == 1
            assert pattern.hypothesis_template.count(VAR_Y) == 1

    @given(st.lists(st.sampled_from("abc"), min_size=1, max_size=6))
    def test_no_shared_token_means_zero_variables(self, premise):
        hypothesis = ["x" + t for t in premise]
        pattern = extract_template(premise, hypothesis).pattern
        assert pattern.num_variables == 0
        assert pattern.premise_template == tuple(premise)


def _pair(pid, premise, hypothesis, label=Label.ENTAILMENT):
    return SentencePair(pid, tuple(premise.split()), tuple(hypothesis.split()), label)


class TestGrouping:
    def test_same_pattern_same_label_groups_together(self):
        pairs = [
            _pair(0, "one man runs", "one woman runs", Label.CONTRADICTION),
            _pair(1, "the man sings", "the woman sings", Label.CONTRADICTION),
        ]
        groups = group_patterns(pairs)
        assert len(groups) == 1
        assert groups[0].members == [0, 1]

    def test_same_pattern_different_label_stays_apart(self):
        pairs = [
            _pair(0, "one man runs", "one woman runs", Label.CONTRADICTION),
            _pair(1, "the man sings", "the woman sings", Label.NEUTRAL),
        ]
        assert len(group_patterns(pairs)) == 2

    def test_empty(self):
        assert group_patterns([]) == []

    def test_sorted_by_size_within_label(self):
        pairs = [
            _pair(0, "a man runs", "a woman runs"),
            _pair(1, "a dog", "a cat"),
            _pair(2, "b dog", "b cat"),
            _pair(3, "c dog", "c cat"),
        ]
        groups = group_patterns(pairs)
        assert [g.size for g in groups] == [3, 1]


def _group(n_members, premise="a X b", hypothesis="a X c", label=Label.ENTAILMENT):
    pattern = Pattern(
        tuple(VAR_X if t == "X" else t for t in premise.split()),
        tuple(VAR_X if t == "X" else t for t in hypothesis.split()),
        1,
    )
    return PatternGroup(pattern, label, list(range(n_members)))


class TestFilterGroups:
    def test_below_min_support_removed(self):
        assert filter_groups([_group(19)], min_support=20) == []

    def test_at_min_support_kept(self):
        assert len(filter_groups([_group(20)], min_support=20)) == 1

    def test_identity_removed(self):
        identity = PatternGroup(Pattern((VAR_X,), (VAR_X,), 1), Label.ENTAILMENT, list(range(693)))
        assert filter_groups([identity], min_support=20) == []

    def test_identity_kept_when_flag_off(self):
        identity = PatternGroup(Pattern((VAR_X,), (VAR_X,), 1), Label.ENTAILMENT, list(range(30)))
        assert len(filter_groups([identity], min_support=20, drop_identity=False)) == 1

    def test_identity_dropped_for_any_label(self):
        identity = PatternGroup(Pattern((VAR_X,), (VAR_X,), 1), Label.CONTRADICTION, list(range(22)))
        assert filter_groups([identity], min_support=1) == []

    def test_min_support_validated(self):
        with pytest.raises(ValueError):
            filter_groups([], min_support=0)

    def test_distinct_pattern_count_ignores_label(self):
        groups = [
            _group(5, label=Label.ENTAILMENT),
            _group(5, label=Label.NEUTRAL),
            _group(5, premise="a X d"),
        ]
        assert distinct_pattern_count(groups) == 2


class TestReports:
    def test_pattern_report_shape(self, tmp_path):
        groups = [
            _group(3, label=Label.NEUTRAL),
            _group(5, premise="b X c", label=Label.ENTAILMENT),
        ]
        path = tmp_path / "patterns.csv"
        write_pattern_report(path, groups, meta={"config_hash": "abc"}, timestamp="t")
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        rows = list(csv.reader(io.StringIO("\n".join(lines))))
        assert rows[0] == ["label", "premise_template", "hypothesis_template", "count"]
        assert rows[1] == ["entailment", "b X c", "a X c", "5"]
        assert rows[2] == ["neutral", "a X b", "a X c", "3"]

    def test_group_manifest_round_trip(self, tmp_path):
        pairs = [
            _pair(0, "one man runs", "one woman runs", Label.CONTRADICTION),
            _pair(1, "the man sings", "the woman sings", Label.CONTRADICTION),
            _pair(2, "a dog", "a cat", Label.NEUTRAL),
        ]
        groups = group_patterns(pairs)
        path = tmp_path / "groups.jsonl"
        write_group_manifest(path, groups, meta={"config_hash": "abc"})
        loaded, meta = read_group_manifest(path)
        assert meta == {"config_hash": "abc"}
        assert loaded == sort_groups(groups)

    def test_manifest_preserves_reserved_variables(self, tmp_path):
        pairs = [_pair(0, "the man x", "the woman y", Label.CONTRADICTION)]
        groups = group_patterns(pairs)
        assert groups[0].pattern.premise_template == (VAR_X, "man", "x")
        path = tmp_path / "groups.jsonl"
        write_group_manifest(path, groups)
        loaded, _ = read_group_manifest(path)
        template = loaded[0].pattern.premise_template
        assert template == (VAR_X, "man", "x")  # the literal token survives
