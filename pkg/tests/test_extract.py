"""APA statistic extraction, recomputation, and consistency labels."""

import pytest

from stataudit import extract
from stataudit.extract import (ReportedTest, check_consistency,
                               parse_statistics, parse_with_diagnostics,
                               recompute_p, render_apa)

SAMPLE = (
    "The groups differed, t(34) = 2.10, p = .043, and the association held, "
    "r(38) = .40, p = .01. A smaller study found t(20) = 1.0, p < .05. "
    "The contrast was marginal, Z = 1.70, p = .045. Cell counts gave "
    "X2(1, N = 90) = 3.20, p = .07, while the omnibus test, "
    "F(2, 114) = 3.02, p = .053, trailed it. One more was flat, "
    "t(44) = 0.52, ns."
)


class TestParsing:
    def test_finds_every_statistic(self):
        tests = parse_statistics(SAMPLE)
        assert [t.statistic for t in tests] == [
            "t", "r", "t", "Z", "chi2", "F", "t"]

    def test_chi2_carries_sample_n(self):
        chi2 = [t for t in parse_statistics(SAMPLE) if t.statistic == "chi2"]
        assert chi2[0].sample_n == 90
        assert chi2[0].df1 == 1.0

    def test_ns_comparator(self):
        last = parse_statistics(SAMPLE)[-1]
        assert last.p_comparator == "ns"
        assert last.p_reported is None

    def test_chi2_spellings(self):
        for head in ("chi2", "X2", "χ2", "χ²"):
            text = f"effect: {head}(1, N = 50) = 4.20, p = .04."
            tests = parse_statistics(text)
            assert len(tests) == 1 and tests[0].statistic == "chi2"

    def test_span_addresses_source(self):
        tests = parse_statistics(SAMPLE)
        for t in tests:
            lo, hi = t.source_span
            assert SAMPLE[lo:hi].lstrip().startswith(
                {"chi2": "X2"}.get(t.statistic, t.statistic))

    def test_sentence_boundary_is_not_crossed(self):
        text = "We measured t(30) = 2.1. Separately, p = .04 was reported."
        assert parse_statistics(text) == []

    def test_negative_values(self):
        tests = parse_statistics("a drop, t(62) = -2.77, p = .007.")
        assert tests[0].value == -2.77


class TestDiagnostics:
    @pytest.mark.parametrize("text,fragment", [
        ("bad: t(34) = 2.10, p < .05 < .10.", "chained"),
        ("bad: Z(12) = 1.9, p = .06.", "Z"),
        ("bad: t = 1.9, p = .06.", "degrees of freedom"),
        ("bad: F(114) = 3.02, p = .05.", "two dfs"),
        ("bad: r(40, 12) = .30, p = .05.", "df"),
        ("bad: t(30, N = 40) = 2.0, p = .05.", "N"),
        ("bad: X2(1) = -4.0, p = .04.", "negative"),
        ("bad: r(38) = 1.40, p = .01.", ">= 1"),
    ])
    def test_recognizable_but_broken(self, text, fragment):
        tests, diags = parse_with_diagnostics(text)
        assert tests == []
        assert len(diags) == 1
        assert fragment.lower() in diags[0].reason.lower()

    def test_clean_text_is_silent(self):
        _, diags = parse_with_diagnostics(SAMPLE)
        assert diags == []


class TestRecompute:
    def test_worked_t(self):
        t = ReportedTest(statistic="t", value=2.10, df1=34.0,
                         p_reported=0.043)
        assert recompute_p(t) == pytest.approx(0.04322, abs=5e-5)

    def test_worked_z(self):
        z = ReportedTest(statistic="Z", value=1.70, p_reported=0.045)
        assert recompute_p(z) == pytest.approx(0.08913, abs=5e-5)

    def test_r_maps_through_t(self):
        r = ReportedTest(statistic="r", value=0.40, df1=38.0)
        assert recompute_p(r) == pytest.approx(0.010547, abs=5e-6)

    def test_chi2_upper_tail(self):
        c = ReportedTest(statistic="chi2", value=3.841458820694124, df1=1.0)
        assert recompute_p(c) == pytest.approx(0.05, abs=1e-9)


class TestConsistency:
    def test_consistent_eq(self):
        t = ReportedTest(statistic="t", value=2.10, df1=34.0,
                         p_reported=0.043, p_decimals=3)
        assert check_consistency(t).status == "consistent"

    def test_decision_error(self):
        t = ReportedTest(statistic="t", value=1.0, df1=20.0,
                         p_reported=0.05, p_comparator="lt")
        v = check_consistency(t)
        assert v.status == "decision_error"
        assert v.p_recomputed == pytest.approx(0.32926, abs=5e-5)

    def test_one_tailed_consistent(self):
        z = ReportedTest(statistic="Z", value=1.70, p_reported=0.045,
                         p_decimals=3)
        assert check_consistency(z).status == "one_tailed_consistent"

    def test_computation_error_same_side(self):
        t = ReportedTest(statistic="t", value=2.05, df1=30.0,
                         p_reported=0.04, p_decimals=2)
        assert check_consistency(t).status == "computation_error"

    def test_p_zero_convention(self):
        t = ReportedTest(statistic="t", value=9.0, df1=80.0,
                         p_reported=0.0, p_decimals=3)
        assert check_consistency(t).status == "consistent"

    def test_ns_against_alpha(self):
        ok = ReportedTest(statistic="t", value=0.52, df1=44.0,
                          p_comparator="ns")
        bad = ReportedTest(statistic="t", value=3.5, df1=44.0,
                           p_comparator="ns")
        assert check_consistency(ok).status == "consistent"
        assert check_consistency(bad).status == "decision_error"


class TestRender:
    def test_round_trip(self):
        for t in parse_statistics(SAMPLE):
            back = parse_statistics(render_apa(t))
            assert len(back) == 1
            b = back[0]
            assert (b.statistic, b.value, b.df1, b.df2, b.sample_n,
                    b.p_reported, b.p_comparator) == (
                t.statistic, t.value, t.df1, t.df2, t.sample_n,
                t.p_reported, t.p_comparator)

    def test_leading_zero_dropped(self):
        r = ReportedTest(statistic="r", value=0.40, df1=38.0,
                         p_reported=0.01, p_decimals=2)
        text = render_apa(r)
        assert " .40" in text and "0.40" not in text
        assert "p = .01" in text

    def test_json_projection(self):
        t = parse_statistics(SAMPLE)[0]
        d = extract.test_to_json(t)
        assert d["statistic"] == "t" and d["value"] == 2.10
