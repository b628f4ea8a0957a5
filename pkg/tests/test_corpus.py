"""Corpus ingestion, the exclusion waterfall, export identity."""

import math
import os

import numpy as np
import pytest

from stataudit.corpus import (CodedTest, Corpus, PaperRecord,
                              apply_exclusions, descriptives,
                              exclusion_table, export, ingest)
from stataudit.errors import SchemaError


class TestIngest:
    def test_fixture_loads_clean(self, demo_corpus_dir):
        c = ingest(os.path.join(demo_corpus_dir, "papers.csv"),
                   os.path.join(demo_corpus_dir, "tests.csv"))
        assert len(c.papers) == 12
        assert len(c.tests) == 26
        assert c.diagnostics == ()

    def test_unknown_column_is_schema_error(self, tmp_path):
        p = tmp_path / "papers.csv"
        p.write_text("paper_id,total_n,mturk,mcc,venue,year,extra\n")
        with pytest.raises(SchemaError):
            ingest(p, None)

    def test_missing_required_column_is_schema_error(self, tmp_path):
        p = tmp_path / "papers.csv"
        p.write_text("paper_id,total_n\nP1,50\n")
        with pytest.raises(SchemaError):
            ingest(p, None)

    def test_zero_byte_file_is_empty(self, tmp_path):
        p = tmp_path / "papers.csv"
        p.write_text("")
        c = ingest(p, None)
        assert c.papers == ()

    def test_bad_rows_become_diagnostics(self, tmp_path):
        p = tmp_path / "papers.csv"
        p.write_text("paper_id,total_n,mturk,mcc,venue,year\n"
                     "P1,fifty,0,0,J,2011\n"
                     "P2,60,0,0,J,2012\n")
        c = ingest(p, None)
        assert [x.paper_id for x in c.papers] == ["P2"]
        assert len(c.diagnostics) == 1
        assert c.diagnostics[0].line == 2

    def test_duplicate_ids_dropped_with_diagnostic(self, tmp_path):
        p = tmp_path / "papers.csv"
        p.write_text("paper_id,total_n,mturk,mcc,venue,year\n"
                     "P1,50,0,0,J,2011\n"
                     "P1,70,0,0,J,2011\n")
        c = ingest(p, None)
        assert len(c.papers) == 1
        assert c.papers[0].total_n == 50
        assert any("duplicate" in d.message for d in c.diagnostics)

    def test_empty_comparator_and_design_defaults(self, tmp_path):
        t = tmp_path / "tests.csv"
        t.write_text(
            "test_id,paper_id,family_id,statistic,df1,df2,n_value,value,"
            "p_reported,p_comparator,n1,n2,m1,m2,sd1,sd2,design,"
            "cont_rows,cont_cols\n"
            "T1,P1,F1,t,30,,,2.0,0.05,,,,,,,,,,\n")
        c = ingest(None, t)
        assert c.tests[0].p_comparator == "eq"
        assert c.tests[0].design == "unk"

    def test_json_ingest(self, tmp_path):
        p = tmp_path / "papers.json"
        p.write_text('{"papers": [{"paper_id": "P1", "total_n": 44, '
                     '"mturk": false, "mcc": true, "venue": "J", '
                     '"year": 2012}]}')
        c = ingest(p, None)
        assert c.papers[0].total_n == 44
        assert c.papers[0].mcc is True


class TestExport:
    def test_round_trip_identity_csv(self, demo_corpus_dir, tmp_path):
        c1 = ingest(os.path.join(demo_corpus_dir, "papers.csv"),
                    os.path.join(demo_corpus_dir, "tests.csv"))
        export(c1, tmp_path / "papers.csv", tmp_path / "tests.csv")
        c2 = ingest(tmp_path / "papers.csv", tmp_path / "tests.csv")
        assert c1.papers == c2.papers
        assert c1.tests == c2.tests

    def test_round_trip_identity_json(self, demo_corpus_dir, tmp_path):
        c1 = ingest(os.path.join(demo_corpus_dir, "papers.csv"),
                    os.path.join(demo_corpus_dir, "tests.csv"))
        export(c1, tmp_path / "papers.json", tmp_path / "tests.json")
        c2 = ingest(tmp_path / "papers.json", tmp_path / "tests.json")
        assert c1.papers == c2.papers
        assert c1.tests == c2.tests

    def test_float_precision_survives(self, tmp_path):
        t = CodedTest(test_id="T1", paper_id="P1", family_id="F1",
                      statistic="t", value=4.772176420703428,
                      df1=306.0, p_reported=2.8271957552838956e-06,
                      p_comparator="eq", n1=154, n2=154, design="ind")
        export(Corpus(tests=(t,)), tmp_path / "p.csv", tmp_path / "t.csv")
        back = ingest(tmp_path / "p.csv", tmp_path / "t.csv")
        assert back.tests[0].value == t.value
        assert back.tests[0].p_reported == t.p_reported


class TestExclusions:
    def test_waterfall_is_idempotent(self, exclusion_corpus_dir):
        c = ingest(os.path.join(exclusion_corpus_dir, "papers.csv"),
                   os.path.join(exclusion_corpus_dir, "tests.csv"))
        retained, outcomes = apply_exclusions(c)
        again, outcomes2 = apply_exclusions(Corpus(papers=c.papers,
                                                   tests=retained))
        assert again == retained
        assert all(o.retained for o in outcomes2)

    def test_duplicate_rule_only_counts_survivors(self):
        # a test excluded by an earlier rule must not shadow a later twin
        dep = CodedTest(test_id="A", paper_id="P", family_id="F",
                        statistic="t", value=2.0, df1=20.0, p_reported=0.05,
                        p_comparator="eq", design="dep")
        twin = CodedTest(test_id="B", paper_id="P", family_id="F",
                         statistic="t", value=2.0, df1=20.0, p_reported=0.05,
                         p_comparator="eq", design="ind")
        _, outcomes = apply_exclusions(Corpus(tests=(dep, twin)))
        assert outcomes[0].rule == "dependent_without_correlation"
        assert outcomes[1].retained

    def test_exclusion_table_shape(self, exclusion_corpus_dir):
        c = ingest(os.path.join(exclusion_corpus_dir, "papers.csv"),
                   os.path.join(exclusion_corpus_dir, "tests.csv"))
        _, outcomes = apply_exclusions(c)
        table = exclusion_table(outcomes)
        assert table["total"] == 30
        assert table["retained"] + sum(
            v for k, v in table.items()
            if k not in ("retained", "total")) == 30


class TestDescriptives:
    def test_against_numpy(self, rng):
        values = rng.lognormal(4.0, 0.8, 200).tolist()
        d = descriptives(values)
        assert d["median"] == pytest.approx(np.median(values))
        assert d["q25"] == pytest.approx(np.quantile(values, 0.25))
        assert d["iqr"] == pytest.approx(d["q75"] - d["q25"])
        assert d["sd"] == pytest.approx(np.std(values, ddof=1))

    def test_tiny_inputs(self):
        d = descriptives([1.0, 2.0, 3.0, 4.0, 5.0])
        assert d["sd"] == pytest.approx(math.sqrt(2.5))
        assert descriptives([7.0])["sd"] == 0.0
