"""End-to-end CLI behaviour: exit codes, file contracts, determinism."""

import csv
import io
import json
import os

import pytest

from stataudit import cli
from stataudit import report as rpt
from stataudit.errors import DegenerateDataError


def run(argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:  # argparse error paths
        return int(exc.code or 0)
    return 0 if code is None else code


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


EXPECTED_HEADERS = {
    "diagnostics.csv": ["source", "line", "message"],
    "exclusions.csv": ["test_id", "rule", "retained"],
    "estimates.csv": ["test_id", "paper_id", "family_id", "statistic",
                      "log_or", "se_log_or", "ci95_lo", "ci95_hi",
                      "ci_mcc_lo", "ci_mcc_hi", "family_size", "d", "g",
                      "origin", "magnitude"],
    "consistency.csv": ["test_id", "statistic", "value", "df1", "df2",
                        "p_reported", "p_comparator", "p_recomputed",
                        "status"],
    "power.csv": ["test_id", "statistic", "test", "family_size", "level",
                  "effect", "power", "power_mcc"],
    "upper_bound.csv": ["paper_id", "n_total", "level", "d", "power"],
    "funnel.csv": ["paper_id", "log_or", "se", "aggregated"],
}


class TestAudit:
    def test_exit_zero_and_files(self, demo_corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run(["audit", demo_corpus_dir, "--out", str(out)]) == 0
        for name, header in EXPECTED_HEADERS.items():
            got, _ = read_csv(out / name)
            assert got == header, name
        summary = json.loads((out / "summary.json").read_text())
        assert summary["papers"] == 12
        assert summary["tests"] == 26
        assert summary["estimates"] == 22
        assert summary["anova_effects"] == 2
        assert (out / "manifest.json").exists()
        assert (out / "bias.json").exists()

    def test_rerun_is_byte_identical(self, demo_corpus_dir, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(["audit", demo_corpus_dir, "--out", str(a)]) == 0
        assert run(["audit", demo_corpus_dir, "--out", str(b)]) == 0
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_manifest_digests_verify(self, demo_corpus_dir, tmp_path):
        out = tmp_path / "run"
        run(["audit", demo_corpus_dir, "--out", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        for name, digest in manifest["outputs"].items():
            assert rpt.sha256_file(out / name) == digest, name
        for name, digest in manifest["inputs"].items():
            src = os.path.join(demo_corpus_dir, name + ".csv")
            assert rpt.sha256_file(src) == digest, name

    def test_svg_format_adds_figures(self, demo_corpus_dir, tmp_path):
        out = tmp_path / "run"
        run(["audit", demo_corpus_dir, "--out", str(out),
             "--format", "svg"])
        for fig in ("caterpillar.svg", "funnel.svg", "power_scatter.svg",
                    "chasing.svg"):
            assert (out / fig).exists(), fig

    def test_consistency_statuses_match_fixture(self, demo_corpus_dir,
                                                tmp_path):
        out = tmp_path / "run"
        run(["audit", demo_corpus_dir, "--out", str(out)])
        _, rows = read_csv(out / "consistency.csv")
        status = {r[0]: r[8] for r in rows}
        assert status["DT05"] == "computation_error"
        assert status["DT15"] == "decision_error"
        assert status["DT19"] == "one_tailed_consistent"
        assert status["DT20"] == "one_tailed_consistent"
        assert sum(1 for v in status.values() if v == "consistent") == 20

    def test_stataudit_out_env(self, demo_corpus_dir, tmp_path, monkeypatch):
        monkeypatch.setenv("STATAUDIT_OUT", str(tmp_path))
        monkeypatch.chdir(tmp_path)
        assert run(["audit", demo_corpus_dir]) == 0
        assert (tmp_path / "stataudit_audit" / "summary.json").exists()


class TestPower:
    def test_upper_bound_golden(self, single_corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run(["power", single_corpus_dir, "--upper-bound",
                    "--out", str(out)]) == 0
        _, rows = read_csv(out / "upper_bound.csv")
        assert len(rows) == 3
        by_level = {r[2]: float(r[4]) for r in rows}
        assert by_level["small"] == pytest.approx(
            0.2022644648886598, abs=1e-12)
        assert by_level["medium"] == pytest.approx(
            0.8014595579223723, abs=1e-12)
        assert by_level["large"] == pytest.approx(
            0.9943094789454345, abs=1e-12)

    def test_default_emits_both(self, single_corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run(["power", single_corpus_dir, "--out", str(out)]) == 0
        assert (out / "upper_bound.csv").exists()
        assert (out / "power.csv").exists()

    def test_per_test_only(self, single_corpus_dir, tmp_path):
        out = tmp_path / "run"
        run(["power", single_corpus_dir, "--per-test", "--out", str(out)])
        assert (out / "power.csv").exists()
        assert not (out / "upper_bound.csv").exists()

    def test_level_changes_rows(self, single_corpus_dir, tmp_path):
        out = tmp_path / "run"
        run(["power", single_corpus_dir, "--per-test", "--level", "large",
             "--out", str(out)])
        _, rows = read_csv(out / "power.csv")
        assert rows[0][4] == "large"
        assert float(rows[0][5]) == 0.8


class TestBias:
    def test_full_report(self, demo_corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run(["bias", demo_corpus_dir, "--out", str(out)]) == 0
        payload = json.loads((out / "bias.json").read_text())
        assert set(payload) >= {"begg_mazumdar", "winners_curse",
                                "chasing", "mcc_contingency"}
        bm = payload["begg_mazumdar"]
        assert bm["tau"] == pytest.approx(0.3333333333333333)
        assert bm["p"] == pytest.approx(0.1314, abs=5e-4)
        assert bm["r_equivalent"] == pytest.approx(0.5)

    def test_subset_flags_prune(self, demo_corpus_dir, tmp_path):
        out = tmp_path / "run"
        assert run(["bias", demo_corpus_dir, "--funnel",
                    "--out", str(out)]) == 0
        payload = json.loads((out / "bias.json").read_text())
        assert payload.get("winners_curse") is None
        assert payload.get("chasing") is None
        assert (out / "funnel.csv").exists()
        assert not (out / "chasing.csv").exists()


class TestSimulate:
    def test_round_trip(self, fixtures_dir, tmp_path):
        cfg = os.path.join(fixtures_dir, "fieldsim_demo.json")
        out = tmp_path / "sim"
        assert run(["simulate", "--config", cfg, "--out", str(out)]) == 0
        assert (out / "papers.csv").exists()
        assert (out / "tests.csv").exists()
        stored = json.loads((out / "config.json").read_text())
        assert stored["n_papers"] == 60

    def test_workers_do_not_change_bytes(self, fixtures_dir, tmp_path):
        cfg = os.path.join(fixtures_dir, "fieldsim_demo.json")
        a, b = tmp_path / "a", tmp_path / "b"
        run(["simulate", "--config", cfg, "--out", str(a)])
        run(["simulate", "--config", cfg, "--out", str(b), "--workers", "2"])
        for name in ("papers.csv", "tests.csv", "config.json",
                     "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_seed_override(self, fixtures_dir, tmp_path):
        cfg = os.path.join(fixtures_dir, "fieldsim_demo.json")
        a, b = tmp_path / "a", tmp_path / "b"
        run(["simulate", "--config", cfg, "--out", str(a)])
        run(["simulate", "--config", cfg, "--out", str(b), "--seed", "999"])
        assert (a / "tests.csv").read_bytes() != (b / "tests.csv").read_bytes()


class TestExtract:
    SAMPLE = ("The groups differed, t(34) = 2.10, p < .05. A second probe "
              "was null, F(2, 114) = 1.11, p = .33.\n")

    def test_from_file(self, tmp_path):
        src = tmp_path / "text.txt"
        src.write_text(self.SAMPLE)
        out = tmp_path / "run"
        assert run(["extract", str(src), "--out", str(out)]) == 0
        _, rows = read_csv(out / "extracted.csv")
        assert len(rows) == 2
        assert (out / "source.txt").read_text() == self.SAMPLE

    def test_from_stdin(self, tmp_path, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(self.SAMPLE))
        out = tmp_path / "run"
        assert run(["extract", "-", "--out", str(out)]) == 0
        _, rows = read_csv(out / "extracted.csv")
        assert len(rows) == 2


class TestReportCommand:
    def test_figures_match_audit_render(self, demo_corpus_dir, tmp_path):
        audit_out = tmp_path / "audit"
        run(["audit", demo_corpus_dir, "--out", str(audit_out),
             "--format", "svg"])
        rerender = tmp_path / "figs"
        assert run(["report", str(audit_out), "--out", str(rerender)]) == 0
        names = [p.name for p in audit_out.iterdir()
                 if p.name.endswith(".svg")]
        assert len(names) == 4
        for name in sorted(names):
            assert (rerender / name).read_bytes() == (
                audit_out / name).read_bytes(), name


class TestErrorPaths:
    def test_missing_corpus_is_exit_one(self, tmp_path, capsys):
        assert run(["audit", str(tmp_path / "nowhere")]) == 1
        err = capsys.readouterr().err
        payload = json.loads(err.strip().splitlines()[-1])
        assert payload["stage"] == "input"
        assert "error" in payload and "message" in payload

    def test_bad_alpha_is_exit_one(self, demo_corpus_dir, tmp_path):
        assert run(["audit", demo_corpus_dir, "--alpha", "1.5",
                    "--out", str(tmp_path / "x")]) == 1

    def test_bad_config_is_exit_one(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text('{"n_papers": 0}')
        assert run(["simulate", "--config", str(cfg),
                    "--out", str(tmp_path / "x")]) == 1

    def test_unknown_subcommand_is_exit_one(self):
        assert run(["frobnicate"]) == 1

    def test_no_subcommand_is_exit_one(self):
        assert run([]) == 1

    def test_compute_failure_is_exit_two(self, demo_corpus_dir, tmp_path,
                                         monkeypatch, capsys):
        def boom(*args, **kwargs):
            raise DegenerateDataError("synthetic failure")

        monkeypatch.setattr(cli.rpt, "run_bias", boom)
        assert run(["audit", demo_corpus_dir,
                    "--out", str(tmp_path / "x")]) == 2
        payload = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert payload["stage"] != "input"
        assert payload["error"] == "DegenerateDataError"
