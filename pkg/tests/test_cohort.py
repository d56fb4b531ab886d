import os

import pytest

from hsisim.cohort import (Cohort, CohortRow, IngestError, build_cohort,
                           correlation, experiment_reports, render_text,
                           row_from_report, write_cohort_csv, write_tests_csv)
from hsisim.rng import RandomStream
from hsisim.session import run_session
from tests.conftest import make_config


def make_row(pid, hazard, attempt, ca, sagat=None, sart=None):
    values = {"CA": ca, "NA": ca, "NAQ1": ca, "NAQ2": ca}
    if sagat is not None:
        values.update({"S_SAGAT": sagat, "L1": sagat, "L2": sagat,
                       "L3": sagat})
        for d in range(1, 7):
            values[f"Dim{d}"] = sagat
    if sart is not None:
        values.update({"S_SART": sart, "D": 12, "S": 16, "U": 12})
    return CohortRow(pid, hazard, attempt, values, False, True)


class TestCohortStructure:
    def test_full_design_row_count(self):
        # 31 participants x 3 hazards x 2 attempts = 186 participant-tasks
        cohort = Cohort()
        for p in range(31):
            for hazard in ("dis", "mov", "spr"):
                for attempt in ("A1", "A2"):
                    cohort.rows.append(make_row(f"p{p:02d}", hazard, attempt,
                                                ca=1.0 * p))
        assert len(cohort.rows) == 186
        assert len(cohort.a2_rows()) == 93
        assert len(cohort.a2_rows("spr")) == 31

    def test_m_a2_all_is_per_participant_mean(self):
        cohort = Cohort(rows=[
            make_row("p1", "dis", "A2", 2.0),
            make_row("p1", "mov", "A2", 4.0),
            make_row("p1", "spr", "A2", 6.0),
        ])
        rows = cohort.m_a2_all()
        assert len(rows) == 1
        assert rows[0].get("CA") == 4.0


class TestExperimentReports:
    def test_planted_improvement_is_significant(self):
        # every participant improves by exactly 1 between attempts
        cohort = Cohort()
        stream = RandomStream.from_seed(3, "c")
        for p in range(12):
            base = 2.0 + 10.0 * stream.u01()
            cohort.rows.append(make_row(f"p{p}", "dis", "A1", base,
                                        sagat=50.0, sart=10))
            cohort.rows.append(make_row(f"p{p}", "dis", "A2", base - 1.0,
                                        sagat=50.0, sart=10))
        doc = experiment_reports(cohort)
        entry = next(e for e in doc.wilcoxon
                     if e.hazard == "dis" and e.variable == "CA")
        assert entry.result.p_value < 0.05
        assert entry.result.summary_y["median"] < entry.result.summary_x["median"]

    def test_planted_monotone_correlation(self):
        cohort = Cohort()
        for p in range(15):
            ca = 1.0 + p
            cohort.rows.append(make_row(f"p{p}", "spr", "A2", ca,
                                        sagat=100.0 - 3.0 * ca, sart=10))
        doc = experiment_reports(cohort)
        res = correlation(doc, "S_Spr_A2", "S_SAGAT", "CA")
        assert abs(res.rho + 1.0) < 1e-12
        assert res.strength == "strong"
        assert res.significant

    def test_small_groups_skipped_with_notice(self):
        cohort = Cohort(rows=[make_row("p1", "spr", "A2", 1.0, sagat=50.0),
                              make_row("p2", "spr", "A2", 2.0, sagat=60.0)])
        doc = experiment_reports(cohort)
        assert not doc.correlations
        assert any("n=2 < 3" in n for n in doc.notices)

    def test_empty_cohort_rejected(self):
        with pytest.raises(IngestError):
            experiment_reports(Cohort())

    def test_render_text_mentions_tables(self):
        cohort = Cohort()
        for p in range(8):
            cohort.rows.append(make_row(f"p{p}", "mov", "A1", 5.0 + p,
                                        sagat=50.0, sart=12))
            cohort.rows.append(make_row(f"p{p}", "mov", "A2", 4.0 + p,
                                        sagat=55.0, sart=12))
        text = render_text(experiment_reports(cohort))
        assert "Wilcoxon" in text
        assert "Median" in text
        assert "Spearman" in text


class TestImputation:
    def test_all_deactivated_session_gets_worst_case_ca(self):
        report = {
            "participant_id": "p1", "hazard_kind": "spr", "attempt": "A2",
            "completed": True,
            "final_metrics": {"ca": None, "na": None, "naq1": None,
                              "naq2": None, "all_deactivated": True},
            "sagat": None, "sart": None,
        }
        row = row_from_report(report, diagonal=28.28)
        assert row.all_deactivated
        assert row.get("CA") == 28.28
        assert row.get("NA") == 28.28


class TestIngestion:
    def make_logs(self, tmp_path, specs):
        os.makedirs(tmp_path, exist_ok=True)
        for pid, hazard, attempt, seed in specs:
            config = make_config(
                seed=seed, participant_id=pid, hazard_kind=hazard,
                attempt=attempt,
                operator={"policy": "passive", "respondent": "noisy",
                          "respondent_accuracy": 0.6})
            run_session(config,
                        out_path=str(tmp_path / f"{pid}_{hazard}_{attempt}.jsonl"))

    def test_build_cohort_from_logs(self, tmp_path):
        self.make_logs(tmp_path, [("p1", "spr", "A1", 1), ("p1", "spr", "A2", 2),
                                  ("p2", "spr", "A1", 3), ("p2", "spr", "A2", 4)])
        cohort = build_cohort(str(tmp_path))
        assert len(cohort.rows) == 4
        for row in cohort.rows:
            assert row.get("CA") is not None
            assert row.get("S_SAGAT") is not None
            assert row.completed

    def test_duplicate_participant_task_rejected(self, tmp_path):
        self.make_logs(tmp_path, [("p1", "spr", "A1", 1)])
        config = make_config(seed=9, participant_id="p1", hazard_kind="spr",
                             attempt="A1")
        run_session(config, out_path=str(tmp_path / "dup.jsonl"))
        with pytest.raises(IngestError, match="duplicate"):
            build_cohort(str(tmp_path))

    def test_empty_directory_rejected(self, tmp_path):
        with pytest.raises(IngestError, match="no .jsonl"):
            build_cohort(str(tmp_path))

    def test_csv_outputs(self, tmp_path):
        self.make_logs(tmp_path, [("p1", "spr", "A1", 1), ("p1", "spr", "A2", 2),
                                  ("p2", "spr", "A1", 3), ("p2", "spr", "A2", 4),
                                  ("p3", "spr", "A1", 5), ("p3", "spr", "A2", 6)])
        cohort = build_cohort(str(tmp_path))
        doc = experiment_reports(cohort)
        write_cohort_csv(cohort, str(tmp_path / "c.csv"))
        write_tests_csv(doc, str(tmp_path / "w.csv"), str(tmp_path / "s.csv"))
        lines = open(tmp_path / "c.csv").read().strip().split("\n")
        assert len(lines) == 7   # header + 6 rows
        assert lines[0].startswith("participant_id,hazard_kind,attempt")
        assert open(tmp_path / "s.csv").read().startswith("grouping,sa_var")


class TestCorrection:
    def test_bonferroni_tightens_thresholds(self):
        # two slight regressions among eight improvements: exact p = 10/1024,
        # under 0.05 but over 0.05/18 (the per-hazard family has 18 variables)
        diffs = [0.1, 0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0]
        cohort = Cohort()
        stream = RandomStream.from_seed(5, "c")
        for p, d in enumerate(diffs):
            base = 5.0 + 10.0 * stream.u01()
            cohort.rows.append(make_row(f"p{p}", "dis", "A1", base,
                                        sagat=50.0, sart=10))
            cohort.rows.append(make_row(f"p{p}", "dis", "A2", base + d,
                                        sagat=50.0, sart=10))
        plain = experiment_reports(cohort)
        corrected = experiment_reports(cohort, correction="bonferroni")
        entry = next(e for e in plain.wilcoxon if e.variable == "CA")
        strict = next(e for e in corrected.wilcoxon if e.variable == "CA")
        assert abs(entry.result.p_value - 10 / 1024) < 1e-12
        assert entry.significant
        assert entry.result.p_value == strict.result.p_value
        assert not strict.significant   # 0.05 / family size kills it
