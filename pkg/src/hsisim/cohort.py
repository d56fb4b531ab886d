"""Batch analysis over a directory of session logs.

Builds one row per participant-task, then reproduces the analysis style of
the study design: paired first-vs-second-attempt comparisons per hazard,
and rank correlations between situation-awareness scores and task
performance under the per-participant A2 mean and per-hazard A2 groupings.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

from .config import config_from_dict
from .sart import CONSTRUCTS
from .session import build_report
from .sessionlog import IntegrityError, read_log
from .stats import SpearmanResult, TestResult, spearman, wilcoxon_paired

TP_VARS = ("CA", "NA", "NAQ1", "NAQ2")
SA_VARS = ("S_SAGAT", "L1", "L2", "L3",
           "Dim1", "Dim2", "Dim3", "Dim4", "Dim5", "Dim6",
           "S_SART", "D", "S", "U")
RATING_COLS = tuple(f"rating_{name}" for name in CONSTRUCTS)
COLUMNS = (("participant_id", "hazard_kind", "attempt", "all_deactivated",
            "completed") + TP_VARS + SA_VARS + RATING_COLS)


class IngestError(Exception):
    pass


@dataclass
class CohortRow:
    participant_id: str
    hazard_kind: str
    attempt: str
    values: dict
    all_deactivated: bool
    completed: bool
    source: str = ""

    def get(self, var: str):
        return self.values.get(var)


@dataclass
class Cohort:
    rows: list = field(default_factory=list)

    def a2_rows(self, hazard=None) -> list:
        return [r for r in self.rows if r.attempt == "A2"
                and (hazard is None or r.hazard_kind == hazard)]

    def hazards(self) -> list:
        return sorted({r.hazard_kind for r in self.rows})

    def participants(self) -> list:
        return sorted({r.participant_id for r in self.rows})

    def m_a2_all(self) -> list:
        """One synthetic row per participant: mean over their A2 tasks."""
        out = []
        for pid in self.participants():
            rows = [r for r in self.a2_rows() if r.participant_id == pid]
            if not rows:
                continue
            values = {}
            for var in TP_VARS + SA_VARS:
                vals = [r.get(var) for r in rows if r.get(var) is not None]
                values[var] = sum(vals) / len(vals) if vals else None
            out.append(CohortRow(pid, "all", "A2", values,
                                 any(r.all_deactivated for r in rows), True))
        return out


def row_from_report(report: dict, diagonal: float, source: str = "") -> CohortRow:
    fm = report.get("final_metrics") or {}
    all_dead = bool(fm.get("all_deactivated"))
    values = {}
    for var, key in zip(TP_VARS, ("ca", "na", "naq1", "naq2")):
        # worst-case imputation keeps wiped-out sessions in the analysis
        values[var] = diagonal if all_dead else fm.get(key)
    sagat = report.get("sagat")
    if sagat:
        values["S_SAGAT"] = sagat["overall"]
        for lvl in ("L1", "L2", "L3"):
            values[lvl] = sagat["levels"].get(lvl)
        for d in range(1, 7):
            values[f"Dim{d}"] = sagat["dimensions"].get(str(d))
    sart = report.get("sart")
    if sart:
        values["S_SART"] = sart["total"]
        values["D"] = sart["demand"]
        values["S"] = sart["supply"]
        values["U"] = sart["understanding"]
        for name, rating in zip(CONSTRUCTS, sart["ratings"]):
            values[f"rating_{name}"] = rating
    return CohortRow(report["participant_id"], report["hazard_kind"],
                     report["attempt"], values, all_dead,
                     bool(report.get("completed")), source)


def build_cohort(log_dir: str) -> Cohort:
    """One row per (participant, hazard, attempt) from every log in a dir."""
    paths = sorted(os.path.join(log_dir, name) for name in os.listdir(log_dir)
                   if name.endswith(".jsonl"))
    if not paths:
        raise IngestError(f"no .jsonl session logs found in {log_dir}")
    cohort = Cohort()
    seen = {}
    for path in paths:
        try:
            header, body, _ = read_log(path)
        except (IntegrityError, OSError) as exc:
            raise IngestError(f"{path}: {exc}") from None
        report = build_report([header] + body)
        if not report["completed"]:
            raise IngestError(f"{path}: session log is incomplete")
        cfg = config_from_dict(header["config"])
        diagonal = math.sqrt((cfg.world.width * cfg.world.cell_size) ** 2
                             + (cfg.world.height * cfg.world.cell_size) ** 2)
        row = row_from_report(report, diagonal, source=path)
        key = (row.participant_id, row.hazard_kind, row.attempt)
        if key in seen:
            raise IngestError(
                f"duplicate participant-task {key}: {path} and {seen[key]}")
        seen[key] = path
        cohort.rows.append(row)
    return cohort


# -- experiment report ---------------------------------------------------------


@dataclass
class WilcoxonEntry:
    hazard: str
    variable: str
    result: TestResult
    significant: bool = False


@dataclass
class SpearmanEntry:
    grouping: str
    sa_var: str
    tp_var: str
    result: SpearmanResult
    significant: bool = False


@dataclass
class ReportDoc:
    wilcoxon: list = field(default_factory=list)
    correlations: list = field(default_factory=list)
    notices: list = field(default_factory=list)
    n_rows: int = 0
    alpha: float = 0.05
    correction: str = "none"


def experiment_reports(cohort: Cohort, spearman_seed: int = 20_260_101,
                       correction: str = "none",
                       spearman_method: str = "permutation") -> ReportDoc:
    """Attempt comparisons and SA-vs-TP correlation tables.

    Significance is fixed at p < 0.05 without multiple-comparison
    correction by default; `correction="bonferroni"` divides the
    threshold by the number of tests in each family. Correlation p-values
    come from the seeded permutation test unless `spearman_method`
    selects the Student-t approximation.
    """
    if not cohort.rows:
        raise IngestError("cohort is empty; nothing to analyze")
    if correction not in ("none", "bonferroni"):
        raise IngestError(f"unknown correction {correction!r}")
    doc = ReportDoc(n_rows=len(cohort.rows), correction=correction)

    for hazard in cohort.hazards():
        a1 = {r.participant_id: r for r in cohort.rows
              if r.hazard_kind == hazard and r.attempt == "A1"}
        a2 = {r.participant_id: r for r in cohort.rows
              if r.hazard_kind == hazard and r.attempt == "A2"}
        shared = sorted(set(a1) & set(a2))
        if not shared:
            doc.notices.append(
                f"wilcoxon[{hazard}]: no participants with both attempts")
            continue
        for var in TP_VARS + SA_VARS:
            pairs = [(a1[p].get(var), a2[p].get(var)) for p in shared
                     if a1[p].get(var) is not None and a2[p].get(var) is not None]
            if not pairs:
                doc.notices.append(f"wilcoxon[{hazard}][{var}]: no paired data")
                continue
            x = [a for a, _ in pairs]
            y = [b for _, b in pairs]
            doc.wilcoxon.append(WilcoxonEntry(hazard, var, wilcoxon_paired(x, y)))

    groupings = [("M_A2_all", cohort.m_a2_all())]
    for hazard in cohort.hazards():
        groupings.append((f"S_{hazard.capitalize()}_A2", cohort.a2_rows(hazard)))
    for name, rows in groupings:
        for sa_var in SA_VARS:
            for tp_var in TP_VARS:
                pairs = [(r.get(sa_var), r.get(tp_var)) for r in rows
                         if r.get(sa_var) is not None and r.get(tp_var) is not None]
                if len(pairs) < 3:
                    doc.notices.append(
                        f"spearman[{name}][{sa_var} vs {tp_var}]: "
                        f"n={len(pairs)} < 3, skipped")
                    continue
                res = spearman([a for a, _ in pairs], [b for _, b in pairs],
                               seed=spearman_seed, method=spearman_method)
                if res.undefined:
                    doc.notices.append(
                        f"spearman[{name}][{sa_var} vs {tp_var}]: "
                        "constant sample, correlation undefined")
                    continue
                doc.correlations.append(SpearmanEntry(name, sa_var, tp_var, res))

    _mark_significance(doc)
    return doc


def _mark_significance(doc: ReportDoc) -> None:
    """Per-family thresholds: each hazard's attempt table and each
    correlation grouping count as one family under Bonferroni."""
    families: dict = {}
    for entry in doc.wilcoxon:
        families.setdefault(("w", entry.hazard), []).append(entry)
    for entry in doc.correlations:
        families.setdefault(("s", entry.grouping), []).append(entry)
    for members in families.values():
        threshold = doc.alpha
        if doc.correction == "bonferroni":
            threshold = doc.alpha / len(members)
        for entry in members:
            p = entry.result.p_value
            entry.significant = p is not None and p < threshold


def correlation(doc: ReportDoc, grouping: str, sa_var: str,
                tp_var: str) -> SpearmanResult | None:
    for entry in doc.correlations:
        if (entry.grouping, entry.sa_var, entry.tp_var) == (grouping, sa_var, tp_var):
            return entry.result
    return None


# -- rendering -------------------------------------------------------------------


def render_text(doc: ReportDoc) -> str:
    lines = [f"Cohort analysis over {doc.n_rows} participant-tasks "
             f"(alpha={doc.alpha}, correction={doc.correction})", ""]
    lines.append("== Attempt comparison (Wilcoxon paired, A1 vs A2) ==")
    for e in doc.wilcoxon:
        r = e.result
        mark = "*" if e.significant else " "
        lines.append(
            f"{mark} [{e.hazard}] {e.variable}: W={r.statistic:g} "
            f"p={r.p_value:.4f} ({r.method}, n={r.n_effective}) "
            f"A1 (Median: {r.summary_x['median']:.2f}, "
            f"IQR: {r.summary_x['q1']:.2f}-{r.summary_x['q3']:.2f}) vs "
            f"A2 (Median: {r.summary_y['median']:.2f}, "
            f"IQR: {r.summary_y['q1']:.2f}-{r.summary_y['q3']:.2f})")
    lines.append("")
    lines.append("== SA vs TP correlations (Spearman) ==")
    current = None
    for e in doc.correlations:
        if e.grouping != current:
            current = e.grouping
            lines.append(f"-- {current} --")
        r = e.result
        mark = "*" if e.significant else " "
        lines.append(f"{mark} {e.sa_var} vs {e.tp_var}: rho={r.rho:+.3f} "
                     f"p={r.p_value:.4f} ({r.strength}, n={r.n})")
    if doc.notices:
        lines.append("")
        lines.append("== Notices ==")
        lines.extend(f"- {n}" for n in doc.notices)
    lines.append("")
    return "\n".join(lines)


def write_cohort_csv(cohort: Cohort, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for row in cohort.rows:
            record = [row.participant_id, row.hazard_kind, row.attempt,
                      int(row.all_deactivated), int(row.completed)]
            record += [row.get(v) for v in TP_VARS + SA_VARS + RATING_COLS]
            writer.writerow(record)


def write_tests_csv(doc: ReportDoc, wilcoxon_path: str, spearman_path: str) -> None:
    with open(wilcoxon_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hazard", "variable", "W", "p_value", "n_effective",
                         "method", "significant", "a1_median", "a1_q1", "a1_q3",
                         "a2_median", "a2_q1", "a2_q3"])
        for e in doc.wilcoxon:
            r = e.result
            writer.writerow([e.hazard, e.variable, r.statistic, r.p_value,
                             r.n_effective, r.method, int(e.significant),
                             r.summary_x["median"], r.summary_x["q1"],
                             r.summary_x["q3"], r.summary_y["median"],
                             r.summary_y["q1"], r.summary_y["q3"]])
    with open(spearman_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grouping", "sa_var", "tp_var", "rho", "p_value",
                         "strength", "n", "significant"])
        for e in doc.correlations:
            r = e.result
            writer.writerow([e.grouping, e.sa_var, e.tp_var, r.rho, r.p_value,
                             r.strength, r.n, int(e.significant)])
