"""Timing harness comparing the two slicing pipelines.

For each program and criterion the harness times the from-scratch pipeline
(grammar generation, instantiation, approximation, compilation, liveness)
against answering every in-slice question from a precomputed artifact.
Parsing is excluded from both sides; the artifact build is timed separately.
All figures are medians over a configurable number of runs.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .criteria import parse_criterion
from .lang import Program, parse_program, validate
from .slicer import in_slice, precompute, slice_noninc


@dataclass
class CriterionCell:
    criterion: str
    noninc_ms: float
    inc_ms: float
    kept: int

    @property
    def speedup(self) -> float:
        return self.noninc_ms / self.inc_ms if self.inc_ms > 0 else float("inf")


@dataclass
class BenchRow:
    program: str
    points: int
    precompute_ms: float
    cells: list[CriterionCell] = field(default_factory=list)


@dataclass
class BenchReport:
    runs: int
    rows: list[BenchRow] = field(default_factory=list)

    @property
    def all_faster(self) -> bool:
        return all(c.inc_ms < c.noninc_ms for r in self.rows for c in r.cells)


def _median_ms(fn: Callable[[], object], runs: int) -> float:
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    return statistics.median(times)


def _collect(corpus: str | Path | Sequence[str | Path]) -> list[Path]:
    if isinstance(corpus, (str, Path)):
        path = Path(corpus)
        if path.is_dir():
            return sorted(path.glob("*.fsl"))
        return [path]
    return [Path(p) for p in corpus]


def bench_program(p: Program, name: str, criteria_texts: Sequence[str],
                  runs: int = 5) -> BenchRow:
    criteria = [(t, parse_criterion(t)) for t in criteria_texts]
    pre_ms = _median_ms(lambda: precompute(p), runs)
    art = precompute(p)
    labels = sorted(art.automata)
    row = BenchRow(program=name, points=len(labels), precompute_ms=pre_ms)
    for text, crit in criteria:
        noninc_ms = _median_ms(lambda: slice_noninc(p, crit), runs)

        def answer_all():
            for lab in labels:
                in_slice(art, lab, crit)

        inc_ms = _median_ms(answer_all, runs)
        kept = slice_noninc(p, crit).kept_count
        row.cells.append(CriterionCell(text, noninc_ms, inc_ms, kept))
    return row


def run_bench(corpus: str | Path | Sequence[str | Path],
              criteria_texts: Sequence[str], runs: int = 5) -> BenchReport:
    if runs < 1:
        raise ValueError("runs must be positive")
    report = BenchReport(runs=runs)
    for path in _collect(corpus):
        p = parse_program(path.read_text(encoding="utf-8"))
        validate(p)
        report.rows.append(bench_program(p, path.stem, criteria_texts, runs))
    return report


def format_table(report: BenchReport) -> str:
    lines = []
    header = f"{'program':<14}{'points':>7}{'pre(ms)':>9}"
    crit_texts = [c.criterion for c in report.rows[0].cells] if report.rows else []
    for text in crit_texts:
        header += f" | {text:^26}"
    sub = f"{'':<14}{'':>7}{'':>9}"
    for _ in crit_texts:
        sub += f" | {'non(ms)':>8}{'inc(ms)':>9}{'kept':>6}   "
    lines.append(header)
    lines.append(sub)
    lines.append("-" * len(sub))
    for row in report.rows:
        line = f"{row.program:<14}{row.points:>7}{row.precompute_ms:>9.2f}"
        for cell in row.cells:
            line += f" | {cell.noninc_ms:>8.2f}{cell.inc_ms:>9.3f}{cell.kept:>6}   "
        lines.append(line)
    total = sum(len(r.cells) for r in report.rows)
    faster = sum(1 for r in report.rows for c in r.cells if c.inc_ms < c.noninc_ms)
    lines.append(f"incremental faster in {faster}/{total} cells "
                 f"(medians over {report.runs} runs): "
                 f"{'ok' if report.all_faster else 'NOT all faster'}")
    return "\n".join(lines)


def report_to_json(report: BenchReport) -> str:
    return json.dumps(asdict(report), indent=2, sort_keys=True) + "\n"
