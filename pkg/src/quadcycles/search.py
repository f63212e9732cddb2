"""Sweeps over parameter families c = a/d^2 with law tripwires."""

from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

from .dynamics import DEFAULT_MAX_ITER, QuadParam
from .laws import ALL_LAWS, LawId, LawReport, Status, run_laws
from .numbers import factor, format_rational
from .solver import solve

CSV_COLUMNS = ("d", "a", "s", "v2_d", "per_size", "preper_size", "max_cycle_len", "m_classes", "laws_failed")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_LAW_FAIL = 2
EXIT_FPS = 3


@dataclass(frozen=True)
class SearchConfig:
    d_values: tuple[int, ...]
    a_min: int
    a_max: int
    laws: tuple[LawId, ...] = ALL_LAWS
    jobs: int = 1
    seed: int = 0
    max_iter: int = DEFAULT_MAX_ITER
    four_only: bool = False
    s_max: int | None = None
    output_path: Path | None = None
    fmt: str = "json"

    def __post_init__(self) -> None:
        if not self.d_values or any(d < 1 for d in self.d_values):
            raise ValueError("d values must be a nonempty list of positive integers")
        if self.a_min > self.a_max:
            raise ValueError(f"empty a range [{self.a_min}, {self.a_max}]")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")

    def selected_d(self) -> list[int]:
        out = []
        for d in sorted(set(self.d_values)):
            if self.four_only and d % 4:
                continue
            if self.s_max is not None and len(factor(d, seed=self.seed)) > self.s_max:
                continue
            out.append(d)
        return out

    def pairs(self) -> Iterator[tuple[int, int]]:
        """Every (d, a) to scan, in output order; pairs with gcd(a, d) > 1 are skipped."""
        for d in self.selected_d():
            for a in range(self.a_min, self.a_max + 1):
                if math.gcd(a, d) == 1:
                    yield d, a

    def to_dict(self) -> dict[str, Any]:
        # jobs and output location are left out so the document is schedule-independent
        return {
            "d_values": self.selected_d(),
            "a_min": self.a_min,
            "a_max": self.a_max,
            "laws": [law.value for law in self.laws],
            "seed": self.seed,
            "max_iter": self.max_iter,
        }


@dataclass(frozen=True)
class SearchRecord:
    c: str
    d: int
    a: int
    s: int
    v2_d: int
    cycle_lengths: tuple[int, ...]
    per_size: int
    preper_size: int
    m_classes: int
    law_summary: dict[str, str]
    escalation: dict[str, Any] | None = None

    @property
    def max_cycle_len(self) -> int:
        return max(self.cycle_lengths, default=0)

    @property
    def laws_failed(self) -> list[str]:
        return [k for k, v in self.law_summary.items() if v == Status.FAIL.value]

    def to_dict(self) -> dict[str, Any]:
        out = {
            "c": self.c,
            "d": self.d,
            "a": self.a,
            "s": self.s,
            "v2_d": self.v2_d,
            "cycle_lengths": list(self.cycle_lengths),
            "per_size": self.per_size,
            "preper_size": self.preper_size,
            "m_classes": self.m_classes,
            "law_summary": self.law_summary,
        }
        if self.escalation is not None:
            out["escalation"] = self.escalation
        return out

    def csv_row(self) -> list[Any]:
        return [
            self.d,
            self.a,
            self.s,
            self.v2_d,
            self.per_size,
            self.preper_size,
            self.max_cycle_len,
            self.m_classes,
            ";".join(self.laws_failed),
        ]


def _v2(d: int) -> int:
    return (d & -d).bit_length() - 1


def scan_pair(d: int, a: int, laws: Iterable[LawId] = ALL_LAWS, seed: int = 0, max_iter: int = DEFAULT_MAX_ITER) -> SearchRecord:
    param = QuadParam.from_ad(a, d, seed=seed)
    ps = solve(param, max_iter=max_iter)
    reports = run_laws(ps, laws)
    failing = [r for r in reports if r.failed]
    escalation = None
    if failing:
        escalation = {"periodic_set": ps.to_dict(), "reports": [r.to_dict() for r in failing]}
    return SearchRecord(
        c=format_rational(param.c),
        d=d,
        a=a,
        s=param.s,
        v2_d=_v2(d),
        cycle_lengths=ps.cycle_lengths,
        per_size=len(ps.per),
        preper_size=len(ps.preper),
        m_classes=ps.m_classes,
        law_summary={r.law_id.value: r.status.value for r in reports},
        escalation=escalation,
    )


def _scan_task(task: tuple[int, int, tuple[LawId, ...], int, int]) -> SearchRecord:
    return scan_pair(*task)


@dataclass
class SearchResult:
    config: SearchConfig
    records: list[SearchRecord]
    summary: dict[str, Any] = field(default_factory=dict)

    @property
    def escalations(self) -> list[SearchRecord]:
        return [r for r in self.records if r.escalation is not None]

    @property
    def exit_code(self) -> int:
        if any(LawId.FPS_CONJECTURE.value in r.laws_failed for r in self.records):
            return EXIT_FPS
        if self.escalations:
            return EXIT_LAW_FAIL
        return EXIT_OK

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow(r.csv_row())
        return buf.getvalue()


def summarize(records: list[SearchRecord]) -> dict[str, Any]:
    by_s: dict[int, Counter] = defaultdict(Counter)
    by_v2: dict[int, Counter] = defaultdict(Counter)
    failures: Counter = Counter()
    for r in records:
        for L in r.cycle_lengths:
            by_s[r.s][L] += 1
            by_v2[r.v2_d][L] += 1
        failures.update(r.laws_failed)

    def table(src: dict[int, Counter]) -> dict[str, dict[str, int]]:
        return {str(k): {str(L): n for L, n in sorted(v.items())} for k, v in sorted(src.items())}

    return {
        "records": len(records),
        "with_cycles": sum(1 for r in records if r.cycle_lengths),
        "max_cycle_len": max((r.max_cycle_len for r in records), default=0),
        "max_per_size": max((r.per_size for r in records), default=0),
        "cycle_lengths_by_s": table(by_s),
        "cycle_lengths_by_v2_d": table(by_v2),
        "law_failures": dict(sorted(failures.items())),
        "fps_candidates": failures.get(LawId.FPS_CONJECTURE.value, 0),
    }


def run_search(config: SearchConfig) -> SearchResult:
    """Scan every (d, a) of the config; output order never depends on ``jobs``."""
    tasks = [(d, a, config.laws, config.seed, config.max_iter) for d, a in config.pairs()]
    if config.jobs == 1:
        records = [_scan_task(t) for t in tasks]
    else:
        chunk = max(1, min(64, len(tasks) // (config.jobs * 8) or 1))
        with multiprocessing.get_context("spawn").Pool(config.jobs) as pool:
            records = list(pool.imap_unordered(_scan_task, tasks, chunksize=chunk))
    records.sort(key=lambda r: (r.d, r.a))
    return SearchResult(config, records, summarize(records))


def write_outputs(result: SearchResult, path: Path, fmt: str = "json") -> list[Path]:
    """Write the corpus file, plus an escalation file when anything failed."""
    path = Path(path)
    text = result.to_json() if fmt == "json" else result.to_csv()
    path.write_text(text, encoding="utf-8")
    written = [path]
    if result.escalations:
        esc = path.with_name(path.name + ".escalations.ndjson")
        lines = []
        for r in result.escalations:
            item = {"d": r.d, "a": r.a, "c": r.c, **r.escalation}
            lines.append(json.dumps(item, sort_keys=True))
        esc.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(esc)
    return written


def law_summary_line(reports: list[LawReport]) -> str:
    counts = Counter(r.status.value for r in reports)
    return ", ".join(f"{k}={counts[k]}" for k in sorted(counts))
