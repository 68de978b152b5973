import json
from collections import Counter
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from bounds import BoundsRow
from csv_report import write_tsv_report
from matching import LemmaReport


class ReportGenerator:
    """Render bounds rows and matching-lemma reports as JSON and text."""

    def __init__(self, rows: List[BoundsRow], lemma_reports: Optional[List[LemmaReport]] = None,
                 preset: Optional[str] = None):
        """
        Initialize the report generator.

        Args:
            rows: Bounds rows in table order
            lemma_reports: Optional matching-lemma reports to append
            preset: Name of the configuration preset the rows were built with
        """
        self.rows = rows
        self.lemma_reports = lemma_reports or []
        self.preset = preset
        self.stats = self._calculate_statistics()

    def _calculate_statistics(self) -> Dict[str, Any]:
        """Counts over the rows: successes, oracle coverage, tightness."""
        total = len(self.rows)
        if total == 0:
            return {
                "total_rows": 0,
                "successful_rows": 0,
                "monotone_rows": 0,
                "oracle_rows": 0,
                "tight_rows": 0,
                "max_gap": 0,
                "oracle_status": {},
                "variants": {},
            }

        exact = [r for r in self.rows if r.iota is not None]
        gaps = [r.tau - r.iota for r in exact if r.success]
        return {
            "total_rows": total,
            "successful_rows": sum(1 for r in self.rows if r.success),
            "monotone_rows": sum(1 for r in self.rows if r.success and r.monotone),
            "oracle_rows": len(exact),
            "tight_rows": sum(1 for g in gaps if g == 0),
            "max_gap": max(gaps) if gaps else 0,
            "oracle_status": dict(Counter(r.oracle for r in self.rows)),
            "variants": dict(Counter(r.variant for r in self.rows)),
        }

    def generate_json_report(self, output_path: str) -> str:
        """
        Write rows, statistics and lemma reports as one JSON document.

        Args:
            output_path: Path to save the JSON file
        """
        report = {
            "metadata": {
                "generated": datetime.now().isoformat(),
                "preset": self.preset,
                "rows": len(self.rows),
            },
            "statistics": self.stats,
            "rows": [r.as_dict() for r in self.rows],
            "matching": [
                {
                    "side": lr.side,
                    "mode": lr.mode,
                    "seed": lr.seed,
                    "checked": lr.checked,
                    "minimum": lr.minimum,
                    "passed": lr.passed,
                    "worst": list(lr.worst),
                    "minimizers": lr.minimizers,
                    "non_rectangular_minimizers": lr.non_rectangular_minimizers,
                }
                for lr in self.lemma_reports
            ],
        }

        with open(output_path, 'w', encoding='utf-8') as f:
            json.dump(report, f, indent=2, ensure_ascii=False)
        return output_path

    def statistics_lines(self) -> List[str]:
        lines = [
            "=" * 60,
            "IMMUNITY BOUNDS SUMMARY",
            "=" * 60,
            f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
            f"Preset: {self.preset or 'default'}",
            "",
            "-" * 60,
            "OVERVIEW",
            "-" * 60,
            f"Table rows: {self.stats['total_rows']}",
            f"Strategy successes: {self.stats['successful_rows']}",
            f"Monotone successes: {self.stats['monotone_rows']}",
            f"Rows with exact iota: {self.stats['oracle_rows']}",
            f"Tight rows (tau == iota): {self.stats['tight_rows']}",
            f"Largest gap tau - iota: {self.stats['max_gap']}",
            "",
            "-" * 60,
            "ROWS",
            "-" * 60,
        ]
        lines.extend(r.summary() for r in self.rows)

        if self.lemma_reports:
            lines.extend(["", "-" * 60, "MATCHING LEMMA", "-" * 60])
            for lr in self.lemma_reports:
                lines.extend(lr.lines())
                lines.append("")

        lines.append("=" * 60)
        return lines

    def generate_statistics_report(self, output_path: str) -> str:
        """
        Write the plain text summary.

        Args:
            output_path: Path to save the text file
        """
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write('\n'.join(self.statistics_lines()) + '\n')
        return output_path


def generate_all_reports(rows: List[BoundsRow], output_dir: str,
                         lemma_reports: Optional[List[LemmaReport]] = None,
                         preset: Optional[str] = None) -> ReportGenerator:
    """
    Write bounds.json, summary.txt and bounds.tsv into output_dir.

    Args:
        rows: Bounds rows in table order
        output_dir: Directory to save reports
        lemma_reports: Optional matching-lemma reports
        preset: Configuration preset name, recorded in the metadata
    """
    output_path = Path(output_dir)
    output_path.mkdir(parents=True, exist_ok=True)

    generator = ReportGenerator(rows, lemma_reports, preset)
    generator.generate_json_report(str(output_path / "bounds.json"))
    generator.generate_statistics_report(str(output_path / "summary.txt"))
    write_tsv_report(rows, str(output_path / "bounds.tsv"))
    return generator
