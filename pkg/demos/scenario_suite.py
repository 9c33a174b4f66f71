"""Run the bundled scenarios programmatically and write their reports."""
import tempfile
from pathlib import Path

from harnacklab.cli_runner import emit_report, run_suite

out = Path(tempfile.mkdtemp())
for report in run_suite():
    emit_report(report, csv_dir=out, json_path=out / f"{report.scenario.name}.json")
    print(f"{report.scenario.name:22s} {report.status}")
print("reports in", out)
