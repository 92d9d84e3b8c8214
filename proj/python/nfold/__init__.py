"""Python access to the nfold toolkit.

``run`` mirrors the command-line tool: it returns the exit code, the decoded
JSON report, and the CSV/plot text. ``Model`` exposes the parsed model file
for direct checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ._nfold import Model, NfoldError, report_schema_version
from ._nfold import run_command as _run_command
from ._nfold import run_command_text as _run_command_text

__all__ = ["Model", "NfoldError", "Result", "run", "run_text", "report_schema_version"]


@dataclass
class Result:
    exit_code: int
    report: dict
    csv: str
    plot: str
    summary: str


def _wrap(raw: dict) -> Result:
    return Result(raw["exit_code"], json.loads(raw["report"]), raw["csv"], raw["plot"], raw["summary"])


def run(command: str, path: str, **options) -> Result:
    """Run verify, spectrum, certify-g or index on a model file."""
    return _wrap(_run_command(command, str(path), **options))


def run_text(command: str, text: str, **options) -> Result:
    """Same as ``run`` for model text held in memory."""
    return _wrap(_run_command_text(command, text, **options))
