"""
Audit logging for experiment runs.

One JSON object per line in ``audit.jsonl`` of the output directory: run start
and finish, warnings raised by the estimators, and errors that aborted a run.
"""

from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import structlog

from mlbgg.core.exceptions import MLBGGError


class AuditLogger:
    """
    Append-only JSON-lines audit trail of one output directory.

    Events are rendered by structlog's JSONRenderer onto a WriteLogger bound to
    the audit file, independently of the console logging configuration.
    """

    def __init__(self, log_dir: Path, filename: str = "audit.jsonl"):
        """
        Initialize audit logger.

        Args:
            log_dir: Directory for the audit log
            filename: Log file name inside ``log_dir``
        """
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.log_dir / filename

        self._file: TextIO = self.path.open("a", encoding="utf-8")
        self.logger = structlog.wrap_logger(
            structlog.WriteLogger(self._file),
            processors=[
                structlog.processors.TimeStamper(fmt="iso", utc=True),
                structlog.processors.JSONRenderer(sort_keys=True),
            ],
            wrapper_class=structlog.BoundLogger,
        )

    def log_run_started(
        self, command: str, scenario: str, fingerprint: str, seed: int, **extra: Any
    ) -> None:
        """
        Log the start of a command.

        Args:
            command: CLI command name
            scenario: Scenario name
            fingerprint: Scenario fingerprint
            seed: Root seed
        """
        self._log_event(
            "run_started",
            {
                "command": command,
                "scenario": scenario,
                "fingerprint": fingerprint,
                "seed": seed,
                **extra,
            },
        )

    def log_run_finished(self, command: str, outputs: Dict[str, str], **summary: Any) -> None:
        self._log_event("run_finished", {"command": command, "outputs": outputs, **summary})

    def log_warning(self, message: str, **context: Any) -> None:
        self._log_event("warning", {"message": message, **context})

    def log_error(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> None:
        """
        Log error with context.

        Args:
            error: Exception that occurred
            context: Additional context
        """
        details = error.details if isinstance(error, MLBGGError) else {}
        self._log_event(
            "error",
            {
                "error_type": type(error).__name__,
                "error_message": str(error),
                "details": details,
                "context": context or {},
            },
        )

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()

    def __enter__(self) -> "AuditLogger":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()

    def _log_event(self, event_type: str, data: Dict[str, Any]) -> None:
        self.logger.info(event_type, **data)
        self._file.flush()
