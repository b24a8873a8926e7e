"""Append-only JSON-lines log of CLI actions."""
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional


LOG_DIR_ENV = "MLFRAC_LOG_DIR"
DEFAULT_LOG_DIR = "logs"
LOG_FILE_NAME = "mlfrac_log.jsonl"


def console(message: str) -> None:
    """Progress line on stderr; stdout carries data only."""
    print(f"[mlfrac] {message}", file=sys.stderr)


class RunLogger:
    """Records what each command did, in memory and in the log file."""

    def __init__(self, command: str, log_dir: Optional[str] = None):
        """
        Initialize the logger.

        Args:
            command: Name of the CLI command being run
            log_dir: Log directory; defaults to $MLFRAC_LOG_DIR or ./logs.
                An empty string disables the file log.
        """
        self.command = command
        if log_dir is None:
            log_dir = os.environ.get(LOG_DIR_ENV, DEFAULT_LOG_DIR)
        self.log_file: Optional[Path] = Path(log_dir) / LOG_FILE_NAME if log_dir else None
        self.history: List[Dict[str, Any]] = []

    def log_action(self, action: str, details: Dict[str, Any], success: bool = True) -> None:
        """
        Log an action taken by the command.

        Args:
            action: Short action name
            details: JSON-serialisable details
            success: Whether the action succeeded
        """
        entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "command": self.command,
            "action": action,
            "details": details,
            "success": success,
        }
        self.history.append(entry)

        if self.log_file is None:
            return
        try:
            self.log_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.log_file, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, default=str) + "\n")
        except OSError as e:
            console(f"failed to write log: {e}")

    def get_history(self, limit: int = 10) -> List[Dict[str, Any]]:
        """Most recent `limit` entries."""
        return self.history[-limit:]
