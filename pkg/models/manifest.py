"""
Run Manifest Model

Record written beside every CLI output so the run can be reproduced.
"""

from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from typing import Dict, List, Optional


def utc_now():
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


@dataclass
class RunManifest:
    """Command, resolved configuration, seed, paths and timestamps of one run."""
    command: str
    config: Dict[str, object]
    seed: Optional[int]
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    code_version: str = ''
    argv: List[str] = field(default_factory=list)
    started_at: str = field(default_factory=utc_now)
    finished_at: Optional[str] = None
    status: str = 'running'
    error: Optional[Dict[str, object]] = None

    def finish(self, status='ok', error=None):
        self.finished_at = utc_now()
        self.status = status
        self.error = error
        return self

    def to_dict(self):
        return asdict(self)
