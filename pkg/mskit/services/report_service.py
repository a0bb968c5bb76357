"""JSONL report writer."""

import json
import logging
import sys
import threading
from collections import Counter
from collections.abc import Sequence
from types import TracebackType
from typing import IO

from mskit.exceptions import ValidationError
from mskit.records import ReportRecord
from mskit.services.schemas import validate_report_record

logger = logging.getLogger(__name__)


class ReportServiceImpl:
    """Report service implementation.

    All records go through one lock-protected writer, so lines from
    concurrently running scenarios never interleave.
    """

    def __init__(self, stream: IO[str] | None = None) -> None:
        self._stream: IO[str] = stream if stream is not None else sys.stdout
        self._owned = False
        self._lock = threading.Lock()
        self.verdicts: Counter[str] = Counter()

    def open(self, stream: IO[str]) -> None:
        """Redirect output to a stream the service now owns and closes."""
        with self._lock:
            self._stream = stream
            self._owned = True

    def close(self) -> None:
        with self._lock:
            if self._owned:
                self._stream.close()
                self._stream = sys.stdout
                self._owned = False

    def serialize(self, record: ReportRecord) -> str:
        """One canonical JSON line: sorted keys, no NaN, UTF-8 text."""
        payload = record.to_dict()
        validate_report_record(payload)
        try:
            return json.dumps(payload, sort_keys=True, ensure_ascii=False, allow_nan=False)
        except ValueError as e:
            raise ValidationError(f"Report record for task '{record.task}' is not valid JSON", str(e)) from e

    def write(self, record: ReportRecord) -> None:
        line = self.serialize(record)
        with self._lock:
            self._stream.write(line + "\n")
            self._stream.flush()
            self.verdicts[record.verdict] += 1
        logger.debug(f"Wrote {record.task} record for {record.scenario}: {record.verdict}")

    def write_all(self, records: Sequence[ReportRecord]) -> None:
        for record in records:
            self.write(record)

    @property
    def failed(self) -> bool:
        return self.verdicts["fail"] > 0

    def __enter__(self) -> "ReportServiceImpl":
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()
