import logging
import time
import typing as t

try:
    import psutil

    _HAS_PSUTIL = True
except ImportError:
    _HAS_PSUTIL = False


def _rss_mb() -> t.Optional[float]:
    if not _HAS_PSUTIL:
        return None
    return psutil.Process().memory_info().rss / (1024 * 1024)  # type: ignore


class ProgressLogger:
    """
    Debug-level progress for long numerical loops.

    Each `log()` call reports the running number of processed items
    (greedy candidates, oracle subsets) with throughput since the last
    `reset()`. Nothing is formatted unless the logger is enabled for
    DEBUG.
    """

    def __init__(
        self,
        event: str | None = None,
        logger: t.Optional[logging.Logger] = None,
    ):
        self.logger = logger or null_logger()
        self.event = event
        self.total = 0
        self.show_memory = False
        self._start = time.monotonic()
        self._rss_start: t.Optional[float] = None

    @property
    def elapsed_ms(self) -> float:
        return (time.monotonic() - self._start) * 1000.0

    def reset(self, event: str, show_memory: t.Optional[bool] = None):
        """Start a new phase: zero the counter and restart the clock."""
        self.event = event
        self.total = 0
        if show_memory is not None:
            self.show_memory = show_memory
        self._rss_start = _rss_mb() if self.show_memory else None
        self._start = time.monotonic()

    def _memory(self) -> str:
        if not self.show_memory:
            return ""
        now = _rss_mb()
        if now is None or self._rss_start is None:
            return ", RSS: - MB"
        return f", RSS: {max(now - self._rss_start, 0.0):.1f}MB"

    def log(self, count: int, detail: str = ""):
        """Add `count` processed items and emit one debug line."""
        self.total += count
        if not self.logger.isEnabledFor(logging.DEBUG):
            return
        seconds = max(time.monotonic() - self._start, 1e-9)
        rate = self.total / seconds
        line = (
            f"{self.event} {self.total} in {seconds:.3f}s"
            f" ({rate:.0f}/s){self._memory()}"
        )
        self.logger.debug(f"{line} {detail}" if detail else line)


def null_logger() -> logging.Logger:
    """Logger that discards everything; default sink for progress output."""
    logger = logging.getLogger("sensorplace.null")
    if not logger.handlers:
        logger.addHandler(logging.NullHandler())
    logger.setLevel(logging.CRITICAL + 1)
    logger.propagate = False
    return logger
