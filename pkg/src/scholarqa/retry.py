"""Bounded retry with exponential backoff, shared by the HTTP clients."""

from dataclasses import dataclass


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base: float = 0.5  # seconds; doubles per attempt

    def delay(self, attempt: int) -> float:
        return self.backoff_base * (2 ** (attempt - 1))
