import time

from .errors import BudgetExceeded


class Budget:
    """Wall-clock allowance checked cooperatively inside long loops."""

    def __init__(self, seconds=None):
        self.seconds = seconds
        self._deadline = None if seconds is None else time.monotonic() + seconds

    def check(self):
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise BudgetExceeded(f"budget of {self.seconds}s exceeded")

    def remaining(self):
        if self._deadline is None:
            return None
        return self._deadline - time.monotonic()


UNLIMITED = Budget()
