"""Channel scenario container and validation.

One ChannelScenario wires together the two downlink users: their channel
gains, their blocklengths, the power budget (either a sum constraint or
an explicit per-user split) and the target error probability.
"""

from dataclasses import dataclass, field
from typing import Optional

ORDER_FIRST = "first"
ORDER_SECOND = "second"
ORDER_HALFLOGN = "halflogn"

_ORDERS = (ORDER_FIRST, ORDER_SECOND, ORDER_HALFLOGN)


def check_order(order: str) -> str:
    if order not in _ORDERS:
        raise ValueError(f"order must be one of {_ORDERS}, got {order!r}")
    return order


@dataclass(frozen=True)
class ChannelScenario:
    """Two-user downlink with per-user blocklengths n1 >= n2.

    User 1 is the weaker user (gain h1 <= h2) and transmits over the full
    n1 channel uses; user 2 only occupies the first n2.  Exactly one of
    power_sum or the pair (power_1, power_2) must be given.
    """

    h1: float
    h2: float
    n1: int
    n2: int
    eps: float
    power_sum: Optional[float] = None
    power_1: Optional[float] = None
    power_2: Optional[float] = None

    def __post_init__(self):
        if not (self.h1 > 0.0):
            raise ValueError(f"h1 must be > 0, got {self.h1}")
        if not (self.h2 >= self.h1):
            raise ValueError(
                f"h2 must be >= h1 (user 2 is the stronger one), "
                f"got h1={self.h1}, h2={self.h2}"
            )
        if not (isinstance(self.n1, int) and self.n1 >= 1):
            raise ValueError(f"n1 must be an integer >= 1, got {self.n1!r}")
        if not (isinstance(self.n2, int) and 1 <= self.n2 <= self.n1):
            raise ValueError(
                f"n2 must be an integer with 1 <= n2 <= n1, got n2={self.n2!r} "
                f"for n1={self.n1}"
            )
        if not (0.0 < self.eps < 0.25):
            raise ValueError(f"eps must be in (0, 0.25), got {self.eps}")
        has_sum = self.power_sum is not None
        has_split = self.power_1 is not None or self.power_2 is not None
        if has_sum and has_split:
            raise ValueError("give either power_sum or (power_1, power_2), not both")
        if has_sum:
            if not (self.power_sum > 0.0):
                raise ValueError(f"power_sum must be > 0, got {self.power_sum}")
        elif has_split:
            if self.power_1 is None or self.power_2 is None:
                raise ValueError("power_1 and power_2 must be given together")
            if not (self.power_1 > 0.0 and self.power_2 > 0.0):
                raise ValueError(
                    f"power_1 and power_2 must be > 0, got "
                    f"({self.power_1}, {self.power_2})"
                )
        else:
            raise ValueError("one of power_sum or (power_1, power_2) is required")

    @property
    def p(self) -> float:
        """Blocklength ratio n2 / n1 in (0, 1]."""
        return self.n2 / self.n1

    @property
    def sum_power(self) -> float:
        if self.power_sum is not None:
            return self.power_sum
        return self.power_1 + self.power_2

    @property
    def user_powers(self) -> tuple:
        """(P1, P2) pair; requires the split form."""
        if self.power_1 is None:
            raise ValueError("scenario was built with power_sum, no per-user split")
        return (self.power_1, self.power_2)

    def with_blocklengths(self, n1: int, n2: int) -> "ChannelScenario":
        return ChannelScenario(
            h1=self.h1, h2=self.h2, n1=n1, n2=n2, eps=self.eps,
            power_sum=self.power_sum, power_1=self.power_1, power_2=self.power_2,
        )
