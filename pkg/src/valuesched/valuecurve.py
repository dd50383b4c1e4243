"""Time-to-value mapping for manufacturing orders.

An order keeps its full value until the plateau end ``d_s``, decays linearly
to zero at ``z_s`` and optionally keeps falling below zero afterwards at
``penalty_rate`` per second.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ValueCurve:
    d_s: float
    z_s: float
    penalty_rate: float = 0.0

    def factor(self, t: float) -> float:
        return curve_factor(t, self)


def curve_factor(t: float, c: ValueCurve) -> float:
    """Dimensionless value factor of an order finished at absolute time ``t``."""
    if t <= c.d_s:
        return 1.0
    if t < c.z_s:
        return (c.z_s - t) / (c.z_s - c.d_s)
    if c.penalty_rate == 0.0:
        return 0.0
    return -c.penalty_rate * (t - c.z_s)


def element_profit(opt, et: float, c: ValueCurve) -> float:
    """Profit earned by processing option ``opt`` when its element finishes at ``et``."""
    return opt.max_profit * curve_factor(et, c)


def curve_violations(c: ValueCurve, arrival_time_s: float = 0.0) -> list[str]:
    problems = []
    if not arrival_time_s <= c.d_s:
        problems.append(f"arrival time {arrival_time_s} is after plateau end D={c.d_s}")
    if not c.d_s < c.z_s:
        problems.append(f"plateau end D={c.d_s} must be before zero point Z={c.z_s}")
    if not c.penalty_rate >= 0:
        problems.append(f"penalty_rate {c.penalty_rate} is negative")
    return problems
