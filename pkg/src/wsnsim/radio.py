"""First-order radio energy model.

Transmitting ``k`` bits over ``d`` meters costs ``E_elec*k + eps_fs*k*d**2``
below the crossover distance ``d0 = sqrt(eps_fs/eps_mp)`` and
``E_elec*k + eps_mp*k*d**4`` at or above it.  Receiving costs ``E_elec*k``.
Cost functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .netmodel import Node


class DeadNodeError(RuntimeError):
    """Raised when energy is charged to a node that is already dead."""


@dataclass(frozen=True)
class RadioParams:
    e_elec: float = 50e-9       # J/bit
    e_da: float = 5e-9          # J/bit/signal
    eps_fs: float = 10e-12      # J/bit/m^2
    eps_mp: float = 0.0013e-12  # J/bit/m^4
    packet_bits: int = 4000
    ctrl_bits: int = 200
    e_sense: float = 0.0        # J per node per round
    d0: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.d0 is None:
            object.__setattr__(self, "d0", math.sqrt(self.eps_fs / self.eps_mp))
        for name in ("e_elec", "e_da", "eps_fs", "eps_mp", "packet_bits", "d0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"radio parameter {name} must be strictly positive")
        if self.ctrl_bits < 0 or self.e_sense < 0:
            raise ValueError("ctrl_bits and e_sense must be non-negative")


def tx_cost(params: RadioParams, bits, distance):
    """Energy to transmit ``bits`` over ``distance`` meters."""
    if isinstance(distance, (int, float)):
        d = float(distance)
        amp = params.eps_fs * d * d if d < params.d0 else params.eps_mp * d**4
        return params.e_elec * bits + amp * bits
    d = np.asarray(distance, dtype=float)
    d2 = d * d
    amp = params.eps_fs * d2
    far = d >= params.d0
    if far.any():
        amp = np.where(far, params.eps_mp * d2 * d2, amp)
    cost = params.e_elec * bits + amp * bits
    return float(cost) if cost.ndim == 0 else cost


def rx_cost(params: RadioParams, bits):
    return params.e_elec * bits


def aggregation_cost(params: RadioParams, bits, signal_count):
    return params.e_da * bits * signal_count


def charge(node: Node, cost: float) -> Node:
    """Return ``node`` after spending ``cost`` joules.

    The whole cost is always applied; a node that cannot cover it ends at
    zero residual energy and dead.
    """
    if not node.alive:
        raise DeadNodeError(f"node {node.id} is dead and cannot be charged")
    residual = node.residual_energy - cost
    if residual <= 0:
        return dataclasses.replace(node, residual_energy=0.0, alive=False)
    return dataclasses.replace(node, residual_energy=residual)
