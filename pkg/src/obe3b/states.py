"""Channel states and (Q, L) blocks shared by the coefficient and basis code."""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple


class ChannelState(NamedTuple):
    """Coupled two-oscillator state [phi_{nx lx}(x) phi_{ny ly}(y)]_L."""

    nx: int
    lx: int
    ny: int
    ly: int
    L: int

    @property
    def Q(self) -> int:
        return 2 * self.nx + self.lx + 2 * self.ny + self.ly

    @property
    def parity(self) -> int:
        return -1 if (self.lx + self.ly) % 2 else 1

    def swapped(self) -> "ChannelState":
        return ChannelState(self.ny, self.ly, self.nx, self.lx, self.L)


@lru_cache(maxsize=None)
def block_states(Q: int, L: int) -> tuple[ChannelState, ...]:
    """All states with Q quanta and total L, ordered on (lx, ly, nx)."""
    out = []
    for lx in range(Q + 1):
        for ly in range(Q - lx + 1):
            if not abs(lx - ly) <= L <= lx + ly:
                continue
            rest = Q - lx - ly
            if rest % 2:
                continue
            for nx in range(rest // 2 + 1):
                out.append(ChannelState(nx, lx, rest // 2 - nx, ly, L))
    return tuple(out)


class QLBlock(NamedTuple):
    Q: int
    L: int

    @property
    def states(self) -> tuple[ChannelState, ...]:
        return block_states(self.Q, self.L)

    def index(self) -> dict[ChannelState, int]:
        return {s: i for i, s in enumerate(self.states)}
