"""Per-run randomness. Every draw in a run descends from the scenario seed."""
from __future__ import annotations

import random

# child seeds are drawn from [0, SEED_SPACE]
SEED_SPACE = 2**31 - 1


class SeededRNG(random.Random):
    """A ``random.Random`` that remembers its origin and hands out child streams.

    The scenario draws the topology and simulator seeds from one instance,
    and the simulator forks one stream per node so that a node's heartbeat
    phase, gossip targets and stagger shuffles do not depend on how many draws
    other nodes made before it.
    """

    def __init__(self, origin: int):
        super().__init__(origin)
        self.origin = origin

    def derive_seed(self) -> int:
        return self.randint(0, SEED_SPACE)

    def fork(self) -> SeededRNG:
        return SeededRNG(self.derive_seed())
