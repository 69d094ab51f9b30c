"""Protocol every dispersal strategy implements."""
from __future__ import annotations

from typing import Optional, Protocol

from ..kernel import Action, LocalView


class Strategy(Protocol):
    name: str
    sensor_radius: int
    comm_radius: int
    uses_flow_links: bool
    max_doors: Optional[int]  # None = any number

    def decide(self, view: LocalView) -> Action:
        """Choose this step's action from purely local information."""
        ...
