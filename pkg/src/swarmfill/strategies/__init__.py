"""Strategy registry."""
from __future__ import annotations

from typing import Dict

from .base import Strategy
from .bflf import BranchingChainStrategy
from .dflf import DepthChainStrategy
from .lflf import FlowNetworkStrategy

STRATEGIES: Dict[str, Strategy] = {
    s.name: s for s in (DepthChainStrategy(), BranchingChainStrategy(), FlowNetworkStrategy())
}


def get_strategy(name: str) -> Strategy:
    try:
        return STRATEGIES[name]
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}") from None


__all__ = [
    "STRATEGIES",
    "Strategy",
    "get_strategy",
    "DepthChainStrategy",
    "BranchingChainStrategy",
    "FlowNetworkStrategy",
]
