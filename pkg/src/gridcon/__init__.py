"""Cascading-failure analysis for interdependent power/communication networks."""

__version__ = "0.1.0"

from .cascade import CascadeTrace, DamageMetric, cascade_step, damage, run_cascade, settle
from .contingency import ContingencyResult, Solver, eligible, exact_k_contingency
from .entities import EntityId, parse_token
from .errors import GridconError
from .events import FailureEvent, read_events, self_updating_list
from .game import (
    GameOutcome,
    GameScenario,
    HardeningMode,
    PayoffTable,
    adaptive_harden,
    best_response_attack,
    impact_factor,
    run_game,
)
from .heuristic import heuristic_k_contingency
from .idr import Model, eval_expr, parse_expr, parse_idr, parse_idrs
from .lpexport import export_ilp
from .network import Network, load_network, read_network, save_network, write_network

__all__ = [
    "CascadeTrace", "ContingencyResult", "DamageMetric", "EntityId", "FailureEvent", "GameOutcome",
    "GameScenario", "GridconError", "HardeningMode", "Model", "Network", "PayoffTable", "Solver",
    "adaptive_harden", "best_response_attack", "cascade_step", "damage", "eligible", "eval_expr",
    "exact_k_contingency", "export_ilp", "heuristic_k_contingency", "impact_factor", "load_network",
    "parse_expr", "parse_idr", "parse_idrs", "parse_token", "read_events", "read_network",
    "run_cascade", "run_game", "save_network", "self_updating_list", "settle", "write_network",
]
