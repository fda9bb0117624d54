"""Independent brute-force ground truth used by the acceptance suite."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import InputError
from .graphs import Graph, graph_local_density
from .starmetric import metric_local_density


@dataclass(frozen=True)
class OracleReport:
    instance: str
    oracle_value: object
    tested_value: object
    verdict: bool
    runtime: float


def exact_bandwidth(g: Graph, max_vertices: int = 12) -> int:
    """Exact bandwidth by depth-first search over feasibility of each target
    width, placing vertices left to right.

    A partial placement is pruned when a placed edge already exceeds the
    target, or when a vertex placed more than ``target`` positions back still
    has an unplaced neighbor.
    """
    live = g.vertices()
    n = len(live)
    if n > max_vertices:
        raise InputError(f"exact bandwidth is limited to {max_vertices} vertices")
    if n == 0:
        return 0
    adjacency = {v: set(g.neighbors(v)) for v in live}
    if not any(adjacency.values()):
        return 0

    lower = max((len(nb) + 1) // 2 for nb in adjacency.values())

    def feasible(target: int) -> bool:
        placed_pos: dict = {}
        order: list = []

        def extend() -> bool:
            i = len(order)
            if i == n:
                return True
            frontier = i - target - 1
            if frontier >= 0:
                w = order[frontier]
                if any(x not in placed_pos for x in adjacency[w]):
                    return False
            for v in live:
                if v in placed_pos:
                    continue
                ok = all(
                    i - placed_pos[x] <= target
                    for x in adjacency[v]
                    if x in placed_pos
                )
                if not ok:
                    continue
                placed_pos[v] = i
                order.append(v)
                if extend():
                    return True
                order.pop()
                del placed_pos[v]
            return False

        return extend()

    target = lower
    while not feasible(target):
        target += 1
    return target


def exhaustive_local_density(g_or_metric, max_points: int = 5000):
    """Exact local density of a graph, or of ``(points, matrix)``."""
    if isinstance(g_or_metric, Graph):
        if g_or_metric.num_vertices > max_points:
            raise InputError(f"density oracle is limited to {max_points} points")
        return graph_local_density(g_or_metric)
    points, dist = g_or_metric
    if len(points) > max_points:
        raise InputError(f"density oracle is limited to {max_points} points")
    return metric_local_density(points, dist)


def run_oracle(instance: str, oracle_value, tested_value, relation="eq",
               started: float | None = None) -> OracleReport:
    """Wrap a comparison in a report row."""
    if relation == "eq":
        verdict = oracle_value == tested_value
    elif relation == "le":
        verdict = tested_value <= oracle_value
    else:
        raise InputError(f"unknown relation {relation!r}")
    runtime = time.perf_counter() - started if started is not None else 0.0
    return OracleReport(instance, oracle_value, tested_value, verdict, runtime)
