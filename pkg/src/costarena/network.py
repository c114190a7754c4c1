"""Network form: directed graphs whose edges are priced resources and whose
strategies are simple s-t paths.

Multi-edges and self-contained free edges are allowed; an edge is a
(id, tail, head, cost function) record and paths are reported as tuples of
edge ids in walk order. Path enumeration is DFS with adjacency sorted by
(head vertex, edge id), so path order is deterministic, and is capped at
10^5 paths per terminal pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .core import CapExceededError, GameModel, SetCostFunction, ValidationError

PATH_CAP = 10 ** 5


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    cost: SetCostFunction


@dataclass(frozen=True)
class NetworkModel:
    """Directed network with one terminal pair per player.

    ``forced`` optionally restricts a player to a subset of its paths,
    given as edge-id sets; it models side constraints like "these players
    must use that route" without extra graph machinery. Construction
    eagerly enumerates every player's paths and fails if any player has
    none, or if a forced entry is not an actual path.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    terminals: tuple[tuple[str, str], ...]
    forced: tuple[tuple[frozenset[str], ...] | None, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "terminals", tuple(tuple(t) for t in self.terminals))
        if self.forced is not None:
            object.__setattr__(
                self, "forced",
                tuple(None if fs is None else tuple(frozenset(s) for s in fs)
                      for fs in self.forced))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex names")
        vset = set(self.vertices)
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate edge ids")
        n = len(self.terminals)
        if not n:
            raise ValidationError("at least one player (terminal pair) required")
        for e in self.edges:
            if e.tail not in vset or e.head not in vset:
                raise ValidationError(f"edge {e.id!r} touches unknown vertices")
            if e.cost.n != n:
                raise ValidationError(
                    f"edge {e.id!r} cost arity {e.cost.n}, game has {n} players")
        for i, (s, t) in enumerate(self.terminals):
            if s not in vset or t not in vset:
                raise ValidationError(f"player {i} terminals ({s!r}, {t!r}) unknown")
        if self.forced is not None and len(self.forced) != n:
            raise ValidationError("forced list must have one entry per player")
        # eager path check: every player must be routable
        for i in range(n):
            if not self.player_paths(i):
                s, t = self.terminals[i]
                raise ValidationError(f"player {i} has no {s!r} -> {t!r} path")

    @property
    def n(self) -> int:
        return len(self.terminals)

    @cached_property
    def _out(self) -> dict[str, tuple[Edge, ...]]:
        adj: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.tail].append(e)
        return {v: tuple(sorted(es, key=lambda e: (e.head, e.id)))
                for v, es in adj.items()}

    def paths(self, s: str, t: str) -> list[tuple[str, ...]]:
        """All simple directed s-t paths as edge-id tuples in walk order."""
        if s not in self._out or t not in self._out:
            raise ValidationError(f"unknown terminal {s!r} or {t!r}")
        out = self._out
        found: list[tuple[str, ...]] = []
        stack: list[str] = []
        visited = {s}

        def walk(v: str) -> None:
            if v == t:
                found.append(tuple(stack))
                if len(found) > PATH_CAP:
                    raise CapExceededError(
                        f"more than {PATH_CAP} simple {s!r} -> {t!r} paths")
                return
            for e in out[v]:
                if e.head in visited:
                    continue
                visited.add(e.head)
                stack.append(e.id)
                walk(e.head)
                stack.pop()
                visited.discard(e.head)

        walk(s)
        return found

    def player_paths(self, i: int) -> list[tuple[str, ...]]:
        """Player i's usable paths, after applying any forced restriction."""
        s, t = self.terminals[i]
        all_paths = self.paths(s, t)
        restriction = self.forced[i] if self.forced is not None else None
        if restriction is None:
            return all_paths
        by_set = {frozenset(p): p for p in all_paths}
        chosen = []
        for want in restriction:
            path = by_set.get(want)
            if path is None:
                raise ValidationError(
                    f"forced strategy {sorted(want)} of player {i} is not a simple path")
            chosen.append(path)
        return chosen


def enumerate_paths(nm: NetworkModel, s: str, t: str) -> list[tuple[str, ...]]:
    """Module-level alias for ``NetworkModel.paths``."""
    return nm.paths(s, t)


def to_game(nm: NetworkModel) -> GameModel:
    """Flatten the network into resource/strategy form.

    Edges become resources in declaration order; each player's strategy
    set is its enumerated (or forced) path list, each path read as the set
    of edge ids it uses.
    """
    strategy_sets = tuple(tuple(frozenset(p) for p in nm.player_paths(i))
                          for i in range(nm.n))
    return GameModel(
        n=nm.n,
        resources=tuple(e.id for e in nm.edges),
        strategy_sets=strategy_sets,
        cost_fns=tuple(e.cost for e in nm.edges),
    )
