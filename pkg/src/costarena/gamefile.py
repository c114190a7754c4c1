"""JSON game files, weight-system files, and share-table files.

Every rational crosses the wire as a "p/q" string (denominator always
written), so parse/serialize round-trips are exact and no float ever
appears in a file. Player ids are 0-based everywhere.

A game file is either flat::

    {"players": 2,
     "resources": [{"id": "r0", "cost": {"anonymous": ["0/1", "1/1", "3/1"]}},
                   {"id": "r1", "cost": {"table": [{"set": [0], "cost": "1/2"},
                                                   {"set": [0, 1], "cost": "2/1"}]}}],
     "strategies": [[["r0"], ["r1"]], [["r0", "r1"]]]}

or a network::

    {"network": {"vertices": [...],
                 "edges": [{"id": "e1", "from": "s", "to": "t", "cost": {...}}],
                 "terminals": [["s", "t"], ["s", "t"]],
                 "forced": [null, [["e1"]]]}}

Table cost entries omit zero-cost sets; anything omitted is 0, which the
cost-function validator then accepts or rejects against monotonicity.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import GameModel, SetCostFunction, ValidationError
from .network import Edge, NetworkModel, to_game
from .protocols import Protocol, ShapleyProtocol, TableProtocol, WeightSystem


def fraction_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(value) -> Fraction:
    """Accept "p/q" strings, integer strings, and JSON integers."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"not an exact rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational {value!r}") from exc
    raise ValidationError(f"bad rational {value!r}")


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"{where}: missing key {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ValidationError(f"{where}: key {key!r} has wrong type")
    return value


# ---------------------------------------------------------------------------
# Cost functions
# ---------------------------------------------------------------------------

def cost_to_json(f: SetCostFunction) -> dict:
    if f.anonymous_values is not None:
        return {"anonymous": [fraction_to_str(v) for v in f.anonymous_values]}
    entries = []
    for mask in range(1, 1 << f.n):
        v = f.value(mask)
        if v != 0:
            entries.append({"set": [i for i in range(f.n) if (mask >> i) & 1],
                            "cost": fraction_to_str(v)})
    return {"table": entries}


def cost_from_json(n: int, obj) -> SetCostFunction:
    if not isinstance(obj, dict):
        raise ValidationError("cost must be an object")
    if "anonymous" in obj:
        values = obj["anonymous"]
        if not isinstance(values, list):
            raise ValidationError("anonymous cost must be a list")
        if len(values) != n + 1:
            raise ValidationError(
                f"anonymous cost has {len(values)} entries, expected {n + 1}")
        return SetCostFunction.anonymous([parse_fraction(v) for v in values])
    if "table" in obj:
        entries = obj["table"]
        if not isinstance(entries, list):
            raise ValidationError("table cost must be a list")
        mapping = {}
        for e in entries:
            members = _require(e, "set", list, "table entry")
            if not all(isinstance(i, int) and 0 <= i < n for i in members):
                raise ValidationError(f"bad player ids in table entry {members!r}")
            mask = 0
            for i in members:
                mask |= 1 << i
            if mask in mapping:
                raise ValidationError(f"duplicate table entry for set {members!r}")
            mapping[mask] = parse_fraction(_require(e, "cost", None, "table entry"))
        return SetCostFunction.from_table(n, mapping)
    raise ValidationError("cost needs an 'anonymous' or 'table' key")


# ---------------------------------------------------------------------------
# Games and networks
# ---------------------------------------------------------------------------

def game_to_json(model: GameModel) -> dict:
    return {
        "players": model.n,
        "resources": [{"id": rid, "cost": cost_to_json(f)}
                      for rid, f in zip(model.resources, model.cost_fns)],
        "strategies": [[sorted(strat) for strat in sset]
                       for sset in model.strategy_sets],
    }


def game_from_json(obj) -> GameModel:
    n = _require(obj, "players", int, "game")
    res = _require(obj, "resources", list, "game")
    ids = []
    fns = []
    for r in res:
        ids.append(_require(r, "id", str, "resource"))
        fns.append(cost_from_json(n, _require(r, "cost", dict, "resource")))
    strategies = _require(obj, "strategies", list, "game")
    ssets = []
    for sset in strategies:
        if not isinstance(sset, list):
            raise ValidationError("each player's strategy list must be a list")
        ssets.append(tuple(frozenset(strat) for strat in sset))
    return GameModel(n=n, resources=tuple(ids), strategy_sets=tuple(ssets),
                     cost_fns=tuple(fns))


def network_to_json(nm: NetworkModel) -> dict:
    doc = {
        "vertices": list(nm.vertices),
        "edges": [{"id": e.id, "from": e.tail, "to": e.head,
                   "cost": cost_to_json(e.cost)} for e in nm.edges],
        "terminals": [list(t) for t in nm.terminals],
    }
    if nm.forced is not None:
        doc["forced"] = [None if fs is None else [sorted(s) for s in fs]
                         for fs in nm.forced]
    return {"network": doc}


def network_from_json(obj) -> NetworkModel:
    net = _require(obj, "network", dict, "file")
    terminals = _require(net, "terminals", list, "network")
    n = len(terminals)
    edges = []
    for e in _require(net, "edges", list, "network"):
        edges.append(Edge(
            _require(e, "id", str, "edge"),
            _require(e, "from", str, "edge"),
            _require(e, "to", str, "edge"),
            cost_from_json(n, _require(e, "cost", dict, "edge")),
        ))
    forced = None
    if net.get("forced") is not None:
        raw = net["forced"]
        if not isinstance(raw, list) or len(raw) != n:
            raise ValidationError("forced must list one entry per player")
        forced = tuple(None if fs is None else tuple(frozenset(s) for s in fs)
                       for fs in raw)
    return NetworkModel(
        vertices=tuple(_require(net, "vertices", list, "network")),
        edges=tuple(edges),
        terminals=tuple((t[0], t[1]) for t in terminals),
        forced=forced,
    )


def load_game(path: str) -> tuple[GameModel, NetworkModel | None]:
    """Read a game file; returns the flattened game plus the network form
    when the file used one."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    if isinstance(obj, dict) and "network" in obj:
        nm = network_from_json(obj)
        return to_game(nm), nm
    return game_from_json(obj), None


# ---------------------------------------------------------------------------
# Protocol files
# ---------------------------------------------------------------------------

def weight_system_to_json(w: WeightSystem) -> dict:
    return {"lambda": [fraction_to_str(x) for x in w.weights],
            "blocks": [list(b) for b in w.blocks]}


def weight_system_from_json(obj) -> WeightSystem:
    raw = _require(obj, "lambda", None, "weight system")
    if isinstance(raw, dict):
        try:
            pairs = sorted((int(k), v) for k, v in raw.items())
        except ValueError:
            raise ValidationError("lambda keys must be player indices") from None
        if [k for k, _ in pairs] != list(range(len(pairs))):
            raise ValidationError("lambda must cover players 0..n-1")
        weights = [parse_fraction(v) for _, v in pairs]
    elif isinstance(raw, list):
        weights = [parse_fraction(v) for v in raw]
    else:
        raise ValidationError("lambda must be a list or an object")
    blocks = _require(obj, "blocks", list, "weight system")
    return WeightSystem(tuple(weights), tuple(tuple(b) for b in blocks))


def load_weight_system(path: str) -> WeightSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return weight_system_from_json(json.load(fh))


def table_protocol_from_json(obj) -> TableProtocol:
    """Share-table file: {"players": n, "fallback": "shapley"|null,
    "entries": [{"cost": {...}, "users": [ids], "shares": {"id": "p/q"}}]}.

    Entries are taken as-is (no budget-balance validation) so files can
    describe defective protocols on purpose.
    """
    n = _require(obj, "players", int, "share table")
    fallback_name = obj.get("fallback", "shapley")
    if fallback_name is None:
        fallback: Protocol | None = None
    elif fallback_name == "shapley":
        fallback = ShapleyProtocol()
    else:
        raise ValidationError(f"unknown fallback {fallback_name!r}")
    protocol = TableProtocol(fallback=fallback)
    for entry in _require(obj, "entries", list, "share table"):
        f = cost_from_json(n, _require(entry, "cost", dict, "share entry"))
        users_list = _require(entry, "users", list, "share entry")
        users = 0
        for i in users_list:
            if not isinstance(i, int) or not 0 <= i < n:
                raise ValidationError(f"bad user id {i!r} in share entry")
            users |= 1 << i
        raw_shares = _require(entry, "shares", dict, "share entry")
        shares = {}
        for k, v in raw_shares.items():
            try:
                i = int(k)
            except ValueError:
                raise ValidationError(f"bad player id {k!r} in shares") from None
            shares[i] = parse_fraction(v)
        protocol.set_entry(f, users, shares, validate=False)
    return protocol


def load_table_protocol(path: str) -> TableProtocol:
    with open(path, "r", encoding="utf-8") as fh:
        return table_protocol_from_json(json.load(fh))
