"""Cost-sharing protocols: how a resource's cost is split among its users.

A protocol maps (cost function, user set, player) to the player's share.
Non-users pay 0, and the shares of the members of a user set sum to the
full resource cost (budget balance); ``check_budget_balance`` verifies
both clauses exhaustively.

The Shapley share of player i in user set S is i's marginal cost averaged
over all orderings of S. The production implementation uses the
equivalent subset sum

    share(i, S) = sum over T subseteq S - {i} of
                  |T|! (|S| - |T| - 1)! / |S|!  *  (C(T + i) - C(T))

while ``shapley_share_by_permutations`` keeps the literal ordering average
as an independent cross-check for small sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .core import (
    SetCostFunction,
    ValidationError,
    full_mask,
    iter_submasks,
    mask_members,
    player_mask,
)

ZERO = Fraction(0)


class ProtocolError(ValueError):
    """A protocol cannot price the requested (cost function, user set)."""


class Protocol:
    """Interface: ``share(f, users, i)``, zero whenever i is not a user."""

    name = "abstract"

    def share(self, f: SetCostFunction, users: int, i: int) -> Fraction:
        raise NotImplementedError

    def shares(self, f: SetCostFunction, users: int) -> tuple:
        """Every player's share as a length-n vector (zeros off ``users``)."""
        return tuple(self.share(f, users, i) for i in range(f.n))


def _check_arity(f: SetCostFunction, users: int) -> None:
    if users >> f.n:
        raise ProtocolError(f"user set {users:#b} outside arity {f.n}")


# ---------------------------------------------------------------------------
# Shapley
# ---------------------------------------------------------------------------

class ShapleyProtocol(Protocol):
    """Split each resource's cost by the Shapley value of its user set.

    Shares are memoized per (cost function, user set, player); cost
    functions hash by semantic value, so structurally equal functions on
    different resources reuse the same cache rows.
    """

    name = "shapley"

    def __init__(self):
        self._cache: dict = {}

    def share(self, f: SetCostFunction, users: int, i: int) -> Fraction:
        _check_arity(f, users)
        if not (users >> i) & 1:
            return ZERO
        key = (f, users, i)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if f.anonymous_values is not None:
            # every member pays the same: C(S) / |S|
            k = users.bit_count()
            val = f.anonymous_values[k] / k
        else:
            val = _shapley_subset_sum(f, users, i)
        self._cache[key] = val
        return val


def _shapley_subset_sum(f: SetCostFunction, users: int, i: int) -> Fraction:
    s = users.bit_count()
    fact = [factorial(k) for k in range(s)]
    denom = factorial(s)
    bit = 1 << i
    rest = users & ~bit
    total = ZERO
    for t in iter_submasks(rest):
        tsize = t.bit_count()
        weight = Fraction(fact[tsize] * fact[s - tsize - 1], denom)
        total += weight * (f.value(t | bit) - f.value(t))
    return total


def shapley_share(f: SetCostFunction, users: int, i: int) -> Fraction:
    """One-off Shapley share without a protocol instance."""
    return ShapleyProtocol().share(f, users, i)


def shapley_shares(f: SetCostFunction, users: int) -> tuple:
    return ShapleyProtocol().shares(f, users)


def shapley_share_by_permutations(f: SetCostFunction, users: int, i: int) -> Fraction:
    """Literal ordering average; exponential, capped at 8 users."""
    _check_arity(f, users)
    if not (users >> i) & 1:
        return ZERO
    members = mask_members(users)
    if len(members) > 8:
        raise ProtocolError("permutation evaluation capped at 8 users")
    total = ZERO
    count = 0
    for order in itertools.permutations(members):
        seen = 0
        for p in order:
            if p == i:
                total += f.value(seen | (1 << i)) - f.value(seen)
                break
            seen |= 1 << p
        count += 1
    return total / count


def shapley_shares_by_permutations(f: SetCostFunction, users: int) -> tuple:
    return tuple(shapley_share_by_permutations(f, users, i) for i in range(f.n))


# ---------------------------------------------------------------------------
# Generalized weighted Shapley
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSystem:
    """Positive per-player weights plus an ordered partition of the players.

    ``blocks[0]`` has the highest priority: within any user set, the cost
    dividends of a coalition T go to the members of T drawn from the
    earliest block that T touches, in proportion to their weights.
    """

    weights: tuple
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        n = len(self.weights)
        if any(w <= 0 for w in self.weights):
            raise ValidationError("weights must be positive")
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValidationError("empty block in ordered partition")
            for p in block:
                if not 0 <= p < n:
                    raise ValidationError(f"player {p} out of range in partition")
                if p in seen:
                    raise ValidationError(f"player {p} appears twice in partition")
                seen.add(p)
        if len(seen) != n:
            raise ValidationError("ordered partition must cover every player")

    @property
    def n(self) -> int:
        return len(self.weights)

    @classmethod
    def plain(cls, n: int) -> "WeightSystem":
        """Unit weights, single block: reduces to the Shapley value."""
        return cls((Fraction(1),) * n, (tuple(range(n)),))

    def block_masks(self) -> tuple[int, ...]:
        return tuple(player_mask(b) for b in self.blocks)

    def block_of(self, i: int) -> int:
        for k, block in enumerate(self.blocks):
            if i in block:
                return k
        raise ValidationError(f"player {i} not in any block")


class GeneralizedWeightedShapley(Protocol):
    """Weighted Shapley value driven by a weight system.

    The share of i in user set S sums, over coalitions T subseteq S whose
    top-priority part contains i, dividend(T) * lambda_i / (total lambda
    of that part). Dividends are the alternating-sign (Moebius) transform
    of the cost function, computed once per function by an in-place
    lattice pass and cached; the T = empty term is skipped since its
    dividend is C(empty) = 0.
    """

    name = "gws"

    def __init__(self, system: WeightSystem):
        self.system = system
        self._dividends: dict = {}
        self._cache: dict = {}

    def _dividend_table(self, f: SetCostFunction) -> list:
        tab = self._dividends.get(f)
        if tab is None:
            tab = [f.value(m) for m in range(1 << f.n)]
            # tab[m] becomes sum over U subseteq m of (-1)^(|m|-|U|) C(U)
            for b in range(f.n):
                bit = 1 << b
                for m in range(1 << f.n):
                    if m & bit:
                        tab[m] = tab[m] - tab[m ^ bit]
            self._dividends[f] = tab
        return tab

    def share(self, f: SetCostFunction, users: int, i: int) -> Fraction:
        _check_arity(f, users)
        if len(self.system.weights) != f.n:
            raise ProtocolError(
                f"weight system covers {self.system.n} players, cost function {f.n}")
        if not (users >> i) & 1:
            return ZERO
        key = (f, users, i)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        dividends = self._dividend_table(f)
        weights = self.system.weights
        block_masks = self.system.block_masks()
        ibit = 1 << i
        total = ZERO
        for t in iter_submasks(users):
            if t == 0:
                continue
            d = dividends[t]
            if d == 0:
                continue
            for bm in block_masks:
                top = t & bm
                if top:
                    break
            if not top & ibit:
                continue
            wsum = sum((weights[j] for j in mask_members(top)), ZERO)
            total += d * weights[i] / wsum
        self._cache[key] = total
        return total


def gws_share(f: SetCostFunction, users: int, i: int, w: WeightSystem) -> Fraction:
    """One-off generalized weighted Shapley share."""
    return GeneralizedWeightedShapley(w).share(f, users, i)


# ---------------------------------------------------------------------------
# Explicit share tables
# ---------------------------------------------------------------------------

@dataclass
class TableProtocol(Protocol):
    """Shares looked up from explicit (cost function, user set) entries.

    Missing entries defer to ``fallback`` (default Shapley), so a table
    only needs to pin down the user sets it cares about. ``set_entry``
    validates budget balance unless told not to; unvalidated entries may
    deliberately break it (or pay absent players) to model defective
    protocols in negative tests.
    """

    entries: dict = field(default_factory=dict)
    fallback: Protocol | None = field(default_factory=ShapleyProtocol)
    name: str = "table"

    def set_entry(self, f: SetCostFunction, users: int, shares: dict[int, Fraction],
                  *, validate: bool = True) -> None:
        shares = {i: Fraction(v) for i, v in shares.items()}
        if validate:
            if player_mask(shares) != users:
                raise ValidationError(
                    f"share entry keys {sorted(shares)} do not match user set {users:#b}")
            if sum(shares.values(), ZERO) != f.value(users):
                raise ValidationError(
                    f"shares for {users:#b} sum to {sum(shares.values())}, "
                    f"cost is {f.value(users)}")
        self.entries[(f, users)] = shares

    def share(self, f: SetCostFunction, users: int, i: int) -> Fraction:
        _check_arity(f, users)
        entry = self.entries.get((f, users))
        if entry is not None:
            return entry.get(i, ZERO)
        if not (users >> i) & 1:
            return ZERO
        if self.fallback is None:
            raise ProtocolError(f"no share entry for user set {users:#b}")
        return self.fallback.share(f, users, i)


# ---------------------------------------------------------------------------
# Protocol-level checks
# ---------------------------------------------------------------------------

def check_budget_balance(protocol: Protocol, f: SetCostFunction) -> bool:
    """True iff for every user set S the members' shares sum to C(S) and
    every non-member pays exactly 0."""
    for users in range(1 << f.n):
        vec = protocol.shares(f, users)
        if sum(vec, ZERO) != f.value(users):
            return False
        for i in range(f.n):
            if not (users >> i) & 1 and vec[i] != 0:
                return False
    return True


def find_share_monotonicity_violation(protocol: Protocol, f: SetCostFunction,
                                      within: int | None = None):
    """Search for i in S subset of S' with share(i, S) < share(i, S').

    ``within`` restricts both sets to subsets of the given mask. Returns
    (i, smaller set, larger set) for the first violation, or None. For
    constant cost functions every budget-balanced uniform protocol
    satisfies this; assembled constructions that lean on it assert it
    here instead of assuming it.
    """
    scope = full_mask(f.n) if within is None else within
    for users in iter_submasks(scope):
        if users == 0:
            continue
        for extra in iter_submasks(scope & ~users):
            if extra == 0:
                continue
            bigger = users | extra
            for i in mask_members(users):
                if protocol.share(f, users, i) < protocol.share(f, bigger, i):
                    return (i, users, bigger)
    return None


def private_cost(model, protocol: Protocol, profile, i: int) -> Fraction:
    """Player i's total payment: the sum of i's shares over the resources
    in i's chosen strategy."""
    usage = model.usage_masks(profile)
    bit = 1 << i
    total = ZERO
    for f, users in zip(model.cost_fns, usage):
        if users & bit:
            total += protocol.share(f, users, i)
    return total


def private_costs(model, protocol: Protocol, profile) -> tuple:
    """All players' payments; sums to the social cost for budget-balanced
    protocols."""
    usage = model.usage_masks(profile)
    out = []
    for i in range(model.n):
        bit = 1 << i
        total = ZERO
        for f, users in zip(model.cost_fns, usage):
            if users & bit:
                total += protocol.share(f, users, i)
        out.append(total)
    return tuple(out)
