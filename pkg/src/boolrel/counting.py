"""Exact probability computation under the uniform distribution.

All probabilities arising from uniform Boolean counting are dyadic rationals
j / 2^f; they are computed and compared exactly, never in floating point.
Tractability on large formulas comes from three exact devices layered over
bit-parallel enumeration:

* independent components: children of an AND/OR/XOR with pairwise-disjoint
  free variables combine by P(A and B) = P(A)P(B),
  P(A or B) = P(A) + P(B) - P(A)P(B), P(A xor B) = P(A) + P(B) - 2P(A)P(B);

* plug splits: a subtree whose free variables occur nowhere else can be
  replaced by a constant and weighted by its own probability
  (P(F) = P(T)P(F[T:=1]) + (1-P(T))P(F[T:=0]));

* XOR freshening: an XOR chain of distinct variables that each occur exactly
  once in the whole formula is, in distribution, a single fresh fair bit, so
  the chain collapses to one representative variable.  This rewrite preserves
  joint distributions but not the Boolean function itself, and therefore
  never leaves this module.

Conditioning on y_S = x_S is handled without rebuilding ASTs: fixed variables
are carried beside the nodes and resolved during enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Iterable, Optional

from .formula import (
    And,
    Assignment,
    Const,
    DEFAULT_ENUM_CAP,
    EnumerationCapExceeded,
    Formula,
    Node,
    Not,
    Or,
    SubsetMask,
    Var,
    Xor,
    and_,
    const,
    evaluate,
    not_,
    or_,
    support,
    xor,
)

__all__ = [
    "DyadicProb",
    "Decomposition",
    "ConditionalEvaluator",
    "satisfaction_probability",
    "conditional_agreement_probability",
    "conditional_satisfaction_probability",
    "decompose_independent",
]

# Free-variable blocks up to this size are enumerated directly; larger ones
# go through the decomposition devices first.
_LEAF_BITS = 14


# --------------------------------------------------------------------------
# Dyadic probabilities.


@total_ordering
@dataclass(frozen=True)
class DyadicProb:
    """Exact probability numerator / 2^exponent, normalised, in [0, 1]."""

    numerator: int
    exponent: int

    def __post_init__(self):
        num, exp = self.numerator, self.exponent
        if num < 0 or exp < 0 or num > (1 << exp):
            raise ValueError(f"not a probability: {num}/2^{exp}")
        while num and num % 2 == 0 and exp > 0:
            num //= 2
            exp -= 1
        if num == 0:
            exp = 0
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", exp)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "DyadicProb":
        den = value.denominator
        exp = den.bit_length() - 1
        if 1 << exp != den:
            raise ValueError(f"{value} is not dyadic")
        return cls(value.numerator, exp)

    @classmethod
    def from_count(cls, count: int, nvars: int) -> "DyadicProb":
        return cls(count, nvars)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def complement(self) -> "DyadicProb":
        return DyadicProb((1 << self.exponent) - self.numerator, self.exponent)

    def exact_str(self) -> str:
        return f"{self.numerator}/2^{self.exponent}"

    def __float__(self) -> float:
        return self.numerator / (1 << self.exponent)

    def __str__(self) -> str:
        return self.exact_str()

    def _coerce(self, other) -> Optional[Fraction]:
        if isinstance(other, DyadicProb):
            return other.as_fraction()
        if isinstance(other, Rational):
            return Fraction(other)
        return None

    def __eq__(self, other) -> bool:
        val = self._coerce(other)
        if val is None:
            return NotImplemented
        return self.as_fraction() == val

    def __lt__(self, other) -> bool:
        val = self._coerce(other)
        if val is None:
            return NotImplemented
        return self.as_fraction() < val

    def __hash__(self):
        return hash(self.as_fraction())


DyadicProb.ZERO = DyadicProb(0, 0)
DyadicProb.ONE = DyadicProb(1, 0)


# --------------------------------------------------------------------------
# Occurrence counts (tree multiplicities) with a global per-node cache.

_occ_cache: dict[int, dict[int, int]] = {}


def _occurrences(node: Node) -> dict[int, int]:
    got = _occ_cache.get(id(node))
    if got is not None:
        return got
    if isinstance(node, Var):
        out = {node.index: 1}
    elif isinstance(node, Const):
        out = {}
    elif isinstance(node, Not):
        out = _occurrences(node.child)
    else:
        kids = (node.left, node.right) if isinstance(node, Xor) else node.children
        out = {}
        for c in kids:
            for v, n in _occurrences(c).items():
                out[v] = out.get(v, 0) + n
    _occ_cache[id(node)] = out
    return out


# --------------------------------------------------------------------------
# XOR freshening.  Collapses every XOR chain whose leaves are distinct
# variables occurring exactly once in the whole formula into its
# smallest-index leaf, and records the group of collapsed variables so that
# later conditioning can be translated (fix the representative only once all
# group members are fixed; a partially fixed group stays a fair bit).


def _xor_leaves(node: Node) -> list[Node]:
    if isinstance(node, Xor):
        return _xor_leaves(node.left) + _xor_leaves(node.right)
    return [node]


def _freshen_once(root: Node, groups: dict[int, frozenset[int]]):
    occ = _occurrences(root)
    changed = False
    memo: dict[int, Node] = {}

    def walk(n: Node) -> Node:
        nonlocal changed
        got = memo.get(id(n))
        if got is not None:
            return got
        if isinstance(n, (Var, Const)):
            out = n
        elif isinstance(n, Not):
            child = walk(n.child)
            out = n if child is n.child else not_(child)
        elif isinstance(n, Xor):
            left = walk(n.left)
            right = walk(n.right)
            rebuilt = n if (left is n.left and right is n.right) else xor(left, right)
            out = rebuilt
            if isinstance(rebuilt, Xor):
                leaves = _xor_leaves(rebuilt)
                idxs = [l.index for l in leaves if isinstance(l, Var)]
                if (
                    len(idxs) == len(leaves)
                    and len(set(idxs)) == len(idxs)
                    and all(occ.get(i, 0) == 1 for i in idxs)
                ):
                    rep = min(idxs)
                    merged: set[int] = set()
                    for i in idxs:
                        merged |= groups.pop(i, frozenset((i,)))
                    groups[rep] = frozenset(merged)
                    out = next(l for l in leaves if l.index == rep)
                    changed = True
        elif isinstance(n, And):
            kids = [walk(c) for c in n.children]
            out = n if all(a is b for a, b in zip(kids, n.children)) else and_(*kids)
        else:
            kids = [walk(c) for c in n.children]
            out = n if all(a is b for a, b in zip(kids, n.children)) else or_(*kids)
        memo[id(n)] = out
        return out

    return walk(root), changed


def _freshen(root: Node):
    """Fixpoint of the XOR-chain collapse; returns (root', groups)."""
    groups: dict[int, frozenset[int]] = {}
    while True:
        root, changed = _freshen_once(root, groups)
        if not changed:
            return root, groups


# --------------------------------------------------------------------------
# Bit-parallel enumeration over the free variables of a node.


def _var_block(position: int, size: int) -> int:
    half = 1 << position
    block = ((1 << half) - 1) << half
    width = half << 1
    while width < size:
        block |= block << width
        width <<= 1
    return block & ((1 << size) - 1)


def _masked_count(node: Node, free: list[int], fixed: dict[int, int]) -> int:
    size = 1 << len(free)
    full = (1 << size) - 1
    position = {v: i for i, v in enumerate(free)}
    memo: dict[int, int] = {}

    def walk(n: Node) -> int:
        got = memo.get(id(n))
        if got is not None:
            return got
        if isinstance(n, Var):
            if n.index in position:
                out = _var_block(position[n.index], size)
            else:
                out = full if fixed[n.index] else 0
        elif isinstance(n, Const):
            out = full if n.value else 0
        elif isinstance(n, Not):
            out = walk(n.child) ^ full
        elif isinstance(n, And):
            out = full
            for c in n.children:
                out &= walk(c)
                if not out:
                    break
        elif isinstance(n, Or):
            out = 0
            for c in n.children:
                out |= walk(c)
                if out == full:
                    break
        else:
            out = walk(n.left) ^ walk(n.right)
        memo[id(n)] = out
        return out

    return walk(node).bit_count()


def _evaluate_under(node: Node, fixed: dict[int, int]) -> int:
    memo: dict[int, int] = {}

    def walk(n: Node) -> int:
        got = memo.get(id(n))
        if got is not None:
            return got
        if isinstance(n, Var):
            out = fixed[n.index]
        elif isinstance(n, Const):
            out = n.value
        elif isinstance(n, Not):
            out = 1 - walk(n.child)
        elif isinstance(n, And):
            out = 1
            for c in n.children:
                if walk(c) == 0:
                    out = 0
                    break
        elif isinstance(n, Or):
            out = 0
            for c in n.children:
                if walk(c) == 1:
                    out = 1
                    break
        else:
            out = walk(n.left) ^ walk(n.right)
        memo[id(n)] = out
        return out

    return walk(node)


def _replace_subtree(root: Node, target: Node, value: int) -> Node:
    memo: dict[int, Node] = {}

    def walk(n: Node) -> Node:
        if n is target:
            return const(value)
        got = memo.get(id(n))
        if got is not None:
            return got
        if isinstance(n, (Var, Const)):
            out = n
        elif isinstance(n, Not):
            out = not_(walk(n.child))
        elif isinstance(n, And):
            out = and_(*(walk(c) for c in n.children))
        elif isinstance(n, Or):
            out = or_(*(walk(c) for c in n.children))
        else:
            out = xor(walk(n.left), walk(n.right))
        memo[id(n)] = out
        return out

    return walk(root)


_replace_cache: dict[tuple[int, int, int], Node] = {}


def _replace_cached(root: Node, target: Node, value: int) -> Node:
    key = (id(root), id(target), value)
    got = _replace_cache.get(key)
    if got is None:
        got = _replace_subtree(root, target, value)
        _replace_cache[key] = got
    return got


# --------------------------------------------------------------------------
# The conditional probability engine.


def _combine(law: str, probs: Iterable[Fraction]) -> Fraction:
    it = iter(probs)
    acc = next(it)
    for p in it:
        if law == "and":
            acc = acc * p
        elif law == "or":
            acc = acc + p - acc * p
        else:
            acc = acc + p - 2 * acc * p
    return acc


def _component_groups(node: Node, fixed: dict[int, int]) -> list[Node]:
    """Children of an n-ary operator clustered by shared free variables."""
    kids = (node.left, node.right) if isinstance(node, Xor) else list(node.children)
    free_supports = [frozenset(v for v in support(c) if v not in fixed) for c in kids]
    parent = list(range(len(kids)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    seen: dict[int, int] = {}
    for i, fs in enumerate(free_supports):
        for v in fs:
            if v in seen:
                ri, rj = find(i), find(seen[v])
                if ri != rj:
                    parent[ri] = rj
            else:
                seen[v] = i
    clusters: dict[int, list[Node]] = {}
    for i, child in enumerate(kids):
        clusters.setdefault(find(i), []).append(child)
    if len(clusters) <= 1:
        return [node]
    rebuild = and_ if isinstance(node, And) else or_ if isinstance(node, Or) else None
    out = []
    for members in clusters.values():
        if len(members) == 1:
            out.append(members[0])
        else:
            assert rebuild is not None  # Xor is binary: its clusters are singletons
            out.append(rebuild(*members))
    return out


class ConditionalEvaluator:
    """Exact conditional probabilities for one formula.

    Precomputes the XOR freshening of the formula once; queries then condition
    on variable fixes without rebuilding the AST.  Safe to reuse across many
    queries; results are memoised per (subtree, relevant fixes).
    """

    def __init__(self, f: Formula, enum_cap: int = DEFAULT_ENUM_CAP):
        self.formula = f
        self.enum_cap = enum_cap
        self.root, self._groups = _freshen(f.root)
        self._member_to_rep: dict[int, int] = {}
        for rep, members in self._groups.items():
            for m in members:
                self._member_to_rep[m] = rep
        self._memo: dict = {}

    # -- query surface ----------------------------------------------------

    def satisfaction(self, fixed: Optional[dict[int, int]] = None) -> Fraction:
        """P(f(y) = 1 | y_v = fixed[v] for all fixed v)."""
        translated = self._translate(fixed or {})
        return self._prob(self.root, translated)

    def agreement(self, x: Assignment, s_indices: Iterable[int]) -> Fraction:
        """P(f(y) = f(x) | y_S = x_S)."""
        target = evaluate(self.formula, x)
        fixed = {i: x.bit(i) for i in s_indices}
        p1 = self.satisfaction(fixed)
        return p1 if target == 1 else 1 - p1

    # -- internals ----------------------------------------------------------

    def _translate(self, fixed: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        partial: dict[int, dict[int, int]] = {}
        for v, b in fixed.items():
            rep = self._member_to_rep.get(v)
            if rep is None:
                out[v] = b
            else:
                partial.setdefault(rep, {})[v] = b
        for rep, fixes in partial.items():
            members = self._groups[rep]
            if len(fixes) == len(members):
                acc = 0
                for b in fixes.values():
                    acc ^= b
                out[rep] = acc
            # Partially fixed groups stay fair independent bits: no entry.
        return out

    def _prob(self, node: Node, fixed: dict[int, int]) -> Fraction:
        if isinstance(node, Const):
            return Fraction(node.value)
        supp = support(node)
        relevant = tuple(sorted((v, fixed[v]) for v in fixed if v in supp))
        free_count = len(supp) - len(relevant)
        if free_count == 0:
            return Fraction(_evaluate_under(node, fixed))
        key = (id(node), relevant)
        got = self._memo.get(key)
        if got is not None:
            return got
        result = self._prob_uncached(node, fixed, supp, free_count)
        self._memo[key] = result
        return result

    def _prob_uncached(
        self, node: Node, fixed: dict[int, int], supp: frozenset, free_count: int
    ) -> Fraction:
        if free_count <= _LEAF_BITS:
            return self._enumerate(node, supp, fixed)

        # Independent components of a top-level n-ary operator.
        if isinstance(node, (And, Or, Xor)):
            groups = _component_groups(node, fixed)
            if len(groups) > 1:
                law = (
                    "and"
                    if isinstance(node, And)
                    else "or" if isinstance(node, Or) else "xor"
                )
                return _combine(law, (self._prob(g, fixed) for g in groups))

        # Plug split on a variable-closed subtree.
        plug = self._find_plug(node, fixed)
        if plug is not None:
            p_t = self._prob(plug, fixed)
            high = self._prob(_replace_cached(node, plug, 1), fixed)
            low = self._prob(_replace_cached(node, plug, 0), fixed)
            return p_t * high + (1 - p_t) * low

        if free_count <= self.enum_cap:
            return self._enumerate(node, supp, fixed)
        raise EnumerationCapExceeded(free_count, self.enum_cap, "model counting")

    def _enumerate(self, node: Node, supp: frozenset, fixed: dict[int, int]) -> Fraction:
        free = sorted(v for v in supp if v not in fixed)
        count = _masked_count(node, free, fixed)
        return Fraction(count, 1 << len(free))

    def _find_plug(self, node: Node, fixed: dict[int, int]) -> Optional[Node]:
        """Largest proper subtree whose free variables are private to it."""
        occ_root = _occurrences(node)
        free_supp = frozenset(v for v in support(node) if v not in fixed)
        best: Optional[Node] = None
        best_size = 0
        stack = [(node, True)]
        seen: set[int] = set()
        while stack:
            current, is_root = stack.pop()
            if id(current) in seen:
                continue
            seen.add(id(current))
            if isinstance(current, (Var, Const)):
                continue
            if isinstance(current, Not):
                children = (current.child,)
            elif isinstance(current, Xor):
                children = (current.left, current.right)
            else:
                children = current.children
            for c in children:
                stack.append((c, False))
            if is_root:
                continue
            free_t = [v for v in support(current) if v not in fixed]
            if not free_t or len(free_t) >= len(free_supp):
                continue
            occ_t = _occurrences(current)
            if all(occ_root[v] == occ_t[v] for v in free_t):
                if len(free_t) > best_size:
                    best = current
                    best_size = len(free_t)
        return best


# --------------------------------------------------------------------------
# Public operations.


def satisfaction_probability(
    f: Formula, enum_cap: int = DEFAULT_ENUM_CAP
) -> DyadicProb:
    """Exact P(f) = |{y : f(y)=1}| / 2^d."""
    return DyadicProb.from_fraction(ConditionalEvaluator(f, enum_cap).satisfaction())


def conditional_satisfaction_probability(
    f: Formula,
    x: Assignment,
    s: SubsetMask | Iterable[int],
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> DyadicProb:
    """Exact P(f(y) = 1 | y_S = x_S)."""
    indices = s.indices() if isinstance(s, SubsetMask) else tuple(s)
    _check_arities(f, x, indices)
    ev = ConditionalEvaluator(f, enum_cap)
    return DyadicProb.from_fraction(ev.satisfaction({i: x.bit(i) for i in indices}))


def conditional_agreement_probability(
    f: Formula,
    x: Assignment,
    s: SubsetMask | Iterable[int],
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> DyadicProb:
    """Exact P(f(y) = f(x) | y_S = x_S), enumerating the free variables."""
    indices = s.indices() if isinstance(s, SubsetMask) else tuple(s)
    _check_arities(f, x, indices)
    ev = ConditionalEvaluator(f, enum_cap)
    return DyadicProb.from_fraction(ev.agreement(x, indices))


def _check_arities(f: Formula, x: Assignment, indices: tuple[int, ...]):
    if x.length != f.arity:
        raise ValueError(
            f"assignment length {x.length} does not match arity {f.arity}"
        )
    for i in indices:
        if not 1 <= i <= f.arity:
            raise ValueError(f"subset index {i} out of range 1..{f.arity}")


@dataclass(frozen=True)
class Decomposition:
    """Top-level split into variable-disjoint components.

    Component probabilities combine under `law`:
    and: p*q;  or: p + q - p*q;  xor: p + q - 2*p*q;  atom: single component.
    """

    law: str
    components: tuple[tuple[Formula, frozenset[int]], ...]

    def combined_probability(self, enum_cap: int = DEFAULT_ENUM_CAP) -> DyadicProb:
        probs = [
            satisfaction_probability(comp, enum_cap).as_fraction()
            for comp, _ in self.components
        ]
        return DyadicProb.from_fraction(_combine(self.law, probs))


def decompose_independent(f: Formula) -> Decomposition:
    """Split a top-level AND/OR/XOR into variable-disjoint components."""
    node = f.root
    if isinstance(node, (And, Or, Xor)):
        groups = _component_groups(node, {})
        if len(groups) > 1:
            law = (
                "and"
                if isinstance(node, And)
                else "or" if isinstance(node, Or) else "xor"
            )
            comps = tuple(
                (Formula(g, f.arity), support(g)) for g in groups
            )
            return Decomposition(law, comps)
    return Decomposition("atom", ((f, support(node)),))
