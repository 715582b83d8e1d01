"""Relevance decision problems, exact and sampled.

Exact operations compare dyadic probabilities against rational thresholds
with integer arithmetic.  Subset searches enumerate candidates in
size-then-lexicographic order and return the first witness; branches are
skipped only when a sound bound (conditioning on one more coordinate at most
doubles a conditional probability) proves no witness can live below them, so
pruning never changes the returned witness.

Sampled operations draw n = ceil(2 ln 3 / gamma^2) assignments per run from a
64-bit-seeded Mersenne Twister (``random.Random``).  Each sample consumes one
word of fresh bits, one per free variable; the word's lowest bit feeds the
smallest free index.  Sub-seeds for amplification rounds and per-candidate
runs are derived by SHA-256 over "seed:tag" strings, so every transcript
replays byte-identically from the run seed.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .counting import ConditionalEvaluator, DyadicProb
from .formula import (
    Assignment,
    DEFAULT_ENUM_CAP,
    EnumerationCapExceeded,
    Formula,
    SubsetMask,
    evaluate,
    parse,
)

__all__ = [
    "Verdict",
    "RelevanceQuery",
    "RelevanceReport",
    "SampleOutcome",
    "AmplifiedOutcome",
    "SearchCapExceeded",
    "DEFAULT_SEARCH_CAP",
    "sample_count",
    "is_delta_relevant",
    "decide_relevant_input",
    "solve_min_relevant_input",
    "sample_relevance",
    "amplified_sample_relevance",
    "decide_gapped",
    "greedy_min_relevant",
    "solve_emajsat",
    "solve_ip1",
    "solve_ip2",
    "solve_ip3",
]

DEFAULT_SEARCH_CAP = 20


class SearchCapExceeded(EnumerationCapExceeded):
    """Subset search refused: the variable count exceeds the cap."""


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class RelevanceQuery:
    """A parsed problem instance for the relevance operations."""

    f: Formula
    x: Assignment
    k: int
    delta: Fraction
    gamma: Fraction = Fraction(0)
    s: Optional[SubsetMask] = None
    m: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.x.length != self.f.arity:
            raise ValueError("assignment length does not match formula arity")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not 0 <= self.gamma < self.delta:
            raise ValueError("gamma must lie in [0, delta)")
        if not 0 <= self.k <= self.f.arity:
            raise ValueError("k must lie in 0..d")
        if self.m is not None and not self.k <= self.m <= self.f.arity:
            raise ValueError("m must lie in k..d")
        if self.s is not None and self.s.length != self.f.arity:
            raise ValueError("subset mask length does not match formula arity")

    @classmethod
    def from_json_dict(cls, data: dict) -> "RelevanceQuery":
        f = parse(data["formula"])
        x = Assignment.from_string(data["x"])
        if x.length > f.arity:
            f = Formula(f.root, x.length)
        s = None
        if data.get("set") is not None:
            s = SubsetMask.from_indices(
                (int(i) for i in data["set"]), f.arity
            )
        return cls(
            f=f,
            x=x,
            k=int(data["k"]),
            delta=_rational(data["delta"]),
            gamma=_rational(data.get("gamma", 0)),
            s=s,
            m=int(data["m"]) if data.get("m") is not None else None,
            seed=int(data["seed"]) if data.get("seed") is not None else None,
        )

    def to_json_dict(self) -> dict:
        out = {
            "formula": str(self.f),
            "x": str(self.x),
            "k": self.k,
            "delta": str(self.delta),
            "gamma": str(self.gamma),
        }
        if self.s is not None:
            out["set"] = list(self.s.indices())
        if self.m is not None:
            out["m"] = self.m
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _rational(value) -> Fraction:
    """Exact rational from "p/q", a finite decimal string, or an int."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # JSON numbers arrive as floats; convert through the shortest decimal
        # representation so "0.95" means exactly 19/20.
        return Fraction(str(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class RelevanceReport:
    """Outcome of a decision operation.

    Exact runs carry the witness's exact probability; sampled runs carry the
    point estimate and sample count instead.  promise_dependent marks
    verdicts that are only contracted under the gap promise.
    """

    verdict: Verdict
    witness: Optional[SubsetMask]
    method: str
    probability: Optional[DyadicProb] = None
    estimate: Optional[float] = None
    samples: Optional[int] = None
    promise_dependent: bool = False

    def __post_init__(self):
        if self.verdict is Verdict.YES and self.witness is None:
            raise ValueError("a Yes verdict requires a witness")


# --------------------------------------------------------------------------
# Exact operations.


def is_delta_relevant(
    f: Formula,
    x: Assignment,
    s: SubsetMask | Iterable[int],
    delta: Fraction,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> tuple[bool, DyadicProb]:
    """Exact test of P(f(y) = f(x) | y_S = x_S) >= delta."""
    indices = s.indices() if isinstance(s, SubsetMask) else tuple(s)
    ev = ConditionalEvaluator(f, enum_cap)
    prob = DyadicProb.from_fraction(ev.agreement(x, indices))
    return prob >= Fraction(delta), prob


def _first_witness(
    universe: tuple[int, ...],
    max_size: int,
    prob_of: Callable[[tuple[int, ...]], Fraction],
    threshold: Fraction,
    strict: bool,
) -> Optional[tuple[tuple[int, ...], Fraction]]:
    """First subset (size-major, then lexicographic) meeting the threshold.

    Skips a prefix only when doubling its probability once per remaining pick
    cannot reach the threshold; such prefixes provably contain no witness, so
    the returned witness is the true first one.
    """
    memo: dict[tuple[int, ...], Fraction] = {}

    def p_of(prefix: tuple[int, ...]) -> Fraction:
        got = memo.get(prefix)
        if got is None:
            got = prob_of(prefix)
            memo[prefix] = got
        return got

    def accepts(p: Fraction) -> bool:
        return p > threshold if strict else p >= threshold

    def dfs(prefix: tuple[int, ...], start: int, size: int):
        p = p_of(prefix)
        if len(prefix) == size:
            return (prefix, p) if accepts(p) else None
        bound = p * (1 << (size - len(prefix)))
        if (bound <= threshold) if strict else (bound < threshold):
            return None
        remaining = size - len(prefix)
        for j in range(start, len(universe) - remaining + 1):
            hit = dfs(prefix + (universe[j],), j + 1, size)
            if hit is not None:
                return hit
        return None

    for size in range(0, max_size + 1):
        hit = dfs((), 0, size)
        if hit is not None:
            return hit
    return None


def _agreement_prob_fn(
    f: Formula, x: Assignment, enum_cap: int
) -> Callable[[tuple[int, ...]], Fraction]:
    ev = ConditionalEvaluator(f, enum_cap)
    target = evaluate(f, x)

    def prob(indices: tuple[int, ...]) -> Fraction:
        p1 = ev.satisfaction({i: x.bit(i) for i in indices})
        return p1 if target == 1 else 1 - p1

    return prob


def _check_search_cap(d: int, search_cap: int):
    if d > search_cap:
        raise SearchCapExceeded(d, search_cap, "subset search")


def decide_relevant_input(
    f: Formula,
    x: Assignment,
    k: int,
    delta: Fraction,
    search_cap: int = DEFAULT_SEARCH_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> RelevanceReport:
    """Is there a delta-relevant set of size <= k?  Exact subset search.

    Subsets are tried in size-then-lexicographic order and the first witness
    is returned, so reports are reproducible.
    """
    delta = Fraction(delta)
    if not 1 <= k <= f.arity:
        raise ValueError(f"k must lie in 1..{f.arity}, got {k}")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    _check_search_cap(f.arity, search_cap)
    prob = _agreement_prob_fn(f, x, enum_cap)
    hit = _first_witness(tuple(range(1, f.arity + 1)), k, prob, delta, strict=False)
    if hit is None:
        return RelevanceReport(Verdict.NO, None, "exact-search")
    witness, p = hit
    return RelevanceReport(
        Verdict.YES,
        SubsetMask.from_indices(witness, f.arity),
        "exact-search",
        probability=DyadicProb.from_fraction(p),
    )


def solve_min_relevant_input(
    f: Formula,
    x: Assignment,
    delta: Fraction,
    search_cap: int = DEFAULT_SEARCH_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> tuple[int, SubsetMask]:
    """Smallest k admitting a delta-relevant set; k = 0 when the empty set
    already meets delta."""
    delta = Fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    _check_search_cap(f.arity, search_cap)
    prob = _agreement_prob_fn(f, x, enum_cap)
    hit = _first_witness(
        tuple(range(1, f.arity + 1)), f.arity, prob, delta, strict=False
    )
    assert hit is not None  # the full set is always 1-relevant
    witness, _ = hit
    return len(witness), SubsetMask.from_indices(witness, f.arity)


# --------------------------------------------------------------------------
# Sampled operations.


def sample_count(gamma: Fraction) -> int:
    """n = ceil(2 ln 3 / gamma^2)."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive for sampling")
    return math.ceil(2.0 * math.log(3.0) / float(gamma * gamma))


def _subseed(seed: int, tag: str) -> int:
    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class SampleOutcome:
    verdict: Verdict
    estimate: float
    successes: int
    samples: int


@dataclass(frozen=True)
class AmplifiedOutcome:
    verdict: Verdict
    yes_rounds: int
    rounds: int
    samples_per_round: int


def _draw_successes(
    f: Formula,
    x: Assignment,
    free: tuple[int, ...],
    n: int,
    rng: random.Random,
    target: int,
) -> int:
    d = x.length
    base = x.bits
    masks = []
    for i in free:
        base &= ~(1 << (i - 1))
        masks.append(1 << (i - 1))
    width = len(free)
    successes = 0
    for _ in range(n):
        word = rng.getrandbits(width) if width else 0
        bits = base
        for mask in masks:
            if word & 1:
                bits |= mask
            word >>= 1
        if evaluate(f, Assignment(bits, d)) == target:
            successes += 1
    return successes


def sample_relevance(
    f: Formula,
    x: Assignment,
    s: SubsetMask | Iterable[int],
    delta: Fraction,
    gamma: Fraction,
    seed: int,
) -> SampleOutcome:
    """Monte-Carlo relevance check with two-sided error at most 1/3.

    Draws n = ceil(2 ln 3 / gamma^2) uniform assignments to the complement of
    S, estimates the agreement frequency xi, and answers No exactly when
    xi < delta - gamma/2 (ties answer Yes).  The threshold comparison is done
    in exact rational arithmetic on the success count.
    """
    delta, gamma = Fraction(delta), Fraction(gamma)
    if gamma <= 0:
        raise ValueError("ungapped sampling is unsound: gamma must be positive")
    if not 0 < delta <= 1 or gamma >= delta:
        raise ValueError("need 0 < delta <= 1 and 0 < gamma < delta")
    indices = set(s.indices() if isinstance(s, SubsetMask) else tuple(s))
    free = tuple(i for i in range(1, f.arity + 1) if i not in indices)
    n = sample_count(gamma)
    target = evaluate(f, x)
    rng = random.Random(seed)
    successes = _draw_successes(f, x, free, n, rng, target)
    accept = Fraction(successes, n) >= delta - gamma / 2
    return SampleOutcome(
        verdict=Verdict.YES if accept else Verdict.NO,
        estimate=successes / n,
        successes=successes,
        samples=n,
    )


def amplified_sample_relevance(
    f: Formula,
    x: Assignment,
    s: SubsetMask | Iterable[int],
    delta: Fraction,
    gamma: Fraction,
    seed: int,
    rounds: int,
) -> AmplifiedOutcome:
    """Majority vote over independent sampling rounds with derived sub-seeds."""
    if rounds < 1 or rounds % 2 == 0:
        raise ValueError(f"rounds must be an odd positive integer, got {rounds}")
    indices = tuple(s.indices() if isinstance(s, SubsetMask) else tuple(s))
    yes = 0
    n = sample_count(gamma)
    for r in range(rounds):
        outcome = sample_relevance(
            f, x, indices, delta, gamma, _subseed(seed, f"round-{r}")
        )
        if outcome.verdict is Verdict.YES:
            yes += 1
    verdict = Verdict.YES if 2 * yes > rounds else Verdict.NO
    return AmplifiedOutcome(verdict, yes, rounds, n)


def decide_gapped(
    f: Formula,
    x: Assignment,
    k: int,
    delta: Fraction,
    gamma: Fraction,
    seed: int,
    rounds: int = 15,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> RelevanceReport:
    """Sampled subset search for the gapped decision problem.

    Answers Yes with the first accepted candidate in size-lexicographic
    order.  Under the promise (some set of size <= k is delta-relevant, or
    none is even (delta-gamma)-relevant) each candidate check errs with
    probability at most 3^-Omega(rounds); outside the promise the verdict is
    not contracted, which the report flags.
    """
    delta, gamma = Fraction(delta), Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive for the gapped problem")
    if not 1 <= k <= f.arity:
        raise ValueError(f"k must lie in 1..{f.arity}, got {k}")
    _check_search_cap(f.arity, search_cap)
    n = sample_count(gamma)
    universe = tuple(range(1, f.arity + 1))

    def candidates():
        def combos(prefix, start, size):
            if len(prefix) == size:
                yield prefix
                return
            remaining = size - len(prefix)
            for j in range(start, len(universe) - remaining + 1):
                yield from combos(prefix + (universe[j],), j + 1, size)

        for size in range(0, k + 1):
            yield from combos((), 0, size)

    for subset in candidates():
        tag = "set-" + ",".join(map(str, subset))
        outcome = amplified_sample_relevance(
            f, x, subset, delta, gamma, _subseed(seed, tag), rounds
        )
        if outcome.verdict is Verdict.YES:
            return RelevanceReport(
                Verdict.YES,
                SubsetMask.from_indices(subset, f.arity),
                "sampled-search",
                samples=n,
                promise_dependent=True,
            )
    return RelevanceReport(
        Verdict.NO, None, "sampled-search", samples=n, promise_dependent=True
    )


def greedy_min_relevant(
    f: Formula,
    x: Assignment,
    delta: Fraction,
    gamma: Fraction,
    seed: int,
    rounds: int = 15,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> tuple[int, SubsetMask]:
    """Greedy upper bound for the minimisation problem.  No factor guarantee.

    Grows S by the variable with the best sampled agreement estimate and
    stops once the amplified check accepts; whenever the exact check is
    tractable the candidate must also verify as (delta-gamma)-relevant
    exactly, so the returned set always does.
    """
    delta, gamma = Fraction(delta), Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive for the greedy solver")
    d = f.arity
    n = sample_count(gamma)
    target = evaluate(f, x)
    current: tuple[int, ...] = ()

    def exact_ok(subset: tuple[int, ...]) -> bool:
        if d - len(subset) > enum_cap:
            return True  # not verifiable at this scale; trust the sampler
        ok, _ = is_delta_relevant(f, x, subset, delta - gamma, enum_cap)
        return ok

    while True:
        outcome = amplified_sample_relevance(
            f,
            x,
            current,
            delta,
            gamma,
            _subseed(seed, "accept-" + ",".join(map(str, current))),
            rounds,
        )
        if outcome.verdict is Verdict.YES and exact_ok(current):
            return len(current), SubsetMask.from_indices(current, d)
        if len(current) == d:
            # The full set is 1-relevant; the amplified check accepts it with
            # certainty, so this point is unreachable unless delta > 1.
            return d, SubsetMask.full(d)
        best_index = None
        best_successes = -1
        for v in range(1, d + 1):
            if v in current:
                continue
            candidate = tuple(sorted(current + (v,)))
            free = tuple(i for i in range(1, d + 1) if i not in candidate)
            rng = random.Random(
                _subseed(seed, f"estimate-{len(current)}-{v}")
            )
            successes = _draw_successes(f, x, free, n, rng, target)
            if successes > best_successes:
                best_successes = successes
                best_index = v
        current = tuple(sorted(current + (best_index,)))


# --------------------------------------------------------------------------
# Brute-force oracles for the reduction targets.


def solve_emajsat(
    f: Formula,
    k: int,
    search_cap: int = DEFAULT_SEARCH_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> bool:
    """Does some assignment to the first k variables make a strict majority
    of completions satisfying?"""
    if not 1 <= k <= f.arity:
        raise ValueError(f"k must lie in 1..{f.arity}, got {k}")
    _check_search_cap(f.arity, search_cap)
    ev = ConditionalEvaluator(f, enum_cap)
    half = Fraction(1, 2)
    for u_bits in range(1 << k):
        fixed = {i + 1: (u_bits >> i) & 1 for i in range(k)}
        if ev.satisfaction(fixed) > half:
            return True
    return False


def solve_ip1(
    f: Formula,
    x: Assignment,
    k: int,
    search_cap: int = DEFAULT_SEARCH_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> bool:
    """Is there S within the first k variables with P(f | y_S = x_S) > 1/2?"""
    if not 1 <= k <= f.arity:
        raise ValueError(f"k must lie in 1..{f.arity}, got {k}")
    _check_search_cap(f.arity, search_cap)
    ev = ConditionalEvaluator(f, enum_cap)

    def prob(indices: tuple[int, ...]) -> Fraction:
        return ev.satisfaction({i: x.bit(i) for i in indices})

    hit = _first_witness(tuple(range(1, k + 1)), k, prob, Fraction(1, 2), strict=True)
    return hit is not None


def solve_ip2(
    f: Formula,
    x: Assignment,
    k: int,
    delta: Fraction,
    search_cap: int = DEFAULT_SEARCH_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> bool:
    """Is there S within the first k variables with P(f | y_S = x_S) >= delta?"""
    delta = Fraction(delta)
    if not 1 <= k <= f.arity:
        raise ValueError(f"k must lie in 1..{f.arity}, got {k}")
    _check_search_cap(f.arity, search_cap)
    ev = ConditionalEvaluator(f, enum_cap)

    def prob(indices: tuple[int, ...]) -> Fraction:
        return ev.satisfaction({i: x.bit(i) for i in indices})

    hit = _first_witness(tuple(range(1, k + 1)), k, prob, delta, strict=False)
    return hit is not None


def solve_ip3(
    f: Formula,
    x: Assignment,
    k: int,
    m: int,
    delta: Fraction,
    gamma: Fraction,
    search_cap: int = DEFAULT_SEARCH_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> Verdict:
    """Promise problem with probability gap gamma and size gap k <= m.

    Yes when a delta-relevant set of size <= k exists; No when no set of size
    <= m is even (delta-gamma)-relevant; Indeterminate in the gap between.
    """
    delta, gamma = Fraction(delta), Fraction(gamma)
    if not 1 <= k <= m <= f.arity:
        raise ValueError("need 1 <= k <= m <= d")
    if not 0 < delta <= 1 or not 0 <= gamma < delta:
        raise ValueError("need 0 < delta <= 1 and 0 <= gamma < delta")
    _check_search_cap(f.arity, search_cap)
    prob = _agreement_prob_fn(f, x, enum_cap)
    universe = tuple(range(1, f.arity + 1))
    if _first_witness(universe, k, prob, delta, strict=False) is not None:
        return Verdict.YES
    if _first_witness(universe, m, prob, delta - gamma, strict=False) is None:
        return Verdict.NO
    return Verdict.INDETERMINATE
