"""The Monte-Carlo relevance checker and its error behaviour.

Exact relevance checking needs exponential counting.  With a probability gap
gamma the question becomes checkable by sampling: draw n = ceil(2 ln 3 /
gamma^2) random completions, answer from the empirical agreement frequency,
and accept a 1/3 worst-case error that majority voting then drives down.

Run: python demos/sampling_vs_exact.py
"""

from fractions import Fraction

from boolrel import (
    Assignment,
    amplified_sample_relevance,
    build_pi,
    is_delta_relevant,
    sample_count,
    sample_relevance,
)

print("sample counts n = ceil(2 ln 3 / gamma^2):")
for gamma in (Fraction(1, 5), Fraction(1, 10), Fraction(1, 20), Fraction(1, 50)):
    print(f"  gamma = {str(gamma):5} -> n = {sample_count(gamma)}")
print()

# A planted instance with exactly known agreement: a monotone DNF whose
# satisfaction probability was steered to ~0.85, queried at S = {} so the
# agreement probability equals it exactly.
gadget = build_pi(Fraction(85, 100), 10)
f = gadget.pi
x = Assignment.ones(f.arity)
exact = gadget.prob
print(f"planted formula on {f.arity} variables, exact agreement {float(exact):.6f}")

delta, gamma = Fraction(3, 4), Fraction(1, 10)
ok, _ = is_delta_relevant(f, x, [], delta)
print(f"exact check at delta = {delta}: {'relevant' if ok else 'not relevant'}")
print()

print("ten single sampled runs (n = 220 each):")
for seed in range(10):
    out = sample_relevance(f, x, [], delta, gamma, seed)
    print(
        f"  seed {seed}: estimate {out.estimate:.4f} "
        f"({out.successes}/{out.samples}) -> {out.verdict.value}"
    )
print()

# Majority voting over independent rounds: each round errs with probability
# at most 1/3 under the gap promise, so disagreeing majorities become
# exponentially rare.
out = amplified_sample_relevance(f, x, [], delta, gamma, seed=42, rounds=15)
print(
    f"amplified (15 rounds): {out.yes_rounds}/{out.rounds} rounds said yes "
    f"-> {out.verdict.value}"
)
print()

# Near the threshold the sampler is allowed to answer either way: that is
# the promise gap.  Exact agreement here is 1/2, between delta - gamma and
# delta, so no answer is contracted.
from boolrel import parse

g = parse("x1 ^ x2")
xg = Assignment.from_string("11")
votes = {"yes": 0, "no": 0}
for seed in range(40):
    votes[sample_relevance(g, xg, [1], Fraction(11, 20), gamma, seed).verdict.value] += 1
print(f"inside the gap (true agreement 1/2): 40 seeds split {votes}")
