"""The reduction chain, executed and verified end to end.

Majority-counting search reduces to relevance testing in three constructive
steps, each verified here by brute-force oracles on both sides; a fourth
construction embeds satisfiability into the doubly gapped problem, whose
parameter arithmetic underlies the d^(1-alpha) inapproximability bound.

Run: python demos/reduction_chain.py
"""

from fractions import Fraction

from boolrel import (
    ProblemInstance,
    inapprox_parameters,
    parse,
    reduce_emajsat_to_ip1,
    reduce_ip1_to_ip2,
    reduce_ip2_to_relevant_input,
    reduce_sat_to_ip3,
    verify_reduction,
)
from boolrel.reductions import oracle_verdict

HALF = Fraction(1, 2)


def show(name, inst):
    blocks = ""
    if inst.layout:
        blocks = "  blocks: " + ", ".join(
            f"{k}={lo}..{hi}" for k, (lo, hi) in inst.layout.items()
        )
    print(f"  {name}: {inst.f.arity} variables, k={inst.k}{blocks}")


# --- the three-step chain ----------------------------------------------------
source = ProblemInstance(kind="emajsat", f=parse("x1 & (x2 | x3)"), k=1)
print(f"source: does some value of x1 make a majority of (x2,x3) satisfy")
print(f"        {source.f}?  oracle says: {oracle_verdict(source).value}")
print()

ip1 = reduce_emajsat_to_ip1(source)
ip2 = reduce_ip1_to_ip2(ip1, HALF)
ri = reduce_ip2_to_relevant_input(ip2)
print("chain:")
show("step 1 (fix-or-randomise form)", ip1)
show("step 2 (threshold moved to 1/2)", ip2)
show("step 3 (free set choice)      ", ri)
print()

print("oracle verification at every step:")
for name, pair in [
    ("source -> step 1", (source, ip1)),
    ("step 1 -> step 2", (ip1, ip2)),
    ("step 2 -> step 3", (ip2, ri)),
]:
    check = verify_reduction(*pair)
    print(
        f"  {name}: {check.source_verdict.value} vs "
        f"{check.reduced_verdict.value} -> {check.detail}"
    )
print()

# --- satisfiability into the doubly gapped problem ---------------------------
for text in ("x1 | x2", "(x1 | x2) ^ (x2 | x1)"):
    f = parse(text)
    inst = reduce_sat_to_ip3(f, HALF, Fraction(1, 4))
    check = verify_reduction(ProblemInstance(kind="sat", f=f), inst)
    print(
        f"sat -> gapped instance for {text!r}: {inst.f.arity} variables, "
        f"k={inst.k}, m={inst.m}; verdicts {check.source_verdict.value}/"
        f"{check.reduced_verdict.value} -> {check.detail}"
    )
print()

# --- the parameter arithmetic behind inapproximability -----------------------
# Choosing m' so that k' * d'^(1-alpha) < m' means an approximation within
# factor d'^(1-alpha) would separate the Yes and No sides of the gapped
# instance, deciding satisfiability.
print("inapproximability parameters (delta=1/2, gamma=1/4):")
for d in (3, 5):
    for alpha in (Fraction(1, 4), HALF, Fraction(3, 4)):
        rec = inapprox_parameters(d, HALF, Fraction(1, 4), alpha)
        print(
            f"  d={d}, alpha={alpha}: k'={rec.k_prime}, m'={rec.m_prime}, "
            f"d'={rec.d_prime}, strict check {'ok' if rec.check else 'FAILED'}"
        )
