import random
from fractions import Fraction

import pytest

from boolrel.counting import (
    ConditionalEvaluator,
    DyadicProb,
    conditional_agreement_probability,
    conditional_satisfaction_probability,
    decompose_independent,
    satisfaction_probability,
)
from boolrel.formula import (
    Assignment,
    EnumerationCapExceeded,
    Formula,
    SubsetMask,
    and_,
    compose_variables,
    const,
    or_,
    parse,
    var,
    xor_all,
)
from oracles import (
    naive_agreement,
    naive_conditional_satisfaction,
    naive_probability,
    random_assignment,
    random_formula,
)

FIG1 = parse("(x1 & x2) | !x3")


class TestDyadicProb:
    def test_normalisation(self):
        p = DyadicProb(4, 3)
        assert (p.numerator, p.exponent) == (1, 1)
        assert p.exact_str() == "1/2^1"

    def test_bounds(self):
        with pytest.raises(ValueError):
            DyadicProb(9, 3)
        with pytest.raises(ValueError):
            DyadicProb(-1, 0)

    def test_exact_comparisons(self):
        p = DyadicProb(3, 2)
        assert p == Fraction(3, 4)
        assert p >= Fraction(3, 4)
        assert not (p >= Fraction(4, 5))
        assert p < 1
        assert p > Fraction(1, 2)

    def test_complement(self):
        assert DyadicProb(5, 3).complement() == Fraction(3, 8)

    def test_from_fraction_rejects_non_dyadic(self):
        with pytest.raises(ValueError):
            DyadicProb.from_fraction(Fraction(1, 3))

    def test_float(self):
        assert float(DyadicProb(5, 3)) == 0.625


class TestSatisfactionProbability:
    def test_fig1(self):
        assert satisfaction_probability(FIG1) == Fraction(5, 8)

    def test_const_one(self):
        assert satisfaction_probability(Formula(const(1), 4)) == 1

    def test_triple_and(self):
        assert satisfaction_probability(parse("x1 & x2 & x3")) == Fraction(1, 8)

    def test_matches_naive(self):
        rng = random.Random(11)
        for _ in range(300):
            d = rng.randint(1, 12)
            f = random_formula(rng, d, rng.randint(1, 18))
            assert satisfaction_probability(f).as_fraction() == naive_probability(f)

    def test_cap_refusal(self):
        # A full-support XOR of 30 variables collapses by freshening, so feed
        # something that cannot decompose: a majority-style interleaving.
        terms = [
            and_(var(i), var(i + 1), var((i + 13) % 30 + 1)) for i in range(1, 29)
        ]
        f = Formula(or_(*terms), 30)
        with pytest.raises(EnumerationCapExceeded):
            satisfaction_probability(f, enum_cap=20)


class TestConditionalAgreement:
    def test_fig1_fix_x3(self):
        x = Assignment.from_string("110")
        s = SubsetMask.from_indices([3], 3)
        assert conditional_agreement_probability(FIG1, x, s) == 1

    def test_fig1_fix_x1(self):
        x = Assignment.from_string("110")
        s = SubsetMask.from_indices([1], 3)
        assert conditional_agreement_probability(FIG1, x, s) == Fraction(3, 4)

    def test_full_set_always_one(self):
        rng = random.Random(3)
        for _ in range(30):
            d = rng.randint(1, 8)
            f = random_formula(rng, d, 10)
            x = random_assignment(rng, d)
            s = SubsetMask.full(d)
            assert conditional_agreement_probability(f, x, s) == 1

    def test_empty_set_matches_unconditional(self):
        rng = random.Random(4)
        for _ in range(100):
            d = rng.randint(1, 8)
            f = random_formula(rng, d, 12)
            x = random_assignment(rng, d)
            p = satisfaction_probability(f).as_fraction()
            agree = conditional_agreement_probability(f, x, SubsetMask.empty(d))
            from boolrel.formula import evaluate

            want = p if evaluate(f, x) == 1 else 1 - p
            assert agree.as_fraction() == want

    def test_matches_naive_on_random_instances(self):
        rng = random.Random(12)
        for _ in range(250):
            d = rng.randint(2, 10)
            f = random_formula(rng, d, rng.randint(2, 18))
            x = random_assignment(rng, d)
            size = rng.randint(0, d)
            s = sorted(rng.sample(range(1, d + 1), size))
            got = conditional_agreement_probability(f, x, s).as_fraction()
            assert got == naive_agreement(f, x, s)

    def test_conditional_satisfaction_matches_naive(self):
        rng = random.Random(13)
        for _ in range(200):
            d = rng.randint(2, 9)
            f = random_formula(rng, d, rng.randint(2, 16))
            x = random_assignment(rng, d)
            size = rng.randint(0, d)
            s = sorted(rng.sample(range(1, d + 1), size))
            got = conditional_satisfaction_probability(f, x, s).as_fraction()
            assert got == naive_conditional_satisfaction(f, x, s)

    def test_arity_checks(self):
        with pytest.raises(ValueError):
            conditional_agreement_probability(
                FIG1, Assignment.from_string("11"), SubsetMask.empty(2)
            )


class TestDecomposition:
    def test_disjoint_or(self):
        f = parse("(x1 & x2) | (x3 & x4 & x5)")
        dec = decompose_independent(f)
        assert dec.law == "or"
        probs = sorted(
            satisfaction_probability(c).as_fraction() for c, _ in dec.components
        )
        assert probs == [Fraction(1, 8), Fraction(1, 4)]
        assert dec.combined_probability() == Fraction(11, 32)
        # Independent confirmation by enumerating all 2^5 assignments.
        assert naive_probability(f) == Fraction(11, 32)

    def test_xor_of_fair_bits(self):
        f = parse("x1 ^ x2")
        dec = decompose_independent(f)
        assert dec.law == "xor"
        assert dec.combined_probability() == Fraction(1, 2)

    def test_fig1_value(self):
        dec = decompose_independent(FIG1)
        assert dec.combined_probability() == Fraction(5, 8)

    def test_entangled_is_atom(self):
        f = parse("(x1 & x2) | (x2 & x3)")
        dec = decompose_independent(f)
        assert dec.law == "atom"
        assert len(dec.components) == 1

    def test_decomposition_equals_enumeration(self):
        rng = random.Random(21)
        for _ in range(200):
            d = rng.randint(1, 12)
            f = random_formula(rng, d, rng.randint(1, 20))
            assert (
                decompose_independent(f).combined_probability().as_fraction()
                == naive_probability(f)
            )

    def test_monotone_in_gadget_probability(self):
        # P(f or g) = P(f) + (1 - P(f)) P(g) grows with P(g) at fixed P(f).
        host = parse("x1 & x2")
        last = Fraction(0)
        for width in (3, 2, 1):
            pi = and_(*(var(i) for i in range(3, 3 + width)))
            combined = Formula(or_(host.root, pi), 3 + width - 1)
            p = satisfaction_probability(combined).as_fraction()
            assert p >= last
            last = p


class TestXorFreshening:
    def xor_block_formula(self, d_payload, blocks):
        """Payload over x1..x{d_payload} applied to XOR triples of fresh vars."""
        rng = random.Random(blocks * 7 + d_payload)
        payload = random_formula(rng, d_payload, 10)
        base = d_payload
        substitution = {
            j + 1: xor_all([var(base + 3 * j + t) for t in (1, 2, 3)])
            for j in range(blocks)
        }
        wired = compose_variables(payload.root, substitution)
        return Formula(wired, base + 3 * blocks), payload

    def test_freshening_collapses_blocks(self):
        f, _ = self.xor_block_formula(3, 3)
        ev = ConditionalEvaluator(f)
        assert len(ev._groups) >= 1

    def test_unconditional_matches_naive(self):
        for d_payload, blocks in [(2, 2), (3, 2), (3, 3)]:
            f, _ = self.xor_block_formula(d_payload, blocks)
            assert (
                satisfaction_probability(f).as_fraction() == naive_probability(f)
            )

    def test_conditioning_group_members_matches_naive(self):
        rng = random.Random(31)
        for trial in range(60):
            d_payload = rng.randint(2, 3)
            blocks = rng.randint(1, 3)
            f, _ = self.xor_block_formula(d_payload, blocks)
            d = f.arity
            x = random_assignment(rng, d)
            size = rng.randint(0, min(d, 5))
            s = sorted(rng.sample(range(1, d + 1), size))
            got = conditional_agreement_probability(f, x, s).as_fraction()
            want = naive_agreement(f, x, s)
            assert got == want, (trial, str(f), str(x), s)

    def test_fully_fixed_group_is_constant(self):
        # f = (r1 ^ r2 ^ r3) & x4; fixing the whole trio pins the block.
        f = Formula(and_(xor_all([var(1), var(2), var(3)]), var(4)), 4)
        x = Assignment.from_string("1011")
        got = conditional_agreement_probability(f, x, [1, 2, 3]).as_fraction()
        assert got == naive_agreement(f, x, [1, 2, 3])
        got_partial = conditional_agreement_probability(f, x, [1, 2]).as_fraction()
        assert got_partial == naive_agreement(f, x, [1, 2])


class TestForcedDecomposition:
    """Shrink the enumeration leaf so every device runs on naive-checkable
    formulas."""

    def test_engine_matches_naive_with_tiny_leaf(self, monkeypatch):
        import boolrel.counting as counting

        monkeypatch.setattr(counting, "_LEAF_BITS", 2)
        rng = random.Random(314)
        for _ in range(150):
            d = rng.randint(3, 10)
            f = random_formula(rng, d, rng.randint(4, 18))
            x = random_assignment(rng, d)
            size = rng.randint(0, min(4, d))
            s = sorted(rng.sample(range(1, d + 1), size))
            got = conditional_agreement_probability(f, x, s).as_fraction()
            assert got == naive_agreement(f, x, s), (str(f), str(x), s)

    def test_structured_guard_and_xor_shape(self, monkeypatch):
        # The shape the set-choice reduction emits: clause guards on (u, v)
        # plus a payload reading u and triple-XOR blocks.
        import boolrel.counting as counting

        monkeypatch.setattr(counting, "_LEAF_BITS", 3)
        rng = random.Random(278)
        for _ in range(40):
            k = rng.randint(1, 2)
            rest = rng.randint(1, 3)
            payload = random_formula(rng, k + rest, 10)
            blocks = {
                k + j: xor_all(
                    [var(2 * k + c * rest + j) for c in range(3)]
                )
                for j in range(1, rest + 1)
            }
            wired = compose_variables(payload.root, blocks)
            clauses = [
                or_(var(i), var(k + i)) for i in range(1, k + 1)
            ]
            arity = 2 * k + 3 * rest
            f = Formula(and_(wired, *clauses), arity)
            x = random_assignment(rng, arity)
            size = rng.randint(0, min(4, arity))
            s = sorted(rng.sample(range(1, arity + 1), size))
            got = conditional_agreement_probability(f, x, s).as_fraction()
            assert got == naive_agreement(f, x, s)


class TestPlugSplit:
    def test_large_disjoint_plug(self):
        # (payload or big-AND-block) with the block wider than the leaf size:
        # exercises the plug split rather than enumeration.
        payload = parse("(x1 & x2) | (!x1 & x3)")
        block = and_(*(var(i) for i in range(4, 24)))
        f = Formula(and_(or_(payload.root, block), var(24)), 24)
        p = satisfaction_probability(f).as_fraction()
        p_payload = naive_probability(payload)
        p_block = Fraction(1, 1 << 20)
        want = (p_payload + (1 - p_payload) * p_block) * Fraction(1, 2)
        assert p == want

    def test_conditioning_into_plug(self):
        payload = parse("(x1 & x2) | (!x1 & x3)")
        block = and_(*(var(i) for i in range(4, 24)))
        f = Formula(or_(payload.root, block), 23)
        x = Assignment.ones(23)
        # Fix part of the block: remaining block probability 2^-5.
        s = list(range(4, 19))
        got = conditional_satisfaction_probability(f, x, s).as_fraction()
        p_payload = naive_probability(payload)
        want = p_payload + (1 - p_payload) * Fraction(1, 1 << 5)
        assert got == want
