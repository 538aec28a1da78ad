"""Classifier and section machinery."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autsplit.endo import block_endo, compose, q_mul, sigma
from autsplit.errors import NotSplitBlock, VerificationFailed
from autsplit.groups import pi_order, validate_spec
from autsplit.splitting import (
    SectionCertificate,
    assemble_section,
    block_section,
    build_verified_section,
    classify,
    classify_block,
    first_block_phrasing,
    rank_bound,
    section_table,
    teichmuller_section,
    verify_section,
)
from autsplit.errors import MissingBlockSection


class TestClassifyBlock:
    def test_elementary_always_splits(self):
        for p in (2, 3, 5, 7):
            for r in (1, 4, 9):
                assert classify_block(p, 1, r).outcome == "Splits"

    @pytest.mark.parametrize("p,bound", [(2, 3), (3, 2), (5, 1), (7, 1),
                                         (11, 1)])
    def test_rank_bound(self, p, bound):
        assert rank_bound(p) == bound
        for n in (2, 3):
            assert classify_block(p, n, bound).outcome == "Splits"
            assert classify_block(p, n, bound + 1).outcome == "DoesNotSplit"


class TestClassify:
    def test_all_split(self):
        v = classify(validate_spec(2, [(1, 1), (2, 3)]))
        assert v.outcome == "Splits"
        assert v.rule == "all-blocks-split"

    def test_large_prime_failing_block(self):
        v = classify(validate_spec(5, [(2, 2)]))
        assert v.outcome == "DoesNotSplit"
        assert v.rule == "failing-block"

    def test_small_prime_wide_gaps(self):
        v = classify(validate_spec(2, [(2, 4)]))
        assert v.outcome == "DoesNotSplit"
        assert v.rule == "failing-block-wide-gaps"
        v = classify(validate_spec(2, [(2, 4), (5, 1)]))
        assert v.outcome == "DoesNotSplit"

    def test_small_prime_tight_gap_is_unknown(self):
        v = classify(validate_spec(2, [(2, 4), (3, 1)]))
        assert v.outcome == "Unknown"
        assert v.rule == "outside-gap-hypothesis"
        assert classify(validate_spec(3, [(1, 1), (2, 3)])).outcome == "Unknown"

    def test_verdict_json_has_per_block(self):
        v = classify(validate_spec(3, [(2, 2), (4, 3)]))
        obj = v.to_json()
        assert [b["outcome"] for b in obj["per_block"]] == ["Splits",
                                                            "DoesNotSplit"]

    @settings(max_examples=300)
    @given(st.builds(
        lambda p, exps, ranks: validate_spec(
            p, list(zip(sorted(exps), ranks))),
        st.sampled_from([2, 3, 5, 7]),
        st.lists(st.integers(1, 6), min_size=1, max_size=3, unique=True),
        st.lists(st.integers(1, 5), min_size=3, max_size=3),
    ))
    def test_first_block_phrasing_equivalent(self, spec):
        every_block_splits = all(
            classify_block(spec.p, n, r).outcome == "Splits"
            for n, r in spec.blocks)
        assert first_block_phrasing(spec) == every_block_splits
        assert every_block_splits == (classify(spec).outcome == "Splits")


class TestTeichmuller:
    @pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (5, 3), (7, 2), (2, 3)])
    def test_multiplicative_lift(self, p, n):
        omega = teichmuller_section(p, n)
        q = p ** n
        units = [a for a in range(1, p) ]
        for a in units:
            assert omega(a) % p == a % p
            assert omega(a) == pow(a, p ** (n - 1), q)
            for b in units:
                assert omega(a) * omega(b) % q == omega(a * b)

    def test_known_values(self):
        # each equals a^(p^(n-1)) mod p^n, recomputed here by pow
        assert teichmuller_section(5, 2)(2) == 7
        assert teichmuller_section(3, 2)(2) == 8
        assert teichmuller_section(5, 3)(2) == 57

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            teichmuller_section(5, 2)(10)


class TestBlockSection:
    def test_trivial_kind(self):
        s = block_section(3, 1, 4)
        assert s.kind == "trivial"
        m = ((1, 2, 0, 0), (0, 1, 0, 0), (0, 0, 2, 1), (0, 0, 1, 1))
        assert s.apply(m) == m

    def test_teichmuller_kind(self):
        s = block_section(5, 2, 1)
        assert s.kind == "teichmuller"
        assert s.apply(((2,),)) == ((7,),)

    def test_table_kind_from_search(self):
        s = block_section(3, 2, 2, seed=0)
        assert s.kind == "table"
        assert len(s.table) == 48
        p = 3
        for m1, e1 in s.table.items():
            assert tuple(tuple(x % p for x in row) for row in e1) == m1

    def test_refuses_non_split_block(self):
        with pytest.raises(NotSplitBlock):
            block_section(5, 2, 2)


class TestCertificates:
    def test_build_and_verify_rank_one(self):
        spec = validate_spec(5, [(2, 1)])
        cert, report = build_verified_section(spec, mode="full-table")
        assert report.ok
        assert report.pairs_checked == pi_order(spec) ** 2
        assert cert.verification["mode"] == "full-table"

    def test_verify_modes_agree(self):
        spec = validate_spec(5, [(1, 1), (2, 1)])
        cert, _ = build_verified_section(spec, mode="full-table")
        assert verify_section(cert, mode="generator-relations").ok
        assert verify_section(cert, mode="sampled", sample_pairs=500).ok

    def test_json_round_trip(self):
        spec = validate_spec(3, [(2, 1)])
        cert, _ = build_verified_section(spec)
        back = SectionCertificate.from_json(cert.to_json())
        assert back == cert
        assert verify_section(back).ok

    def test_bad_images_caught(self):
        # the entrywise integer lift of a generator reduces correctly but is
        # not multiplicative, so extending it by words must hit a conflict
        spec = validate_spec(5, [(2, 1)])
        cert, _ = build_verified_section(spec)
        bad_images = tuple(
            block_endo(spec, [[tuple(tuple(int(x) for x in row)
                                     for row in g.mats[0])]])
            for g in cert.generators)
        bad = SectionCertificate(spec=spec, generators=cert.generators,
                                 images=bad_images, verification={})
        with pytest.raises(VerificationFailed):
            verify_section(bad)

    def test_wrong_reduction_caught(self):
        spec = validate_spec(5, [(1, 1), (2, 1)])
        cert, _ = build_verified_section(spec)
        assert len(cert.generators) == 2
        swapped = SectionCertificate(
            spec=spec, generators=tuple(reversed(cert.generators)),
            images=cert.images, verification={})
        with pytest.raises(VerificationFailed):
            verify_section(swapped)

    def test_section_table_respects_sigma(self):
        spec = validate_spec(2, [(2, 2)])
        cert, _ = build_verified_section(spec)
        table = section_table(cert)
        assert len(table) == pi_order(spec)
        for q, e in table.items():
            assert sigma(e) == q

    def test_assemble_requires_all_blocks(self):
        spec = validate_spec(5, [(1, 1), (2, 1)])
        with pytest.raises(MissingBlockSection):
            assemble_section(spec, {0: block_section(5, 1, 1)})

    def test_assemble_checks_parameters(self):
        spec = validate_spec(5, [(1, 1), (2, 1)])
        wrong = {0: block_section(5, 1, 1), 1: block_section(3, 2, 1)}
        with pytest.raises(MissingBlockSection):
            assemble_section(spec, wrong)

    def test_build_refuses_non_split(self):
        with pytest.raises(NotSplitBlock):
            build_verified_section(validate_spec(5, [(2, 2)]))
        with pytest.raises(NotSplitBlock):
            build_verified_section(validate_spec(3, [(1, 1), (2, 3)]))

    def test_section_is_homomorphic_sample(self):
        spec = validate_spec(2, [(1, 2), (2, 2)])
        cert, report = build_verified_section(spec, mode="sampled")
        assert report.ok
        table = section_table(cert)
        rng = random.Random(0)
        keys = list(table)
        for _ in range(200):
            q1, q2 = rng.choice(keys), rng.choice(keys)
            assert compose(table[q1], table[q2]) == table[q_mul(q1, q2)]
