"""Splitting decision and explicit sections.

The reduction map from Aut(G) onto the product of blockwise general linear
groups splits exactly when every homocyclic block individually admits a
section; the per-block answer depends only on (p, exponent, rank):

  * exponent 1 (elementary abelian): always splits;
  * otherwise rank <= 1 for p >= 5, rank <= 2 for p = 3, rank <= 3 for p = 2.

A failing block rules splitting out for p >= 5 unconditionally, and for
p = 2, 3 whenever consecutive exponents differ by more than 1.  In the
remaining p = 2, 3 tight-gap region no verdict is available and the
classifier says so rather than extrapolate.

Where a section exists we build it explicitly: the multiplicative lift for
rank-1 blocks, the identity lift for elementary blocks, and a search-backed
table for the exceptional small-rank p = 2, 3 blocks; per-block sections are
assembled block-diagonally into a certificate that is then machine-verified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from . import matrices as mx
from .endo import (
    BlockEndo,
    QElement,
    block_endo,
    compose,
    endo_from_json,
    endo_to_json,
    identity_endo,
    identity_q,
    q_from_json,
    q_mul,
    q_to_json,
    sigma,
)
from .errors import (
    MissingBlockSection,
    NotSplitBlock,
    OracleBudgetExceeded,
    VerificationFailed,
)
from .groups import (
    PGroupSpec,
    pi_order,
    spec_from_json,
    spec_to_json,
    validate_spec,
)
from .matrices import Matrix

#: Largest rank for which a non-elementary block still splits.
RANK_BOUND = {2: 3, 3: 2}


def rank_bound(p: int) -> int:
    return RANK_BOUND.get(p, 1)


@dataclass(frozen=True)
class BlockVerdict:
    n: int
    r: int
    outcome: str  # "Splits" | "DoesNotSplit"
    rule: str

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "outcome": self.outcome,
                "rule": self.rule}


@dataclass(frozen=True)
class SplitVerdict:
    outcome: str  # "Splits" | "DoesNotSplit" | "Unknown"
    rule: str
    per_block: tuple[BlockVerdict, ...]
    gaps_ok: bool

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "rule": self.rule,
            "per_block": [b.to_json() for b in self.per_block],
            "gaps_ok": self.gaps_ok,
        }


def classify_block(p: int, n: int, r: int) -> BlockVerdict:
    """Per-block splitting verdict from (p, exponent, rank) alone."""
    if n == 1:
        return BlockVerdict(n, r, "Splits", "elementary-abelian")
    if r <= rank_bound(p):
        return BlockVerdict(n, r, "Splits", "rank-within-bound")
    return BlockVerdict(n, r, "DoesNotSplit", "rank-exceeds-bound")


def classify(spec: PGroupSpec) -> SplitVerdict:
    """Whole-group verdict assembled from the per-block criteria."""
    per_block = tuple(classify_block(spec.p, n, r) for n, r in spec.blocks)
    gaps_ok = all(n2 - n1 > 1 for (n1, _), (n2, _)
                  in zip(spec.blocks, spec.blocks[1:]))
    if all(b.outcome == "Splits" for b in per_block):
        return SplitVerdict("Splits", "all-blocks-split", per_block, gaps_ok)
    if spec.p >= 5:
        return SplitVerdict("DoesNotSplit", "failing-block", per_block, gaps_ok)
    if gaps_ok:
        return SplitVerdict("DoesNotSplit", "failing-block-wide-gaps",
                            per_block, gaps_ok)
    return SplitVerdict("Unknown", "outside-gap-hypothesis", per_block, gaps_ok)


def first_block_phrasing(spec: PGroupSpec) -> bool:
    """Equivalent rank-bound reading that singles out the first block.

    True iff every later block has rank within bound and the first block is
    elementary abelian or has rank within bound.  Asserted equal to "every
    block splits" by the test suite.
    """
    b = rank_bound(spec.p)
    n1, r1 = spec.blocks[0]
    head_ok = n1 == 1 or r1 <= b
    tail_ok = all(n == 1 or r <= b for n, r in spec.blocks[1:])
    return head_ok and tail_ok


# --- per-block sections ---

def teichmuller_section(p: int, n: int):
    """The multiplicative lift of units: a -> a^(p^(n-1)) mod p^n.

    Reduces to a mod p, is multiplicative, and lands in the (p-1)-torsion.
    For p = 2 the domain is the trivial group.
    """
    q = p ** n
    e = p ** (n - 1)

    def omega(a: int) -> int:
        if a % p == 0:
            raise ValueError(f"{a} is not a unit mod {p}")
        return pow(a % q, e, q)

    return omega


@dataclass(frozen=True)
class BlockSection:
    """A verified section for one homocyclic block.

    kind "trivial" lifts matrices entrywise (valid only for exponent 1),
    "teichmuller" lifts rank-1 scalars multiplicatively, and "table" holds
    the full map recovered from a search certificate.
    """

    p: int
    n: int
    r: int
    kind: str
    table: dict | None = None

    def apply(self, m: Matrix) -> Matrix:
        m = mx.mat(m, self.p)
        if self.kind == "trivial":
            return m
        if self.kind == "teichmuller":
            omega = teichmuller_section(self.p, self.n)
            return ((omega(m[0][0]),),)
        if self.table is None:
            raise MissingBlockSection("table section has no table")
        return self.table[m]


def block_section(p: int, n: int, r: int,
                  oracle_budget: int | None = None,
                  seed: int = 0,
                  cache=None) -> BlockSection:
    """Construct a verified section for one block, searching if needed."""
    from . import oracle as _oracle

    verdict = classify_block(p, n, r)
    if verdict.outcome != "Splits":
        raise NotSplitBlock(f"(p={p}, n={n}, r={r}) does not split")
    if n == 1:
        return BlockSection(p=p, n=n, r=r, kind="trivial")
    if r == 1:
        return BlockSection(p=p, n=n, r=r, kind="teichmuller")

    spec = validate_spec(p, [(n, r)])
    cert = cache.load_block(p, n, r) if cache is not None else None
    if cert is None:
        kwargs = {"seed": seed}
        if oracle_budget is not None:
            kwargs["assignment_budget"] = oracle_budget
        result = _oracle.complement_lift_search(spec, **kwargs)
        if result.outcome == "BudgetExceeded":
            raise OracleBudgetExceeded(
                f"section search for (p={p}, n={n}, r={r}) ran out of budget")
        if result.outcome != "Found":
            raise NotSplitBlock(
                f"search found no section for (p={p}, n={n}, r={r})")
        cert = SectionCertificate(
            spec=spec,
            generators=result.generators,
            images=result.images,
            verification={"mode": "unverified", "pairs": 0},
        )
        cert = replace(cert, verification=verify_section(cert).to_json())
        if cache is not None:
            cache.store_block(p, n, r, cert)
    table = {q.mats[0]: e.cells[0][0]
             for q, e in section_table(cert).items()}
    return BlockSection(p=p, n=n, r=r, kind="table", table=table)


# --- certificates ---

@dataclass(frozen=True)
class SectionCertificate:
    """Generating-set-to-image table witnessing a section."""

    spec: PGroupSpec
    generators: tuple[QElement, ...]
    images: tuple[BlockEndo, ...]
    verification: dict

    def to_json(self) -> dict:
        return {
            "spec": spec_to_json(self.spec),
            "generators": [q_to_json(g) for g in self.generators],
            "images": [endo_to_json(e) for e in self.images],
            "verification": dict(self.verification),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SectionCertificate":
        spec = spec_from_json(obj["spec"])
        generators = tuple(q_from_json(spec, g) for g in obj["generators"])
        images = tuple(endo_from_json(spec, e) for e in obj["images"])
        return cls(spec=spec, generators=generators, images=images,
                   verification=dict(obj.get("verification", {})))


def section_table(cert: SectionCertificate) -> dict[QElement, BlockEndo]:
    """Extend the generator images to the whole quotient by words.

    Breadth-first products; a conflicting value for an already-seen quotient
    element means the images do not define a map at all.
    """
    spec = cert.spec
    table = {identity_q(spec): identity_endo(spec)}
    frontier = [identity_q(spec)]
    while frontier:
        new = []
        for q in frontier:
            for g, img in zip(cert.generators, cert.images):
                qq = q_mul(q, g)
                ee = compose(table[q], img)
                if qq in table:
                    if table[qq] != ee:
                        raise VerificationFailed(
                            "generator images are inconsistent",
                            counterexample=(q, g))
                else:
                    table[qq] = ee
                    new.append(qq)
        frontier = new
    expected = pi_order(spec)
    if len(table) != expected:
        raise VerificationFailed(
            f"images generate {len(table)} quotient elements, expected {expected}")
    return table


@dataclass(frozen=True)
class VerificationReport:
    mode: str
    pairs_checked: int
    ok: bool

    def to_json(self) -> dict:
        return {"mode": self.mode, "pairs": self.pairs_checked, "ok": self.ok}


def verify_section(cert: SectionCertificate, mode: str = "full-table",
                   sample_pairs: int = 10_000, seed: int = 0,
                   full_table_limit: int = 10_000) -> VerificationReport:
    """Certify a section; raises VerificationFailed on the first bad pair.

    full-table checks the extended map on every pair of quotient elements;
    generator-relations checks closure size and trivial kernel-intersection
    only; sampled checks random pairs.  All modes verify that the recorded
    images reduce to their generators.
    """
    from .oracle import dimino_closure

    spec = cert.spec
    for g, img in zip(cert.generators, cert.images):
        if sigma(img) != g:
            raise VerificationFailed("image does not reduce to its generator",
                                     counterexample=g)

    if mode == "generator-relations":
        from .errors import Overflow
        expected = pi_order(spec)
        try:
            elems = dimino_closure(list(cert.images), expected,
                                   mul=compose, identity=identity_endo(spec))
        except Overflow as exc:
            raise VerificationFailed(
                "closure exceeds the quotient order") from exc
        iq = identity_q(spec)
        ident = identity_endo(spec)
        for e in elems:
            if e != ident and sigma(e) == iq:
                raise VerificationFailed(
                    "closure meets the kernel nontrivially", counterexample=e)
        if len(elems) != expected:
            raise VerificationFailed(
                f"closure has {len(elems)} elements, expected {expected}")
        return VerificationReport(mode=mode, pairs_checked=len(elems), ok=True)

    table = section_table(cert)
    iq = identity_q(spec)
    ident = identity_endo(spec)
    for q, e in table.items():
        if sigma(e) != q:
            raise VerificationFailed("table image has wrong reduction",
                                     counterexample=q)
        if q != iq and e == ident:
            raise VerificationFailed("non-identity element maps to identity",
                                     counterexample=q)

    if mode == "full-table":
        if len(table) > full_table_limit:
            raise VerificationFailed(
                f"quotient too large for full-table mode ({len(table)})")
        keys = list(table)
        pairs = 0
        for q1 in keys:
            e1 = table[q1]
            for q2 in keys:
                if compose(e1, table[q2]) != table[q_mul(q1, q2)]:
                    raise VerificationFailed("homomorphism property fails",
                                             counterexample=(q1, q2))
                pairs += 1
        return VerificationReport(mode=mode, pairs_checked=pairs, ok=True)

    if mode == "sampled":
        rng = random.Random(seed)
        keys = list(table)
        pairs = 0
        for _ in range(sample_pairs):
            q1 = rng.choice(keys)
            q2 = rng.choice(keys)
            if compose(table[q1], table[q2]) != table[q_mul(q1, q2)]:
                raise VerificationFailed("homomorphism property fails",
                                         counterexample=(q1, q2))
            pairs += 1
        return VerificationReport(mode=mode, pairs_checked=pairs, ok=True)

    raise ValueError(f"unknown verification mode {mode!r}")


def assemble_section(spec: PGroupSpec,
                     block_sections: dict[int, BlockSection],
                     seed: int = 0) -> SectionCertificate:
    """Block-diagonal assembly of per-block sections into one certificate.

    block_sections maps block index to a verified BlockSection; the
    generators recorded are those of the quotient product, their images the
    block-diagonal lifts through the per-block sections.
    """
    from .oracle import find_generators_of_Q

    for i, (n, r) in enumerate(spec.blocks):
        if i not in block_sections:
            raise MissingBlockSection(f"no section for block {i}")
        s = block_sections[i]
        if (s.p, s.n, s.r) != (spec.p, n, r):
            raise MissingBlockSection(
                f"section for block {i} has parameters "
                f"({s.p},{s.n},{s.r}), expected ({spec.p},{n},{r})")

    gen_res = find_generators_of_Q(spec, seed=seed)
    images = []
    for q in gen_res.generators:
        cells = []
        for j, rj in enumerate(spec.ranks):
            row = []
            for k, rk in enumerate(spec.ranks):
                if j == k:
                    row.append(block_sections[j].apply(q.mats[j]))
                else:
                    row.append(mx.zeros(rj, rk))
            cells.append(row)
        images.append(block_endo(spec, cells))
    return SectionCertificate(
        spec=spec,
        generators=gen_res.generators,
        images=tuple(images),
        verification={"mode": "unverified", "pairs": 0},
    )


def build_verified_section(spec: PGroupSpec, mode: str = "full-table",
                           seed: int = 0, oracle_budget: int | None = None,
                           cache=None,
                           full_table_limit: int = 10_000,
                           ) -> tuple[SectionCertificate, VerificationReport]:
    """One-stop construction: per-block sections, assembly, verification."""
    verdict = classify(spec)
    if verdict.outcome != "Splits":
        raise NotSplitBlock(f"classifier verdict is {verdict.outcome}")
    sections = {
        i: block_section(spec.p, n, r, oracle_budget=oracle_budget,
                         seed=seed, cache=cache)
        for i, (n, r) in enumerate(spec.blocks)
    }
    cert = assemble_section(spec, sections, seed=seed)
    if mode == "auto":
        mode = ("full-table" if pi_order(spec) <= full_table_limit
                else "generator-relations")
    report = verify_section(cert, mode=mode, seed=seed,
                            full_table_limit=full_table_limit)
    cert = replace(cert, verification=report.to_json())
    return cert, report
