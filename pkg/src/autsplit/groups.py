"""Group specifications and elements.

A finite abelian p-group is given here by its canonical homocyclic
decomposition: a prime p and an ordered list of (exponent, rank) blocks with
strictly increasing exponents.  Block i contributes a summand isomorphic to
(Z/p^n_i)^{r_i}.  Elements are tuples of residue vectors, one vector per
block, always stored canonically reduced.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .errors import (
    BudgetExceeded,
    EmptyBlocks,
    NonIncreasingExponents,
    NonPrime,
    ShapeMismatch,
    SingleBlock,
    SpecError,
    TrivialResult,
    ZeroRank,
)

#: Default cap on element enumeration.
DEFAULT_ELEMENT_BUDGET = 2 ** 20

#: Default cap on enumeration of the kernel of reduction mod p.
DEFAULT_DELTA_BUDGET = 2 ** 16

GroupElement = tuple[tuple[int, ...], ...]


def _is_prime(p: int) -> bool:
    # trial division; p is tiny in practice
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PGroupSpec:
    """The prime p and the ordered (exponent, rank) blocks defining G."""

    p: int
    blocks: tuple[tuple[int, int], ...]

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.blocks)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(r for _, r in self.blocks)

    @property
    def moduli(self) -> tuple[int, ...]:
        """p^n_i per block."""
        return tuple(self.p ** n for n, _ in self.blocks)

    @property
    def total_rank(self) -> int:
        return sum(self.ranks)

    def describe(self) -> str:
        body = " + ".join(f"(Z/{self.p}^{n})^{r}" for n, r in self.blocks)
        return f"p={self.p}: {body}"


def validate_spec(p: int, blocks) -> PGroupSpec:
    """Validate raw input and build a PGroupSpec.

    Raises NonPrime, EmptyBlocks, ZeroRank or NonIncreasingExponents.
    """
    if not isinstance(p, int) or not _is_prime(p):
        raise NonPrime(f"p = {p!r} is not prime")
    blocks = tuple((int(n), int(r)) for n, r in blocks)
    if not blocks:
        raise EmptyBlocks("at least one block is required")
    for n, r in blocks:
        if n < 1:
            raise SpecError(f"exponent {n} must be >= 1")
        if r < 1:
            raise ZeroRank(f"rank {r} must be >= 1")
    for (n1, _), (n2, _) in zip(blocks, blocks[1:]):
        if n2 <= n1:
            raise NonIncreasingExponents(
                f"exponents must be strictly increasing, got {n1} then {n2}"
            )
    return PGroupSpec(p=p, blocks=blocks)


def spec_from_json(obj: dict) -> PGroupSpec:
    """Parse {"p": int, "blocks": [{"n": int, "r": int}, ...]}.

    Blocks must already be in increasing-exponent order; we reject rather
    than sort.
    """
    if not isinstance(obj, dict) or "p" not in obj or "blocks" not in obj:
        raise SpecError("spec JSON must have 'p' and 'blocks' keys")
    try:
        blocks = [(b["n"], b["r"]) for b in obj["blocks"]]
    except (TypeError, KeyError) as exc:
        raise SpecError(f"malformed blocks entry: {exc}") from exc
    return validate_spec(obj["p"], blocks)


def spec_to_json(spec: PGroupSpec) -> dict:
    return {"p": spec.p, "blocks": [{"n": n, "r": r} for n, r in spec.blocks]}


# --- elements ---

def zero_element(spec: PGroupSpec) -> GroupElement:
    return tuple((0,) * r for _, r in spec.blocks)


def check_element(spec: PGroupSpec, a: GroupElement) -> None:
    if len(a) != spec.num_blocks:
        raise ShapeMismatch(f"expected {spec.num_blocks} blocks, got {len(a)}")
    for vec, (n, r) in zip(a, spec.blocks):
        if len(vec) != r:
            raise ShapeMismatch(f"block vector has length {len(vec)}, expected {r}")


def canonicalize_element(spec: PGroupSpec, a) -> GroupElement:
    a = tuple(tuple(int(x) % m for x in vec) for vec, m in zip(a, spec.moduli))
    check_element(spec, a)
    return a


def add_elements(spec: PGroupSpec, a: GroupElement, b: GroupElement) -> GroupElement:
    """Coordinatewise sum, block i reduced mod p^n_i."""
    check_element(spec, a)
    check_element(spec, b)
    return tuple(
        tuple((x + y) % m for x, y in zip(va, vb))
        for va, vb, m in zip(a, b, spec.moduli)
    )


def neg_element(spec: PGroupSpec, a: GroupElement) -> GroupElement:
    check_element(spec, a)
    return tuple(
        tuple((-x) % m for x in vec) for vec, m in zip(a, spec.moduli)
    )


def scale_element(spec: PGroupSpec, c: int, a: GroupElement) -> GroupElement:
    check_element(spec, a)
    return tuple(
        tuple((c * x) % m for x in vec) for vec, m in zip(a, spec.moduli)
    )


# --- orders ---

def group_order(spec: PGroupSpec) -> int:
    return prod(spec.p ** (n * r) for n, r in spec.blocks)


def gl_order(p: int, r: int) -> int:
    """|GL_r(F_p)| = prod_{k=0}^{r-1} (p^r - p^k)."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    return prod(p ** r - p ** k for k in range(r))


def delta_order_exponent(spec: PGroupSpec) -> int:
    """Exponent a with |ker(reduction mod p)| = p^a.

    Diagonal cells contribute r_i^2 (n_i - 1) free p-adic digits each (the
    diagonal is constrained to vanish mod p); an off-diagonal cell (j,k)
    contributes r_j r_k min(n_j, n_k) digits, the divisibility constraint
    eating the rest.
    """
    a = 0
    for i, (ni, ri) in enumerate(spec.blocks):
        a += ri * ri * (ni - 1)
        for k, (nk, rk) in enumerate(spec.blocks):
            if k != i:
                a += ri * rk * min(ni, nk)
    return a


def delta_order(spec: PGroupSpec) -> int:
    """Number of automorphisms congruent to the identity mod p."""
    return spec.p ** delta_order_exponent(spec)


def pi_order(spec: PGroupSpec) -> int:
    """Order of the product of the blockwise general linear groups."""
    return prod(gl_order(spec.p, r) for _, r in spec.blocks)


def aut_order(spec: PGroupSpec) -> int:
    """|Aut(G)|: the kernel count times the product of GL orders."""
    return delta_order(spec) * pi_order(spec)


# --- derived specifications ---

def derive_pk_spec(spec: PGroupSpec, k: int) -> PGroupSpec:
    """The spec of p^k G: drop blocks with n_i <= k, lower the rest by k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= spec.exponents[-1]:
        raise TrivialResult(f"p^{k} G is trivial for {spec.describe()}")
    blocks = tuple((n - k, r) for n, r in spec.blocks if n > k)
    return PGroupSpec(p=spec.p, blocks=blocks)


def derive_tail_spec(spec: PGroupSpec) -> PGroupSpec:
    """The spec with the first block removed."""
    if spec.num_blocks < 2:
        raise SingleBlock("cannot drop the only block")
    return PGroupSpec(p=spec.p, blocks=spec.blocks[1:])


# --- enumeration ---

def enumerate_elements(spec: PGroupSpec, budget: int = DEFAULT_ELEMENT_BUDGET):
    """Yield every element once, odometer order (last coordinate fastest)."""
    order = group_order(spec)
    if order > budget:
        raise BudgetExceeded(f"group order {order} exceeds budget {budget}")
    ranges = [range(m) for (_, r), m in zip(spec.blocks, spec.moduli) for _ in range(r)]
    ranks = spec.ranks
    for flat in itertools.product(*ranges):
        out = []
        pos = 0
        for r in ranks:
            out.append(flat[pos:pos + r])
            pos += r
        yield tuple(out)
