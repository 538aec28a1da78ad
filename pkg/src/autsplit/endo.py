"""Block-matrix model of the endomorphism ring and automorphism group.

An endomorphism of G = sum of homocyclic blocks is an R x R grid of integer
matrices.  Cell (j, k) maps coordinates of source block k into target block
j; its entries live mod p^n_j and must be divisible by p^(n_j - n_k) whenever
the target exponent exceeds the source exponent (there is no other way to
map a small cyclic group into a bigger one homomorphically).

Convention: column vectors, maps act on the left.  apply(e, v) computes the
usual matrix-times-vector product blockwise, and compose(a, b) applies b
first.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import sympy

from . import matrices as mx
from .errors import (
    ConstraintViolation,
    NotAUnit,
    PreconditionGap,
    ShapeMismatch,
    SingleBlock,
    SpecMismatch,
)
from .groups import (
    GroupElement,
    PGroupSpec,
    aut_order,
    check_element,
    delta_order_exponent,
    derive_pk_spec,
    derive_tail_spec,
)
from .matrices import Matrix


@dataclass(frozen=True)
class BlockEndo:
    """An endomorphism of G as a grid of cells indexed [target][source]."""

    spec: PGroupSpec
    cells: tuple[tuple[Matrix, ...], ...]

    def cell(self, j: int, k: int) -> Matrix:
        return self.cells[j][k]


@dataclass(frozen=True)
class QElement:
    """A tuple of square matrices over F_p, one per block.

    The codomain of the reduction map sigma; invertible tuples are the
    elements of the product of the blockwise general linear groups.
    """

    p: int
    mats: tuple[Matrix, ...]


def hom_divisor(spec: PGroupSpec, j: int, k: int) -> int:
    """p^(n_j - n_k) when positive, else 1: the forced divisor of cell (j,k)."""
    nj = spec.blocks[j][0]
    nk = spec.blocks[k][0]
    return spec.p ** max(nj - nk, 0)


def check_shape(e: BlockEndo) -> None:
    spec = e.spec
    if len(e.cells) != spec.num_blocks:
        raise ShapeMismatch(f"expected {spec.num_blocks} cell rows")
    for j, row in enumerate(e.cells):
        if len(row) != spec.num_blocks:
            raise ShapeMismatch(f"cell row {j} has {len(row)} cells")
        rj = spec.ranks[j]
        for k, cell in enumerate(row):
            if mx.shape(cell) != (rj, spec.ranks[k]):
                raise ShapeMismatch(
                    f"cell ({j},{k}) has shape {mx.shape(cell)}, "
                    f"expected ({rj},{spec.ranks[k]})"
                )


def check_hom_constraints(e: BlockEndo) -> bool:
    """True iff every cell's entries carry the forced p-power divisor."""
    check_shape(e)
    spec = e.spec
    for j in range(spec.num_blocks):
        for k in range(spec.num_blocks):
            d = hom_divisor(spec, j, k)
            if d > 1 and any(x % d for row in e.cells[j][k] for x in row):
                return False
    return True


def block_endo(spec: PGroupSpec, cells) -> BlockEndo:
    """Canonicalize raw cell data into a BlockEndo, enforcing constraints."""
    cells = tuple(
        tuple(mx.mat(cell, m) for cell in row)
        for row, m in zip(cells, spec.moduli)
    )
    e = BlockEndo(spec=spec, cells=cells)
    check_shape(e)
    if not check_hom_constraints(e):
        raise ConstraintViolation("cell entries violate the divisibility constraint")
    return e


def zero_endo(spec: PGroupSpec) -> BlockEndo:
    cells = tuple(
        tuple(mx.zeros(rj, rk) for rk in spec.ranks) for rj in spec.ranks
    )
    return BlockEndo(spec=spec, cells=cells)


def identity_endo(spec: PGroupSpec) -> BlockEndo:
    cells = tuple(
        tuple(mx.identity(rj) if j == k else mx.zeros(rj, rk)
              for k, rk in enumerate(spec.ranks))
        for j, rj in enumerate(spec.ranks)
    )
    return BlockEndo(spec=spec, cells=cells)


def _same_spec(a: BlockEndo, b: BlockEndo) -> None:
    if a.spec != b.spec:
        raise SpecMismatch("endomorphisms of different groups")


def add_endos(a: BlockEndo, b: BlockEndo) -> BlockEndo:
    _same_spec(a, b)
    spec = a.spec
    cells = tuple(
        tuple(mx.mat_add(ca, cb, m) for ca, cb in zip(ra, rb))
        for ra, rb, m in zip(a.cells, b.cells, spec.moduli)
    )
    return BlockEndo(spec=spec, cells=cells)


def neg_endo(a: BlockEndo) -> BlockEndo:
    cells = tuple(
        tuple(mx.mat_neg(c, m) for c in row)
        for row, m in zip(a.cells, a.spec.moduli)
    )
    return BlockEndo(spec=a.spec, cells=cells)


def sub_endos(a: BlockEndo, b: BlockEndo) -> BlockEndo:
    return add_endos(a, neg_endo(b))


def compose(a: BlockEndo, b: BlockEndo) -> BlockEndo:
    """a after b.  Cell (j,k) = sum_l a(j,l) b(l,k), reduced mod p^n_j.

    Well-defined despite the mixed moduli: perturbing b(l,k) by p^n_l
    changes the sum by a(j,l) p^n_l, which the divisibility constraint on
    a(j,l) pushes into p^n_j Z.
    """
    _same_spec(a, b)
    spec = a.spec
    R = spec.num_blocks
    ranks = spec.ranks
    out = []
    for j in range(R):
        m = spec.moduli[j]
        row = []
        for k in range(R):
            acc = None
            for l in range(R):
                term = mx.mat_mul(a.cells[j][l], b.cells[l][k], m)
                acc = term if acc is None else mx.mat_add(acc, term, m)
            row.append(acc if acc is not None else mx.zeros(ranks[j], ranks[k]))
        out.append(tuple(row))
    result = BlockEndo(spec=spec, cells=tuple(out))
    if not check_hom_constraints(result):  # cannot happen for valid inputs
        raise ConstraintViolation("composition broke the divisibility constraint")
    return result


def apply(e: BlockEndo, v: GroupElement) -> GroupElement:
    """Matrix action on an element: block j = sum_k cell(j,k) v_k."""
    spec = e.spec
    check_element(spec, v)
    out = []
    for j in range(spec.num_blocks):
        m = spec.moduli[j]
        acc = [0] * spec.ranks[j]
        for k in range(spec.num_blocks):
            cell = e.cells[j][k]
            vk = v[k]
            for i, row in enumerate(cell):
                acc[i] += sum(x * y for x, y in zip(row, vk))
        out.append(tuple(x % m for x in acc))
    return tuple(out)


def pow_endo(e: BlockEndo, m: int) -> BlockEndo:
    """e composed with itself m times (m >= 0)."""
    if m < 0:
        raise ValueError("negative power; invert first")
    result = identity_endo(e.spec)
    base = e
    while m:
        if m & 1:
            result = compose(result, base)
        base = compose(base, base)
        m >>= 1
    return result


# --- the reduction map ---

def sigma(e: BlockEndo) -> QElement:
    """Reduce the diagonal cells mod p: the image in the matrix tuple monoid."""
    p = e.spec.p
    return QElement(p=p, mats=tuple(
        mx.mat(e.cells[i][i], p) for i in range(e.spec.num_blocks)
    ))


def identity_q(spec: PGroupSpec) -> QElement:
    return QElement(p=spec.p, mats=tuple(mx.identity(r) for r in spec.ranks))


def q_mul(a: QElement, b: QElement) -> QElement:
    if a.p != b.p or len(a.mats) != len(b.mats):
        raise SpecMismatch("tuple elements of different shapes")
    return QElement(p=a.p, mats=tuple(
        mx.mat_mul(x, y, a.p) for x, y in zip(a.mats, b.mats)
    ))


def q_is_invertible(q: QElement) -> bool:
    return all(mx.is_invertible_mod_p(m, q.p) for m in q.mats)


def q_order(q: QElement) -> int:
    """Multiplicative order of an invertible tuple; iterative, desk scale."""
    if not q_is_invertible(q):
        raise NotAUnit("tuple is not invertible mod p")
    ident = QElement(p=q.p, mats=tuple(mx.identity(len(m)) for m in q.mats))
    x = q
    o = 1
    while x != ident:
        x = q_mul(x, q)
        o += 1
    return o


# --- units ---

def is_automorphism(e: BlockEndo) -> bool:
    """Unit test: every diagonal cell invertible mod p.

    This is exactly invertibility of the induced maps on the blocks of
    G/pG; the brute-force bijectivity oracle cross-checks it on small
    groups.
    """
    if not check_hom_constraints(e):
        raise ConstraintViolation("divisibility constraint violated")
    p = e.spec.p
    return all(
        mx.is_invertible_mod_p(e.cells[i][i], p)
        for i in range(e.spec.num_blocks)
    )


def weighted_lift(e: BlockEndo) -> Matrix:
    """Flatten to a single square matrix by exponent weighting.

    Entry block (j,k) becomes cell(j,k) * p^(n_k - n_j), the division being
    exact by the divisibility constraint when n_k < n_j.  Mod p the result
    is block lower-triangular with the diagonal cells mod p on the diagonal,
    so it is invertible mod p^n_R precisely when e is a unit.  Products are
    respected modulo p^n_k in block column k.
    """
    if not check_hom_constraints(e):
        raise ConstraintViolation("divisibility constraint violated")
    spec = e.spec
    p = spec.p
    big = spec.moduli[-1]
    D = spec.total_rank
    offs = []
    pos = 0
    for r in spec.ranks:
        offs.append(pos)
        pos += r
    out = [[0] * D for _ in range(D)]
    for j, (nj, rj) in enumerate(spec.blocks):
        for k, (nk, rk) in enumerate(spec.blocks):
            cell = e.cells[j][k]
            if nk >= nj:
                f = p ** (nk - nj)
                for a in range(rj):
                    for b in range(rk):
                        out[offs[j] + a][offs[k] + b] = cell[a][b] * f % big
            else:
                d = p ** (nj - nk)
                for a in range(rj):
                    for b in range(rk):
                        x = cell[a][b]
                        if x % d:
                            raise ConstraintViolation(
                                f"entry {x} of cell ({j},{k}) not divisible by {d}"
                            )
                        out[offs[j] + a][offs[k] + b] = x // d % big
    return tuple(tuple(row) for row in out)


def invert(e: BlockEndo) -> BlockEndo:
    """Group inverse of a unit.

    Inverts the weighted lift over Z/p^n_R with unit pivots, unscales the
    blocks back (asserting the divisibilities), and certifies the result by
    composing.
    """
    if not is_automorphism(e):
        raise NotAUnit("endomorphism is not an automorphism")
    spec = e.spec
    p = spec.p
    big = spec.moduli[-1]
    L = weighted_lift(e)
    M = mx.inv_mod(L, big, p)
    offs = []
    pos = 0
    for r in spec.ranks:
        offs.append(pos)
        pos += r
    cells = []
    for j, (nj, rj) in enumerate(spec.blocks):
        m = spec.moduli[j]
        row = []
        for k, (nk, rk) in enumerate(spec.blocks):
            cell = []
            for a in range(rj):
                crow = []
                for b in range(rk):
                    x = M[offs[j] + a][offs[k] + b]
                    if nj >= nk:
                        crow.append(x * p ** (nj - nk) % m)
                    else:
                        d = p ** (nk - nj)
                        if x % d:
                            raise ConstraintViolation(
                                "unscaling divisibility failed; not a unit?"
                            )
                        crow.append(x // d % m)
                cell.append(tuple(crow))
            row.append(tuple(cell))
        cells.append(tuple(row))
    result = BlockEndo(spec=spec, cells=tuple(cells))
    if compose(e, result) != identity_endo(spec):
        raise NotAUnit("inverse certification failed")
    return result


def in_delta(e: BlockEndo) -> bool:
    """Membership in the kernel of the reduction map.

    Equivalent formulations: e is a unit with trivial reduction, or
    e - identity has all diagonal cells vanishing mod p.
    """
    if not check_hom_constraints(e):
        return False
    return sigma(e) == identity_q(e.spec)


@lru_cache(maxsize=None)
def _aut_order_factors(spec: PGroupSpec) -> tuple[tuple[int, int], ...]:
    """Prime factorization of |Aut(G)| as ((q, multiplicity), ...).

    The p-part is the kernel exponent plus p^(r(r-1)/2) from each GL factor;
    the rest comes from factoring p^k - 1 terms.
    """
    p = spec.p
    factors: dict[int, int] = {p: delta_order_exponent(spec)}
    for _, r in spec.blocks:
        factors[p] += r * (r - 1) // 2
        for k in range(1, r + 1):
            for q, mult in sympy.factorint(p ** k - 1).items():
                factors[q] = factors.get(q, 0) + mult
    return tuple(sorted((q, m) for q, m in factors.items() if m > 0))


def element_order(e: BlockEndo) -> int:
    """Least m >= 1 with e^m = identity, using the factored group order."""
    if not is_automorphism(e):
        raise NotAUnit("order is defined for units only")
    spec = e.spec
    ident = identity_endo(spec)
    total = aut_order(spec)
    order = 1
    for q, mult in _aut_order_factors(spec):
        t = pow_endo(e, total // q ** mult)
        while t != ident:
            t = pow_endo(t, q)
            order *= q
    return order


# --- induced maps on derived groups ---

def restrict_to_pk(e: BlockEndo, k: int) -> BlockEndo:
    """The endomorphism a unit induces on p^k G.

    In coordinates (a p^k G element with block-i coordinate w_i corresponds
    to the G element with coordinate p^k w_i), the induced cell is just the
    original cell reduced mod p^(n_j - k), restricted to surviving blocks.
    """
    if not is_automorphism(e):
        raise NotAUnit("restriction is defined for units here")
    spec = e.spec
    sub = derive_pk_spec(spec, k)  # raises TrivialResult when k too large
    keep = [i for i, (n, _) in enumerate(spec.blocks) if n > k]
    cells = tuple(
        tuple(mx.mat(e.cells[j][l], spec.p ** (spec.blocks[j][0] - k)) for l in keep)
        for j in keep
    )
    return BlockEndo(spec=sub, cells=cells)


def truncate_tail(e: BlockEndo) -> BlockEndo:
    """Delete row and column 1 of cells; an endomorphism of the tail group.

    Not multiplicative on all units (cross terms through block 1 survive
    mod the larger moduli); it is multiplicative at the mod-p level.
    """
    spec = e.spec
    sub = derive_tail_spec(spec)  # raises SingleBlock
    cells = tuple(tuple(row[1:]) for row in e.cells[1:])
    return BlockEndo(spec=sub, cells=cells)


def embed_tail(e2: BlockEndo, spec: PGroupSpec) -> BlockEndo:
    """Extend a tail endomorphism by the identity on block 1.

    Multiplicative and unit-preserving.  Meaningful as a section of the
    truncation mainly when the first block is elementary (n_1 = 1); we warn
    otherwise.
    """
    if spec.num_blocks < 2:
        raise SingleBlock("ambient spec has a single block")
    if e2.spec != derive_tail_spec(spec):
        raise SpecMismatch("operand is not an endomorphism of the tail group")
    if spec.blocks[0][0] != 1:
        warnings.warn("embedding a tail with non-elementary first block",
                      stacklevel=2)
    r1 = spec.ranks[0]
    top = (mx.identity(r1),) + tuple(
        mx.zeros(r1, rk) for rk in spec.ranks[1:]
    )
    rows = [top]
    for j, row in enumerate(e2.cells, start=1):
        rows.append((mx.zeros(spec.ranks[j], r1),) + row)
    return BlockEndo(spec=spec, cells=tuple(rows))


def corner_mu(e: BlockEndo, strict: bool = True) -> Matrix:
    """The (1,1) cell of a unit, as a map of the first block.

    Multiplicative exactly when n_1 = 2 and every later exponent is >= 4:
    the cross terms through block k then carry a factor p^(n_k - n_1) which
    dies mod p^2.  Outside that range the cell is still returned when
    strict=False, with a warning, but products are not respected.
    """
    if not is_automorphism(e):
        raise NotAUnit("corner map is taken on units")
    spec = e.spec
    gap_ok = spec.blocks[0][0] == 2 and all(n >= 4 for n, _ in spec.blocks[1:])
    if not gap_ok:
        if strict:
            raise PreconditionGap(
                "corner map needs first exponent 2 and later exponents >= 4"
            )
        warnings.warn("corner map is not multiplicative for this spec",
                      stacklevel=2)
    return e.cells[0][0]


# --- serialization ---

def endo_to_json(e: BlockEndo) -> dict:
    return {"cells": [[[list(r) for r in cell] for cell in row] for row in e.cells]}


def endo_from_json(spec: PGroupSpec, obj: dict) -> BlockEndo:
    """Read {"cells": [[cell rows]]} indexed [target][source].

    Rejects divisibility violations, naming the offending cell.
    """
    if not isinstance(obj, dict) or "cells" not in obj:
        raise ConstraintViolation("endomorphism JSON must have a 'cells' key")
    cells = obj["cells"]
    R = spec.num_blocks
    if len(cells) != R or any(len(row) != R for row in cells):
        raise ShapeMismatch(f"expected a {R}x{R} cell grid")
    out = []
    for j, row in enumerate(cells):
        m = spec.moduli[j]
        out.append(tuple(mx.mat(cell, m) for cell in row))
    e = BlockEndo(spec=spec, cells=tuple(out))
    check_shape(e)
    for j in range(R):
        for k in range(R):
            d = hom_divisor(spec, j, k)
            if d > 1 and any(x % d for r in e.cells[j][k] for x in r):
                raise ConstraintViolation(
                    f"cell ({j},{k}) violates divisibility by {d}"
                )
    return e


def q_to_json(q: QElement) -> list:
    return [[list(r) for r in m] for m in q.mats]


def q_from_json(spec: PGroupSpec, obj: list) -> QElement:
    if len(obj) != spec.num_blocks:
        raise ShapeMismatch("wrong number of block matrices")
    mats = tuple(mx.mat(m, spec.p) for m in obj)
    for m, r in zip(mats, spec.ranks):
        if mx.shape(m) != (r, r):
            raise ShapeMismatch(f"block matrix has shape {mx.shape(m)}")
    return QElement(p=spec.p, mats=mats)
