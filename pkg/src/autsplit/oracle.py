"""Independent brute-force ground truth.

Nothing in this module trusts the closed-form criteria it is used to check:
bijectivity is decided by applying a map to every group element, kernel
membership by direct enumeration, and splitting by an exhaustive search over
generator lifts.  Budgets are explicit and enumeration order is fixed, so
every run is reproducible.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import matrices as mx
from .endo import (
    BlockEndo,
    QElement,
    add_endos,
    compose,
    identity_endo,
    identity_q,
    is_automorphism,
    pow_endo,
    q_mul,
    q_order,
    sigma,
    zero_endo,
)
from .errors import (
    BudgetExceeded,
    Overflow,
    PreconditionViolation,
    RankTooSmall,
)
from .groups import (
    DEFAULT_DELTA_BUDGET,
    DEFAULT_ELEMENT_BUDGET,
    PGroupSpec,
    delta_order,
    group_order,
    gl_order,
    pi_order,
)
from .matrices import Matrix

#: Default cap on the number of lift assignments tried by the search.
DEFAULT_ASSIGNMENT_BUDGET = 2 ** 22


# --- vectorized element table ---

@lru_cache(maxsize=None)
def _element_table(spec: PGroupSpec):
    """All group elements as rows of flat coordinates, odometer order."""
    mods = [m for (_, r), m in zip(spec.blocks, spec.moduli) for _ in range(r)]
    grids = np.meshgrid(*[np.arange(m, dtype=np.int64) for m in mods],
                        indexing="ij")
    table = np.stack([g.reshape(-1) for g in grids], axis=1)
    table.flags.writeable = False
    return table, np.array(mods, dtype=np.int64)


def flat_matrix(e: BlockEndo) -> np.ndarray:
    """The cells pasted into one (total_rank x total_rank) integer matrix."""
    spec = e.spec
    D = spec.total_rank
    out = np.zeros((D, D), dtype=np.int64)
    oj = 0
    for j, rj in enumerate(spec.ranks):
        ok = 0
        for k, rk in enumerate(spec.ranks):
            out[oj:oj + rj, ok:ok + rk] = np.array(e.cells[j][k], dtype=np.int64)
            ok += rk
        oj += rj
    return out


def brute_force_is_bijective(e: BlockEndo,
                             budget: int = DEFAULT_ELEMENT_BUDGET) -> bool:
    """Apply e to every element; true iff the image has no collisions."""
    spec = e.spec
    order = group_order(spec)
    if order > budget:
        raise BudgetExceeded(f"group order {order} exceeds budget {budget}")
    table, mods = _element_table(spec)
    img = (table @ flat_matrix(e).T) % mods
    weights = np.concatenate(([1], np.cumprod(mods[:-1])))
    packed = img @ weights
    return int(np.unique(packed).size) == order


# --- enumeration of the kernel and of all endomorphisms ---

def _free_entry_ranges(spec: PGroupSpec, kernel: bool):
    """Per-entry (j, k, row, col, step, count) descriptors, odometer order.

    With kernel=True the diagonal cells are restricted to multiples of p.
    """
    p = spec.p
    out = []
    for j, (nj, rj) in enumerate(spec.blocks):
        for k, (nk, rk) in enumerate(spec.blocks):
            if j == k:
                step = p if kernel else 1
                count = p ** (nj - 1) if kernel else p ** nj
            else:
                step = p ** max(nj - nk, 0)
                count = p ** min(nj, nk)
            for a in range(rj):
                for b in range(rk):
                    out.append((j, k, a, b, step, count))
    return out


def _endo_stream(spec: PGroupSpec, kernel: bool, offset: BlockEndo | None):
    entries = _free_entry_ranges(spec, kernel)
    base = offset.cells if offset is not None else None
    for combo in itertools.product(*[range(c) for (_, _, _, _, _, c) in entries]):
        grid = [
            [[[0] * rk for _ in range(rj)] for rk in spec.ranks]
            for rj in spec.ranks
        ]
        for (j, k, a, b, step, _), t in zip(entries, combo):
            grid[j][k][a][b] = step * t
        if base is not None:
            for j, m in enumerate(spec.moduli):
                for k in range(spec.num_blocks):
                    cell = grid[j][k]
                    off = base[j][k]
                    for a, row in enumerate(cell):
                        for b in range(len(row)):
                            row[b] = (row[b] + off[a][b]) % m
        yield BlockEndo(
            spec=spec,
            cells=tuple(
                tuple(tuple(tuple(r) for r in cell) for cell in row)
                for row in grid
            ),
        )


def enumerate_delta(spec: PGroupSpec, budget: int = DEFAULT_DELTA_BUDGET):
    """Yield the kernel of reduction mod p: identity plus the ideal, odometer order."""
    size = delta_order(spec)
    if size > budget:
        raise BudgetExceeded(f"kernel size {size} exceeds budget {budget}")
    yield from _endo_stream(spec, kernel=True, offset=identity_endo(spec))


def enumerate_ideal(spec: PGroupSpec, budget: int = DEFAULT_DELTA_BUDGET):
    """Yield the ideal of endomorphisms with diagonal cells vanishing mod p."""
    size = delta_order(spec)
    if size > budget:
        raise BudgetExceeded(f"ideal size {size} exceeds budget {budget}")
    yield from _endo_stream(spec, kernel=True, offset=None)


def endo_count(spec: PGroupSpec) -> int:
    """Number of endomorphisms of G."""
    total = 1
    for _, _, _, _, _, count in _free_entry_ranges(spec, kernel=False):
        total *= count
    return total


def enumerate_endos(spec: PGroupSpec, budget: int = DEFAULT_ELEMENT_BUDGET):
    """Yield every endomorphism once, odometer order over free parameters."""
    total = endo_count(spec)
    if total > budget:
        raise BudgetExceeded(f"endomorphism count {total} exceeds budget {budget}")
    yield from _endo_stream(spec, kernel=False, offset=None)


def count_bijective_endos(spec: PGroupSpec,
                          endo_budget: int = DEFAULT_ELEMENT_BUDGET,
                          element_budget: int = DEFAULT_ELEMENT_BUDGET) -> int:
    """Brute-force |Aut(G)|: test every endomorphism for bijectivity."""
    return sum(
        1 for e in enumerate_endos(spec, budget=endo_budget)
        if brute_force_is_bijective(e, budget=element_budget)
    )


# --- random endomorphisms (seeded, for sampling-style checks) ---

def random_endo(spec: PGroupSpec, rng: random.Random) -> BlockEndo:
    """A uniformly random endomorphism respecting the divisibility constraints."""
    cells = []
    for j, (nj, rj) in enumerate(spec.blocks):
        row = []
        for k, (nk, rk) in enumerate(spec.blocks):
            step = spec.p ** max(nj - nk, 0)
            count = spec.p ** min(nj, nk)
            row.append(tuple(
                tuple(step * rng.randrange(count) for _ in range(rk))
                for _ in range(rj)
            ))
        cells.append(tuple(row))
    return BlockEndo(spec=spec, cells=tuple(cells))


def random_unit(spec: PGroupSpec, rng: random.Random,
                max_tries: int = 1000) -> BlockEndo:
    for _ in range(max_tries):
        e = random_endo(spec, rng)
        if is_automorphism(e):
            return e
    raise RuntimeError("failed to sample a unit; p too small and unlucky")


def random_ideal_element(spec: PGroupSpec, rng: random.Random) -> BlockEndo:
    """Random element of the ideal (diagonal cells vanish mod p)."""
    p = spec.p
    cells = []
    for j, (nj, rj) in enumerate(spec.blocks):
        row = []
        for k, (nk, rk) in enumerate(spec.blocks):
            if j == k:
                step, count = p, p ** (nj - 1)
            else:
                step, count = p ** max(nj - nk, 0), p ** min(nj, nk)
            row.append(tuple(
                tuple(step * rng.randrange(count) for _ in range(rk))
                for _ in range(rj)
            ))
        cells.append(tuple(row))
    return BlockEndo(spec=spec, cells=tuple(cells))


def random_delta_element(spec: PGroupSpec, rng: random.Random) -> BlockEndo:
    return add_endos(identity_endo(spec), random_ideal_element(spec, rng))


# --- agreement report: unit criterion vs brute force ---

@dataclass(frozen=True)
class AgreementReport:
    spec: PGroupSpec
    checked: int
    disagreements: int
    exhaustive: bool
    seed: int

    def to_json(self) -> dict:
        from .groups import spec_to_json
        return {
            "spec": spec_to_json(self.spec),
            "checked": self.checked,
            "disagreements": self.disagreements,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
        }


def bijective_equivalence_report(spec: PGroupSpec, samples: int = 10_000,
                                 seed: int = 0,
                                 endo_budget: int = 2 ** 14,
                                 element_budget: int = DEFAULT_ELEMENT_BUDGET,
                                 ) -> AgreementReport:
    """Compare is_automorphism with brute-force bijectivity.

    Exhausts the endomorphism set when it fits in endo_budget, otherwise
    checks structured edge cases plus `samples` random endomorphisms.
    """
    def agree(e: BlockEndo) -> bool:
        return is_automorphism(e) == brute_force_is_bijective(
            e, budget=element_budget)

    checked = 0
    bad = 0
    if endo_count(spec) <= endo_budget:
        for e in enumerate_endos(spec, budget=endo_budget):
            checked += 1
            bad += 0 if agree(e) else 1
        return AgreementReport(spec, checked, bad, exhaustive=True, seed=seed)

    rng = random.Random(seed)
    structured = [identity_endo(spec), zero_endo(spec)]
    structured += [random_delta_element(spec, rng) for _ in range(16)]
    for e in structured:
        checked += 1
        bad += 0 if agree(e) else 1
    for _ in range(samples):
        e = random_endo(spec, rng)
        checked += 1
        bad += 0 if agree(e) else 1
    return AgreementReport(spec, checked, bad, exhaustive=False, seed=seed)


# --- subgroup closure ---

def dimino_closure(generators, cap: int, mul=None, identity=None):
    """Incrementally generate the subgroup spanned by `generators`.

    Aborts with Overflow the moment the size would exceed `cap` (expected
    control flow during pruned searches).  The element type is inferred for
    the two common cases; pass mul/identity explicitly otherwise.
    """
    generators = list(generators)
    if mul is None or identity is None:
        if not generators:
            raise ValueError("need generators or explicit mul/identity")
        g0 = generators[0]
        if isinstance(g0, BlockEndo):
            mul, identity = compose, identity_endo(g0.spec)
        elif isinstance(g0, QElement):
            mul, identity = q_mul, QElement(
                p=g0.p, mats=tuple(mx.identity(len(m)) for m in g0.mats))
        else:
            raise TypeError(f"cannot infer group operation for {type(g0)}")
    seen = {identity}
    elems = [identity]
    frontier = [identity]
    while frontier:
        new = []
        for x in frontier:
            for g in generators:
                y = mul(x, g)
                if y not in seen:
                    if len(seen) >= cap:
                        raise Overflow(f"closure exceeds cap {cap}")
                    seen.add(y)
                    elems.append(y)
                    new.append(y)
        frontier = new
    return elems


# --- generators of the quotient product ---

@dataclass(frozen=True)
class GeneratorSearchResult:
    generators: tuple[QElement, ...]
    seed: int
    per_block: tuple[int, ...]  # number of generators contributed per block


def _matrix_order_mod_p(a: Matrix, p: int, cap: int) -> int:
    ident = mx.identity(len(a))
    x = a
    o = 1
    while x != ident:
        x = mx.mat_mul(x, a, p)
        o += 1
        if o > cap:
            raise RuntimeError("order exceeds group order; not invertible?")
    return o


def _gl_generators(p: int, r: int, rng: random.Random):
    """Generators of GL_r(F_p): at most two, found by seeded random search,
    falling back to transvections plus a primitive-root diagonal.

    Pairs whose orders are coprime to p are preferred: the lift search then
    prunes their whole candidate coset down to a few conjugacy classes.
    """
    target = gl_order(p, r)
    if target == 1:
        return []
    if r == 1:
        zeta = sympy_primitive_root(p)
        return [((zeta,),)]
    ident = mx.identity(r)

    def closure_size_is(mats, cap):
        try:
            got = dimino_closure(mats, cap,
                                 mul=lambda a, b: mx.mat_mul(a, b, p),
                                 identity=ident)
        except Overflow:
            return False
        return len(got) == cap

    def random_invertible():
        while True:
            cand = tuple(tuple(rng.randrange(p) for _ in range(r))
                         for _ in range(r))
            if mx.is_invertible_mod_p(cand, p):
                return cand

    for want_p_prime in (True, False):
        for _ in range(400 if want_p_prime else 200):
            pair = [random_invertible(), random_invertible()]
            if want_p_prime and any(
                    _matrix_order_mod_p(m, p, target) % p == 0 for m in pair):
                continue
            if closure_size_is(pair, target):
                return pair
    # fallback: all elementary transvections plus diag(zeta, 1, ..., 1)
    gens = []
    for i in range(r):
        for j in range(r):
            if i != j:
                t = [list(row) for row in ident]
                t[i][j] = 1
                gens.append(tuple(tuple(row) for row in t))
    zeta = sympy_primitive_root(p)
    d = [list(row) for row in ident]
    d[0][0] = zeta
    gens.append(tuple(tuple(row) for row in d))
    if not closure_size_is(gens, target):
        raise RuntimeError("fallback generators failed to generate")
    return gens


def sympy_primitive_root(p: int) -> int:
    import sympy
    return int(sympy.primitive_root(p))


def find_generators_of_Q(spec: PGroupSpec, seed: int = 0,
                         closure_budget: int = DEFAULT_ELEMENT_BUDGET,
                         ) -> GeneratorSearchResult:
    """A generating set of the product of blockwise GL groups.

    Per-block generators (closure-verified, at most two per block for ranks
    >= 2) embedded with identity matrices elsewhere.  Deterministic for a
    fixed seed.
    """
    if pi_order(spec) > closure_budget:
        raise BudgetExceeded("quotient too large to verify generators")
    rng = random.Random(seed)
    gens: list[QElement] = []
    per_block = []
    idents = [mx.identity(r) for r in spec.ranks]
    for i, (_, r) in enumerate(spec.blocks):
        block_gens = _gl_generators(spec.p, r, rng)
        per_block.append(len(block_gens))
        for g in block_gens:
            mats = list(idents)
            mats[i] = g
            gens.append(QElement(p=spec.p, mats=tuple(mats)))
    return GeneratorSearchResult(generators=tuple(gens), seed=seed,
                                 per_block=tuple(per_block))


# --- complement search over generator lifts ---

@dataclass(frozen=True)
class SearchResult:
    """Outcome of the exhaustive lift search.

    outcome is one of Found / NotFound / BudgetExceeded; evidence says how a
    NotFound was reached ("exhausted" is a proof of non-splitting,
    "obstruction" means the order-p coset pre-pass already ruled a section
    out).
    """

    spec: PGroupSpec
    outcome: str
    evidence: str
    generators: tuple[QElement, ...] = ()
    images: tuple[BlockEndo, ...] = ()
    assignments_tried: int = 0
    seed: int = 0

    def to_json(self) -> dict:
        from .endo import endo_to_json, q_to_json
        from .groups import spec_to_json
        out = {
            "spec": spec_to_json(self.spec),
            "verdict": self.outcome,
            "evidence": self.evidence,
            "assignments_tried": self.assignments_tried,
            "seed": self.seed,
        }
        if self.outcome == "Found":
            out["generators"] = [q_to_json(g) for g in self.generators]
            out["images"] = [endo_to_json(e) for e in self.images]
        return out


def _diagonal_int_lift(spec: PGroupSpec, q: QElement) -> BlockEndo:
    """Entrywise integer lift of a quotient element, block diagonal."""
    cells = tuple(
        tuple(
            tuple(tuple(int(x) for x in row) for row in q.mats[j])
            if j == k else mx.zeros(spec.ranks[j], spec.ranks[k])
            for k in range(spec.num_blocks)
        )
        for j in range(spec.num_blocks)
    )
    return BlockEndo(spec=spec, cells=cells)


class _EndoRep:
    """Search representation for multi-block specs: plain BlockEndo values."""

    def __init__(self, spec: PGroupSpec):
        self.spec = spec
        self.identity = identity_endo(spec)
        self._iq = identity_q(spec)

    def mul(self, a, b):
        return compose(a, b)

    def power(self, a, m):
        return pow_endo(a, m)

    def sigma_is_identity(self, a):
        return sigma(a) == self._iq

    def lift(self, q: QElement):
        return _diagonal_int_lift(self.spec, q)

    def invert(self, a):
        from .endo import invert
        return invert(a)

    def to_endo(self, a):
        return a


class _MatrixRep:
    """Search representation for single-block specs: raw matrices mod p^n.

    Avoids per-step dataclass construction in the hot closure loop.
    """

    def __init__(self, spec: PGroupSpec):
        self.spec = spec
        self.p = spec.p
        self.q = spec.moduli[0]
        self.r = spec.ranks[0]
        self.identity = mx.identity(self.r)

    def mul(self, a, b):
        return mx.mat_mul(a, b, self.q)

    def power(self, a, m):
        return mx.mat_pow(a, m, self.q)

    def sigma_is_identity(self, a):
        p = self.p
        return all(
            (x - (1 if i == j else 0)) % p == 0
            for i, row in enumerate(a) for j, x in enumerate(row)
        )

    def lift(self, q: QElement):
        return tuple(tuple(int(x) for x in row) for row in q.mats[0])

    def invert(self, a):
        return mx.inv_mod(a, self.q, self.p)

    def to_endo(self, a):
        return BlockEndo(spec=self.spec, cells=((a,),))


def _complement_closure_ok(hs, rep, cap) -> bool:
    """Closure with early aborts: any kernel hit or size overflow fails."""
    seen = {rep.identity}
    frontier = [rep.identity]
    mul = rep.mul
    while frontier:
        new = []
        for x in frontier:
            for g in hs:
                y = mul(x, g)
                if y not in seen:
                    if rep.sigma_is_identity(y):
                        return False
                    if len(seen) >= cap:
                        return False
                    seen.add(y)
                    new.append(y)
        frontier = new
    return len(seen) == cap


def complement_lift_search(spec: PGroupSpec,
                           seed: int = 0,
                           assignment_budget: int = DEFAULT_ASSIGNMENT_BUDGET,
                           delta_budget: int = DEFAULT_DELTA_BUDGET,
                           closure_budget: int = DEFAULT_ELEMENT_BUDGET,
                           pre_obstruction: bool = True,
                           time_budget: float | None = None) -> SearchResult:
    """Decide splitting by exhausting generator-lift assignments.

    Fix a generating set {g} of the quotient product.  Any section's images
    of the generators are lifts h_g in the coset (integer lift of g) times
    the kernel, generate a subgroup of exactly the quotient's order, and
    meet the kernel trivially; conversely such an assignment spans a
    complement.  Trying every assignment is therefore a complete decision
    procedure: NotFound after exhaustion proves non-splitting.

    Pruning, all soundness-preserving: lifts must have the same order as the
    generator they cover (a complement forces this); the first generator's
    lift is only tried up to kernel-conjugacy (conjugating a complement by a
    kernel element yields another complement); for each assignment the
    pairwise product orders are checked before running the closure.
    """
    start = time.monotonic()
    pi = pi_order(spec)
    if pi > closure_budget:
        return SearchResult(spec, "BudgetExceeded", "quotient too large",
                            seed=seed)
    if delta_order(spec) > delta_budget:
        return SearchResult(spec, "BudgetExceeded", "kernel too large",
                            seed=seed)
    gen_res = find_generators_of_Q(spec, seed=seed,
                                   closure_budget=closure_budget)
    gens = gen_res.generators
    if not gens:  # trivial quotient: the identity is a complement
        return SearchResult(spec, "Found", "trivial quotient",
                            generators=(), images=(), seed=seed)

    if pre_obstruction and spec.ranks[0] >= 2:
        try:
            report = order_p_coset_obstruction(spec, budget=delta_budget)
            if report.verdict == "NoOrderPLift":
                return SearchResult(spec, "NotFound", "obstruction", seed=seed)
        except (RankTooSmall, BudgetExceeded):
            pass

    rep = _MatrixRep(spec) if spec.num_blocks == 1 else _EndoRep(spec)
    deltas = list(enumerate_delta(spec, budget=delta_budget))
    if spec.num_blocks == 1:
        deltas = [d.cells[0][0] for d in deltas]

    orders = [q_order(g) for g in gens]
    candidates = []
    for g, og in zip(gens, orders):
        base = rep.lift(g)
        cands = []
        for d in deltas:
            h = rep.mul(base, d)
            if rep.power(h, og) == rep.identity:
                cands.append(h)
        if not cands:
            return SearchResult(spec, "NotFound", "exhausted",
                                assignments_tried=0, seed=seed)
        candidates.append(cands)

    # first generator up to kernel-conjugacy
    delta_invs = [rep.invert(d) for d in deltas]
    reps0 = []
    seen = set()
    for h in candidates[0]:
        if h in seen:
            continue
        reps0.append(h)
        for d, dinv in zip(deltas, delta_invs):
            seen.add(rep.mul(rep.mul(dinv, h), d))
    candidates[0] = reps0

    # ord(xy) = ord(yx), so unordered pairs suffice for the pre-check
    pair_orders = {}
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            pair_orders[(i, j)] = q_order(q_mul(gens[i], gens[j]))

    tried = 0
    for assignment in itertools.product(*candidates):
        tried += 1
        if tried > assignment_budget:
            return SearchResult(spec, "BudgetExceeded", "assignment budget",
                                assignments_tried=tried - 1, seed=seed)
        if time_budget is not None and time.monotonic() - start > time_budget:
            return SearchResult(spec, "BudgetExceeded", "time budget",
                                assignments_tried=tried, seed=seed)
        ok = True
        for (i, j), o in pair_orders.items():
            prod = rep.mul(assignment[i], assignment[j])
            if rep.power(prod, o) != rep.identity:
                ok = False
                break
        if not ok:
            continue
        if _complement_closure_ok(assignment, rep, pi):
            images = tuple(rep.to_endo(h) for h in assignment)
            return SearchResult(spec, "Found", "exhaustive lift search",
                                generators=gens, images=images,
                                assignments_tried=tried, seed=seed)
    return SearchResult(spec, "NotFound", "exhausted",
                        assignments_tried=tried, seed=seed)


# --- the order-p coset obstruction ---

@dataclass(frozen=True)
class ObstructionReport:
    spec: PGroupSpec
    coset_size: int
    orders_histogram: dict
    verdict: str  # "NoOrderPLift" | "OrderPLiftExists"
    witness: BlockEndo | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        from .endo import endo_to_json
        from .groups import spec_to_json
        out = {
            "spec": spec_to_json(self.spec),
            "coset_size": self.coset_size,
            "orders_histogram": {str(k): v for k, v in
                                 sorted(self.orders_histogram.items())},
            "verdict": self.verdict,
        }
        if self.witness is not None:
            out["witness"] = endo_to_json(self.witness)
        return out


def _transvection_perturbation(spec: PGroupSpec) -> BlockEndo:
    """Zero everywhere except a single 1 in the top-right of cell (1,1)."""
    r1 = spec.ranks[0]
    if r1 < 2:
        raise RankTooSmall("leading block has rank 1: no transvection")
    cell = [[0] * r1 for _ in range(r1)]
    cell[0][r1 - 1] = 1
    cells = [[mx.zeros(spec.ranks[j], spec.ranks[k])
              for k in range(spec.num_blocks)]
             for j in range(spec.num_blocks)]
    cells[0][0] = tuple(tuple(row) for row in cell)
    return BlockEndo(spec=spec,
                     cells=tuple(tuple(row) for row in cells))


def _p_power_order(e: BlockEndo) -> int:
    spec = e.spec
    ident = identity_endo(spec)
    p = spec.p
    x = e
    k = 0
    while x != ident:
        x = pow_endo(x, p)
        k += 1
        if k > spec.exponents[-1] + 2:
            raise RuntimeError("element order is not a small p-power")
    return p ** k


def order_p_coset_obstruction(spec: PGroupSpec,
                              budget: int = DEFAULT_DELTA_BUDGET,
                              ) -> ObstructionReport:
    """Scan the kernel coset of the transvection lift for an order-p element.

    A section must send the order-p transvection to an order-p element of
    that coset, so NoOrderPLift is a sound proof of non-splitting.  Finding
    one is inconclusive.
    """
    p = spec.p
    pert = _transvection_perturbation(spec)
    base = add_endos(identity_endo(spec), pert)
    hist: dict[int, int] = {}
    witness = None
    count = 0
    for d in enumerate_delta(spec, budget=budget):
        x = compose(base, d)
        o = _p_power_order(x)
        hist[o] = hist.get(o, 0) + 1
        if o == p and witness is None:
            witness = x
        count += 1
    verdict = "OrderPLiftExists" if hist.get(p, 0) else "NoOrderPLift"
    return ObstructionReport(spec=spec, coset_size=count,
                             orders_histogram=hist, verdict=verdict,
                             witness=witness)


@dataclass(frozen=True)
class BinomialReport:
    spec: PGroupSpec
    trials: int
    failures: int
    seed: int

    def to_json(self) -> dict:
        from .groups import spec_to_json
        return {
            "spec": spec_to_json(self.spec),
            "trials": self.trials,
            "failures": self.failures,
            "seed": self.seed,
        }


def binomial_obstruction_check(spec: PGroupSpec, trials: int = 1000,
                               seed: int = 0) -> BinomialReport:
    """Entry-level congruence behind the obstruction.

    For p >= 5, first exponent 2, leading rank >= 2: the p-th power of
    (identity + transvection perturbation + random ideal element) must have
    its top-right entry of cell (1,1) congruent to p mod p^2, which is why
    no order-p lift can exist there.
    """
    p = spec.p
    if p < 5:
        raise PreconditionViolation("requires p >= 5")
    if spec.blocks[0][0] != 2:
        raise PreconditionViolation("requires first exponent 2")
    if spec.ranks[0] < 2:
        raise PreconditionViolation("requires leading rank >= 2")
    pert = _transvection_perturbation(spec)
    ident = identity_endo(spec)
    rng = random.Random(seed)
    r1 = spec.ranks[0]
    failures = 0
    for _ in range(trials):
        c = random_ideal_element(spec, rng)
        m = pow_endo(add_endos(ident, add_endos(pert, c)), p)
        entry = m.cells[0][0][0][r1 - 1]
        if entry % (p * p) != p:
            failures += 1
    return BinomialReport(spec=spec, trials=trials, failures=failures,
                          seed=seed)
