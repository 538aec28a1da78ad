"""Shared fixtures: the small-spec list used across the suite.

Every spec here has group order at most 4096 so the brute-force element
oracles stay cheap; the list deliberately covers single and multi-block
shapes for each of p = 2, 3, 5.
"""

from pathlib import Path

from autsplit.groups import group_order, validate_spec

FIXTURES_DIR = Path(__file__).parent / "fixtures"

_SMALL = [
    (2, [(1, 1)]),
    (2, [(1, 2)]),
    (2, [(2, 1)]),
    (2, [(2, 2)]),
    (2, [(2, 3)]),
    (2, [(3, 1)]),
    (2, [(3, 2)]),
    (2, [(1, 1), (2, 1)]),
    (2, [(1, 2), (2, 1)]),
    (2, [(1, 2), (3, 1)]),
    (2, [(1, 1), (3, 1)]),
    (2, [(2, 1), (3, 1)]),
    (2, [(1, 1), (4, 1)]),
    (2, [(1, 1), (2, 1), (3, 1)]),
    (3, [(1, 1)]),
    (3, [(1, 2)]),
    (3, [(2, 1)]),
    (3, [(2, 2)]),
    (3, [(1, 1), (2, 1)]),
    (3, [(1, 1), (3, 1)]),
    (3, [(2, 1), (3, 1)]),
    (5, [(1, 1)]),
    (5, [(2, 1)]),
    (5, [(1, 1), (2, 1)]),
    (5, [(2, 2)]),
]

FIXTURE_SPECS_SMALL = tuple(validate_spec(p, blocks) for p, blocks in _SMALL)

assert all(group_order(s) <= 4096 for s in FIXTURE_SPECS_SMALL)

SWEEP50_PATH = FIXTURES_DIR / "sweep50.jsonl"
