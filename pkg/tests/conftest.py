"""Shared fixtures: the worked examples transcribed as small relations."""

from __future__ import annotations

import pytest

from ik2tree import _backend

# 16x16 example k2-tree with K=2, as bitmaps (the root is 1011: the
# upper-left 8x8 block is non-empty, the upper-right one is empty)
EXAMPLE16_T = "1011" "1101" "0100" "1000" "1100" "1000" "0001" "0101" "1110"
EXAMPLE16_L = "0100" "0011" "0010" "0010" "1010" "1000" "0110" "0010" "0100"

# 8x8 matrices for y0, y1, y2 as (x, z) cells.  Only the cells the worked
# queries touch are known; the rest is chosen so that the described nodes
# N0, N3..N7 come out as stated.
EXAMPLE_CELLS = {
    0: [(1, 5), (5, 6)],
    1: [(2, 2), (6, 0)],
    2: [(0, 1), (4, 3)],
}
EXAMPLE_TRIPLES = sorted((x, y, z) for y, cells in EXAMPLE_CELLS.items() for x, z in cells)

# three-level, ysize=3 tree of the lazy walk-through
LAZY_TRIPLES = [(0, 2, 0), (2, 1, 3), (2, 2, 2), (2, 2, 3)]
LAZY_RESULT = {(2, 1, 3), (0, 2, 0), (2, 2, 2), (2, 2, 3)}

# evolving 8-node graph over t0..t2 as (x, z, t) change records: cell (6,5)
# appears at t0 and never changes, (7,5) appears at t0 and disappears at t2.
# (4,6) appears at t1 so that the quadrant above both cells spans all three
# instants while their own parent only carries t0 and t2.
EXAMPLE_CHANGES = [(6, 5, 0), (7, 5, 0), (7, 5, 2), (4, 6, 1)]


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run the test once per available kernel backend."""
    with _backend.use(request.param):
        yield request.param


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
