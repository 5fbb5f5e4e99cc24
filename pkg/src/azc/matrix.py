"""Reference-state transition matrix, measured by running micro-programs.

Each cell drives a reference ``a`` into the row's state with a preparation
recipe, applies the column's assignment (with ``a`` on the left or on the
right), and reads ``state(a)``.  A runtime error makes the cell ``×``.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from azc.driver import run_source

ERROR_CELL = "×"

# Helpers: o owns the value a borrows, p is an alias source, s a second
# borrower of a, d the other side of right-hand operations, m takes a by move.
HELPERS = ("a", "o", "p", "s", "d", "m")

ROWS: Tuple[Tuple[str, str], ...] = (
    ("unalloc", ""),
    ("unique", "a := 1"),
    ("shared", "a := 1\ns &- a"),
    ("borrowed", "o := 2\na &- o"),
    ("moved", "a := 1\nm <- a"),
)

COLUMNS: Tuple[Tuple[str, str], ...] = (
    ("•&-", "a &- p"),
    ("•:=", "a := 5"),
    ("•<-", "a <- 7"),
    ("&-•", "d &- a"),
    (":=•", "d := a"),
    ("<-•", "d <- a"),
)

# The state the recipe must produce before the column operation.
_ROW_STATE = {"unalloc": "unallocated"}


def micro_program(prep: str, op: str, probe: bool = True) -> str:
    body = ["p := 3"]
    if prep:
        body.extend(prep.split("\n"))
    if op:
        body.append(op)
    if probe:
        body.append("state(a)")
    text = "\n".join(body)
    for name in reversed(HELPERS):
        text = f"let {name}: @mut Int {{\n{text}\n}}"
    return text


def _state_after(prep: str, op: str) -> str:
    report = run_source(micro_program(prep, op), trace=False)
    if report.static_error is not None:
        raise RuntimeError(f"generated program rejected: {report.static_error}")
    if report.runtime_error is not None:
        return ERROR_CELL
    return report.output[-1].split(" = ", 1)[1]


def check_recipes() -> None:
    """Each preparation recipe must leave ``a`` in its row's state."""
    for row, prep in ROWS:
        got = _state_after(prep, "")
        if got != _ROW_STATE.get(row, row):
            raise RuntimeError(f"recipe for {row} produced {got}")


def compute_matrix() -> Dict[Tuple[str, str], str]:
    check_recipes()
    cells = {}
    for row, prep in ROWS:
        for column, op in COLUMNS:
            cells[(row, column)] = _state_after(prep, op)
    return cells


def render_matrix(cells: Dict[Tuple[str, str], str]) -> str:
    header = [""] + [c for c, _ in COLUMNS]
    table: List[List[str]] = [header]
    for row, _ in ROWS:
        table.append([row] + [cells[(row, c)] for c, _ in COLUMNS])
    widths = [max(len(line[i]) for line in table) for i in range(len(header))]
    out = []
    for index, line in enumerate(table):
        out.append("| " + " | ".join(cell.ljust(w) for cell, w in zip(line, widths)) + " |")
        if index == 0:
            out.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
    return "\n".join(out) + "\n"
