import time
from pathlib import Path

from azc.matrix import COLUMNS, ROWS, check_recipes, compute_matrix, micro_program, render_matrix
from azc.driver import run_source

X = "×"
# Transition matrix typed out by hand: rows are the state of `a` before the
# assignment, columns the assignment with `a` on the left or right.
EXPECTED = {
    "unalloc": ["borrowed", "unique", "unique", X, X, X],
    "unique": ["borrowed", "unique", "unique", "shared", "unique", "moved"],
    "shared": [X, "shared", "shared", "shared", "shared", X],
    "borrowed": ["borrowed", "borrowed", "borrowed", "borrowed", "borrowed", X],
    "moved": ["borrowed", "unique", "unique", X, X, X],
}

DOC = Path(__file__).resolve().parent.parent / "docs" / "transition_matrix.txt"


def test_recipes_reach_their_rows():
    check_recipes()


def test_every_cell_matches():
    cells = compute_matrix()
    for row, _ in ROWS:
        assert [cells[row, col] for col, _ in COLUMNS] == EXPECTED[row], row


def test_rendering_matches_checked_in_copy():
    assert render_matrix(compute_matrix()) == DOC.read_text(encoding="utf-8")


def test_matrix_is_fast():
    start = time.perf_counter()
    compute_matrix()
    assert time.perf_counter() - start < 1.0


def test_micro_programs_are_well_formed():
    for _, prep in ROWS:
        for _, op in COLUMNS:
            assert run_source(micro_program(prep, op)).static_error is None


def test_strict_rules_differ_only_in_borrowed_move():
    cells = compute_matrix()
    strict = {}
    for row, prep in ROWS:
        for col, op in COLUMNS:
            report = run_source(micro_program(prep, op), strict_rules=True, trace=False)
            strict[row, col] = X if report.runtime_error else report.output[-1].split(" = ")[1]
    changed = {k for k in cells if cells[k] != strict[k]}
    assert changed == {("borrowed", "<-•")}
