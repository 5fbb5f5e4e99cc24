"""Infix/prefix sugar for prelude functions.

``a + b`` is read as ``Int.+(lhs := a, rhs := b)`` and ``not b`` as
``Bool.not(operand := b)``.  The dotted names cannot be written by users, so
they never collide with declarations.
"""

# symbol -> (prelude name, precedence level)
BINARY = {
    "==": ("Int.==", 2),
    ">": ("Int.>", 2),
    "+": ("Int.+", 3),
    "-": ("Int.-", 3),
    "*": ("Int.*", 4),
}

NOT = "Bool.not"

BINARY_BY_NAME = {name: (symbol, level) for symbol, (name, level) in BINARY.items()}

PRELUDE_NAMES = frozenset(list(BINARY_BY_NAME) + [NOT])
