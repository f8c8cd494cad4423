"""Latin squares as key material: validation, parastrophes, and counting.

Walks through the combinatorial layer the cipher stands on: what makes a
table a Latin square, how the left-division (decryption) table is derived,
how many squares exist at each order, and how fast the key space explodes.
"""

import numpy as np

from sebq import (
    count_latin_squares_backtrack,
    count_latin_squares_formula,
    latin_square_log2_bounds,
    parastrophe,
    permanent,
    random_latin_square,
    validate_latin_square,
)

# --- validation -------------------------------------------------------------
good = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
bad = [[0, 0, 1], [1, 2, 0], [2, 1, 2]]
print("cyclic 3x3 valid:", validate_latin_square(good) is None)
print("broken 3x3 verdict:", validate_latin_square(bad))

# --- parastrophe ------------------------------------------------------------
square = random_latin_square(5, seed=2024)
ldiv = parastrophe(square)
print("\nrandom order-5 multiplication table:")
print(square.table)
print("its left-division table (row-inverse):")
print(ldiv.table)
# x * (x \ y) = y everywhere
x, y = 3, 1
assert square.table[x, ldiv.table[x, y]] == y
print(f"check: {x} * ({x} \\ {y}) = {y}")

# --- exact counting ---------------------------------------------------------
print("\nexact Latin-square counts, two independent routes:")
for n in range(1, 5):
    via_formula = count_latin_squares_formula(n)
    via_search = count_latin_squares_backtrack(n)
    print(f"  order {n}: permanent formula {via_formula}, backtracking {via_search}")
print("  order 5: backtracking", count_latin_squares_backtrack(5))

# the formula is built from matrix permanents
print("\npermanent of the all-ones 4x4 (= 4!):", permanent(np.ones((4, 4), dtype=int)))

# --- asymptotic bounds --------------------------------------------------------
print("\nlog2 bounds on the number of squares (the key-space size):")
for n in (16, 128, 256):
    lower, upper = latin_square_log2_bounds(n)
    print(f"  order {n:3d}: 2^{lower:.0f} .. 2^{upper:.0f}")
print("an order-16 key alone already offers ~2^95 keys; order 128 dwarfs")
print("every classical key length in use:", f"2^{latin_square_log2_bounds(128)[0]:.0f}")
