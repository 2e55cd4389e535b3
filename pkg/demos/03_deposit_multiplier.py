"""The classic redeposit multiplier, simulated literally.

An initial deposit is lent out at (1 - r), redeposited, lent again, and
so on.  With a 10% reserve requirement the money supply tends to 10x the
initial deposit and loans to 9x.  The recursion runs in exact rationals;
reported rows are floored to whole units.
"""

import _path  # noqa: F401

from fractions import Fraction

from reservesim import textbook_expansion

series = textbook_expansion(1000, Fraction(1, 10), 120)

print("round | money | loans")
for row in series.rows[:10]:
    print(f"{row.round:5d} | {row.money:5d} | {row.loans:5d}")
print("  ...")
for row in series.rows[118:]:
    print(f"{row.round:5d} | {row.money:5d} | {row.loans:5d}")
print(f"limit | {series.limit_money:5d} | {series.limit_loans:5d}")

print()
print("A full-reserve system (r = 1) lends nothing:")
flat = textbook_expansion(1000, Fraction(1), 5)
print([row.money for row in flat.rows])
