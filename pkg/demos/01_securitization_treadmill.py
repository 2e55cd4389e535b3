"""Sell-and-relend treadmill.

Bank A keeps securitizing its loan book, selling it to the depositor at
bank B, and relending the freed capacity.  Both banks' balance sheets
return to the same two positions every cycle, so nothing stops the loop:
total bank-originated debt grows without bound while the money supply
just oscillates between two values and system cash never moves.
"""

import _path  # noqa: F401

from reservesim import run_loophole1
from reservesim.money import format_amount
from reservesim.seriesio import render_table

CYCLES = 8

state, series = run_loophole1(CYCLES)

print("First two cycles, step by step:")
print()
head = series.snapshots[: 1 + 1 + 3 * 2]  # initial, setup, two full cycles
partial = type(series)(snapshots=list(head))
print(render_table(partial))

print(f"Cycle-end aggregates over {CYCLES} cycles:")
print("cycle | money supply | total debt | debt/money")
for c in range(1, CYCLES + 1):
    snap = next(s for s in series.snapshots if s.event == f"originate[{c}]")
    ratio = snap.debt_to_money
    print(
        f"{c:5d} | {format_amount(snap.money_supply):>12} |"
        f" {format_amount(snap.total_bank_originated_debt):>10} |"
        f" {float(ratio):.3f}"
    )

print()
print("Money never leaves the {1100, 2000} band; debt climbs 900 per cycle.")
print(f"System cash at every step: {format_amount(series.last().system_cash)}")
