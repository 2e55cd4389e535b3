"""Retained tranches as regulatory capital.

The treadmill alone never prints money.  The second failure mode does:
bank A keeps a slice of each securitization, books it into equity capital
at half face value, pays part of the gain out as a bonus (a brand-new
deposit), and relends a now *larger* headroom.  Money supply and equity
capital both rise every cycle, with no central-bank involvement.
"""

import _path  # noqa: F401

from reservesim import run_loophole2
from reservesim.money import format_amount
from reservesim.seriesio import render_table

CYCLES = 8

state, series = run_loophole2(CYCLES)

print("Cycle 1, step by step (the bonus step is where money is created):")
print()
first_cycle = type(series)(snapshots=list(series.snapshots[:7]))
print(render_table(first_cycle))

print("Per-cycle growth:")
print("cycle | money supply | bank A equity | total debt")
for c in range(1, CYCLES + 1):
    snap = next(s for s in series.snapshots if s.event == f"lend-headroom[{c}]")
    print(
        f"{c:5d} | {format_amount(snap.money_supply):>12} |"
        f" {format_amount(snap.banks[0].equity):>13} |"
        f" {format_amount(snap.total_bank_originated_debt):>10}"
    )

print()
print("Each retained tranche adds half its face to equity capital; ten times")
print("that amount comes back as fresh lending room.  The loop only stalls")
print("when equity cash can no longer fund the bonus (try CYCLES = 10).")
