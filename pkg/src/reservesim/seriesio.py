"""Series serialization: CSV, balance-sheet tables, and full dumps.

The CSV schema is fixed per run: the step column first, then system
aggregates, then a four-column block per bank in sorted id order.  Money
columns are exact integer minor units; ratio columns are exact fraction
strings so a parse of the file reproduces the series bit for bit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import ExpansionSeries
from .metrics import BankMetrics, BreachRecord, MetricsSeries, MetricsSnapshot
from .money import format_amount

_SYSTEM_COLUMNS = [
    "step",
    "event",
    "money_supply",
    "bank_held_loans",
    "mbs_external",
    "mbs_bank_held",
    "mbs_equity_booked",
    "mbs_outstanding",
    "total_bank_originated_debt",
    "system_cash",
    "debt_to_money",
]

_BANK_COLUMNS = ["deposits", "loans", "cash", "equity", "capital_ratio", "class"]

_BREACH_MARKER = "# breaches"
_FAILURE_MARKER = "# failed: "


def _fraction_str(value: Optional[Fraction]) -> str:
    if value is None:
        return "NA"
    return f"{value.numerator}/{value.denominator}"


def _fraction_parse(text: str) -> Optional[Fraction]:
    if text == "NA":
        return None
    return Fraction(text)


def series_to_csv(series: MetricsSeries) -> str:
    bank_ids: list[str] = []
    if series.snapshots:
        bank_ids = [b.bank for b in series.snapshots[0].banks]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(_SYSTEM_COLUMNS)
    for bank_id in bank_ids:
        header.extend(f"{bank_id}:{col}" for col in _BANK_COLUMNS)
    writer.writerow(header)
    for snap in series.snapshots:
        row = [
            snap.step,
            snap.event,
            snap.money_supply,
            snap.bank_held_loans,
            snap.mbs_external,
            snap.mbs_bank_held,
            snap.mbs_equity_booked,
            snap.mbs_outstanding,
            snap.total_bank_originated_debt,
            snap.system_cash,
            _fraction_str(snap.debt_to_money),
        ]
        for bank in snap.banks:
            row.extend(
                [
                    bank.deposits,
                    bank.loans,
                    bank.cash,
                    bank.equity,
                    _fraction_str(bank.capital_ratio),
                    bank.capitalization,
                ]
            )
        writer.writerow(row)
    if series.breaches:
        buf.write(_BREACH_MARKER + "\n")
        for breach in series.breaches:
            writer.writerow([breach.step, breach.operation, breach.detail])
    if series.failed:
        buf.write(_FAILURE_MARKER + series.failure_reason + "\n")
    return buf.getvalue()


def series_from_csv(text: str) -> MetricsSeries:
    series = MetricsSeries()
    lines = text.splitlines()
    data_lines: list[str] = []
    breach_lines: list[str] = []
    target = data_lines
    for line in lines:
        if line == _BREACH_MARKER:
            target = breach_lines
            continue
        if line.startswith(_FAILURE_MARKER):
            series.failed = True
            series.failure_reason = line[len(_FAILURE_MARKER):]
            continue
        target.append(line)

    rows = list(csv.reader(data_lines))
    if not rows:
        return series
    header = rows[0]
    n_sys = len(_SYSTEM_COLUMNS)
    bank_ids = []
    for i in range(n_sys, len(header), len(_BANK_COLUMNS)):
        bank_ids.append(header[i].split(":", 1)[0])
    for row in rows[1:]:
        banks = []
        for j, bank_id in enumerate(bank_ids):
            base = n_sys + j * len(_BANK_COLUMNS)
            banks.append(
                BankMetrics(
                    bank=bank_id,
                    deposits=int(row[base]),
                    loans=int(row[base + 1]),
                    cash=int(row[base + 2]),
                    equity=int(row[base + 3]),
                    capital_ratio=_fraction_parse(row[base + 4]),
                    capitalization=row[base + 5],
                )
            )
        series.snapshots.append(
            MetricsSnapshot(
                step=int(row[0]),
                event=row[1],
                money_supply=int(row[2]),
                bank_held_loans=int(row[3]),
                mbs_external=int(row[4]),
                mbs_bank_held=int(row[5]),
                mbs_equity_booked=int(row[6]),
                mbs_outstanding=int(row[7]),
                total_bank_originated_debt=int(row[8]),
                system_cash=int(row[9]),
                debt_to_money=_fraction_parse(row[10]),
                banks=tuple(banks),
            )
        )
    for row in csv.reader(breach_lines):
        series.breaches.append(BreachRecord(int(row[0]), row[1], row[2]))
    return series


# -- balance-sheet table rendering --------------------------------------------

_TABLE_HEADER = [
    "Bank",
    "Deposits",
    "Loan",
    "Cash",
    "Equity Capital",
    "Σ Deposits",
    "Σ Bank Loans + MBS",
]


def render_table(series: MetricsSeries) -> str:
    """Render each snapshot as a balance-sheet table block."""
    out: list[str] = []
    for snap in series.snapshots:
        out.append(f"Step {snap.step}: {snap.event}")
        rows = [list(_TABLE_HEADER)]
        for i, bank in enumerate(snap.banks):
            rows.append(
                [
                    bank.bank,
                    format_amount(bank.deposits),
                    format_amount(bank.loans),
                    format_amount(bank.cash),
                    format_amount(bank.equity),
                    format_amount(snap.money_supply) if i == 0 else "",
                    format_amount(snap.total_bank_originated_debt) if i == 0 else "",
                ]
            )
        widths = [max(len(r[c]) for r in rows) for c in range(len(_TABLE_HEADER))]
        for r in rows:
            out.append(" | ".join(cell.ljust(widths[c]) for c, cell in enumerate(r)).rstrip())
        if snap.mbs_outstanding > 0:
            out.append(
                f"Mortgage Backed Securities: {format_amount(snap.mbs_outstanding)}"
                f" (external {format_amount(snap.mbs_external)},"
                f" bank-held {format_amount(snap.mbs_bank_held)},"
                f" equity-booked {format_amount(snap.mbs_equity_booked)})"
            )
        out.append("")
    if series.failed:
        out.append(f"RUN FAILED: {series.failure_reason}")
        out.append("")
    return "\n".join(out)


def render_dump(series: MetricsSeries) -> str:
    """Full structured-text dump of every snapshot field."""
    out: list[str] = []
    for snap in series.snapshots:
        out.append(f"step {snap.step} event {snap.event}")
        out.append(f"  money_supply {snap.money_supply}")
        out.append(f"  bank_held_loans {snap.bank_held_loans}")
        out.append(
            f"  mbs external {snap.mbs_external} bank_held {snap.mbs_bank_held}"
            f" equity_booked {snap.mbs_equity_booked} total {snap.mbs_outstanding}"
        )
        out.append(f"  total_bank_originated_debt {snap.total_bank_originated_debt}")
        out.append(f"  system_cash {snap.system_cash}")
        out.append(f"  debt_to_money {_fraction_str(snap.debt_to_money)}")
        for bank in snap.banks:
            out.append(
                f"  bank {bank.bank}: deposits {bank.deposits} loans {bank.loans}"
                f" cash {bank.cash} equity {bank.equity}"
                f" ratio {_fraction_str(bank.capital_ratio)} class {bank.capitalization}"
            )
    for breach in series.breaches:
        out.append(f"breach step {breach.step} {breach.operation}: {breach.detail}")
    if series.failed:
        out.append(f"FAILED: {series.failure_reason}")
    out.append("")
    return "\n".join(out)


def expansion_to_csv(series: ExpansionSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["round", "money", "loans"])
    for row in series.rows:
        writer.writerow([row.round, row.money, row.loans])
    writer.writerow(["limit", series.limit_money, series.limit_loans])
    return buf.getvalue()


def render_expansion_table(series: ExpansionSeries) -> str:
    out = ["Round | Money | Loans"]
    for row in series.rows:
        out.append(f"{row.round} | {row.money} | {row.loans}")
    out.append(f"limit | {series.limit_money} | {series.limit_loans}")
    out.append("")
    return "\n".join(out)


# -- external statistical series ----------------------------------------------


@dataclass(frozen=True)
class ExternalSeries:
    label: str
    rows: tuple[tuple[str, Fraction], ...]  # (period, value), periods increasing


def _period_key(period: str):
    try:
        return (0, Fraction(period))
    except (ValueError, ZeroDivisionError):
        return (1, period)


def _validate_increasing(label: str, periods: list[str]) -> None:
    keys = [_period_key(p) for p in periods]
    for a, b in zip(keys, keys[1:]):
        if not a < b:
            raise ValueError(f"series {label!r}: periods not strictly increasing")


def ingest_csv(text: str, labels: list[str]) -> dict[str, ExternalSeries]:
    """Pull named value columns out of any CSV whose first column is the period.

    Only the requested columns are parsed, so files with non-numeric
    columns (like the engine's own event column) ingest cleanly.
    """
    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if r and not r[0].startswith("#")]
    if not rows:
        raise ValueError("empty CSV")
    header = rows[0]
    missing = [label for label in labels if label not in header[1:]]
    if missing:
        raise ValueError(f"column(s) {missing} not found in CSV header")
    result: dict[str, ExternalSeries] = {}
    for label in labels:
        idx = header.index(label)
        periods: list[str] = []
        values: list[Fraction] = []
        for row in rows[1:]:
            if len(row) <= idx:
                continue
            periods.append(row[0])
            try:
                values.append(Fraction(row[idx]))
            except (ValueError, ZeroDivisionError):
                raise ValueError(
                    f"column {label!r} has non-numeric value {row[idx]!r}"
                ) from None
        _validate_increasing(label, periods)
        result[label] = ExternalSeries(label, tuple(zip(periods, values)))
    return result


def ratio_report(series_a: ExternalSeries, series_b: ExternalSeries) -> ExternalSeries:
    """Pointwise A/B over the period intersection."""
    b_by_period = dict(series_b.rows)
    rows = []
    for period, value in series_a.rows:
        if period in b_by_period:
            denominator = b_by_period[period]
            if denominator == 0:
                raise ValueError(f"division by zero at period {period!r}")
            rows.append((period, value / denominator))
    if not rows:
        raise ValueError(
            f"series {series_a.label!r} and {series_b.label!r} share no periods"
        )
    return ExternalSeries(f"{series_a.label}/{series_b.label}", tuple(rows))


def format_fraction_decimal(value: Fraction, max_places: int = 12) -> str:
    """Exact decimal when the expansion terminates, else rounded."""
    den = value.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den == 1:
        scaled = value
        places = 0
        while scaled.denominator != 1:
            scaled *= 10
            places += 1
    else:
        scaled = Fraction(round(value * 10**max_places))
        places = max_places
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    sign = "-" if value < 0 else ""
    if places == 0:
        return f"{sign}{digits}"
    text = f"{sign}{digits[:-places]}.{digits[-places:]}"
    if den != 1:
        text = text.rstrip("0").rstrip(".")
    return text


def external_to_csv(series: ExternalSeries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["period", series.label])
    for period, value in series.rows:
        writer.writerow([period, format_fraction_decimal(value)])
    return buf.getvalue()
