"""Scenario files: INI-style structured text with four sections.

    [params]    regulatory ratios by field name, exact strings ("1/10", "0.08")
    [banks]     one line per bank:  ID = <deposits> <equity cash>
    [accounts]  optional extra accounts:  ACCOUNT_ID = BANK [kind]
    [run]       generator = textbook | loophole1 | loophole2, plus its knobs,
                or an explicit `events =` block (one event per line)
    [outputs]   csv = PATH, table = PATH|-, dump = PATH|-

Amounts are whole currency units as exact decimal strings; they become
integer minor units internally.  Unknown sections, keys, or event
parameters are hard errors.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Any

from .engine import (
    Event,
    ExpansionSeries,
    loophole1_events,
    loophole2_events,
    run_events,
    textbook_expansion,
)
from .errors import ScenarioError
from .ledger import AccountKind, LoanKind, SystemState, add_account, create_bank
from .metrics import MetricsSeries
from .money import Money, parse_amount, parse_ratio
from .regulation import RegulatoryParams

_PARAM_KEYS = set(RegulatoryParams.__dataclass_fields__)

_RUN_KEYS = {
    "generator",
    "cycles",
    "events",
    "lender",
    "deposit_account",
    "bonus_account",
    "loan_amount",
    "loan_kind",
    "retained_share",
    "bonus_share",
    "initial_deposit",
    "rounds",
}

_OUTPUT_FORMATS = {"csv", "table", "dump"}

_GENERATORS = {"textbook", "loophole1", "loophole2"}

# Per-op event parameter schemas: name -> (required keys, optional keys).
_EVENT_SCHEMAS: dict[str, tuple[set[str], set[str]]] = {
    "noop": (set(), set()),
    "transfer": ({"from", "to", "amount"}, set()),
    "originate": ({"bank", "amount", "to"}, {"kind", "id", "override"}),
    "securitize": ({"bank"}, {"loans", "tranches", "id"}),
    "sell": ({"security", "buyer", "price"}, {"tranche"}),
    "book_equity": ({"bank", "security"}, {"tranche"}),
    "bonus": ({"bank", "amount", "to"}, set()),
    "repay": ({"loan", "amount", "payer"}, set()),
    "interest": ({"loan", "amount", "payer"}, set()),
    "default": ({"loan", "loss"}, set()),
}

_AMOUNT_KEYS = {"amount", "price", "loss"}


@dataclass
class ScenarioSpec:
    params: RegulatoryParams = field(default_factory=RegulatoryParams)
    banks: list[tuple[str, Money, Money]] = field(default_factory=list)
    accounts: list[tuple[str, str, AccountKind]] = field(default_factory=list)
    generator: str | None = None
    run_options: dict[str, Any] = field(default_factory=dict)
    events: list[Event] | None = None
    outputs: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class ScenarioResult:
    """Either a ledger-backed metrics series or a textbook expansion."""

    kind: str  # "metrics" | "expansion"
    metrics: MetricsSeries | None = None
    expansion: ExpansionSeries | None = None
    state: SystemState | None = None


def _parse_event_line(line: str) -> Event:
    tokens = line.split()
    op = tokens[0]
    schema = _EVENT_SCHEMAS.get(op)
    if schema is None:
        raise ScenarioError(f"unknown event op {op!r}")
    required, optional = schema
    raw: dict[str, str] = {}
    for token in tokens[1:]:
        if "=" not in token:
            raise ScenarioError(f"malformed event parameter {token!r} in {line!r}")
        key, _, value = token.partition("=")
        if key in raw:
            raise ScenarioError(f"duplicate event parameter {key!r} in {line!r}")
        raw[key] = value
    unknown = set(raw) - required - optional
    if unknown:
        raise ScenarioError(f"unknown event parameter(s) {sorted(unknown)} for {op!r}")
    missing = required - set(raw)
    if missing:
        raise ScenarioError(f"missing event parameter(s) {sorted(missing)} for {op!r}")

    params: dict[str, Any] = {}
    override = False
    for key, value in raw.items():
        if key == "override":
            override = value.lower() in ("true", "yes", "1")
        elif key in _AMOUNT_KEYS:
            params[key] = _parse_event_amount(op, key, value)
        elif key == "loans":
            params[key] = "book" if value == "book" else value.split(",")
        elif key == "tranches":
            params[key] = _parse_tranche_spec(value)
        elif key == "kind":
            try:
                LoanKind(value)
            except ValueError:
                raise ScenarioError(f"unknown loan kind {value!r}") from None
            params[key] = value
        else:
            params[key] = value
    return Event(op, params, override_regulation=override)


def _parse_event_amount(op: str, key: str, value: str):
    if op == "originate" and key == "amount" and value == "headroom":
        return "headroom"
    if op == "sell" and key == "price" and value == "face":
        return "face"
    if op == "bonus" and key == "amount" and value.startswith("share:"):
        parts = value.split(":")
        if len(parts) != 4:
            raise ScenarioError(f"malformed bonus share {value!r}")
        parse_ratio(parts[1])
        return value
    try:
        return parse_amount(value)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def _parse_tranche_spec(value: str):
    if value.startswith("retained_share:"):
        return {"retained_share": parse_ratio(value.split(":", 1)[1])}
    spec = []
    for part in value.split(","):
        label, _, face = part.partition(":")
        if not label or not face:
            raise ScenarioError(f"malformed tranche spec {value!r}")
        spec.append((label, parse_amount(face)))
    return spec


def parse_scenario(text: str) -> ScenarioSpec:
    parser = configparser.ConfigParser(
        delimiters=("=",), inline_comment_prefixes=("#",), interpolation=None
    )
    parser.optionxform = str  # preserve case in bank/account ids
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"cannot parse scenario: {exc}") from None

    known_sections = {"params", "banks", "accounts", "run", "outputs"}
    unknown = set(parser.sections()) - known_sections
    if unknown:
        raise ScenarioError(f"unknown section(s): {sorted(unknown)}")
    if "run" not in parser:
        raise ScenarioError("scenario needs a [run] section")

    spec = ScenarioSpec()

    if "params" in parser:
        overrides = {}
        for key, value in parser["params"].items():
            if key not in _PARAM_KEYS:
                raise ScenarioError(f"unknown regulatory parameter {key!r}")
            overrides[key] = value
        try:
            spec.params = RegulatoryParams().with_overrides(overrides)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(str(exc)) from None

    if "banks" in parser:
        for bank_id, value in parser["banks"].items():
            parts = value.split()
            if len(parts) != 2:
                raise ScenarioError(
                    f"bank {bank_id!r} needs '<deposits> <equity cash>', got {value!r}"
                )
            try:
                spec.banks.append(
                    (bank_id, parse_amount(parts[0]), parse_amount(parts[1]))
                )
            except ValueError as exc:
                raise ScenarioError(str(exc)) from None

    if "accounts" in parser:
        for account_id, value in parser["accounts"].items():
            parts = value.split()
            if len(parts) not in (1, 2):
                raise ScenarioError(
                    f"account {account_id!r} needs 'BANK [kind]', got {value!r}"
                )
            kind = AccountKind.NET_TRANSACTION
            if len(parts) == 2:
                try:
                    kind = AccountKind(parts[1])
                except ValueError:
                    raise ScenarioError(f"unknown account kind {parts[1]!r}") from None
            spec.accounts.append((account_id, parts[0], kind))

    run = parser["run"]
    unknown_keys = set(run) - _RUN_KEYS
    if unknown_keys:
        raise ScenarioError(f"unknown [run] key(s): {sorted(unknown_keys)}")
    generator = run.get("generator")
    events_block = run.get("events")
    if generator is not None and events_block is not None:
        raise ScenarioError("[run] takes either a generator or events, not both")
    if generator is None and events_block is None:
        raise ScenarioError("[run] needs a generator or an events block")

    if generator is not None:
        if generator not in _GENERATORS:
            raise ScenarioError(f"unknown generator {generator!r}")
        spec.generator = generator
        spec.run_options = _parse_run_options(run, generator)
    else:
        spec.events = [
            _parse_event_line(line)
            for line in events_block.splitlines()
            if line.strip()
        ]
        extra = set(run) - {"events"}
        if extra:
            raise ScenarioError(
                f"[run] key(s) {sorted(extra)} only apply to generators"
            )

    if "outputs" in parser:
        for fmt, path in parser["outputs"].items():
            if fmt not in _OUTPUT_FORMATS:
                raise ScenarioError(f"unknown output format {fmt!r}")
            spec.outputs.append((fmt, path.strip()))

    return spec


def _parse_run_options(run, generator: str) -> dict[str, Any]:
    options: dict[str, Any] = {}
    try:
        if generator == "textbook":
            allowed = {"generator", "initial_deposit", "rounds"}
            extra = set(run) - allowed
            if extra:
                raise ScenarioError(
                    f"[run] key(s) {sorted(extra)} do not apply to textbook"
                )
            options["initial_deposit"] = parse_amount(run.get("initial_deposit", "1000"))
            options["rounds"] = int(run.get("rounds", "120"))
            return options
        allowed = {
            "generator", "cycles", "lender", "deposit_account", "loan_amount",
            "loan_kind",
        }
        if generator == "loophole2":
            allowed |= {"bonus_account", "retained_share", "bonus_share"}
        extra = set(run) - allowed
        if extra:
            raise ScenarioError(
                f"[run] key(s) {sorted(extra)} do not apply to {generator}"
            )
        options["cycles"] = int(run.get("cycles", "1"))
        if options["cycles"] < 0:
            raise ScenarioError("cycles must be non-negative")
        options["lender"] = run.get("lender", "A")
        options["deposit_account"] = run.get("deposit_account", "B:deposits")
        options["amount"] = parse_amount(run.get("loan_amount", "900"))
        options["kind"] = LoanKind(run.get("loan_kind", "mortgage"))
        if generator == "loophole2":
            options["bonus_account"] = run.get("bonus_account", "A:employee")
            options["retained_share"] = parse_ratio(run.get("retained_share", "1/18"))
            options["bonus_share"] = parse_ratio(run.get("bonus_share", "1/5"))
        return options
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def load_scenario(path: str) -> ScenarioSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path!r}: {exc}") from None


def build_state(spec: ScenarioSpec) -> SystemState:
    state = SystemState()
    for bank_id, deposits, equity in spec.banks:
        create_bank(state, bank_id, deposits, equity)
    for account_id, bank_id, kind in spec.accounts:
        add_account(state, bank_id, account_id, kind)
    state.seal_initial_cash()
    return state


def expand_events(spec: ScenarioSpec, cycles_override: int | None = None) -> list[Event]:
    """Expand a generator spec (or return the explicit list) deterministically."""
    if spec.events is not None:
        return list(spec.events)
    opts = dict(spec.run_options)
    if cycles_override is not None:
        opts["cycles"] = cycles_override
    if spec.generator == "loophole1":
        return loophole1_events(
            opts["cycles"],
            lender=opts["lender"],
            deposit_account=opts["deposit_account"],
            amount=opts["amount"],
            kind=opts["kind"],
        )
    if spec.generator == "loophole2":
        return loophole2_events(
            opts["cycles"],
            lender=opts["lender"],
            deposit_account=opts["deposit_account"],
            bonus_account=opts["bonus_account"],
            amount=opts["amount"],
            retained_share=opts["retained_share"],
            bonus_share=opts["bonus_share"],
            kind=opts["kind"],
        )
    raise ScenarioError(f"generator {spec.generator!r} has no event expansion")


def run_scenario(
    spec: ScenarioSpec,
    cycles_override: int | None = None,
    param_overrides: dict[str, str] | None = None,
) -> ScenarioResult:
    params = spec.params
    if param_overrides:
        try:
            params = params.with_overrides(param_overrides)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(str(exc)) from None

    if spec.generator == "textbook":
        rounds = spec.run_options["rounds"]
        if cycles_override is not None:
            rounds = cycles_override
        expansion = textbook_expansion(
            spec.run_options["initial_deposit"], params.reserve_ratio, rounds
        )
        return ScenarioResult(kind="expansion", expansion=expansion)

    if not spec.banks:
        raise ScenarioError("scenario needs a [banks] section")
    state = build_state(spec)
    events = expand_events(spec, cycles_override)
    series = run_events(state, events, params)
    return ScenarioResult(kind="metrics", metrics=series, state=state)
