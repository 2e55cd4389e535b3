import pytest

from reservesim.cli import main
from reservesim.engine import EVENT_OPS

SCENARIOS = "scenarios"

BREACH_SCENARIO = """
[banks]
A = 1000 100
B = 100 100

[run]
events =
    originate bank=A kind=mortgage amount=901 to=B:deposits
"""


@pytest.fixture
def breach_scenario(tmp_path):
    path = tmp_path / "breach.scn"
    path.write_text(BREACH_SCENARIO)
    return str(path)


class TestScenarioRuns:
    def test_bundled_loophole1_exits_clean(self, tmp_path):
        out = tmp_path / "series.csv"
        assert main(["--scenario", f"{SCENARIOS}/loophole1.scn", "--csv", str(out)]) == 0
        assert out.read_text().startswith("step,event,")

    def test_table_mode_prints_worked_rows(self, capsys):
        assert main(["--scenario", f"{SCENARIOS}/loophole1.scn", "--table"]) == 0
        out = capsys.readouterr().out
        assert "Σ Deposits | Σ Bank Loans + MBS" in out
        assert "A    | 1000     | 900  | 100  | 100" in out

    def test_dump_mode(self, capsys):
        assert main(["--scenario", f"{SCENARIOS}/loophole2.scn", "--dump", "-"]) == 0
        out = capsys.readouterr().out
        assert "money_supply" in out

    def test_textbook_scenario_csv(self, capsys):
        assert main(["--scenario", f"{SCENARIOS}/textbook.scn", "--csv", "-"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "round,money,loans"
        assert out.splitlines()[-1] == "limit,1000000,900000"

    def test_cycles_override(self, tmp_path, capsys):
        assert main(
            ["--scenario", f"{SCENARIOS}/loophole1.scn", "--cycles", "0", "--csv", "-"]
        ) == 0
        rows = capsys.readouterr().out.splitlines()
        assert len(rows) == 3  # header + initial + setup

    def test_cycles_override_maps_to_textbook_rounds(self, capsys):
        assert main(
            ["--scenario", f"{SCENARIOS}/textbook.scn", "--cycles", "3", "--csv", "-"]
        ) == 0
        rows = capsys.readouterr().out.splitlines()
        assert rows[-2] == "3,343900,243900"

    def test_params_override(self, breach_scenario):
        # With a lower reserve ratio the request fits and --strict passes.
        code = main(
            ["--scenario", breach_scenario, "--strict",
             "--params", "reserve_ratio=9/100"]
        )
        assert code == 0


class TestExitStatuses:
    def test_parse_error_is_2(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text("[mystery]\nx = 1\n")
        assert main(["--scenario", str(bad)]) == 2

    def test_missing_file_is_2(self):
        assert main(["--scenario", "no/such/file.scn"]) == 2

    def test_breach_without_strict_is_0(self, breach_scenario):
        assert main(["--scenario", breach_scenario]) == 0

    def test_breach_with_strict_is_4(self, breach_scenario, capsys):
        assert main(["--scenario", breach_scenario, "--strict"]) == 4
        assert "refused" in capsys.readouterr().err

    def test_invariant_violation_is_3_with_partial_flush(
        self, tmp_path, monkeypatch, capsys
    ):
        def corrupt(state, params, p, override):
            state.bank("A").cash -= 1

        monkeypatch.setitem(EVENT_OPS, "noop", corrupt)
        scn = tmp_path / "poison.scn"
        scn.write_text(
            "[banks]\nA = 1000 100\n\n[run]\nevents =\n    noop\n"
        )
        out = tmp_path / "partial.csv"
        assert main(["--scenario", str(scn), "--csv", str(out)]) == 3
        text = out.read_text()
        assert "# failed: " in text
        assert text.startswith("step,event,")  # initial snapshot flushed

    def test_no_arguments_is_2(self):
        assert main([]) == 2


class TestDeterminism:
    def test_csv_byte_identical_across_runs(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (first, second):
            assert main(
                ["--scenario", f"{SCENARIOS}/loophole2.scn", "--csv", str(path)]
            ) == 0
        assert first.read_bytes() == second.read_bytes()


class TestRatioReport:
    def test_ratio_of_engine_output(self, tmp_path, capsys):
        series_csv = tmp_path / "run.csv"
        assert main(
            ["--scenario", f"{SCENARIOS}/loophole1.scn", "--csv", str(series_csv)]
        ) == 0
        assert main(
            ["--ingest", str(series_csv),
             "--ratio", "total_bank_originated_debt", "money_supply"]
        ) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "period,total_bank_originated_debt/money_supply"
        assert out[2].endswith("0.45")  # 900/2000 after setup

    def test_constant_ratio_from_equal_columns(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        data.write_text("period,a,b\n1,5,5\n2,7,7\n")
        assert main(["--ingest", str(data), "--ratio", "a", "b"]) == 0
        out = capsys.readouterr().out
        assert out == "period,a/b\n1,1\n2,1\n"

    def test_missing_ratio_flag_is_2(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text("period,a\n1,5\n")
        assert main(["--ingest", str(data)]) == 2

    def test_missing_column_is_2(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text("period,a\n1,5\n")
        assert main(["--ingest", str(data), "--ratio", "a", "zz"]) == 2

    def test_two_file_ingest(self, tmp_path, capsys):
        f1 = tmp_path / "one.csv"
        f1.write_text("period,debt\n1,10\n2,20\n")
        f2 = tmp_path / "two.csv"
        f2.write_text("period,money\n1,5\n2,5\n")
        assert main(
            ["--ingest", str(f1), "--ingest", str(f2), "--ratio", "debt", "money"]
        ) == 0
        out = capsys.readouterr().out
        assert out == "period,debt/money\n1,2\n2,4\n"
