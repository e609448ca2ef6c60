import io
import csv
import json
import logging

import pytest

from fflab.errors import (ConfigError, UnsupportedCharacteristic, PreconditionViolated,
                          WrongCharacteristic)
from fflab.ff_core import build_field
from fflab.utils import env_threads, merge_config, json_read, json_write, config_logger
from fflab.verify_cli import (DEFAULT_CONFIG, SUITES, value_distribution,
                              cubic_distribution_check, quartic_distribution_check,
                              kl_mod3_check, kl_mod3_criterion, t3_check, run_report,
                              load_fixtures, build_config, main, _moisio_lines)

def _run(argv):
    out = io.StringIO()
    code = main(argv, stream=out)
    return code, out.getvalue()

def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))

def _json_rows(text):
    return [json.loads(line) for line in text.splitlines()]

class Test_value_distribution(object):
    def test_f3(self):
        table = value_distribution(build_field("3"))
        assert [(r.t, r.multiplicity, r.H, r.congruence_ok) for r in table.rows] == [
            (-1, 1, 1, True), (2, 1, 1, True)]
        assert table.holds and table.total == 2
    def test_f4(self):
        table = value_distribution(build_field("4"))
        assert [(r.t, r.multiplicity, r.H) for r in table.rows] == [(-1, 2, 2), (3, 1, 1)]
        assert table.holds
    @pytest.mark.parametrize("spec", ["9", "27", "81", "8", "16", "32", "64"])
    def test_holds(self, spec):
        table = value_distribution(build_field(spec))
        assert table.holds
        assert table.total == table.q - 1
    def test_errors(self):
        with pytest.raises(UnsupportedCharacteristic):
            value_distribution(build_field("5"))
        with pytest.raises(PreconditionViolated):
            value_distribution(build_field("2"))

class Test_pair_distributions(object):
    @pytest.mark.parametrize("spec", ["3", "9"])
    @pytest.mark.parametrize("route", ["curve", "bruteforce"])
    def test_cubic(self, spec, route):
        assert cubic_distribution_check(build_field(spec), route)
    @pytest.mark.parametrize("spec", ["4", "8"])
    @pytest.mark.parametrize("route", ["moebius", "bruteforce"])
    def test_quartic(self, spec, route):
        assert quartic_distribution_check(build_field(spec), route)
    def test_errors(self):
        with pytest.raises(WrongCharacteristic):
            cubic_distribution_check(build_field("4"))
        with pytest.raises(WrongCharacteristic):
            quartic_distribution_check(build_field("2"))
        with pytest.raises(ConfigError):
            cubic_distribution_check(build_field("3"), route="guess")

class Test_characteristic_two(object):
    def test_criterion_examples(self):
        f4 = build_field("4")
        assert not kl_mod3_criterion(build_field("2"), 1)
        assert kl_mod3_criterion(f4, 1)
        assert not kl_mod3_criterion(f4, f4.gamma)
    @pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6, 7])
    def test_kl_mod3(self, r):
        assert kl_mod3_check(build_field("2^{}".format(r)))
    @pytest.mark.parametrize("spec", ["2", "4", "8", "16"])
    def test_t3(self, spec):
        ctx = build_field(spec)
        assert all(t3_check(ctx, int(b)) for b in ctx.nonzero())
    def test_errors(self):
        with pytest.raises(WrongCharacteristic):
            kl_mod3_check(build_field("3"))
        with pytest.raises(WrongCharacteristic):
            t3_check(build_field("3"), 1)

class Test_report(object):
    def test_worked_examples_pass(self):
        lines = list(run_report(DEFAULT_CONFIG, "paper-examples"))
        assert len(lines) > 30
        assert all(line.passed for line in lines), [l for l in lines if not l.passed]
    def test_small_suite_deterministic(self):
        config = merge_config(DEFAULT_CONFIG, {"t3_q": [2, 4, 8]})
        first = list(run_report(config, "t3"))
        second = list(run_report(config, "t3", threads=3))
        assert first == second
        assert len(first) == 1 + 3 + 7
    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            list(run_report(DEFAULT_CONFIG, "nope"))
    def test_moisio_alpha_sets(self):
        small, = _moisio_lines("identities", 2, 3)
        assert (small.expected, small.observed, small.passed) == (7, 7, True)
        assert small.detail == "every alpha"
        large, = _moisio_lines("identities", 2, 11)
        assert (large.expected, large.passed) == (1, True)
        assert large.detail == "coset representatives"
    def test_suite_names(self):
        assert list(SUITES) == ["paper-examples", "routes", "bounds", "distributions",
                                "identities", "kl-mod3", "t3", "curves", "deuring"]
    def test_fixtures(self):
        fx = load_fixtures()
        assert {d["d"]: d["H"] for d in fx["kronecker_H"]} == {-11: 1, -15: 2, -7: 1, -8: 1}

class Test_config(object):
    def test_merge(self):
        config = merge_config({"a": 1, "b": 2}, {"b": 3})
        assert config == {"a": 1, "b": 3}
        assert merge_config({"a": 1}, None) == {"a": 1}
        with pytest.raises(ConfigError):
            merge_config({"a": 1}, {"c": 1})
        with pytest.raises(ConfigError):
            merge_config({"a": 1}, [1])
    def test_build_config(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"grid_q": [2, 3]}))
        config = build_config(str(path))
        assert config["grid_q"] == [2, 3]
        assert config["deuring_q"] == DEFAULT_CONFIG["deuring_q"]
        extended = build_config(None, extended=True)
        assert extended["deuring_q"] == DEFAULT_CONFIG["extended"]["deuring_q"]
        path.write_text(json.dumps({"grid_x": 1}))
        with pytest.raises(ConfigError):
            build_config(str(path))
    def test_json_io(self, tmp_path):
        path = tmp_path / "nested" / "out.json"
        json_write(str(path), {"x": [1, 2]})
        assert json_read(str(path)) == {"x": [1, 2]}
        with pytest.raises(ValueError):
            json_read(str(tmp_path / "missing.json"))
    def test_config_logger(self, tmp_path):
        root = logging.getLogger()
        path = tmp_path / "fflab.log"
        try:
            config_logger(str(path))
            config_logger(str(path), level=logging.DEBUG)
            ours = [h for h in root.handlers if getattr(h, "_fflab", False)]
            assert len(ours) == 2
            assert root.level == logging.DEBUG
            logging.getLogger("fflab.test").warning("census empty")
            for h in ours:
                h.flush()
            assert "[WARNING]> census empty" in path.read_text()
        finally:
            config_logger(None)
    def test_env_threads(self, monkeypatch):
        monkeypatch.delenv("FFLAB_THREADS", raising=False)
        assert env_threads() == 1
        monkeypatch.setenv("FFLAB_THREADS", "3")
        assert env_threads() == 3
        for bad in ("x", "0", "-2"):
            monkeypatch.setenv("FFLAB_THREADS", bad)
            with pytest.raises(ConfigError):
                env_threads()

class Test_main(object):
    def test_count(self):
        code, text = _run(["count", "--field", "5", "--m", "3", "--a", "1", "--b", "1"])
        assert code == 0
        assert text.splitlines()[0] == "suite,instance,check,expected,observed,passed,detail"
        rows = {r["check"]: r for r in _csv_rows(text)}
        assert set(rows) == {"N_1", "N_3", "P_3"}
        assert rows["N_3"]["expected"] == "9"
        assert rows["N_3"]["observed"] == "bruteforce=9;formula=9;system=9"
        assert rows["P_3"]["expected"] == "3"
        assert all(r["passed"] == "true" for r in rows.values())
    def test_count_bounds(self):
        code, text = _run(["count", "-f", "5", "--m", "3", "--a", "1", "--b", "1", "--t", "3",
                           "--bounds", "--json"])
        assert code == 0
        rows = {r["check"]: r for r in _json_rows(text)}
        assert rows["cubic_upper"]["detail"] == "slack=0"
        assert rows["hasse_weil"]["passed"] is True
        assert "N_1" not in rows
    def test_field(self):
        code, text = _run(["field", "--field", "4", "--json"])
        assert code == 0
        assert _json_rows(text) == [{"q": 4, "p": 2, "r": 2, "modulus": [1, 1, 1], "gamma": 2}]
        code, text = _run(["field", "--field", "3^2", "--elements"])
        rows = _csv_rows(text)
        assert len(rows) == 9
        assert rows[0]["log"] == "" and rows[1]["log"] == "0"
    def test_kloosterman(self):
        code, text = _run(["kloosterman", "--field", "3", "--json"])
        assert code == 0
        assert [(r["c"], r["value"]) for r in _json_rows(text)] == [(1, -1), (2, 2)]
        code, text = _run(["kloosterman", "--field", "3", "--n", "2", "--c", "1", "--json"])
        assert _json_rows(text)[0]["rational"] is False
    def test_curve(self):
        code, text = _run(["curve", "--field", "3", "--c", "1", "--json"])
        assert code == 0
        row = _json_rows(text)[0]
        assert (row["points"], row["trace_t"], row["singular"]) == (3, -1, False)
        assert row["j"] == 1 and row["supersingular"] is False
        code, text = _run(["curve", "--field", "5", "--system", "1", "--json"])
        assert _json_rows(text)[0]["points"] == 9
        code, text = _run(["curve", "--field", "5", "--c", "3", "--json"])
        assert _json_rows(text)[0]["singular"] is True
    def test_classnum(self):
        code, text = _run(["classnum", "--d", "-15", "-11", "--json"])
        assert code == 0
        assert _json_rows(text) == [{"d": -15, "h": 2, "H": 2}, {"d": -11, "h": 1, "H": 1}]
    def test_distribution(self):
        code, text = _run(["distribution", "--field", "3"])
        assert code == 0
        assert [(r["t"], r["multiplicity"]) for r in _csv_rows(text)] == [("-1", "1"), ("2", "1")]
    def test_verify(self, tmp_path):
        summary = tmp_path / "out" / "summary.json"
        code, text = _run(["verify", "--suite", "kl-mod3", "--summary", str(summary)])
        assert code == 0
        rows = _csv_rows(text)
        assert len(rows) == DEFAULT_CONFIG["klmod3_r_max"]
        assert json_read(str(summary)) == {"kl-mod3": {"passed": len(rows), "total": len(rows)}}
    @pytest.mark.parametrize("argv", [
        ["count", "--field", "6", "--m", "3", "--a", "1", "--b", "1"],
        ["count", "--field", "5", "--m", "3", "--a", "1", "--b", "0"],
        ["verify", "--suite", "nope"],
        ["verify", "--config", "/nonexistent/config.json"],
        ["curve", "--field", "5", "--weierstrass", "1,2"],
        ["distribution", "--field", "7"],
        ["classnum", "--d", "-5"],
        ["kloosterman", "--field", "5", "--n", "-1"],
        ["kloosterman", "--field", "5", "--n", "-1", "--c", "1"],
    ])
    def test_errors_exit_2(self, argv):
        code, _ = _run(argv)
        assert code == 2
    def test_usage_error(self):
        with pytest.raises(SystemExit):
            main([])
