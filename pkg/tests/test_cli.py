"""Command line interface: outputs, determinism, exit codes."""

import json

import pytest

from semibasis.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTransition:
    def test_square_json(self, capsys):
        code, out, err = run(
            capsys, "transition", "--dim", "2,2", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["matrix"] == [[1, 1, 1], [0, 1, 2], [0, 0, 1]]
        assert payload["order"] == [
            "2[1,2]",
            "1[1,2]+1[1,1]+1[2,2]",
            "2[1,1]+2[2,2]",
        ]
        assert payload["routes_agree"] is True
        assert payload["delta_identity"] is True

    def test_json_byte_identical_across_runs(self, capsys):
        _, one, _ = run(capsys, "transition", "--dim", "1,2", "--format", "json")
        _, two, _ = run(capsys, "transition", "--dim", "1,2", "--format", "json")
        assert one == two
        assert one.endswith("\n")
        # canonical form: sorted keys, two-space indent
        assert one == json.dumps(json.loads(one), sort_keys=True, indent=2) + "\n"

    def test_timing_goes_to_stderr_not_payload(self, capsys):
        _, out, err = run(capsys, "transition", "--dim", "1,1", "--format", "json")
        assert "elapsed" not in json.loads(out)
        assert "s" in err

    def test_csv_and_pretty_forms(self, capsys):
        code, out, _ = run(capsys, "transition", "--dim", "1,1", "--format", "csv")
        assert code == 0
        assert "1[1,2]" in out
        code, out, _ = run(capsys, "transition", "--dim", "1,1", "--format", "pretty")
        assert code == 0
        assert "1[1,2]" in out

    def test_explicit_n_must_match(self, capsys):
        code, _, err = run(capsys, "transition", "--n", "3", "--dim", "2,2")
        assert code == 10
        assert "entries" in err

    def test_bad_dim_exits_10(self, capsys):
        code, _, _ = run(capsys, "transition", "--dim", "2,x")
        assert code == 10
        code, _, _ = run(capsys, "transition", "--dim", "-1,2")
        assert code == 10

    def test_seed_flag_changes_nothing_observable(self, capsys):
        _, one, _ = run(capsys, "transition", "--dim", "1,2", "--format", "json")
        _, two, _ = run(
            capsys,
            "transition",
            "--dim",
            "1,2",
            "--format",
            "json",
            "--seed",
            "271828",
        )
        a, b = json.loads(one), json.loads(two)
        assert a["matrix"] == b["matrix"]
        assert a["root_seed"] != b["root_seed"]


class TestInspect:
    def test_deg_order(self, capsys):
        code, out, _ = run(
            capsys, "inspect", "deg-order", "--dim", "2,2", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["order"] == [
            "2[1,2]",
            "1[1,2]+1[1,1]+1[2,2]",
            "2[1,1]+2[2,2]",
        ]
        pairs = {tuple(pair) for pair in payload["degenerations"]}
        assert ("2[1,2]", "2[1,1]+2[2,2]") in pairs

    def test_flag_word(self, capsys):
        code, out, _ = run(
            capsys,
            "inspect",
            "flag",
            "--module",
            "1[1,2]+1[1,1]+1[2,2]",
            "--format",
            "json",
        )
        assert code == 0
        assert json.loads(out)["word"] == "(2,1)(1,2)(2,1)"

    def test_hall_counts(self, capsys):
        code, out, _ = run(
            capsys,
            "inspect",
            "hall",
            "--module",
            "2[1,1]+2[2,2]",
            "--vertex",
            "1",
            "--size",
            "1",
            "--prime",
            "3",
            "--format",
            "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["counts"] == {"1[1,1]+2[2,2]": 4}
        assert payload["total"] == 4

    def test_t_top_and_component(self, capsys):
        code, out, _ = run(
            capsys,
            "inspect",
            "t",
            "--module",
            "2[1,1]+1[2,2]",
            "--vertex",
            "1",
            "--format",
            "json",
        )
        assert code == 0
        assert json.loads(out)["t"] == 2
        code, out, _ = run(
            capsys,
            "inspect",
            "t",
            "--module",
            "2[1,1]+1[2,2]",
            "--vertex",
            "1",
            "--level",
            "component",
            "--format",
            "json",
        )
        assert code == 0
        assert json.loads(out)["t"] == 1

    def test_peel_component(self, capsys):
        code, out, _ = run(
            capsys,
            "inspect",
            "peel",
            "--module",
            "2[1,1]+1[2,2]",
            "--vertex",
            "1",
            "--level",
            "component",
            "--format",
            "json",
        )
        assert code == 0
        assert json.loads(out)["peeled"] == "1[1,1]+1[2,2]"

    def test_bad_module_text(self, capsys):
        code, _, err = run(
            capsys, "inspect", "flag", "--module", "nonsense"
        )
        assert code == 10
        assert err


class TestCache:
    def test_stats_clear_cycle(self, capsys, tmp_path):
        code, out, _ = run(
            capsys,
            "inspect",
            "hall",
            "--module",
            "2[1,2]",
            "--vertex",
            "1",
            "--size",
            "1",
            "--prime",
            "5",
            "--cache-dir",
            str(tmp_path),
            "--format",
            "json",
        )
        assert code == 0
        code, out, _ = run(
            capsys, "cache", "stats", "--cache-dir", str(tmp_path), "--format", "json"
        )
        assert code == 0
        assert json.loads(out)["records"] >= 1
        code, out, _ = run(
            capsys, "cache", "clear", "--cache-dir", str(tmp_path), "--format", "json"
        )
        assert code == 0
        assert json.loads(out)["removed"] >= 1
        code, out, _ = run(
            capsys, "cache", "stats", "--cache-dir", str(tmp_path), "--format", "json"
        )
        assert code == 0
        assert json.loads(out)["records"] == 0

    def test_corrupt_store_exits_40(self, capsys, tmp_path):
        tmp_path.joinpath("hall_counts.txt").write_text("garbage\n")
        code, _, err = run(
            capsys, "cache", "stats", "--cache-dir", str(tmp_path)
        )
        assert code == 40
        assert err
        code, _, _ = run(capsys, "cache", "clear", "--cache-dir", str(tmp_path))
        assert code == 0
        code, _, _ = run(capsys, "cache", "stats", "--cache-dir", str(tmp_path))
        assert code == 0

    def test_env_var_selects_cache(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("SEMIBASIS_CACHE_DIR", str(tmp_path))
        code, _, _ = run(
            capsys,
            "inspect",
            "hall",
            "--module",
            "1[1,2]",
            "--vertex",
            "1",
            "--size",
            "1",
            "--prime",
            "3",
        )
        assert code == 0
        assert tmp_path.joinpath("hall_counts.txt").exists()


class TestSelftest:
    def test_passes_at_small_bound(self, capsys):
        code, out, err = run(capsys, "selftest", "--dim-bound", "3")
        assert code == 0
        lines = [line for line in out.splitlines() if ":" in line]
        assert lines
        assert all("PASS" in line for line in lines)

    def test_fails_on_corrupt_cache(self, capsys, tmp_path):
        tmp_path.joinpath("hall_counts.txt").write_text("garbage\n")
        code, out, _ = run(
            capsys, "selftest", "--dim-bound", "3", "--cache-dir", str(tmp_path)
        )
        assert code == 40
        assert "FAIL" in out


class TestParser:
    def test_no_command_exits_10(self, capsys):
        assert run(capsys, )[0] == 10

    def test_unknown_command_exits_10(self, capsys):
        assert run(capsys, "frobnicate")[0] == 10

    def test_unknown_flag_exits_10(self, capsys):
        assert run(capsys, "transition", "--dim", "1,1", "--bogus")[0] == 10
