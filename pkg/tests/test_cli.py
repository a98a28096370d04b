"""Command-line surface, registry handling, and report stability."""

import json

import pytest
from click.testing import CliRunner

from conelab import fixtures
from conelab.cli import main
from conelab.cones import ConeError


@pytest.fixture
def runner():
    return CliRunner()


def small_registry() -> str:
    specs = [s for s in fixtures.builtin_fixtures()
             if s.name in ("qubit", "square-cone", "classical-simplex-2")]
    return fixtures.registry_to_json(specs)


class TestRegistry:
    def test_round_trip(self):
        specs = fixtures.builtin_fixtures()
        text = fixtures.registry_to_json(specs)
        back = fixtures.registry_from_json(text)
        assert [s.name for s in back] == [s.name for s in specs]
        assert fixtures.registry_to_json(back) == text

    def test_builtin_contents(self):
        names = {s.name for s in fixtures.builtin_fixtures()}
        required = {"classical-simplex-2", "classical-simplex-3",
                    "classical-simplex-4", "real-sym-2", "real-sym-3",
                    "qubit", "complex-herm-3", "complex-herm-4",
                    "quat-herm-2", "spin-factor-3", "spin-factor-4",
                    "spin-factor-8", "two-qubit-sum", "qubit-plus-rebit",
                    "square-cone", "pentagon-cone", "shared-corner",
                    "two-qubit-hilbert", "min-square-square",
                    "classical-bit-bit"}
        assert required <= names

    def test_every_builtin_declares_core_expectations(self):
        core = {"self-dual", "homogeneity", "pure-transitivity",
                "continuous-pure-transitivity", "reducibility"}
        for spec in fixtures.builtin_fixtures():
            assert core <= set(spec.expects), spec.name

    def test_rationals_survive_serialization(self):
        spec = next(s for s in fixtures.builtin_fixtures()
                    if s.name == "square-cone")
        obj = fixtures.spec_to_json(spec)
        gen0 = obj["params"]["generators"][0]
        assert gen0[0] == {"num": 1, "den": 1}
        back = fixtures.spec_from_json(obj)
        assert back.params["generators"] == spec.params["generators"]

    def test_parse_errors(self):
        with pytest.raises(ConeError, match="parse error"):
            fixtures.registry_from_json("{not json")
        with pytest.raises(ConeError, match="missing 'kind'"):
            fixtures.registry_from_json(
                '{"fixtures": [{"name": "x"}]}')
        with pytest.raises(ConeError, match="duplicate"):
            fixtures.registry_from_json(json.dumps({"fixtures": [
                {"name": "x", "kind": "shared-corner"},
                {"name": "x", "kind": "shared-corner"}]}))
        with pytest.raises(ConeError, match="unknown factor"):
            fixtures.registry_from_json(json.dumps({"fixtures": [
                {"name": "c", "kind": "composite",
                 "params": {"model": "hilbert", "factorA": "a",
                            "factorB": "b"}}]}))

    def test_unknown_check_rejected(self):
        with pytest.raises(ConeError, match="unknown check"):
            fixtures.run_checks(fixtures.builtin_fixtures()[:1],
                                ["not-a-check"])


class TestCheckCommand:
    def test_small_registry_exit_zero(self, runner, tmp_path):
        reg = tmp_path / "reg.json"
        reg.write_text(small_registry())
        result = runner.invoke(main, ["check", "--registry", str(reg),
                                      "--seed", "7"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["schema_version"] == 1
        assert report["summary"]["ok"]

    def test_byte_stability(self, runner, tmp_path):
        reg = tmp_path / "reg.json"
        reg.write_text(small_registry())
        args = ["check", "--registry", str(reg), "--seed", "11"]
        out1 = runner.invoke(main, args).output
        out2 = runner.invoke(main, args + ["--jobs", "3"]).output
        assert out1 == out2

    def test_expectation_mismatch_exit_one(self, runner, tmp_path):
        specs = [s for s in fixtures.builtin_fixtures() if s.name == "qubit"]
        specs[0].expects["self-dual"] = "fails"
        reg = tmp_path / "bad.json"
        reg.write_text(fixtures.registry_to_json(specs))
        result = runner.invoke(main, ["check", "--registry", str(reg),
                                      "--checks", "self-dual"])
        assert result.exit_code == 1
        report = json.loads(result.output)
        assert report["fixtures"][0]["mismatches"] == ["self-dual"]

    def test_empty_registry_exit_zero(self, runner, tmp_path):
        reg = tmp_path / "empty.json"
        reg.write_text('{"fixtures": []}')
        result = runner.invoke(main, ["check", "--registry", str(reg)])
        assert result.exit_code == 0
        assert json.loads(result.output)["summary"]["fixtures"] == 0

    def test_check_selection(self, runner, tmp_path):
        reg = tmp_path / "reg.json"
        reg.write_text(small_registry())
        result = runner.invoke(main, ["check", "--registry", str(reg),
                                      "--checks", "self-dual,reducibility",
                                      "--format", "text"])
        assert result.exit_code == 0
        assert "homogeneity" not in result.output

    def test_env_seed_override(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("CONELAB_SEED", "42")
        reg = tmp_path / "reg.json"
        reg.write_text(small_registry())
        result = runner.invoke(main, ["check", "--registry", str(reg)])
        assert json.loads(result.output)["seed"] == 42

    def test_timings_flag_adds_fields(self, runner, tmp_path):
        reg = tmp_path / "reg.json"
        reg.write_text(small_registry())
        result = runner.invoke(main, ["check", "--registry", str(reg),
                                      "--checks", "self-dual", "--timings"])
        report = json.loads(result.output)
        assert all("elapsed_s" in f for f in report["fixtures"])


class TestOtherCommands:
    def test_fixtures_dump(self, runner):
        result = runner.invoke(main, ["fixtures"])
        assert result.exit_code == 0
        obj = json.loads(result.output)
        assert any(f["name"] == "shared-corner" for f in obj["fixtures"])

    def test_classify_text(self, runner):
        result = runner.invoke(main, ["classify", "--max-rank", "3"])
        assert result.exit_code == 0
        assert "survivors: ComplexHerm" in result.output

    def test_classify_json(self, runner):
        result = runner.invoke(main, [
            "classify", "--procedure", "classicality", "--max-rank", "3",
            "--num-summands", "2", "--format", "json"])
        obj = json.loads(result.output)
        assert obj["survivors"] == ["RealSym", "ComplexHerm"]

    def test_steer_text(self, runner):
        result = runner.invoke(main, ["steer", "--seed", "3"])
        assert result.exit_code == 0
        assert "result: measurement" in result.output

    def test_steer_json_classical(self, runner):
        result = runner.invoke(main, [
            "steer", "--fixture", "classical-bit-bit", "--parts", "2",
            "--seed", "5", "--format", "json"])
        obj = json.loads(result.output)
        assert obj["result"] == "measurement"
        assert obj["residual"] < 1e-8

    def test_steer_non_composite_rejected(self, runner):
        result = runner.invoke(main, ["steer", "--fixture", "qubit"])
        assert result.exit_code != 0
        assert "not a composite" in result.output
