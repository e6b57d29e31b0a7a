import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from ctaka.cli import main, matrix_configs
from ctaka.rng import SeededRng

SCHEMA = json.loads((Path(__file__).parent.parent / "docs" / "transcript.schema.json").read_text())


def run_args(cfg, out):
    args = ["run", "--protocol", cfg.protocol, "--scenario", cfg.scenario, "--profile", cfg.profile,
            "--seed", str(cfg.seed), "--out", str(out)]
    if cfg.confirm:
        args.append("--confirm")
    return args


@pytest.mark.parametrize("cfg", matrix_configs(seed=5), ids=lambda c: f"{c.protocol}-{c.scenario}-{c.profile}-{c.confirm}")
def test_run_transcripts_validate_against_schema(cfg, tmp_path):
    out = tmp_path / "t.json"
    assert main(run_args(cfg, out)) == 0
    jsonschema.validate(json.loads(out.read_bytes()), SCHEMA)


def test_run_alpha_and_text(tmp_path, capsys):
    out = tmp_path / "t.txt"
    assert main(["run", "--protocol", "cui", "--scenario", "koa", "--alpha", "2", "--format", "text", "--out", str(out)]) == 0
    text = out.read_text()
    assert "alpha=2" in text
    assert text.splitlines()[-1].startswith("verdict: ")


def test_run_bad_config_exit_code(capsys):
    assert main(["run", "--protocol", "deng", "--scenario", "bia"]) == 2
    assert "only defined" in capsys.readouterr().err
    assert main(["run", "--protocol", "cui", "--scenario", "koa", "--alpha", "1"]) == 2


def test_run_stdout(capsys):
    assert main(["run", "--protocol", "deng", "--scenario", "honest", "--seed", "9"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"]["keys_match"] is True


def test_custom_identities(capsys):
    assert main(["run", "--protocol", "cui", "--scenario", "bia", "--id", "meter-17", "--id", "utility"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["header"]["config"]["identities"] == ["meter-17", "utility"]


def test_oracle(capsys):
    assert main(["oracle"]) == 0
    out = capsys.readouterr().out
    assert "group order: 101" in out
    assert "[79, 117]" in out
    assert "FAILED" not in out


def test_matrix_toy(capsys):
    assert main(["matrix", "--profile", "toy"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 12
    assert "0 unexpected verdict(s)" in out


def test_console_entry_point(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        subprocess.run(
            [sys.executable, "-m", "ctaka", "run", "--protocol", "cui", "--scenario", "mma", "--seed", "77", "--out", str(path)],
            check=True,
        )
    assert a.read_bytes() == b.read_bytes()


def test_rng_streams_are_independent_and_stable():
    root = SeededRng(42)
    a1 = root.fork("A").read(40)
    assert SeededRng(42).fork("A").read(40) == a1
    assert root.fork("B").read(40) != a1
    r = SeededRng(42).fork("A")
    assert r.read(8) + r.read(32) == a1
    with pytest.raises(ValueError):
        SeededRng(2**64)
