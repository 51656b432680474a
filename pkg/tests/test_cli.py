import json
import os
import subprocess
import sys

import pytest

from serieswitness.certificates import load_document, payload_without_timing
from serieswitness.cli import main


def run_cli(args, tmp_path=None, env_extra=None):
    """Invoke the CLI in-process, capturing the exit code."""
    if env_extra:
        saved = {k: os.environ.get(k) for k in env_extra}
        os.environ.update(env_extra)
        try:
            return main(args)
        finally:
            for k, v in saved.items():
                if v is None:
                    os.environ.pop(k, None)
                else:
                    os.environ[k] = v
    return main(args)


def test_catalog_list(capsys):
    assert run_cli(["catalog", "list"]) == 0
    out = capsys.readouterr().out
    for name in ("alt-harmonic", "unit-basis-c0", "decaying-signed-c0", "growing-real"):
        assert name in out


def test_run_rearrangement_roundtrip(tmp_path, capsys):
    out = tmp_path / "cert.json"
    code = run_cli(
        [
            "run",
            "--series", "alt-harmonic",
            "--construction", "rearrangement",
            "--depth", "2",
            "--out", str(out),
        ]
    )
    assert code == 0
    doc = load_document(str(out))
    assert doc["kind"] == "witness"
    assert len(doc["result"]["checkpoints"]) == 2
    assert run_cli(["verify", str(out)]) == 0


def test_run_exhaustion_exit_2(tmp_path):
    out = tmp_path / "cert.json"
    code = run_cli(
        [
            "run",
            "--series", "unit-basis-c0",
            "--construction", "grow-subseries",
            "--target", "2",
            "--horizon", "2000",
            "--out", str(out),
        ]
    )
    assert code == 2
    doc = load_document(str(out))
    assert doc["kind"] == "exhaustion"
    assert run_cli(["verify", str(out)]) == 0


def test_run_verdict(tmp_path):
    out = tmp_path / "verdict.json"
    code = run_cli(
        [
            "run",
            "--series", "unit-basis-c0",
            "--construction", "i-bounded",
            "--ideal", "density",
            "--M", "0.5",
            "--horizon", "64",
            "--out", str(out),
        ]
    )
    assert code == 0
    doc = load_document(str(out))
    assert doc["result"]["status"] == "i-unbounded-evidence"
    assert doc["result"]["interval_count"] == 5
    assert run_cli(["verify", str(out)]) == 0


def test_unknown_series_exit_1(tmp_path):
    code = run_cli(
        ["run", "--series", "nope", "--construction", "grow-subseries"]
    )
    assert code == 1


def test_missing_bound_exit_1():
    code = run_cli(
        ["run", "--series", "unit-basis-c0", "--construction", "i-bounded"]
    )
    assert code == 1


def test_verify_detects_fault(tmp_path):
    out = tmp_path / "cert.json"
    assert run_cli(
        [
            "run",
            "--series", "growing-real",
            "--construction", "limsup-subseries",
            "--depth", "3",
            "--horizon", "1000",
            "--out", str(out),
        ]
    ) == 0
    doc = load_document(str(out))
    doc["result"]["checkpoints"][0]["value"] += 0.1
    hacked = tmp_path / "hacked.json"
    with open(hacked, "w") as fh:
        json.dump(doc, fh)
    assert run_cli(["verify", str(hacked)]) == 1


def test_verify_schema_mismatch(tmp_path):
    out = tmp_path / "cert.json"
    assert run_cli(
        [
            "run",
            "--series", "growing-real",
            "--construction", "grow-subseries",
            "--target", "5",
            "--horizon", "100",
            "--out", str(out),
        ]
    ) == 0
    doc = load_document(str(out))
    doc["schema_version"] = "99"
    stale = tmp_path / "stale.json"
    with open(stale, "w") as fh:
        json.dump(doc, fh)
    assert run_cli(["verify", str(stale)]) == 1


def test_env_horizon_override(tmp_path):
    out = tmp_path / "cert.json"
    code = run_cli(
        [
            "run",
            "--series", "unit-basis-c0",
            "--construction", "grow-subseries",
            "--target", "2",
            "--out", str(out),
        ],
        env_extra={"SERIESWITNESS_HORIZON": "750"},
    )
    assert code == 2
    doc = load_document(str(out))
    assert doc["config"]["horizon"] == 750
    assert doc["result"]["horizon"] == 750


def test_byte_identical_outputs_modulo_timing(tmp_path):
    docs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert run_cli(
            [
                "run",
                "--series", "alt-harmonic",
                "--construction", "dense-open-bm",
                "--m", "1",
                "--horizon", "100000",
                "--out", str(out),
            ]
        ) == 0
        docs.append(load_document(str(out)))
    assert payload_without_timing(docs[0]) == payload_without_timing(docs[1])


CONFIG_MATRIX = [
    (["--series", "alt-harmonic", "--construction", "grow-subseries",
      "--target", "3"], 0),
    (["--series", "growing-real", "--construction", "grow-subseries",
      "--target", "10", "--horizon", "100"], 0),
    (["--series", "alt-harmonic", "--construction", "rearrangement",
      "--depth", "2"], 0),
    (["--series", "growing-real", "--construction", "rearrangement",
      "--depth", "3", "--horizon", "1000"], 0),
    (["--series", "alt-harmonic", "--construction", "nowhere-dense-subseq",
      "--m", "1", "--horizon", "100000"], 0),
    (["--series", "alt-harmonic", "--construction", "nowhere-dense-rearr",
      "--m", "1", "--horizon", "100000"], 0),
    (["--series", "alt-harmonic", "--construction", "dense-open-bm",
      "--m", "1", "--horizon", "100000"], 0),
    (["--series", "alt-harmonic", "--construction", "dense-open-cm",
      "--m", "1", "--horizon", "200000"], 0),
    (["--series", "alt-harmonic", "--construction", "dense-open-am",
      "--m", "1", "--horizon", "1000"], 0),
    (["--series", "growing-real", "--construction", "dense-open-am",
      "--m", "2", "--horizon", "1000"], 0),
    (["--series", "growing-real", "--construction", "limsup-subseries",
      "--depth", "4", "--horizon", "1000"], 0),
    (["--series", "alt-harmonic", "--construction", "i-bounded",
      "--M", "10", "--ideal", "density", "--horizon", "1000"], 0),
    (["--series", "unit-basis-c0", "--construction", "i-bounded",
      "--M", "0.5", "--ideal", "density", "--horizon", "64"], 0),
    (["--series", "unit-basis-c0", "--construction", "grow-subseries",
      "--target", "2", "--horizon", "1000"], 2),
    (["--series", "alt-harmonic", "--construction", "i-bounded",
      "--M", "0.6", "--ideal", "density", "--horizon", "10"], 2),
]


@pytest.mark.parametrize("flags,expected", CONFIG_MATRIX)
def test_run_then_verify_matrix(tmp_path, flags, expected):
    # round trip: every valid run's document re-verifies with exit 0
    out = tmp_path / "doc.json"
    code = run_cli(["run", *flags, "--out", str(out)])
    assert code == expected
    assert run_cli(["verify", str(out)]) == 0


def test_console_script_installed():
    result = subprocess.run(
        [sys.executable, "-m", "serieswitness.cli", "catalog", "list"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "alt-harmonic" in result.stdout
