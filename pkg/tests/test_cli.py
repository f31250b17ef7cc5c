from __future__ import annotations

import json
import subprocess
import sys

import pytest

from prclab.cli import run


def _run(*argv):
    return run([str(a) for a in argv])


@pytest.mark.parametrize("kind,extra", [("subst", ["--q", 17, "--k", 4]), ("edit", ["--preset", "hamedit-desk"])])
def test_roundtrip_and_reject(tmp_path, kind, extra):
    key, cw = tmp_path / "key.json", tmp_path / "cw.txt"
    assert _run("keygen", "--kind", kind, *extra, "--seed", 1, "--output", key) == 0
    assert _run("encode", "--key", key, "--seed", 2, "--output", cw) == 0
    assert cw.read_text().startswith(f"# prclab codeword kind={kind}")
    assert _run("decode", "--key", key, cw) == 0
    nbits = int(cw.read_text().split("bits=")[1].split()[0])
    rnd = tmp_path / "rnd.txt"
    rnd.write_text("".join("01"[(i * 7 + i // 3) % 2] for i in range(nbits)) + "\n")
    assert _run("decode", "--key", key, rnd) == 1


def test_channel_then_decode(tmp_path):
    key, cw, bad = tmp_path / "k.json", tmp_path / "c.txt", tmp_path / "b.txt"
    _run("keygen", "--kind", "edit", "--preset", "hamedit-desk", "--seed", 3, "--output", key)
    _run("encode", "--key", key, "--seed", 4, "--output", cw)
    assert _run("channel", "--input", cw, "--eps", 0.01, "--seed", 5, "--output", bad) == 0
    assert _run("decode", "--key", key, bad) in (0, 1)


def test_usage_errors(tmp_path):
    assert _run("keygen") == 2
    assert _run("keygen", "--kind", "rot13") == 2
    assert _run("decode", "--key", tmp_path / "missing.json", tmp_path / "x") == 2
    assert _run("nosuch") == 2


def test_golden_outputs_are_byte_identical(tmp_path):
    outs = []
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        key, cw = tmp_path / d / "k.json", tmp_path / d / "c.txt"
        _run("keygen", "--kind", "subst", "--q", 17, "--k", 4, "--seed", 11, "--output", key)
        _run("encode", "--key", key, "--seed", 12, "--output", cw)
        outs.append((key.read_bytes(), cw.read_bytes()))
    assert outs[0] == outs[1]


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("PRCLAB_SEED", "21")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _run("keygen", "--kind", "subst", "--q", 17, "--k", 4, "--output", a)
    monkeypatch.delenv("PRCLAB_SEED")
    _run("keygen", "--kind", "subst", "--q", 17, "--k", 4, "--seed", 21, "--output", b)
    assert a.read_bytes() == b.read_bytes()


def test_attack_csv_and_jobs(tmp_path):
    outs = []
    for jobs in (1, 2):
        csv, summ = tmp_path / f"r{jobs}.csv", tmp_path / f"s{jobs}.json"
        assert _run("attack", "rank", "--q", 31, "--T", 3, "--r", 3, "--threshold", 15, "--trials", 3,
                    "--jobs", jobs, "--seed", 7, "--output", csv, "--summary", summ) == 0
        outs.append(csv.read_text())
        assert "advantage" in json.loads(summ.read_text())
    assert outs[0] == outs[1]
    head = outs[0].splitlines()
    assert head[0].startswith("# ") and json.loads(head[0][2:])["seed"] == 7
    assert head[1] == "trial,hypothesis,statistic,accept"


def test_bench_csv(tmp_path):
    out = tmp_path / "b.csv"
    assert _run("bench", "--task", "subst", "--trials", 2, "--seed", 1, "--output", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ") and lines[1] == "trial,outcome" and len(lines) == 4


def test_dist_tv_and_presets(capsys):
    assert _run("dist", "tv", "--code", "trivial", "--q", 2, "--n", 4, "--T", 1) == 0
    assert _run("presets") == 0
    assert "edit-desk" in capsys.readouterr().out


def test_entry_point_module():
    res = subprocess.run([sys.executable, "-m", "prclab", "presets"], capture_output=True, text=True)
    assert res.returncode == 0 and "hamedit-desk" in res.stdout
