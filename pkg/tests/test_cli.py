import os

import pytest

from semiconstrained.cli import main

RLL = "alphabet: 0 1\nk: 2\nconstraint: 11 <= 0.205\neps: 0.005\n"


@pytest.fixture
def spec(tmp_path):
    path = tmp_path / "rll.scs"
    path.write_text(RLL)
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_capacity(capsys, spec):
    code, out, _ = run(capsys, "capacity", spec)
    assert code == 0 and out.strip().endswith("bits/symbol")
    assert abs(float(out.split()[0]) - 0.995024) < 1e-5


def test_capacity_sweep_csv(capsys, spec):
    code, out, _ = run(capsys, "capacity", spec, "--sweep", "0,0.1")
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "eps,capacity" and lines[1].startswith("0,0.99502")
    assert lines[2].startswith("1/10,")


def test_enumerate_count(capsys, spec):
    assert run(capsys, "enumerate", spec, "--eps", "0.005", "-n", 5, "--count")[:2] == (0, "13\n")
    code, out, _ = run(capsys, "enumerate", spec, "-n", 3, "--eps", "0.005")
    assert code == 0 and out.split() == ["000", "001", "010", "100", "101"]


def test_check_literal_words(capsys, spec):
    assert run(capsys, "check", "0101", "--spec", spec)[0] == 0
    assert run(capsys, "check", "0111", "--spec", spec)[0] == 1


@pytest.mark.parametrize("mode,extra", [("block", ["-m", 10]),
                                        ("sliding", ["-m", 6, "-p", 3, "-q", 4])])
def test_encode_check_decode_pipeline(capsys, spec, tmp_path, mode, extra):
    data = os.urandom(3000)
    src, enc, dec = tmp_path / "in.bin", tmp_path / "out.scsw", tmp_path / "back.bin"
    src.write_bytes(data)
    assert run(capsys, "encode", "--mode", mode, "--spec", spec, *extra, src, enc)[0] == 0
    code, out, _ = run(capsys, "check", enc)
    assert code == 0 and ("admissible" in out)
    assert run(capsys, "decode", enc, dec)[0] == 0
    assert dec.read_bytes() == data


@pytest.mark.parametrize("mode,extra", [("block", ["-m", 10]),
                                        ("sliding", ["-m", 6, "-p", 3, "-q", 4])])
def test_one_mebibyte_round_trip(capsys, spec, tmp_path, mode, extra):
    data = os.urandom(1 << 20)
    src, enc, dec = tmp_path / "in.bin", tmp_path / "out.scsw", tmp_path / "back.bin"
    src.write_bytes(data)
    assert run(capsys, "encode", "--mode", mode, "--spec", spec, *extra, src, enc)[0] == 0
    assert run(capsys, "decode", enc, dec)[0] == 0
    assert dec.read_bytes() == data


def test_outputs_are_deterministic(capsys, spec, tmp_path):
    src = tmp_path / "in.bin"
    src.write_bytes(b"deterministic payload")
    outs = []
    for i in range(2):
        enc = tmp_path / f"out{i}.scsw"
        run(capsys, "encode", "--mode", "sliding", "--spec", spec, "-m", 6, "-p", 3, "-q", 4,
            src, enc)
        outs.append(enc.read_bytes())
        enc_file = tmp_path / f"enc{i}.scse"
        run(capsys, "build-encoder", spec, "--mode", "sliding", "-m", 6, "-p", 3, "-q", 4,
            "-o", enc_file)
        outs.append(enc_file.read_bytes())
    assert outs[0] == outs[2] and outs[1] == outs[3]
    assert run(capsys, "report")[1] == run(capsys, "report")[1]


def test_saved_coders_decode(capsys, spec, tmp_path):
    src, enc, dec = tmp_path / "in.bin", tmp_path / "out.scsw", tmp_path / "back.bin"
    src.write_bytes(b"\x00\xff" * 100)
    code_file, enc_file = tmp_path / "c.scsb", tmp_path / "e.scse"
    assert run(capsys, "build-encoder", spec, "--mode", "block", "-m", 10, "-o", code_file)[0] == 0
    assert run(capsys, "encode", "--code", code_file, src, enc)[0] == 0
    assert run(capsys, "decode", "--code", code_file, enc, dec)[0] == 0
    assert dec.read_bytes() == src.read_bytes()
    assert run(capsys, "build-encoder", spec, "--mode", "sliding", "-m", 6, "-p", 3, "-q", 4,
               "-o", enc_file)[0] == 0
    assert run(capsys, "encode", "--encoder", enc_file, src, enc)[0] == 0
    assert run(capsys, "decode", "--encoder", enc_file, enc, dec)[0] == 0
    assert dec.read_bytes() == src.read_bytes()


def test_exit_codes(capsys, spec, tmp_path):
    bad = tmp_path / "bad.scs"
    bad.write_text("alphabet: 0 1\nk: 2\nconstraint: 12 <= 0.2\n")
    code, _, err = run(capsys, "capacity", bad)
    assert code == 2 and "line 3" in err
    infeasible = tmp_path / "inf.scs"
    infeasible.write_text("alphabet: 0 1\nk: 2\nconstraint: 11 <= 0.01\n")
    assert run(capsys, "build-encoder", infeasible, "--mode", "block", "-m", 10,
               "--eps", "0.1")[0] == 3
    assert run(capsys, "build-encoder", spec, "--mode", "sliding", "-m", 6, "-p", 7,
               "-q", 8)[0] == 4
    junk = tmp_path / "junk.scsw"
    junk.write_bytes(b"SCSW\x01\x00")
    assert run(capsys, "decode", junk, tmp_path / "x.bin")[0] == 5


def test_ess_graph_and_complete_prefix(capsys, spec, tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "ess-graph", spec, "--dot", dot)
    assert code == 0 and "containing capacity: 1.000000" in out
    assert dot.read_text().startswith("digraph")
    code, out, err = run(capsys, "complete-prefix", spec, "111111", "-v")
    assert code == 0 and "admissible: yes" in err


def test_report_reproduces_case_study(capsys):
    code, out, _ = run(capsys, "report")
    assert code == 0
    for needle in ("= 13\n", "= 379\n", "any m > 200", "largest failing m in [150, 200]: 156",
                   "rate 0.6000 (misses 3/4)", "rate 0.8000 (meets 3/4)", "round trip ok"):
        assert needle in out
