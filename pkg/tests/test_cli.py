from __future__ import annotations

import pytest

from conftest import EXAMPLE_TRIPLES, EXAMPLE_CHANGES
from ik2tree.cli import main, parse_slot
from ik2tree.errors import InputError
from ik2tree.ik2tree import Any, Fixed, Range


@pytest.fixture
def plain_file(tmp_path):
    p = tmp_path / "example.txt"
    p.write_text("# x y z\n" + "".join(f"{x} {y} {z}\n" for x, y, z in EXAMPLE_TRIPLES))
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_build_query_stats_plain(plain_file, tmp_path, capsys):
    idx = tmp_path / "example.ik2"
    code, out, _ = run(capsys, "build", plain_file, "-o", idx, "--dims", "8,3,8")
    assert code == 0
    assert out.startswith("triples=6 nx=8 ysize=3 nz=8 k=2,2,2 ")
    code, out, err = run(capsys, "query", idx, "6", "1", "0")
    assert (code, out) == (0, "6 1 0\n")
    assert "# 1 results" in err
    for strategy in ("eager", "lazy", "auto"):
        code, out, _ = run(capsys, "query", idx, "2", "?", "2", "--strategy", strategy)
        assert out == "2 1 2\n"
    code, out, _ = run(capsys, "query", idx, "?0-4", "?", "?")
    assert out.splitlines() == ["0 2 1", "1 0 5", "2 1 2", "4 2 3"]
    code, out, _ = run(capsys, "stats", idx)
    assert out.startswith("mode=plain triples=6")
    assert "backend=" in out


def test_rdf_mode(tmp_path, capsys):
    src = tmp_path / "g.nt"
    src.write_text("<a> <p> <b>\n<a> <q> <c>\n<b> <p> <c>\n")
    idx = tmp_path / "g.ik2"
    assert run(capsys, "build", src, "-o", idx, "--mode", "rdf")[0] == 0
    code, out, _ = run(capsys, "query", idx, "<a>", "?", "?")
    assert out.splitlines() == ["<a> <p> <b>", "<a> <q> <c>"]
    code, out, _ = run(capsys, "query", idx, "?", "<p>", "<c>", "--strategy", "eager")
    assert out == "<b> <p> <c>\n"
    assert run(capsys, "stats", idx)[1].startswith("mode=rdf triples=3")


def test_temporal_mode(tmp_path, capsys):
    src = tmp_path / "log.txt"
    src.write_text("".join(f"{x} {z} {t}\n" for x, z, t in EXAMPLE_CHANGES))
    idx = tmp_path / "log.ik2"
    assert run(capsys, "build", src, "-o", idx, "--mode", "temporal", "--k", "2")[0] == 0
    code, out, _ = run(capsys, "query", idx, "7", "?", "--interval", "1", "2",
                       "--semantics", "strong")
    assert (code, out) == (0, "")
    code, out, _ = run(capsys, "query", idx, "7", "?", "--interval", "1", "2")
    assert out == "7 5\n"
    code, out, _ = run(capsys, "query", idx, "?", "5", "--at", "2")
    assert out == "6 5\n"
    code, _, err = run(capsys, "query", idx, "7", "?")
    assert code == 1 and "exactly one of --at or --interval" in err


def test_errors(plain_file, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n1 2\n")
    code, _, err = run(capsys, "build", bad, "-o", tmp_path / "x.ik2")
    assert code == 1 and "line 2" in err
    code, _, err = run(capsys, "stats", tmp_path / "missing.ik2")
    assert code == 1 and err.startswith("ik2tree: error:")
    junk = tmp_path / "junk.ik2"
    junk.write_bytes(b"not an index")
    code, _, err = run(capsys, "query", junk, "?", "?", "?")
    assert code == 1 and "magic" in err
    idx = tmp_path / "example.ik2"
    run(capsys, "build", plain_file, "-o", idx)
    code, _, err = run(capsys, "query", idx, "0", "1", "0", "--strategy", "lazy")
    assert code == 1
    code, _, err = run(capsys, "query", idx, "9", "?", "?")
    assert code == 1
    with pytest.raises(SystemExit) as exc:
        main(["query"])
    assert exc.value.code == 2


def test_parse_slot():
    assert parse_slot("?") is Any
    assert parse_slot("?2-5") == Range(2, 5)
    assert parse_slot("7") == Fixed(7)
    for tok in ("?x", "?3", "a"):
        with pytest.raises(InputError):
            parse_slot(tok)


def test_bench_backends(capsys):
    code, out, _ = run(capsys, "bench", "--suite", "backends", "--queries", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "query_class,backend,us_per_query,us_per_result,queries,results"
    assert len(lines) > 1
