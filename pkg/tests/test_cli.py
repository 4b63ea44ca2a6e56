import argparse
import json

import numpy as np
import pytest

from transradon import fileio
from transradon.cli import build_parser, main, parse_alpha
from transradon.fields import get_threads, set_threads

from conftest import rel_l2


def test_parse_alpha():
    assert parse_alpha("0.5") == 0.5
    assert parse_alpha("0.5,0.25") == 0.5 + 0.25j
    assert parse_alpha("1,0") == 1.0 and isinstance(parse_alpha("1,0"), float)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_alpha("1,2,3")


@pytest.fixture(scope="module")
def phantom_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    f = d / "f.json"
    assert main(["phantom", "--m", "2", "--grid", "128", "--kind", "phi", "--seed", "2",
                 "--band", "0.2", "0.5",
                 "--out", str(f)]) == 0
    s = d / "s.json"
    assert main(["forward", str(f), "--a-extent", "4", "--na", "257", "--out", str(s)]) == 0
    return d, f, s


def test_phantom_forward_files(phantom_files):
    _, f, s = phantom_files
    field = fileio.load(f)
    sino = fileio.load(s)
    assert field.grid.shape == (128, 128) and field.grid.origin == (-8.0, -8.0)
    assert sino.grid.shape == (257, 128)
    assert np.max(np.abs(sino.a_grid.axis(0))) == 4.0


@pytest.mark.parametrize("method,extra,tol", [("fourier", ["--gap", "2.5", "--radius", "12.5"],
                                               1e-3),
                                              ("semyanistyi", ["--alpha", "-0.5",
                                                               "--beta", "-0.5"], 1e-3)])
def test_invert_round_trip(phantom_files, method, extra, tol):
    d, f, s = phantom_files
    out = d / f"rec_{method}.json"
    assert main(["invert", str(s), "--method", method, "--out", str(out)] + extra) == 0
    rec = fileio.load(out)
    assert rel_l2(rec.values, fileio.load(f).values) <= tol
    report = json.loads((d / f"rec_{method}.report.json").read_text())
    assert report["method"] == method


def test_forward_heisenberg_needs_odd_dimension(tmp_path):
    f = tmp_path / "g.json"
    main(["phantom", "--n", "1", "--grid", "16", "--extent", "4", "--out", str(f)])
    assert fileio.load(f).grid.dim == 3
    assert main(["forward", str(f), "--method", "heisenberg", "--a-extent", "2", "--na", "5",
                 "--out", str(tmp_path / "h.json")]) == 0
    g2 = tmp_path / "g2.json"
    main(["phantom", "--m", "2", "--grid", "16", "--extent", "4", "--out", str(g2)])
    with pytest.raises(ValueError):
        main(["forward", str(g2), "--method", "heisenberg", "--a-extent", "2", "--na", "5",
              "--out", str(tmp_path / "h2.json")])


def test_threads_environment_override(monkeypatch, tmp_path):
    monkeypatch.setenv("TRANSRADON_THREADS", "3")
    main(["--threads", "2", "phantom", "--grid", "8", "--out", str(tmp_path / "p.json")])
    assert get_threads() == 3
    monkeypatch.delenv("TRANSRADON_THREADS")
    main(["--threads", "2", "phantom", "--grid", "8", "--out", str(tmp_path / "p.json")])
    assert get_threads() == 2
    set_threads(1)


def test_report_subcommand(tmp_path, capsys):
    rep = {"reports": {"scaling": [
        {"name": "scaling_exponent", "measure": ["slope", 1e-5],
         "details": {"ratios": [{"dilation": 0.5, "ratio": 1.2}]}},
        {"name": "forward_oracle", "measure": ["max_rel_error", None], "details": {}}]}}
    path = tmp_path / "r.json"
    path.write_text(json.dumps(rep))
    csv = tmp_path / "c.csv"
    assert main(["report", str(path), "--csv", str(csv)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "slope=1.000e-05" in out[0] and "n/a" in out[1]
    assert csv.read_text().splitlines() == ["x,y,label", "0.5,1.2,scaling_exponent"]


def test_parser_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "--suite", "everything"])
    args = build_parser().parse_args(["verify", "--threads", "4"])
    assert args.threads == 4 and args.suite == "all" and args.seed == 7
