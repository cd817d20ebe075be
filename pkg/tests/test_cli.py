import json

import numpy as np
import pytest

from mfdxa.cli import main
from mfdxa.io import format_table, read_table


@pytest.fixture
def price_volume_csv(tmp_path):
    r = np.random.default_rng(3)
    price = 100 * np.exp(np.cumsum(0.01 * r.standard_normal(1025)))
    volume = np.exp(13 + 0.3 * r.standard_normal(1025))
    path = tmp_path / "pv.csv"
    path.write_text(format_table({"price": price, "volume": volume}))
    return path


def run(args):
    return main([str(a) for a in args])


def test_analyze_json(price_volume_csv, tmp_path):
    out = tmp_path / "r.json"
    assert run(["analyze", "--input", price_volume_csv, "--out", out]) == 0
    d = json.loads(out.read_text())
    assert set(d["series"]) == {"price", "volume", "cross"}
    assert d["provenance"]["n_returns"] == 1024
    assert 0.3 < d["series"]["price"]["h2"] < 0.7
    assert "jobs" not in d["provenance"]["config"] and "out" not in d["provenance"]["config"]


def test_analyze_jobs_byte_identical(price_volume_csv, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["analyze", "--input", price_volume_csv, "--out", a, "--jobs", 1]) == 0
    assert run(["analyze", "--input", price_volume_csv, "--out", b, "--jobs", 4]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_analyze_csv_format(price_volume_csv, capsys):
    assert run(["analyze", "--input", price_volume_csv, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "series,q,h,stderr,r2,tau,alpha,f"
    assert len(lines) == 1 + 3 * 41


def test_self_coupling(tmp_path):
    r = np.random.default_rng(8)
    p = 50 * np.exp(np.cumsum(0.01 * r.standard_normal(1025)))
    path = tmp_path / "same.csv"
    path.write_text(format_table({"price": p, "volume": p}))
    out = tmp_path / "r.json"
    assert run(["analyze", "--input", path, "--out", out, "--rho-unfiltered"]) == 0
    d = json.loads(out.read_text())
    np.testing.assert_allclose([r["rho"] for r in d["rho"]["reported"]], 1.0, atol=1e-10)
    assert d["series"]["price"]["hurst"] == d["series"]["cross"]["hurst"]


def test_malformed_row(tmp_path, capsys):
    lines = ["date,price,volume"] + [f"2015-01-{d:02d},{100 + d},1e6" for d in range(1, 29)]
    lines.insert(5, "2015-02-30,abc,1e6")
    path = tmp_path / "bad.csv"
    path.write_text("\n".join(lines) + "\n")
    assert run(["analyze", "--input", path]) == 1
    err = capsys.readouterr().err
    assert "row 6" in err and "date" in err


def test_bad_number(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("date,price,volume\n2015-01-02,abc,1e6\n")
    assert run(["analyze", "--input", path]) == 1
    err = capsys.readouterr().err
    assert "row 2" in err and "price" in err


def test_non_positive_level(tmp_path, capsys):
    r = np.random.default_rng(0)
    p = np.exp(r.standard_normal(200))
    p[17] = 0.0
    path = tmp_path / "z.csv"
    path.write_text(format_table({"price": p, "volume": np.ones(200) + p}))
    assert run(["analyze", "--input", path]) == 1
    assert "data row 18" in capsys.readouterr().err


def test_too_short(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text(format_table({"price": np.arange(1.0, 30), "volume": np.arange(2.0, 31)}))
    assert run(["analyze", "--input", path]) == 1


def test_bad_config(price_volume_csv):
    assert run(["analyze", "--input", price_volume_csv, "--q-max", "1"]) == 1
    assert run(["analyze", "--input", price_volume_csv, "--detrend-order", "7"]) == 1


def test_synth_pmodel_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run(["synth", "--kind", "pmodel", "--a", 0.75, "--n", 4096, "--out", p]) == 0
    assert a.read_bytes() == b.read_bytes()
    dates, cols, meta = read_table(a, value_cols=("value",))
    assert len(dates) == 4096
    assert cols["value"].sum() == pytest.approx(1.0, abs=1e-12)
    assert any("PCG64" in m for m in meta)


def test_synth_farima_two_columns(tmp_path):
    out = tmp_path / "f.csv"
    assert run(["synth", "--kind", "farima_pair", "--d-x", 0.1, "--d-y", 0.3, "--n", 512, "--out", out]) == 0
    _, cols, _ = read_table(out, value_cols=("x", "y"))
    assert cols["x"].size == cols["y"].size == 512


def test_synth_invalid_spec(tmp_path):
    assert run(["synth", "--kind", "fgn", "--n", 100, "--hurst", 0.5, "--out", tmp_path / "x"]) == 1


def test_synth_levels_feed_analyze(tmp_path):
    out = tmp_path / "f.csv"
    assert run(["synth", "--kind", "farima_pair", "--d-x", 0.1, "--d-y", 0.3, "--n", 1024,
                "--levels", "--out", out]) == 0
    res = tmp_path / "r.json"
    assert run(["analyze", "--input", out, "--price-col", "x", "--volume-col", "y", "--out", res]) == 0
    assert json.loads(res.read_text())["provenance"]["n_returns"] == 1024


@pytest.fixture
def bundle(price_volume_csv, tmp_path):
    out = tmp_path / "r.json"
    assert run(["analyze", "--input", price_volume_csv, "--out", out]) == 0
    return out


@pytest.mark.parametrize("which,header", [
    ("logf_logs", "series,q,log_s,log_F"),
    ("hurst", "series,q,h"),
    ("spectrum", "series,q,alpha,f"),
    ("tau", "series,q,tau"),
    ("qcc", "m,q_cc,critical,significant"),
    ("rho", "s,rho,significant"),
])
def test_plotdata(bundle, tmp_path, which, header):
    out = tmp_path / f"{which}.csv"
    assert run(["plotdata", "--input", bundle, "--which", which, "--out", out]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == header and len(lines) > 1


def test_plotdata_unknown(bundle):
    assert run(["plotdata", "--input", bundle, "--which", "nope"]) == 1


def test_plotdata_not_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("not json")
    assert run(["plotdata", "--input", p, "--which", "hurst"]) == 1


def test_missing_file(tmp_path):
    assert run(["analyze", "--input", tmp_path / "missing.csv"]) == 1
