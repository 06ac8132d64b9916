import csv
import io
import json
import math

import numpy as np
import pytest
from scipy import integrate, stats

from lacunarylab import cli
from lacunarylab.fourier import erdos_fortet_1d, from_cosine
from lacunarylab.sequences import make_superlacunary, make_pow2_minus1
from lacunarylab.spectra import MomentReport
from lacunarylab.sumslab import (SumExperiment, cdf_table, erdos_fortet_experiment,
                                 erdos_fortet_limit_cdf, ks_to_normal, mixture_cdf, run_sums)


def quad_mixture(t):
    # independent route: Phi with random standard deviation sqrt(2)|cos(pi s)|, adaptive quadrature
    g = lambda s: stats.norm.cdf(t / (math.sqrt(2) * abs(math.cos(math.pi * s)))) if math.cos(math.pi * s) else (t >= 0) * 1.0
    val, _ = integrate.quad(g, 0, 1, points=[0.5], limit=200)
    return val


def test_limit_cdf_values():
    assert erdos_fortet_limit_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert erdos_fortet_limit_cdf(math.inf) == 1.0
    assert erdos_fortet_limit_cdf(1.0) == pytest.approx(0.866595, abs=1e-6)
    assert stats.norm.cdf(1.0) < erdos_fortet_limit_cdf(1.0) < 1
    for t in (-3.1, -0.4, 0.7, 1.0, 2.5):
        assert erdos_fortet_limit_cdf(t) == pytest.approx(quad_mixture(t), abs=1e-9)
    grid = np.linspace(-6, 6, 241)
    vals = [erdos_fortet_limit_cdf(t) for t in grid]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_mixture_table():
    mix = mixture_cdf()
    for t in (-2.345, 0.123, 3.7):
        assert mix(t) == pytest.approx(erdos_fortet_limit_cdf(t), abs=2e-5)
    assert mix(-20) == 0.0 and mix(20) == 1.0


def test_orthogonal_sums_variance():
    exp = SumExperiment(from_cosine((1,), 1), make_superlacunary(12), 12, 2000, "sqrt")
    v = run_sums(exp, 1)
    var = v.var(ddof=1)
    se = var * math.sqrt(2 / (len(v) - 1))
    assert abs(var - 0.5) <= 3 * se


def test_sigma_vs_sqrt_normalization():
    exp = SumExperiment(erdos_fortet_1d(), make_superlacunary(256), 256, 2, "sigma")
    assert exp.sigma_N() / (math.sqrt(256) * math.sqrt(float(exp.f.l2_norm_sq()))) == pytest.approx(1, rel=0.02)


def test_single_term_symmetry():
    v = run_sums(SumExperiment(from_cosine((1,), 1), make_superlacunary(1), 1, 2000, "sqrt"), 2)
    assert abs(np.mean(v <= 0) - 0.5) < 0.04


def test_cos_clt():
    exp = SumExperiment(from_cosine((1,), 1), make_superlacunary(256), 256, 2000, "sigma")
    assert ks_to_normal(run_sums(exp, 3)) < 0.04


def test_sums_determinism_and_workers():
    exp = SumExperiment(erdos_fortet_1d(), make_pow2_minus1(40), 40, 30, "sqrt")
    a = run_sums(exp, 8)
    assert np.array_equal(a, run_sums(exp, 8)) and np.array_equal(a, run_sums(exp, 8, workers=3))


def test_experiment_flags_low_power():
    r = erdos_fortet_experiment(16, 8, 0)
    assert r["low_power"] and 0 <= r["ks_to_mixture"] <= 1
    again = erdos_fortet_experiment(16, 8, 0)
    assert (again["ks_to_mixture"], again["ks_to_gaussian"]) == (r["ks_to_mixture"], r["ks_to_gaussian"])


def test_experiment_validation():
    with pytest.raises(ValueError):
        SumExperiment(erdos_fortet_1d(), make_superlacunary(4), 5, 10)
    with pytest.raises(ValueError):
        SumExperiment(erdos_fortet_1d(), make_superlacunary(4), 4, 10, "other")


def test_cdf_table_format():
    text = cdf_table([-1.0, 0.0, 2.0], [0.0, 1.0])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "ecdf", "phi", "mixture"]
    assert float(rows[1][1]) == pytest.approx(2 / 3) and float(rows[1][2]) == 0.5


# ------------------------------------------------------------------ CLI

def run(args, capsys):
    code = cli.main(args)
    return code, capsys.readouterr().out


def test_seq_check_prints_count(tmp_path, capsys):
    code, out = run(["seq-check", "--seq", "pow2", "--n", "8", "--g", "2", "--out", str(tmp_path)], capsys)
    assert code == 0 and "L*(8,2,0) = 14" in out
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "seq-check" and manifest["config"]["n"] == 8


def test_usage_errors(tmp_path, capsys):
    assert cli.main(["esd", "--n", "0", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["esd", "--n", "4", "--f", "nosuch"])
    assert e.value.code == 2
    assert cli.main(["seq-check", "--seq", "pow2minus1", "--n", "0", "--out", str(tmp_path)]) == 2


def test_env_default_out(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LACUNARYLAB_OUT", str(tmp_path / "envout"))
    assert cli.main(["diophantine", "--seq", "pow3", "--n", "4", "--g", "2"]) == 0
    assert (tmp_path / "envout" / "diophantine.csv").exists()


def test_esd_outputs_roundtrip(tmp_path, capsys):
    out = tmp_path / "esd"
    code, _ = run(["esd", "--n", "8", "--samples", "30", "--seed", "1", "--out", str(out)], capsys)
    assert code in (0, 1)
    text = (out / "moments.csv").read_text()
    assert MomentReport.from_csv(text).to_csv() == text
    report = json.loads((out / "report.json").read_text())
    assert set(report) == {"spec_digest", "master_seed", "samples", "results"}


def test_counterexample_exit_code(tmp_path, capsys):
    code, out = run(["counterexample", "--n", "4,8", "--out", str(tmp_path)], capsys)
    assert code == 0 and "N=8" in out
    code, _ = run(["counterexample", "--n", "4", "--margin", "1.0", "--out", str(tmp_path)], capsys)
    assert code == 1


def test_replay_reproduces(tmp_path, capsys):
    a = tmp_path / "a"
    run(["sums", "--n", "32", "--samples", "20", "--seed", "4", "--out", str(a)], capsys)
    b = tmp_path / "b"
    run(["replay", str(a / "manifest.json"), "--out", str(b), "--workers", "2"], capsys)
    for name in ("sums.json", "sums_cdf.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
