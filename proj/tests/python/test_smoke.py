import json
import math
import os
import subprocess

import numpy as np
import pytest

import fbmpersist as fp


def test_variogram_and_covariance():
    m = fp.CovarianceModel.fbm(0.75)
    assert m.variogram(2.0) == pytest.approx(2 ** 1.5)
    assert fp.CovarianceModel.fbm(0.5).covariance([1, 0], [0, 1]) == pytest.approx(0.5 * (2 - math.sqrt(2)))


def test_sample_shape_and_determinism():
    m = fp.CovarianceModel.fbm(0.5)
    d = fp.Domain.make("cube", 2, 1.0)
    pts = fp.net_points(d, 2.0)
    a = fp.sample(m, pts, seed=3, count=64)
    b = fp.sample(m, pts, seed=3, count=64, workers=2)
    assert a.shape == (64, len(pts))
    assert np.array_equal(a, b)
    origin = np.where((pts == 0).all(axis=1))[0][0]
    assert np.all(a[:, origin] == 0.0)


def test_estimate_p_anchor():
    m = fp.CovarianceModel.fbm(0.5)
    d = fp.Domain.make("cube", 1, 0.5)
    e = fp.estimate_p(m, d, 16.0, barrier=1.0, refinement=4, seed=7, N=5000)
    anchor = 2 * 0.5 * (1 + math.erf(0.25 / math.sqrt(2))) - 1
    assert e["p_hat"] >= anchor - 3 * e["std_error"]
    assert e["ci_lo"] <= e["p_hat"] <= e["ci_hi"]


def test_fit_and_errors():
    f = fp.fit_exponent([4, 8, 16], [4 ** -1.5, 8 ** -1.5, 16 ** -1.5], [0, 0, 0])
    assert f["slope"] == pytest.approx(-1.5)
    with pytest.raises(fp.ConfigError):
        fp.fit_exponent([4, 8], [0.1, 0.05], [0.01, 0.01])
    with pytest.raises(fp.CapExceededError):
        fp.net_points(fp.Domain.make("cube", 2, 1.0), 500.0)


def test_curve_and_records():
    checks = fp.validate_curve(2, 8)
    assert all(v for k, v in checks.items() if k != "length_ratio")
    c = fp.build_curve(1, 2)
    first = [int(p[0]) for p, f in zip(c["points"], c["first_visit"]) if f]
    assert first == [0, 1, -1, 2, -2]
    t = fp.record_trace([0, 3, 1, 2])
    assert t["increments"] == [0, 3, 0, 0]
    assert t["F"] == 3


def test_verify_reports():
    m = fp.CovarianceModel.fbm(0.5)
    d = fp.Domain.make("cube", 1, 0.5)
    rep = fp.lemma2_check(m, d, 16.0, 1.0, 2.0, 0.0, 1.0, seed=1, N=500)
    assert rep["suite"] == "lemma2"
    assert rep["passed"]
    ch = fp.chain_report(0.5, 2, 4, 0.5, 1.0, seed=1, N=200)
    names = {c["name"]: c["passed"] for c in ch["checks"]}
    assert names["record_identity"] and names["containment"]


@pytest.mark.skipif("FBMPERSIST_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_persist(tmp_path):
    cli = os.environ["FBMPERSIST_CLI"]
    res = subprocess.run([cli, "persist", "--T", "4,8", "--N", "500", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "persist"
    res = subprocess.run([cli, "exponent", "--T", "4,8", "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 2
    assert "need >= 3 scales" in res.stderr
