import json
import os
import subprocess

import pytest

CLI = os.environ.get("ANOSOV_CLI", "anosov")
CONFIGS = os.environ.get("ANOSOV_CONFIGS", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))


def run(*args, check=True):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True, timeout=600)
    if check and proc.returncode != 0:
        raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
    return proc


def cfg(name):
    return os.path.join(CONFIGS, name)


def test_orbits_counts_period_two():
    out = json.loads(run("orbits", "--config", cfg("cat.cfg"), "--horizon", "2.5").stdout)
    at_two = [e for e in out["entries"] if abs(e["T"] - 2.0) < 1e-12]
    assert sum(e["mult"] for e in at_two if abs(e["T_prim"] - 2.0) < 1e-12) == 2
    # N_2 = |det(A^2 - I)| = 5: two primitive 2-orbits plus the doubled fixed point
    assert sum(e["mult"] * e["T_prim"] for e in at_two) == pytest.approx(5.0)
    assert out["schema_version"]


def test_orbits_is_deterministic(tmp_path):
    a = run("orbits", "--config", cfg("cat.cfg"), "--horizon", "12").stdout
    b = run("orbits", "--config", cfg("cat.cfg"), "--horizon", "12", "--threads", "3").stdout
    assert a == b


def test_malformed_config_exits_with_two(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[model\ntype = cat\n")
    proc = run("orbits", "--config", str(bad), check=False)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"] == "ConfigParse"


def test_unknown_flag_exits_with_two():
    assert run("orbits", "--no-such-flag", check=False).returncode == 2


def test_missing_file_exits_with_three():
    assert run("orbits", "--config", "/nonexistent/x.cfg", check=False).returncode == 3


def test_zeta_eval_matches_closed_form():
    out = json.loads(run("zeta-eval", "--config", cfg("cat.cfg"), "--z", "2,0.5").stdout)
    res = out["result"]
    q = complex(-2.0, -0.5)
    import cmath

    exact = cmath.log(1 - cmath.exp(q))
    assert abs(complex(res["value_re"], res["value_im"]) - exact) <= res["tail_bound"]


def test_zeros_on_the_imaginary_axis():
    out = json.loads(run("zeros", "--config", cfg("cat.cfg"), "--box", "-1,1,-15,15").stdout)
    ims = sorted(r["im"] for r in out["resonances"])
    assert len(ims) == 5
    for v in ims:
        k = v / (2 * 3.141592653589793)
        assert abs(k - round(k)) < 1e-8


def test_geodesic_catalog_runs():
    out = json.loads(run("orbits", "--config", cfg("fuchsian_gamma2.cfg"), "--horizon", "5").stdout)
    assert out["entries"]
    assert out["complete"] is False


def test_fbi_pipeline(tmp_path):
    smooth = tmp_path / "u.csv"
    run("fbi", "--config", cfg("fbi.cfg"), "--out", str(smooth))
    assert smooth.read_text().startswith("x,xi,re,im,abs\n")
    meta = json.loads((tmp_path / "u.csv.meta.json").read_text())
    assert meta["h"] == 0.01
    fit = json.loads(run("fbi-fit", "--input", str(smooth)).stdout)["result"]
    assert fit["slope"] < 0 and fit["r_squared"] > 0.95

    jump = tmp_path / "j.csv"
    run("fbi", "--config", cfg("fbi.cfg"), "--jump", "1.5", "--out", str(jump))
    none = json.loads(run("fbi-wf", "--config", cfg("fbi.cfg"), "--input", str(smooth)).stdout)["result"]
    assert none["clusters"] == []
    wf = json.loads(run("fbi-wf", "--config", cfg("fbi.cfg"), "--input", str(jump)).stdout)["result"]
    assert any(abs(c["center"] - 1.5) <= 0.1 for c in wf["clusters"])


def test_escape_check_small_scan():
    out = json.loads(run("escape-check", "--config", cfg("escape.cfg"), "--samples", "300").stdout)
    assert out["arguments"]["params"]["T1"] == pytest.approx(8.02)
    assert "result" in out
