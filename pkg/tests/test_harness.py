import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cxhyp import harness as H
from cxhyp.errors import ParameterError


def _cli(*argv):
    return H.cli_dispatch(list(argv))


def test_minorant_k1_is_trivial():
    r = H.minorant_delta(0.3, 1)
    assert r.trivial and r.certified and r.delta == 1e6


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0, 0.3, 2.7])
def test_minorant_k2_closed_form(a):
    # one power of l^2 on each side: delta = c_1^2 + c_2^2 = (a-2)^2 + a^2
    r = H.minorant_delta(a, 2)
    assert r.certified
    assert r.delta == pytest.approx((a - 2) ** 2 + a**2, rel=2e-9)
    assert r.delta <= (a - 2) ** 2 + a**2


@pytest.mark.parametrize("a,k", [(0.0, 2), (0.5, 3), (1.0, 4), (0.2, 5)])
def test_minorant_inequality_holds_and_is_sharp(a, k):
    r = H.minorant_delta(a, k)
    assert r.certified and r.delta > 0
    lam = np.linspace(0, 200, 400001)
    c2 = np.array([(a - k + 2 * j - 2) ** 2 for j in range(1, k + 1)])
    lhs = np.prod(lam[:, None] ** 2 + c2, axis=1) - np.prod(c2)
    assert np.all(lhs - lam**2 * (lam**2 + r.delta) ** (k - 1) >= -1e-9 * np.maximum(lhs, 1.0))
    worse = 1.001 * r.delta / (1 - 1e-9)
    big = np.linspace(0, 1e4, 200001)
    lhs = np.prod(big[:, None] ** 2 + c2, axis=1) - np.prod(c2)
    assert np.any(lhs < big**2 * (big**2 + worse) ** (k - 1))


def test_minorant_grows_with_k():
    # the decreasing-in-k pattern does not hold; delta increases for these a
    for a in (0.0, 0.5, 1.0):
        d = [H.minorant_delta(a, k).delta for k in (2, 3, 4, 5)]
        assert all(x < y for x, y in zip(d, d[1:]))


def test_minorant_rejects_k0():
    with pytest.raises(ParameterError):
        H.minorant_delta(0.0, 0)


@settings(max_examples=20, deadline=None)
@given(st.floats(-2.0, 3.0), st.integers(2, 5))
def test_minorant_always_certified_when_positive(a, k):
    r = H.minorant_delta(a, k, grid_count=20001)
    assert r.delta >= 0
    if r.delta > 0:
        assert r.certified


def test_report_pass_flag_and_schema():
    rep = H.ExperimentReport("x", {"label": "l", "quote": "q"}, {"p": 1}, {"m": 0.5, "other": 9.0},
                             {"m": 1.0}, 0.1)
    assert rep.passed
    d = json.loads(rep.to_json())
    assert set(d) == {"id", "anchor", "params", "metrics", "tolerance", "pass", "runtime_s"}
    assert set(d["anchor"]) == {"label", "quote"}
    bad = H.ExperimentReport("x", {"label": "l", "quote": "q"}, {}, {"m": math.nan}, {"m": 1.0})
    assert not bad.passed
    with pytest.raises(ParameterError):
        H.ExperimentReport("x", {"label": "", "quote": "q"}, {}, {}, {})
    with pytest.raises(ParameterError):
        H.ExperimentReport("x", {"label": "l", "quote": "q"}, {}, {}, {"m": 1.0})


def test_registry_covers_manifest_and_has_anchors():
    assert H.manifest_gaps() == []
    for e in H.EXPERIMENTS.values():
        assert e.label and e.quote and e.topics


def test_run_config_validation_and_streams():
    with pytest.raises(ParameterError):
        H.RunConfig(n=1)
    with pytest.raises(ParameterError):
        H.RunConfig(order=3)
    cfg = H.RunConfig()
    assert cfg.replace(seed=None).seed == 42
    a = cfg.rng("heat").random(4)
    np.testing.assert_array_equal(a, cfg.rng("heat").random(4))
    assert not np.array_equal(a, cfg.rng("green").random(4))


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# desk run\nseed = 7\nh=0.05\n\nout = results\n")
    assert H.parse_config_file(str(path)) == {"seed": 7, "h": 0.05, "out": "results"}
    path.write_text("colour = red\n")
    with pytest.raises(ParameterError):
        H.parse_config_file(str(path))


def test_single_experiment_is_deterministic():
    cfg = H.RunConfig()
    a = H.run_experiment("rearrangement", cfg)
    b = H.run_experiment("rearrangement", cfg)
    assert a.metrics == b.metrics and a.passed
    assert a.params["seed"] == 42


def test_cli_usage_errors(capsys):
    assert _cli("frobnicate") == 2
    assert "usage" in capsys.readouterr().err
    assert _cli("verify", "factorization", "--k", "two") == 2
    assert _cli("verify", "heat", "--config", "/nonexistent/cfg") == 2


def test_cli_kernel_eval(capsys):
    assert _cli("kernel", "eval", "--kind", "k_alpha", "--alpha", "1", "--n", "2", "--rho", "0.5") == 0
    rho, val = capsys.readouterr().out.strip().split(",")
    assert float(rho) == 0.5 and float(val) > 0


def test_cli_kernel_table(tmp_path, capsys):
    assert _cli("kernel", "table", "--kind", "k_zeta_alpha", "--alpha", "1", "--zeta", "0.5",
                "--out", str(tmp_path)) == 0
    csv_text = (tmp_path / "k_zeta_alpha_n2.csv").read_text()
    assert csv_text.splitlines()[0].startswith("rho,")
    side = json.loads((tmp_path / "k_zeta_alpha_n2.json").read_text())
    assert side["kind"] == "k_zeta_alpha"


def test_cli_verify_exit_codes(tmp_path, capsys):
    assert _cli("verify", "factorization", "--model", "ball", "--a", "0", "--k", "1", "--n", "2") == 0
    assert "PASS factorization" in capsys.readouterr().out
    assert _cli("verify", "minorant", "--a", "0.5", "--k", "3", "--out", str(tmp_path)) == 0
    rep = json.loads((tmp_path / "minorant.json").read_text())
    assert rep["pass"] and rep["metrics"]["delta_a0.5_k3"] > 4
    assert json.loads((tmp_path / "index.json").read_text())["experiments"][0]["id"] == "minorant"
    assert _cli("verify", "intertwine", "--identity", "even_product", "--k", "1", "--literal") == 1
    assert _cli("verify", "intertwine", "--identity", "shift", "--beta", "1.5") == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "cxhyp", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "report" in out.stdout
