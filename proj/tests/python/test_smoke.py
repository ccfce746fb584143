import json
import math

import pytest

import p2mu


def test_radial_check_expdec():
    p2mu.set_precision(128)
    r = p2mu.radial_check("expdec", c="1")
    assert r["expdec_holds"] is True
    assert r["expdec_d"] == pytest.approx(1.0, abs=1e-12)
    assert r["loglog_holds"] is True
    assert r["loglog_integral"] == pytest.approx(1.0, abs=1e-12)


def test_regime_flags():
    assert p2mu.radial_check("stretched-exp", c="1", alpha="1/2")["expdec_holds"] is False
    assert p2mu.radial_check("double-exp", c="1")["loglog_holds"] is False


def test_alpha_moments_beta1():
    a = p2mu.alpha_moments("power", 4, beta="1")
    assert a[0] == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert all(a[i + 1] < a[i] for i in range(len(a) - 1))


def test_envelope_oracle():
    e = p2mu.envelope("expdec", 4.0, c="1")
    assert e["k"] == pytest.approx(4.0, abs=1e-12)
    assert e["argmin_y"] == pytest.approx(0.5, abs=1e-12)


def test_fat_cantor_stage_one():
    arcs = p2mu.fat_cantor_stage("1/2", 1)
    assert arcs == [(0.0, 0.375), (0.625, 1.0)]


def test_herglotz_mean_value():
    h = p2mu.herglotz_arc(0.0, 1.0, complex(0.3, 0.4))
    assert h == pytest.approx(1.0 + 0.0j, abs=1e-15)
    h0 = p2mu.herglotz_arc(0.25, 0.25, complex(0.0, 0.0))
    assert h0.real == pytest.approx(0.25, abs=1e-15)


def test_variation_bound():
    v = p2mu.variation_check([(0.0, 0.2), (0.4, 0.7)], 0.99)
    assert v["ok"] is True
    assert v["sum"] <= v["bound"]


def test_predict_full_splitting():
    scenario = {
        "schema": "p2mu-scenario/1",
        "name": "smoke",
        "precision_bits": 128,
        "disk": {"family": "expdec", "c": "1"},
        "boundary": {
            "pieces": [
                {
                    "arc": ["0", "1"],
                    "profile": {
                        "kind": "cantor-indicator",
                        "rule": "geometric",
                        "target_measure": "1/2",
                        "stage": 12,
                        "value": "1",
                    },
                }
            ]
        },
    }
    p = p2mu.predict(json.dumps(scenario))
    assert p["full_splitting"] is True
    assert "full splitting" in p["decomposition"]


def test_run_scenario(tmp_path):
    scenario = {
        "schema": "p2mu-scenario/1",
        "name": "mini",
        "precision_bits": 128,
        "seed": 5,
        "disk": {"family": "expdec", "c": "1"},
        "boundary": {"pieces": [{"arc": ["0", "1"], "profile": {"kind": "const", "value": "1"}}]},
        "targets": [{"name": "t", "kind": "coeff", "coeffs": [{"n": -1, "re": "1"}]}],
        "profile": {"n_list": [2, 4]},
    }
    path = tmp_path / "mini.json"
    path.write_text(json.dumps(scenario))
    out = p2mu.run_scenario(str(path), str(tmp_path / "out"))
    assert out["exit_code"] == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    # the conj(z) target stays at distance 1 for every degree
    assert math.isclose(float(report["profiles"][0]["d_last"]), 1.0, rel_tol=1e-12)
