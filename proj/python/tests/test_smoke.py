import json
import math
import os
import subprocess

import pytest

import seqsync as ss

UG = ss.CircuitParameters.reference().ug_pos


def test_slg_coefficients():
    k = ss.reference_coefficients("slg", z_f_ohm=0.0)
    assert abs(k.k4) == pytest.approx(0.2555845, rel=1e-6)
    assert abs(k.z5) == pytest.approx(0.7283681, rel=1e-6)
    assert k.z3 == pytest.approx(k.z6)


def test_dlg_limit_and_equilibrium():
    k = ss.reference_coefficients(ss.FaultType.DLG)
    r = ss.traversal_limit(k, UG, ss.Sequence.POS, math.radians(-30), 0.5, math.radians(90))
    assert r.i_limit == pytest.approx(0.76)
    assert str(r.binding) == "TYPE1"
    assert ss.solve_equilibrium(k, ss.current("0.76@-30", "0.5@90"), UG).found
    assert not ss.solve_equilibrium(k, ss.current("0.77@-30", "0.5@90"), UG).found
    assert ss.classify(k, ss.current("0.85@-30", "0.5@90"), UG) == ss.InstabilityType.POS_TYPE1


def test_region_samples():
    k = ss.reference_coefficients("ll")
    samples = ss.region_boundary(k, UG, ss.Sequence.NEG, 0.5, math.radians(-90), math.pi / 2)
    assert len(samples) == 4
    assert samples[0][0] == pytest.approx(-math.pi)


def test_oracle():
    c = ss.compare_with_model(30, 5)
    assert c["draws"] == 30
    assert c["max_relative_error"] < 1e-9


def test_short_simulation():
    sc = ss.Scenario()
    sc.fault = ss.FaultSpec(ss.FaultType.DLG, complex(ss.ohms_to_pu(0.01), 0.0), 0.1, 0.5)
    sc.t_end = 0.5
    sc.ref_fault = ss.current("0.5@-30", "0.3@90")
    r = ss.run_scenario(sc)
    assert not r.verdict.lost
    assert len(r.trace.t) == 501
    # last sample is taken at clearing, on the healthy network
    assert r.trace.f_pos_hz[-2] == pytest.approx(50.0, abs=0.05)


@pytest.mark.skipif("SEQSYNC_CLI" not in os.environ, reason="command-line tool not built")
def test_cli_limit_json():
    out = subprocess.run(
        [os.environ["SEQSYNC_CLI"], "limit", "--fault", "dlg", "--seq", "pos", "--angle", "-30",
         "--other", "0.5@90", "--json"],
        check=True, capture_output=True, text=True,
    ).stdout
    rec = json.loads(out)
    assert rec["i_limit"] == pytest.approx(0.76)
    assert rec["binding"] == "TYPE1"
