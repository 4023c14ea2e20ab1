import pytest

import strength


def test_quadric_rank():
    assert strength.quad_rank("x1*x2 + x3^2", 4) == {"rank": 3, "slice_rank": 2}


def test_slice_rank_witness():
    r = strength.slice_rank("x1*x2 + x3*x4", 4, field="F3")
    assert r["value"] == 2 and r["exact"] and len(r["witness"]) == 2


def test_refined_rank_certificate():
    cert = strength.refined_rank("x1^2*x2^2 + x3^3*x4", 4, 1, 1)
    assert cert is not None
    assert strength.verify(cert) == (True, "")
    assert strength.refined_rank("x1^2*x2^2 + x3^3*x4", 4, 0, 1) is None


def test_generate_verify_descend():
    inst = strength.generate(n=8, plant="conjugate-swapped", r2=1, r1=1, seed=3)
    ok, _ = strength.verify(inst)
    assert ok
    out = strength.descend(inst, pipeline="r1")
    assert out["schema"] == "strength-descent/1"
    assert out["certificate"]["field"] == "F3"
    assert strength.verify(out["certificate"])[0]
    assert all(e["pass"] for e in out["ledger"])


def test_tampered_certificate_rejected():
    inst = strength.generate(n=6, plant="rational", field="F5", r2=1, r1=0, seed=2)
    cert = inst["certificate"]
    cert["pairs"] = []
    assert strength.verify(cert)[0] is False


def test_bounds():
    assert strength.thmB_bound(1) == 8 * (41 + 20 * 11**11)
    for r in range(1, 13):
        for q0 in range(13):
            assert strength.c_const(r, 0, q0) == r + q0 - 1
            assert strength.C_const(r, q0) - strength.D_const(r, q0) == r + q0
    assert strength.inequalities_pass(6, 6)


def test_errors_carry_codes():
    with pytest.raises(strength.StrengthError) as e:
        strength.quad_rank("x1 +", 3)
    assert e.value.args[0] == "ParseError"
    with pytest.raises(strength.StrengthError) as e:
        strength.generate(n=4, plant="no-such-plant")
    assert e.value.args[0] == "SpecInvalid"


def test_battery_small():
    rep = strength.battery(seed=4, suites={"bounds": 1, "fieldtower": 5})
    assert rep["pass"] is True
