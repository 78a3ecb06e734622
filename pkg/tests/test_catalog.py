import json
from dataclasses import replace
from fractions import Fraction as F

import pytest

from appellode.catalog import (MODES, catalog_entries, catalog_json, eval_rational, get_record,
                               sample_parameters, verify_identity, verify_record)

REQUIRED = [
    "bailey-separation", "f2-separation", "f2f4-bridge", "f2f4-bridge-2", "f1-f3",
    "dihedral-half", "dihedral-three-halves", "dih12", "dih32", "diha2", "f2-f3-reversal",
    "f1-line-y1", "f3-line-y1", "f2x1-wrongformula", "kato-ode", "f4-symmetric-square",
    "a4hpg3", "a4hpg3a", "a4hpg3b", "a4hpg2s", "a4hpg2sa", "a4hpg2sb", "f1q0", "f1q5",
    "f2-origin-x", "f4-origin-xy", "f1-ten-9", "f2-f3-relation", "f1-f2-blowup",
    "f1-separation-elementary", "hpg32-pair-1", "hpg32-pair-2", "hpg32-pair-3",
]


def test_catalog_size_and_modes():
    recs = catalog_entries()
    assert len(recs) >= 40
    assert {r.mode for r in recs} == set(MODES)
    ids = {r.id for r in recs}
    assert not [rid for rid in REQUIRED if rid not in ids]


def test_catalog_json_round_trips():
    doc = json.loads(json.dumps(catalog_json()))
    assert doc["schema"] == 1 and len(doc["records"]) == len(catalog_entries())
    rec = next(r for r in doc["records"] if r["id"] == "bailey-separation")
    assert rec["mode"] == "Exact" and rec["N"] == 8 and rec["provenance"]


def test_bailey_fixed_sample():
    rep = verify_identity(get_record("bailey-separation"), dict(a=F(1, 2), b=F(1, 3), c=F(1, 5)), 8)
    assert rep.outcome == "pass", rep.detail


def test_f2_separation_fixed_sample():
    rep = verify_identity(get_record("f2-separation"), dict(b1=F(1, 3), b2=F(1, 4)), 8)
    assert rep.outcome == "pass", rep.detail


def test_dih12_term_count():
    rep = verify_identity(get_record("dih12"), dict(a=F(1, 3), k=1, l=1), 8)
    assert rep.outcome == "pass" and rep.extra["terms"] == 4


def test_kato_record():
    rep = verify_identity(get_record("kato-ode"), dict(a=F(1, 3), b=F(1, 5), c1=F(1, 7), c2=F(1, 11)))
    assert rep.outcome == "pass" and rep.extra["order"] == 3


def test_expect_fail_record_passes_by_failing():
    rec = get_record("f2x1-wrongformula")
    for s in sample_parameters(rec, 3, 3):
        rep = verify_identity(rec, s)
        assert rep.outcome == "pass" and "as expected" in rep.detail


def test_exact_record_detects_wrong_rhs():
    rec = get_record("bailey-separation")
    broken = replace(rec, rhs="pFq([a, b], [c]; x) * pFq([a, b], [a+b-c+2]; y)")
    rep = verify_identity(broken, dict(a=F(1, 2), b=F(1, 3), c=F(1, 5)))
    assert rep.outcome == "fail" and "coefficient" in rep.detail


def test_printed_dih32_sign_fails():
    rec = get_record("dih32-as-printed")
    assert all(r.outcome == "pass" for r in verify_record(rec, 1, 3))


def test_proportional_reports_one_ratio():
    rec = get_record("f1-line-y1")
    reps = verify_record(rec, 1, 3)
    assert all(r.outcome == "pass" for r in reps)
    assert all(r.extra["ratio"] == "1" for r in reps)


def test_degenerate_sample_rejected():
    rep = verify_identity(get_record("bailey-separation"), dict(a=F(1, 2), b=2, c=F(1, 5)))
    assert rep.outcome == "rejected" and "integer" in rep.detail


# --- sample_parameters ----------------------------------------------------------

def test_samples_deterministic():
    rec = get_record("kato-ode")
    assert sample_parameters(rec, 1, 20) == sample_parameters(rec, 1, 20)
    assert sample_parameters(rec, 1, 5) != sample_parameters(rec, 2, 5)


def test_samples_generic_f4():
    samples = sample_parameters(get_record("kato-ode"), 1, 20)
    assert len(samples) == 20
    for s in samples:
        assert set(s) >= {"a", "b", "c1", "c2"}
        assert all(abs(v.numerator) <= 20 and v.denominator <= 20 for v in s.values())


def test_samples_satisfy_constraints():
    rec = get_record("f2x1-wrongformula")
    for s in sample_parameters(rec, 1, 10):
        assert s["c2"] == s["a"] + s["b2"] + s["d"] and 0 < s["d"] < 7


def test_samples_respect_nonint_hypothesis():
    for s in sample_parameters(get_record("kato-ode"), 1, 20):
        assert s["c1"].denominator > 1 and s["c2"].denominator > 1


def test_eval_rational():
    assert eval_rational("a+b-c+1", dict(a=F(1, 2), b=F(1, 3), c=F(1, 5))) == F(49, 30)


# --- record-level properties ------------------------------------------------------

@pytest.mark.parametrize("rid", ["bailey-separation", "f2f4-bridge", "dihedral-sqrt", "f1-f3"])
def test_exact_records_survive_higher_order(rid):
    rec = get_record(rid)
    for s in sample_parameters(rec, 5, 2):
        rep = verify_identity(rec, s, 12)
        assert rep.outcome == "pass", rep.detail


@pytest.mark.parametrize("rid", ["hpg32-pair-2", "a4hpg3", "f4-symmetric-square", "f1q0"])
def test_same_ode_symmetric(rid):
    rec = get_record(rid)
    swapped = replace(rec, lhs=rec.rhs, rhs=rec.lhs)
    for s in sample_parameters(rec, 1, 2):
        assert verify_identity(rec, s).outcome == verify_identity(swapped, s).outcome == "pass"


def test_report_json():
    rep = verify_identity(get_record("dih12"), dict(a=F(1, 3), k=1, l=1))
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["outcome"] == "pass" and obj["sample"]["a"] == "1/3" and obj["terms"] == 4
