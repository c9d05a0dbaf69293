from fractions import Fraction
import math

import pytest

import opnbound as ob


def test_cyclotomic():
    assert ob.phi_eval(5, 2) == 31
    assert ob.phi_eval(19, 10**30) > 10**500
    hf = ob.half_factorization(7)
    assert hf["D"] == -7
    assert hf["P"] == [-2, -1, 1, 2]
    assert hf["Q"] == [0, 1, 1]
    X, Y = ob.half_values(5, 2)
    assert X * X - 5 * Y * Y == 4 * 31


def test_lemma3():
    r = ob.lemma3_ratio_check(19, 28)
    assert r["verified"]
    lo, hi = r["ratio"]
    assert isinstance(lo, Fraction)
    assert Fraction(3791, 10000) / 28 < lo <= hi < Fraction(6296, 10000) / 28
    s = ob.lemma3_smallrange_verify(19)
    assert s["count"] == 333 and s["verified"]
    assert ob.lemma3_smallrange_verify(41)["empty"]
    assert ob.lemma3_largex_bounds(23, 529) == (True, True)


def test_chain_and_verdicts():
    c = ob.bound_chain(19)
    names = {b["name"]: b for b in c["chain"]}
    assert names["q2"]["exact"] == "29"
    assert names["q3"]["exact"] == "24391"
    assert all(ch["certified"] for ch in c["checks"])
    assert ob.lemma0_verdict(61) == 5
    assert ob.lemma0_verdict(19) == 6
    with pytest.raises(ob.DomainError):
        ob.lemma0_verdict(17)
    with pytest.raises(ValueError):
        ob.bound_chain(15)


def test_units():
    fu = ob.fundamental_unit(29)
    assert (fu["u"], fu["v"]) == (5, 1)
    lo, hi = fu["regulator"]
    assert lo <= Fraction(math.log((5 + math.sqrt(29)) / 2)) * (1 + Fraction(1, 10**14))
    assert hi - lo < Fraction(1, 10**15)


def test_bounds():
    assert ob.r_bound(9) == 236
    assert ob.r_bound(29, seven=True) == 1887
    assert ob.classical_r_bound(9) == 344
    assert ob.n_bound_exponents(9) == (237, 345)
    assert ob.abundancy_is_two(28)
    assert not ob.abundancy_is_two(12)
    p = ob.partition(5, 1, [3, 11], 1)
    assert p["l"] == 3 and p["U"] == [1]


def test_arith():
    assert ob.factorize(2**4 * 3 * 1000003) == [(2, 4), (3, 1), (1000003, 1)]
    assert ob.is_certified_prime(2**127 - 1)
    assert ob.zsigmondy_primitive_factor(2, 6) is None
    assert ob.zsigmondy_primitive_factor(2, 12) == 13
    assert ob.multiplicative_dependence(4, 8) == (2, 2, 3)
    assert ob.lemma1_divides(5, 11, 4)
    assert ob.root_count_mod(19, 191) == 19


def test_search(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    recs = ob.analyze_x(5, 5)
    assert [(r["p"], r["q"]) for r in recs] == [(11, 71), (71, 11)]
    outs = []
    for shards in (1, 3):
        out = tmp_path / f"s{shards}.jsonl"
        s = ob.run_search(5, 2, 2000, shards=shards, out=out)
        assert not s["interrupted"] and s["skipped"] == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
    first = ob.load_records(tmp_path / "s1.jsonl")[0]
    assert first == {"l": 5, "x": 2, "p": 31, "m": 0, "q": 31, "certified": True, "ts": "1970-01-01T00:00:00Z"}
