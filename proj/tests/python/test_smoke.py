import pytest

import cyclorank as cr


def test_worked_example():
    r = cr.check("37a1", 5)
    assert [c["status"] for c in r["conditions"]] == ["pass"] * 7
    assert r["conditions"][0]["values"]["ap"] == "-2"
    assert r["conditions"][6]["values"]["count"] == "8"
    assert r["euler_char_valuation"] == 0
    assert r["lambda"] == "mu=0, lambda=1"
    assert r["rank_constant"] and r["diophantine_transfer"]
    assert r["structured"].startswith("schema=cyclorank/1\nkind=condition_report\n")


def test_supersingular_prime_fails():
    r = cr.check([0, 0, 1, -1, 0], 3)
    assert r["label"] == "37a1"
    assert r["conditions"][0]["status"] == "fail"
    assert not r["rank_constant"]


def test_scan():
    r = cr.pi_scan("433a", 60, jobs=2)
    assert r["primes"] == [13]
    assert r["table"] == "433a | {13}\n"
    assert r["status"][5] == "negative-valuation"


def test_point_counts_and_classification():
    assert cr.count_points([0, 0, 1, -1, 0], 5) == 8
    c = cr.classify([0, 0, 1, -1, 0], 17)
    assert c["good"] and not c["ordinary"]
    # large a-invariants go through Python ints unharmed
    assert cr.count_points([0, 0, 0, -(10**30 + 7), 1], 101) > 0


def test_preparation():
    r = cr.prepare(5, [125, 30, 1])
    assert (r["mu"], r["lambda"]) == (0, 2)
    assert cr.prepare(5, [5, 5])["mu"] == 1
    assert cr.prepare(7, ["1/2", 7])["lambda"] == 0
    with pytest.raises(cr.CycloRankError) as e:
        cr.prepare(5, ["1/5", 1])
    assert cr.error_code(e.value) == "InvalidArgument"


def test_euler_characteristic():
    assert cr.euler_char_valuation(1, 0, 1, [1], [8], 1, 5) == 0
    assert cr.lambda_verdict(0, 1) == "mu=0, lambda=1"
    assert cr.euler_char_valuation(1, 0, 25, [1], [8], 1, 5) == 2
    assert cr.lambda_verdict(2, 1) == "inconclusive"


def test_sieve_and_density():
    r = cr.sieve("37a1", "x^2+1", 60)
    assert r["sigma0"] == [5, 13, 29, 41, 53]
    assert all(p % 4 == 1 for p in r["sigma0"])
    count, total, freq = cr.split_density("x^2+1", 10**5)
    assert total == 9592 and abs(freq - 0.5) < 0.01


def test_ingest_and_errors(tmp_path):
    recs = cr.ingest(cr.default_db())
    assert len(recs) == 13
    assert sum(r["rank"] == 2 for r in recs) == 10
    bad = tmp_path / "bad.txt"
    bad.write_text("x | 0,0,1,-1,0 | 1 | 1,1,1,1 | 1 | 1\n")
    with pytest.raises(cr.CycloRankError) as e:
        cr.ingest(str(bad))
    assert cr.error_code(e.value) == "ValidationError"
    with pytest.raises(cr.CycloRankError) as e:
        cr.check("999zz", 5)
    assert cr.error_code(e.value) == "NotFound"
    with pytest.raises(ValueError):
        cr.check([0, 0, 0, 0, 0], 5)


def test_db_from_environment(tmp_path, monkeypatch):
    db = tmp_path / "one.txt"
    db.write_text("mine | 0,0,1,-1,0 | 1 | 0,1,0,1 | 1 | 1\n")
    monkeypatch.setenv("CYCLORANK_DB", str(db))
    assert cr.check("mine", 5)["rank_constant"]
    with pytest.raises(cr.CycloRankError):
        cr.check("37a1", 5)
