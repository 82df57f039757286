import math

from unbiased_ea import drift, verify


def test_quick_level_selects_deterministic_checks():
    quick = [c.number for c in verify.CRITERIA if not c.full_only]
    assert quick == [1, 2, 3, 4, 9, 10, 11, 12]
    assert {5, 7} <= {c.number for c in verify.CRITERIA if c.full_only}


def test_tampered_B_range_breaks_drift_identity(monkeypatch):
    def off_by_one(d_dist, dist):
        n = d_dist.n
        coef = drift.mirrored_coefficients(d_dist)
        # drops the largest admissible flip count
        return math.fsum(coef[r] * drift.B(n, dist, r) for r in range(1, min(2 * dist, n - 1)))

    assert verify.drift_identity()[0]
    monkeypatch.setattr(drift, "h_tilde", off_by_one)
    passed, detail = verify.drift_identity()
    assert not passed and detail["max_relative_error"] > 1e-3


def test_crash_becomes_failed_result():
    def boom():
        raise RuntimeError("nope")

    res = verify.run_criterion(verify.Criterion(99, "boom", boom))
    assert not res.passed and "nope" in res.detail["error"]
    assert res.line().startswith("[FAIL]")
