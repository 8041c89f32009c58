import pytest

from uncgraph.verify import CHECKS, format_table, run_checks


def test_fast_level_passes_and_skips_large_checks():
    results = run_checks("fast", seed=0)
    assert [r.name for r in results] == [name for name, _, _ in CHECKS]
    skipped = {r.name for r in results if r.skipped}
    assert skipped == {name for name, _, full in CHECKS if full}
    failed = [(r.name, r.detail) for r in results if not r.skipped and not r.passed]
    assert failed == []


def test_other_seed_passes():
    results = run_checks("fast", seed=5)
    assert all(r.passed for r in results)


def test_injected_alpha_fails_expected_degree_check():
    (res,) = run_checks("fast", inject_alpha=0.6, only={"randwalk-mod-expected-degrees"})
    assert not res.passed and res.status == "FAIL"
    assert "injected" in res.detail


def test_crashing_check_is_reported(monkeypatch):
    import uncgraph.verify as v

    def boom(ctx):
        raise RuntimeError("broken")

    monkeypatch.setattr(v, "CHECKS", [("boom", boom, False)])
    (res,) = v.run_checks("fast")
    assert not res.passed and "RuntimeError: broken" in res.detail


def test_table_and_level_validation():
    results = run_checks("fast", only={"privacy-score-example"})
    table = format_table(results)
    assert table.splitlines()[0].startswith("check")
    assert "PASS" in table
    with pytest.raises(ValueError):
        run_checks("medium")


@pytest.mark.slow
def test_full_level_passes():
    results = run_checks("full", seed=0)
    assert all(r.passed and not r.skipped for r in results), format_table(results)
