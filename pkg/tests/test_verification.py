"""Built-in verification battery."""

from schwarz_coupling import run_verification


def test_default_battery_passes():
    results = run_verification()
    assert results, "battery produced no checks"
    failed = [r for r in results if r.failed]
    assert not failed, "; ".join(f"{r.name}: {r.detail}" for r in failed)
    names = {r.name for r in results}
    assert any("order" in n for n in names)
    assert any("two-iteration" in n for n in names)
    assert any("contraction" in n for n in names)
    assert any("constraints" in n for n in names)


def test_coarse_vertical_resolution_skips_order_checks():
    results = run_verification(shallow_cells=2)
    skipped = [r for r in results if r.status == "skip"]
    assert skipped, "expected order checks to be skipped below 4 shallow cells"
    assert all("order" in r.name for r in skipped)
    # the coupled-solve checks still run and pass
    ran = [r for r in results if r.status != "skip"]
    assert ran and all(not r.failed for r in ran)
