def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "setup" and report.skipped:
        print(f"\n[acceptance] SKIP {name}", flush=True)
    elif report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] {status} {name}", flush=True)
