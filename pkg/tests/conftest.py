def pytest_runtest_logreport(report):
    # one visible line per acceptance criterion, printed from the hook so
    # it survives output capture
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {outcome}: {name}", flush=True)
