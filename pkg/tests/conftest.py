from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (title, outcome, detail lines); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    number = int(report.nodeid.rsplit("_", 1)[-1].split("[")[0])
    title, _, details = ACCEPTANCE.get(number, ("", None, []))
    ACCEPTANCE[number] = (title, report.outcome, details)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, outcome, details = ACCEPTANCE[number]
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, str(outcome).upper())
        line = f"criterion {number:2d} {verdict}: {title}"
        if details:
            line += " | " + "; ".join(details)
        terminalreporter.write_line(line)
