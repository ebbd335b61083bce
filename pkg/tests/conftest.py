"""Collects the acceptance criterion outcomes and prints them after the run."""

_CRITERIA = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        status = "PASS" if report.passed else "FAIL"
        _CRITERIA.append((str(props["criterion"]), status, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, status, detail in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {num}: {status}  {detail}")
