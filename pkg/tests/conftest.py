"""Acceptance reporting: one PASS/FAIL line per criterion after the run."""

_RESULTS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    marker = report.nodeid.rsplit("::", 1)[-1]
    if not marker.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _RESULTS.get(marker)
        if prev is None or prev[0] == "passed":
            _RESULTS[marker] = (report.outcome, getattr(report, "duration", 0.0))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for name, (num, title) in CRITERIA.items():
        if name not in _RESULTS:
            continue
        outcome, secs = _RESULTS[name]
        if num == 9:
            status = "NOT REPRODUCIBLE (stated)" if outcome == "passed" else "FAIL"
        else:
            status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2}: {status:<26} {title} [{secs:.1f}s]")
