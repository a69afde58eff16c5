"""Shared pytest wiring.

After a run that includes the acceptance gate, print one verdict line per
acceptance test so the criteria can be audited at a glance.
"""

_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _outcomes:
        return
    verdicts = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    terminalreporter.section("acceptance summary")
    for nodeid in sorted(_outcomes):
        verdict = verdicts.get(_outcomes[nodeid], _outcomes[nodeid].upper())
        terminalreporter.write_line(f"ACCEPTANCE {verdict}: {nodeid.rsplit('::', 1)[-1]}")
