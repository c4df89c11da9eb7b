import re

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_results: dict[int, list] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        k = int(m.group(1))
        details = [f"{name}={value}" for name, value in report.user_properties]
        entry = _results.setdefault(k, [True, []])
        entry[0] = entry[0] and report.outcome == "passed"
        entry[1].extend(details)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        ok, details = _results[k]
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}"
        if details:
            line += "  (" + ", ".join(details) + ")"
        terminalreporter.write_line(line)
