"""Collects the outcome of every ``criterion``-marked test and prints one line per criterion."""

_ITEMS = {}
_OUTCOMES = {}
_TEXT = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, text = mark.args
            _ITEMS[item.nodeid] = number
            _TEXT[number] = text
            _OUTCOMES.setdefault(number, [])


def pytest_runtest_logreport(report):
    number = _ITEMS.get(report.nodeid)
    if number is None:
        return
    if report.failed:
        _OUTCOMES[number].append("FAIL")
    elif report.skipped:
        _OUTCOMES[number].append("SKIP")
    elif report.when == "call":
        _OUTCOMES[number].append("PASS")


def pytest_terminal_summary(terminalreporter):
    if not _TEXT:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_TEXT):
        seen = _OUTCOMES[number]
        if not seen:
            status = "NOT RUN"
        elif "FAIL" in seen:
            status = "FAIL"
        elif all(o == "PASS" for o in seen):
            status = "PASS"
        else:
            status = "SKIP"
        terminalreporter.write_line(f"ACCEPTANCE {number:>2} {status:<4} {_TEXT[number]}")
