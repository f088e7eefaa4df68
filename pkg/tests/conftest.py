"""Collects acceptance-criterion outcomes and prints one line per criterion."""

ACCEPTANCE_RESULTS = []


def record(number, name, ok, detail):
    ACCEPTANCE_RESULTS.append((number, name, bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {name}: {detail}")
