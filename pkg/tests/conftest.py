import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # grab the executed module, not a fresh import with an empty list
    mod = next((m for name, m in sys.modules.items()
                if name.rpartition(".")[2] == "test_acceptance"), None)
    lines = getattr(mod, "REPORT_LINES", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
