import sys

import acceptance_log

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


def pytest_addoption(parser):
    parser.addoption("--large", action="store_true", default=False,
                     help="include the n=143 stress case in the hybrid factor sweep")


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance_log.LINES):
        terminalreporter.write_line(acceptance_log.LINES[number])
