"""Always show one line per acceptance criterion in the terminal summary."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = []
    for name, mod in list(sys.modules.items()):
        if name.rsplit(".", 1)[-1] == "test_acceptance" and hasattr(mod, "RESULTS"):
            results.extend(mod.RESULTS)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, status, seconds in sorted(set(results)):
        terminalreporter.write_line(f"ACCEPTANCE {num:02d} {name}: {status} ({seconds:.1f}s)")
