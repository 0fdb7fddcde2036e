def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criterion verdicts even when capture is on."""
    try:
        from test_acceptance import CRITERION_RESULTS
    except ImportError:
        return
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, text, status in sorted(CRITERION_RESULTS):
        terminalreporter.write_line(f"criterion {num:02d}: {status} - {text}")
