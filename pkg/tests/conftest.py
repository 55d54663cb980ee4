def pytest_terminal_summary(terminalreporter, config):
    import test_acceptance

    lines = config.stash.get(test_acceptance.ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
