def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, dt, limit, detail = results[k]
        terminalreporter.write_line("criterion %d: %s  %.1fs (limit %ds)  %s"
                                    % (k, "PASS" if ok else "FAIL", dt, limit, detail))
