import pytest

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.rsplit(".", 1)[-1] != "test_acceptance":
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        doc = (item.obj.__doc__ or item.name).strip().splitlines()[0]
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        _ACCEPTANCE.append((status, doc, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for status, doc, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{status}] {doc}" + (f"  ({detail})" if detail else ""))
