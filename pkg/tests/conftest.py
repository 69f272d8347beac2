import pytest

ACCEPTANCE_TITLES = {
    1: "eigenoperator residual",
    2: "commutator scaling",
    3: "entanglement deficit",
    4: "large-N measurement limit",
    5: "Born consistency",
    6: "likely/unlikely asymmetry",
    7: "no-flip probability",
    8: "uncertainty relations",
    9: "frequency-operator comparison",
    10: "qudit inversion",
    11: "Gaussian overlap algebra",
    12: "reproducibility",
}

_outcomes: dict[int, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes.setdefault(marker.args[0], []).append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in ACCEPTANCE_TITLES.items():
        results = _outcomes.get(number)
        if results is None:
            terminalreporter.write_line(f"criterion {number:2d}  NOT RUN  {title}")
            continue
        failed = [name for name, ok in results if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number:2d}  {status:7s}  {title}"
        if failed:
            line += "  (failed: " + ", ".join(failed) + ")"
        terminalreporter.write_line(line)
