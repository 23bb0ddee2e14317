import pytest

from cliquegossip import kernels
from cliquegossip import _kernels_py

BACKENDS = [pytest.param(_kernels_py, id="python")]
if kernels.BACKEND == "cython":
    from cliquegossip import _kernels
    BACKENDS.append(pytest.param(_kernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_configure(config):
    config._acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    crit = marker.args[0]
    detail = getattr(item, "acceptance_detail", "")
    item.config._acceptance.setdefault(crit, []).append((item.name, report.passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(results, key=lambda c: (int("".join(filter(str.isdigit, c))), c)):
        checks = results[crit]
        ok = all(p for _, p, _ in checks)
        parts = "; ".join(f"{name.removeprefix('test_')}: {'ok' if p else 'FAIL'}"
                          + (f" ({d})" if d else "") for name, p, d in checks)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'} | {parts}")
