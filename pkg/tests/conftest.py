from collections import OrderedDict

import pytest

from gpjflow import ModelParams, make_profile, solve_eta

AC_IDS = [f"AC{i}" for i in range(1, 13)]
_ac_results = OrderedDict((k, []) for k in AC_IDS)


def pytest_itemcollected(item):
    for mark in item.iter_markers("ac"):
        item.user_properties.append(("ac", mark.args[0]))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key, value in report.user_properties:
        if key == "ac":
            _ac_results[value].append((report.nodeid.split("::", 1)[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not any(_ac_results.values()):
        return
    terminalreporter.section("acceptance criteria")
    for ac, results in _ac_results.items():
        if not results:
            terminalreporter.write_line(f"{ac:5s} NOT RUN")
            continue
        failed = [name for name, outcome in results if outcome != "passed"]
        verdict = "PASS" if not failed else "FAIL"
        extra = f"  ({len(results) - len(failed)}/{len(results)} checks; failing: {', '.join(failed)})" if failed \
            else f"  ({len(results)} checks)"
        terminalreporter.write_line(f"{ac:5s} {verdict}{extra}")


@pytest.fixture(scope="session")
def parabola():
    return make_profile("parabola", 1.0)


@pytest.fixture(scope="session")
def solved():
    """Memoised solve_eta keyed by (kind, gamma, n_modes, a, t_end)."""
    cache = {}

    def get(kind, gamma, a, t_end, n_modes=None):
        key = (kind, gamma, n_modes, a, t_end)
        if key not in cache:
            profile = make_profile(kind, gamma, n_modes=n_modes)
            params = ModelParams(a)
            cache[key] = (profile, params, solve_eta(profile, params, t_end))
        return cache[key]

    return get

