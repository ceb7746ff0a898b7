import pytest

import redapt


def pytest_runtest_logreport(report):
    """One pass/fail line per acceptance criterion on the terminal."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {name}: {status}", flush=True)


@pytest.fixture(scope="session")
def bundled_spec():
    return redapt.load_bundled_spec()


@pytest.fixture(scope="session")
def spec_path():
    return str(redapt.data_path("hrcs.agmspec"))


def scenario(name):
    from redapt.hrcs import ScenarioConfig

    return ScenarioConfig.from_json(redapt.data_path(f"{name}.json").read_text())


@pytest.fixture(scope="session")
def experiment1():
    return scenario("experiment1")


@pytest.fixture(scope="session")
def experiment2():
    return scenario("experiment2")
