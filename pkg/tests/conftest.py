import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def suite_report():
    """The full verification suite, run once and shared across test modules."""
    from zinbiel5.catalog import SuiteConfig, verify_all

    return verify_all(SuiteConfig())


@pytest.fixture(scope="session")
def suite_checks(suite_report):
    return {c.name: c for c in suite_report.checks}
