import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Acceptance criteria print one line each; emit the FAIL side here."""
    outcome = yield
    report = outcome.get_result()
    if (report.when == "call" and report.failed
            and item.module.__name__ == "test_acceptance"):
        name = item.name.removeprefix("test_").replace("_", " ")
        print(f"\nACCEPTANCE {name}: FAIL")
