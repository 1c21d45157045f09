import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion id -> list of (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def acceptance_record():
    def record(cid: str, passed: bool, detail: str):
        ACCEPTANCE.setdefault(cid, []).append((bool(passed), detail))
        print(f"{cid} {'PASS' if passed else 'FAIL'}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[cid]
        ok = all(passed for passed, _ in checks)
        terminalreporter.write_line(f"{cid}: {'PASS' if ok else 'FAIL'}")
        for passed, detail in checks:
            terminalreporter.write_line(f"    [{'ok' if passed else 'FAIL'}] {detail}")
