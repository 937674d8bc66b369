import numpy as np
import pytest

from kitecodes.construction import CodeSpec, build_mother_code
from kitecodes.profile import formula_profile, q_from_table


@pytest.fixture(scope="session")
def code1890():
    return build_mother_code(CodeSpec(1890, "improved", 7), q_from_table(1890))


@pytest.fixture(scope="session")
def code1890_original():
    return build_mother_code(CodeSpec(1890, "original", 7), q_from_table(1890))


@pytest.fixture(scope="session")
def code189():
    return build_mother_code(CodeSpec(189, "improved", 5), formula_profile(189))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store the outcome of an acceptance criterion for the end-of-run summary."""

    def put(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")

    return put


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
