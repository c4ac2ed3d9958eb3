import pytest

from fourier_lorentz.fourier import reference_profile
from fourier_lorentz.witness import build_family

ACCEPTANCE = []


def record(criterion: int, passed: bool, detail: str):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def profile15():
    return reference_profile(1.5)


@pytest.fixture(scope="session")
def family4(profile15):
    return build_family(1.5, 0.25, 4, profile=profile15, reverify=True)


@pytest.fixture(scope="session")
def family2(profile15):
    return build_family(1.5, 0.25, 2, profile=profile15)
