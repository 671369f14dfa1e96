import pytest

from jacobi_density import PeriodicCoefficients, ScalingSpec
from jacobi_density.bands import bands_for

# Named families used throughout; b0 is the period-one off-diagonal limit, so
# the (a, b) of the period-one formulas are (a0, 2*b0).
FAMILIES = {
    "arcsine": PeriodicCoefficients(1, (0.0,), (1.0,)),
    "shifted": PeriodicCoefficients(1, (2.0,), (1.0,)),
    "meixner": PeriodicCoefficients(1, (3.0,), (0.5,)),
    "gapped": PeriodicCoefficients(2, (0.0, 0.0), (1.0, 2.0)),
    "touching": PeriodicCoefficients(2, (0.0, 0.0), (1.0, 1.0)),
    "period3": PeriodicCoefficients(3, (0.3, -1.0, 2.0), (1.0, -0.7, 1.5)),
}


@pytest.fixture(params=sorted(FAMILIES))
def family(request):
    coeffs = FAMILIES[request.param]
    return request.param, coeffs, bands_for(coeffs)


def power(gamma):
    return ScalingSpec.power(gamma)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    def report(criterion: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
