import pytest

from primedisc import _backend


@pytest.fixture(params=sorted(_backend.KERNELS))
def backend(request):
    return request.param


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance_report(request):
    lines = request.config._acceptance_lines

    def report(number, description, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        lines.append(f"[{status}] criterion {number}: {description}" + (f" ({detail})" if detail else ""))
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
