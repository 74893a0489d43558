import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

_CRITERIA: dict[int, tuple[bool, str]] = {}


class CriterionLog:
    """Records one pass/fail line per acceptance criterion."""

    def record(self, number: int, passed: bool, detail: str) -> None:
        prev = _CRITERIA.get(number)
        ok = passed and (prev is None or prev[0])
        text = detail if prev is None else f"{prev[1]}; {detail}"
        _CRITERIA[number] = (ok, text)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def criteria() -> CriterionLog:
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, text = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
