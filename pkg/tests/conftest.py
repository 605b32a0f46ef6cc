import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion."""
    name = request.node.name

    def record(label: str, detail: str) -> None:
        _ACCEPTANCE[name] = (label, detail)

    yield record
    if name in _ACCEPTANCE:
        label, detail = _ACCEPTANCE[name]
        failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
        _ACCEPTANCE[name] = (label, ("FAIL " if failed else "PASS ") + detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, line in sorted(_ACCEPTANCE.values()):
        terminalreporter.write_line(f"{label}: {line}")
