import contextlib

import pytest

# criterion number -> (title, verdict, detail)
CRITERIA = {}


class _Recorder:
    @contextlib.contextmanager
    def __call__(self, number, title):
        entry = {"detail": ""}
        CRITERIA[number] = (title, "FAIL", "")
        try:
            yield entry
        except BaseException:
            CRITERIA[number] = (title, "FAIL", entry["detail"])
            raise
        CRITERIA[number] = (title, "PASS", entry["detail"])


@pytest.fixture
def criterion():
    """Context manager recording the PASS/FAIL verdict of an acceptance criterion."""
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        title, verdict, detail = CRITERIA[number]
        line = f"criterion {number:2d} {verdict}: {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
