"""Collector for the per-criterion result lines printed after the run."""

LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:02d}: {'PASS' if ok else 'FAIL'} - {detail}"
    LINES.append(line)
    return line
