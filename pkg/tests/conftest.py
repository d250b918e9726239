from __future__ import annotations

import pytest


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line straight to the terminal and return the flag."""

    def emit(label: str, ok: bool, detail: str = "") -> bool:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}" + (f" ({detail})" if detail else ""))
        return ok

    return emit
