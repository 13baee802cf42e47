import shutil
import time
from pathlib import Path

import pytest

from stancekit.cli import main
from stancekit.synth import SynthConfig, write_dataset

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory) -> Path:
    """Default synthetic dataset, generated once per session."""
    out = tmp_path_factory.mktemp("synth")
    write_dataset(SynthConfig(), out)
    return out


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory):
    """Full default pipeline in a fresh directory; returns (config path, seconds)."""
    root = tmp_path_factory.mktemp("run_a")
    cfg = root / "config.ini"
    assert main(["init", str(cfg)]) == 0
    t0 = time.perf_counter()
    assert main(["all", "-c", str(cfg)]) == 0
    return cfg, time.perf_counter() - t0


def copy_run(cfg: Path, dest: Path) -> Path:
    """Clone a finished run so a test can tweak inputs without touching the shared one."""
    shutil.copytree(cfg.parent, dest)
    return dest / cfg.name


@pytest.fixture
def acceptance():
    def record(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
