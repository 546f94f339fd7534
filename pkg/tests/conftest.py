import re

import numpy as np
import pytest

from radarmotion import RadarConfig

# criterion -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_config():
    """Short segments so synthetic scenes stay a few seconds long."""
    return RadarConfig(
        n_channels=8,
        slow_time_fs_hz=100.0,
        clutter_segment_s=2.0,
        movement_window_s=0.5,
        corr_segment_s=4.0,
        taylor_nbar=3,
        angle_grid_deg=(-60.0, 60.0, 2.0),
    )


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: (int(re.match(r"\d+", s).group()), s)):
        ok, detail = ACCEPTANCE[name]
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
