"""Shared driving configurations for the oracle cross-checks.

The n=3 oracle costs a 4096^2 dense SVD (about two minutes each), and
fixed_point_oracle caches per configuration, so every module that needs an
oracle state should pick from this list to avoid paying twice.
"""

from hubbard_lax.ness_engine import DrivingConfig

# asymmetric rates, asymmetric potentials, and a symmetric-rate control
CANONICAL_DRIVINGS = (
    (1.5, 0.7, 0.3, -0.4, 2.0),
    (2.0, 1.0, 0.0, 0.0, 1.0),
    (1.0, 1.0, 0.5, 0.5, -0.5),
)


def canonical_configs(n_sites):
    return [DrivingConfig(*d, n_sites) for d in CANONICAL_DRIVINGS]


# one line per acceptance criterion, emitted after the test run so the
# verdicts stay visible even though pytest captures in-test stdout
ACCEPTANCE_LINES = []


def record_acceptance(line: str):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
