import numpy as np
import pytest

from wiretap_ot.protocols import PartyInputs, derive_params
from wiretap_ot.protocols.params import variant_capacity

# Small but feasible instance per variant: (eps1, eps2, N, n, fraction of the achievable rate).
SMALL = {
    "c2p": (0.5, 0.5, 2, 4000, 0.5),
    "c1p": (0.3, 0.6, 2, 4000, 0.5),
    "oneofN_2p": (0.6, 0.5, 3, 6000, 0.5),
    "oneofN_1p": (0.3, 0.6, 3, 6000, 0.5),
    "two_party": (0.5, 1.0, 2, 4000, 0.5),
    "independent_pair": (0.7, 0.5, 2, 4000, 0.5),
    "degraded": (0.1, 0.6, 2, 8000, 0.5),
    "mal_le_half": (0.4, 0.5, 2, 3000, 0.3),
    "mal_gt_half": (0.7, 0.5, 2, 2000, 0.5),
}


def small_params(variant):
    e1, e2, N, n, frac = SMALL[variant]
    return derive_params(variant, frac * variant_capacity(variant, e1, e2, N), e1, e2, n, N=N,
                         tune_n=variant == "mal_gt_half")


def random_inputs(params, seed=0):
    return PartyInputs.random(params, np.random.default_rng(seed))


@pytest.fixture(params=list(SMALL))
def variant(request):
    return request.param


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
