from pathlib import Path

import pytest

from identifiability.data import read_dataset
from identifiability.likelihood import LikelihoodProblem, normalize
from identifiability.models import ProcessModelSpec
from identifiability.optim import find_mle

FIXTURES = Path(__file__).parent / "fixtures"
CONFIGS = Path(__file__).parents[1] / "configs"

# (fixture file, model id, context)
PROBLEMS = {
    "cooling": ("cooling.csv", "cooling", {"T0": 180.0}),
    "advection_gaussian": ("advection_gaussian.csv", "advection_diffusion", {"u_b": 1.0, "t": 50.0}),
    "advection_lognormal": ("advection_lognormal.csv", "advection_diffusion", {"u_b": 0.0, "t": 50.0}),
    "morphogen": ("morphogen.csv", "morphogen_bvp", {}),
    "morphogen_reparam": ("morphogen.csv", "morphogen_bvp_reparam", {}),
}

_problems = {}
_fits = {}

ACCEPTANCE = []


def fixture_problem(name) -> LikelihoodProblem:
    if name not in _problems:
        fname, model_id, ctx = PROBLEMS[name]
        spec = ProcessModelSpec.create(model_id, ctx)
        _problems[name] = LikelihoodProblem(spec, read_dataset(FIXTURES / fname))
    return _problems[name]


def fixture_fit(name):
    """(OptimResult, NormalizedLikelihood) for a fixture, cached per session."""
    if name not in _fits:
        problem = fixture_problem(name)
        res = find_mle(problem)
        _fits[name] = (res, normalize(problem, res.argmax))
    return _fits[name]


@pytest.fixture
def cooling_problem():
    return fixture_problem("cooling")


@pytest.fixture
def cooling_fit():
    return fixture_fit("cooling")


@pytest.fixture
def acceptance():
    """Record an acceptance criterion outcome and assert it."""

    def report(number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE.append((number, line))
        print(line)
        assert passed, line

    return report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
