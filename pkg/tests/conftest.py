import json
import re
import time
from fractions import Fraction

import pytest

from framecert.certifier import InjectivityCertificate, certify_injective, certify_system
from framecert.cli import data_path
from framecert.frame_model import HermitianSystem, eleven_vector_frame, hermitian_system


def cone_system() -> HermitianSystem:
    return HermitianSystem.load(data_path("cone_2x2.json"))


@pytest.fixture(scope="session")
def cone():
    return cone_system()


@pytest.fixture(scope="session")
def cone_cert(cone):
    cert = certify_system(cone, ("x", "y"), lift=True)
    assert isinstance(cert, InjectivityCertificate)
    return cert


@pytest.fixture(scope="session")
def frame():
    return eleven_vector_frame()


@pytest.fixture(scope="session")
def frame_system(frame):
    return hermitian_system(frame)


# wall-clock seconds of the session fixtures, read by the acceptance timing checks
TIMINGS = {}


@pytest.fixture(scope="session")
def frame_cert(frame):
    t0 = time.perf_counter()
    cert = certify_injective(frame, ("x34", "y34"), threads=1)
    TIMINGS["frame_cert"] = time.perf_counter() - t0
    assert isinstance(cert, InjectivityCertificate), cert
    return cert


@pytest.fixture(scope="session")
def frame_shape(frame_system):
    from framecert.rank2_recovery import shape_lemma_solve

    return shape_lemma_solve(frame_system, ("x34", "y34"))


@pytest.fixture(scope="session")
def frame_matrices(frame, frame_cert):
    from framecert.rank2_recovery import recover_matrices

    return recover_matrices(frame, frame_cert, precision_bits=256)


def load_minpoly_table():
    """Transcribed eliminant as {(exp_x34, exp_y34): int}."""
    terms = {}
    for line in data_path("minpoly_x34_y34.txt").read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            ex, ey, c = line.split()
            terms[(int(ex), int(ey))] = int(c)
    return terms


# --- certificate tampering -------------------------------------------------

def coefficient_paths(doc):
    """Every ``[re, im]`` coefficient pair in the identity-bearing parts of a certificate."""
    out = []

    def walk(node, path):
        if isinstance(node, list) and len(node) == 2 and all(isinstance(v, str) for v in node):
            out.append(path)
        elif isinstance(node, list):
            for k, v in enumerate(node):
                walk(v, path + [k])
        elif isinstance(node, dict):
            for k, v in node.items():
                walk(v, path + [k])

    for key in ("f", "f_multipliers", "slices", "presolve"):
        walk(doc[key], [key])
    return [p for p in out if "kept" not in p]


def perturbed(doc, path):
    doc = json.loads(json.dumps(doc))
    node = doc
    for k in path[:-1]:
        node = node[k]
    pair = node[path[-1]]
    pair[0] = str(Fraction(pair[0]) + 1)
    return doc


# --- acceptance summary ---------------------------------------------------

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_outcomes: dict = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        status = "xfail" if hasattr(report, "wasxfail") else report.outcome
        _outcomes.setdefault(int(m.group(1)), {})[report.nodeid] = (status, getattr(report, "wasxfail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_outcomes):
        results = _outcomes[k].values()
        if all(s == "passed" for s, _ in results):
            tr.write_line(f"criterion {k}: PASS")
            continue
        expected = [why for s, why in results if s == "xfail"]
        bad = sum(1 for s, _ in results if s not in ("passed", "xfail"))
        line = f"criterion {k}: FAIL"
        if expected and not bad:
            line += f" (expected failure: {expected[0]})"
        elif bad:
            line += f" ({bad} check(s) failed)"
        tr.write_line(line)
