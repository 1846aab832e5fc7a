import pytest

from hdx.complex_core import WeightKind, build_complex
from hdx.generators import glued_tetrahedra, hollow_simplex, projective_plane_flag, two_triangles

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def triangle():
    return build_complex([(0, 1, 2)], WeightKind.HOMOGENEOUS)


@pytest.fixture
def tetrahedron():
    return build_complex([(0, 1, 2, 3)], WeightKind.HOMOGENEOUS)


@pytest.fixture
def hollow_triangle():
    return hollow_simplex(3)


@pytest.fixture
def two_tri():
    return two_triangles()


@pytest.fixture
def glued():
    return glued_tetrahedra()


@pytest.fixture(scope="session")
def fano():
    return projective_plane_flag(2)
