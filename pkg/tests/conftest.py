import pytest

from indie.loader import Library, standard_library


@pytest.fixture(scope="session")
def base_library() -> Library:
    return standard_library()


@pytest.fixture()
def lib(base_library) -> Library:
    """Per-test library: cheap clone of the session-wide prelude."""
    return base_library.clone()


@pytest.fixture()
def env(lib):
    return lib.env
