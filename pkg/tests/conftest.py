import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

from sefeval.lexicons import default_lexicons  # noqa: E402


@pytest.fixture(scope="session")
def lexicons():
    return default_lexicons()


@pytest.fixture(scope="session")
def cues(lexicons):
    return lexicons.cues


def terms_for(domain, lexicons):
    """Resolve a fixture-corpus domain key to a term tuple or None."""
    if domain is None:
        return None
    return lexicons.for_domain(domain).terms
