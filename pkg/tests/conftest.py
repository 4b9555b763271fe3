import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from triskel.synth import synth_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A quick 2-class corpus for harness and CLI tests."""
    root = tmp_path_factory.mktemp("small_corpus")
    return synth_corpus(
        ["cross", "star5"], root, per_class=6, noise=0.03, seed=7, size=128
    )
