import os
import shutil

import pytest


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("XLINK_CLI") or shutil.which("xlink")
    if not path:
        pytest.skip("xlink CLI not available")
    return path


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    import xlink

    out = tmp_path_factory.mktemp("corpus")
    xlink.synth(out, n_profiles_per_network=200, n_matched=80, seed=3)
    return out
