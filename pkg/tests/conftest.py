import os
import shutil
import sys
import tempfile

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from slowpath.Logging.logger import set_log_file, set_quiet
from slowpath.Meta.config import DecodeConfig
from slowpath.Model.scripted import ScriptedAudioLM, ScriptedModelSpec, sparse_logits
from slowpath.Model.toy import ToyAudioLM
from slowpath.Model.vocab import EOS, TOKEN_TO_ID
from slowpath.Signal.synth import EventScript, synth_event_audio

A = TOKEN_TO_ID["2"]
B = TOKEN_TO_ID["3"]


@pytest.fixture(autouse=True)
def quiet_logging():
    """Keep test output and the working directory free of log noise."""
    set_log_file(None)
    set_quiet(True)
    yield
    set_quiet(False)


@pytest.fixture
def temp_dir(request):
    path = tempfile.mkdtemp(prefix="slowpath_test_")

    def finalizer():
        shutil.rmtree(path, ignore_errors=True)

    request.addfinalizer(finalizer)
    return path


@pytest.fixture(scope="session")
def toy_model():
    return ToyAudioLM()


@pytest.fixture(scope="session")
def ring_audio():
    return synth_event_audio(EventScript(1000.0, ((100.0, 150.0, "ring"), (500.0, 150.0, "ring")), noise_floor=0.01))


def scripted_model(original, blur=None, noise=None, ratios=0.8):
    """
    Scripted model whose first step uses the given sparse logits per view and
    whose later steps always put EOS on top, identically on every view.
    """
    spec = ScriptedModelSpec(n_decoder_layers=2)
    tail = sparse_logits({EOS: 5.0})
    for view, values in (("original", original), ("blur", blur or original), ("noise", noise or original)):
        spec.add(view, (), sparse_logits(values), ratios)
        spec.set_default(view, tail, ratios)
    return ScriptedAudioLM(spec)


@pytest.fixture
def fixed_scale_config():
    """Default configuration with the update scale pinned to 1."""
    return DecodeConfig(lambda_min=1.0, lambda_max=1.0)


def seeded_logits(seed, size=64):
    return np.random.default_rng(seed).normal(0.0, 2.0, size)
