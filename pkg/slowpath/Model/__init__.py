from slowpath.Model.interface import (
    AudioLanguageModel,
    CacheHandle,
    EncoderStates,
    ForwardCounters,
    StepOutput,
    audio_layer_ratios,
    decode_step,
    encode,
    prefill,
)
from slowpath.Model.scripted import ScriptedAudioLM, ScriptedModelSpec
from slowpath.Model.toy import ToyAudioLM, ToyConfig
