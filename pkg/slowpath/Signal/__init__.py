from slowpath.Signal.blur import blur_states, blur_waveform, noise_reference
from slowpath.Signal.kernel import BlurKernel, hann_kernel
from slowpath.Signal.synth import Event, EventScript, synth_event_audio
from slowpath.Signal.waveform import Waveform, read_wav, write_wav
