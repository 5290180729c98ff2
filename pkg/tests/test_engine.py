import math
import unittest

import numpy as np
import pytest

from slowpath.errors import DecodeStateError, InvalidArgumentError
from slowpath.Engine.profiler import profile
from slowpath.Engine.session import (
    applicability_probe,
    generate,
    slow_path_frames,
    start_session,
    step,
)
from slowpath.Meta.config import DecodeConfig
from slowpath.Model.scripted import ScriptedAudioLM, ScriptedModelSpec, sparse_logits
from slowpath.Model.toy import ToyAudioLM, ToyConfig
from slowpath.Model.vocab import EOS, VOCAB_SIZE, tokenize
from slowpath.Signal.synth import EVENT_FREQUENCIES_HZ, Event, EventScript, synth_event_audio
from slowpath.Signal.waveform import Waveform

from conftest import A, B, scripted_model

PROMPT = "how many ring ?"
PROMPTS = ["how many ring ?", "how many beep ?", "is there a knock ?", "what sound is first ?", "count the chirp"]


def random_script(seed):
    """Seeded event script with one to three non-overlapping events."""
    rng = np.random.default_rng(seed)
    classes = sorted(EVENT_FREQUENCIES_HZ)
    events = []
    onset = 50.0
    for _ in range(int(rng.integers(1, 4))):
        length = float(rng.integers(40, 150))
        events.append(Event(onset, length, classes[int(rng.integers(len(classes)))]))
        onset += length + float(rng.integers(20, 200))
    return EventScript(onset + 50.0, tuple(events), noise_floor=0.01, seed=seed)


class TestSessionCounters(unittest.TestCase):
    def setUp(self):
        self.model = ToyAudioLM()
        self.x = synth_event_audio(random_script(0))

    def test_start_counts(self):
        session = start_session(self.model, self.x, PROMPT, DecodeConfig())
        self.assertEqual(session.counters.snapshot(), (2, 2))
        baseline = start_session(self.model, self.x, PROMPT, DecodeConfig(strategy="baseline"))
        self.assertEqual(baseline.counters.snapshot(), (1, 1))
        self.assertIsNone(baseline.slowpath)

    def test_states_slow_path_skips_second_encode(self):
        session = start_session(self.model, self.x, PROMPT, DecodeConfig(slow_path="states"))
        self.assertEqual(session.counters.snapshot(), (1, 2))
        self.assertEqual(session.slowpath.view, "blur")

    def test_noise_reference_view(self):
        session = start_session(self.model, self.x, PROMPT, DecodeConfig(strategy="tcd_noise_ref"))
        self.assertEqual(session.slowpath.view, "noise")
        self.assertEqual(session.counters.snapshot(), (2, 2))

    def test_step_counts_and_synchrony(self):
        for strategy, per_step in (("tcd", 2), ("baseline", 1)):
            session = start_session(self.model, self.x, PROMPT, DecodeConfig(strategy=strategy), stop_token=None)
            start = session.counters.decoder_forwards
            for n in range(1, 6):
                step(session)
                self.assertEqual(session.counters.decoder_forwards, start + per_step * n)
                if session.slowpath is not None:
                    self.assertEqual(session.original.tokens, session.slowpath.tokens)
            self.assertEqual(len(session.traces), len(session.generated))

    def test_transcript_counters(self):
        transcript = generate(self.model, self.x, PROMPT, DecodeConfig(), max_tokens=5, stop_token=None)
        steps = len(transcript.tokens)
        self.assertEqual(steps, 5)
        self.assertEqual(transcript.counters, (2, 2 + 2 * steps))
        base = generate(self.model, self.x, PROMPT, DecodeConfig(strategy="baseline"), max_tokens=5, stop_token=None)
        self.assertEqual(base.counters, (1, 1 + 5))

    def test_single_frame_audio(self):
        x = Waveform(np.full(480, 0.1), 16000)
        for strategy in ("tcd", "tcd_signed", "tcd_noise_ref"):
            with self.assertRaises(InvalidArgumentError) as cm:
                start_session(self.model, x, PROMPT, DecodeConfig(strategy=strategy))
            self.assertIn("at least 2 encoder frames", str(cm.exception))
            self.assertIn("got 1 from 30 ms", str(cm.exception))
        baseline = generate(self.model, x, PROMPT, DecodeConfig(strategy="baseline"), max_tokens=2, stop_token=None)
        self.assertEqual(len(baseline.tokens), 2)
        self.assertEqual(baseline.counters, (1, 3))

    def test_slow_path_frames(self):
        self.assertEqual(slow_path_frames(8.0, 50.0), 1)
        self.assertEqual(slow_path_frames(30.0, 50.0), 2)
        self.assertEqual(slow_path_frames(0.1, 50.0), 1)


class TestScriptedDecoding(unittest.TestCase):
    def setUp(self):
        self.x = synth_event_audio(EventScript(1000.0, ((200.0, 100.0, "ring"),), noise_floor=0.01))
        self.config = DecodeConfig(lambda_min=1.0, lambda_max=1.0)

    def decode(self, model, **changes):
        return generate(model, self.x, PROMPT, self.config.replace(**changes), max_tokens=4)

    def test_identical_views_match_baseline(self):
        model = scripted_model({B: 3.0, A: 2.8})
        tcd = self.decode(model)
        base = self.decode(model, strategy="baseline")
        self.assertEqual(tcd.tokens, base.tokens)
        for trace in tcd.traces:
            self.assertTrue(all(value == 0.0 for value in trace.applied_bias.values()))

    def test_tcd_recovers_fast_evidence(self):
        model = scripted_model({B: 3.0, A: 2.8}, blur={B: 3.0, A: 1.0})
        tcd = self.decode(model)
        base = self.decode(model, strategy="baseline")
        self.assertEqual(base.tokens, [B, EOS])
        self.assertEqual(tcd.tokens, [A, EOS])
        first = tcd.traces[0]
        self.assertEqual(first.gate, 1.0)
        self.assertAlmostEqual(first.applied_bias[A], 1.8, delta=1e-12)
        self.assertEqual(first.applied_bias[B], 0.0)
        self.assertEqual(first.baseline_token, B)

    def test_gate_suppresses_low_reliance(self):
        model = scripted_model({B: 3.0, A: 2.8}, blur={B: 3.0, A: 1.0}, ratios=0.05)
        self.assertEqual(self.decode(model).tokens[0], B)
        self.assertEqual(self.decode(model, strategy="tcd_no_gate").tokens[0], A)

    def test_signed_update_differs(self):
        model = scripted_model({B: 3.0, A: 2.8}, blur={B: 4.0, A: 2.8})
        self.assertEqual(self.decode(model).tokens[0], B)
        self.assertEqual(self.decode(model, strategy="tcd_signed").tokens[0], A)

    def test_noise_reference_differs(self):
        model = scripted_model({B: 3.0, A: 2.8}, noise={B: 3.0, A: 1.0})
        self.assertEqual(self.decode(model).tokens[0], B)
        self.assertEqual(self.decode(model, strategy="tcd_noise_ref").tokens[0], A)

    def test_states_slow_path_uses_blur_view(self):
        model = scripted_model({B: 3.0, A: 2.8}, blur={B: 3.0, A: 1.0})
        self.assertEqual(self.decode(model, slow_path="states").tokens[0], A)

    def test_finished_session_rejects_steps(self):
        model = scripted_model({EOS: 4.0})
        session = start_session(model, self.x, PROMPT, self.config)
        token, _ = step(session)
        self.assertEqual(token, EOS)
        self.assertTrue(session.finished)
        with self.assertRaises(DecodeStateError):
            step(session)

    def test_transcript_answer_stops_before_eos(self):
        model = scripted_model({B: 3.0, A: 2.8})
        transcript = self.decode(model)
        self.assertEqual(transcript.answer, [B])
        self.assertEqual(transcript.text, "3 <eos>")
        self.assertTrue(transcript.finished)


def _ranked(values, k):
    return sorted(range(len(values)), key=lambda j: (-values[j], j))[:k]


def reference_step(z, z_blur, ratios, lam, config):
    """One contrastive step computed element by element; returns the chosen id."""
    omega = set(_ranked(z, config.K_orig)) | set(_ranked(z_blur, config.K_blur))
    tail = ratios[-min(config.L_attn, len(ratios)) :]
    r_t = sum(tail) / len(tail)
    top = [z[j] for j in _ranked(z, config.K_ent)]
    weights = [math.exp(v - top[0]) for v in top]
    total = sum(weights)
    entropy = -sum(w / total * math.log(w / total) for w in weights) / math.log(config.K_ent)
    g = min(config.gamma_gate * r_t * entropy**config.alpha, 1.0)
    adjusted = list(z)
    for j in omega:
        adjusted[j] += lam * g * max(z[j] - z_blur[j], 0.0)
    return _ranked(adjusted, 1)[0]


class TestReferenceDecoder(unittest.TestCase):
    """Multi-step decoding on random scripted tables against a plain-Python reimplementation."""

    STEPS = 5
    LAYERS = 3

    def setUp(self):
        self.x = synth_event_audio(EventScript(1000.0, ((200.0, 100.0, "ring"),), noise_floor=0.01))
        self.config = DecodeConfig(lambda_min=0.9, lambda_max=0.9, L_attn=2)

    def random_table(self, seed):
        """Rows along the reference path, filled in lazily, plus the reference tokens."""
        rng = np.random.default_rng(seed)
        spec = ScriptedModelSpec(n_decoder_layers=self.LAYERS)
        for view in ("original", "blur"):
            spec.set_default(view, sparse_logits({EOS: 1.0}), 0.5)
        prefix, tokens = (), []
        for _ in range(self.STEPS):
            z = rng.normal(0.0, 2.0, VOCAB_SIZE)
            z_blur = z + rng.normal(0.0, 1.5, VOCAB_SIZE)
            ratios = rng.uniform(0.0, 1.0, self.LAYERS)
            spec.add("original", prefix, z, ratios)
            spec.add("blur", prefix, z_blur, ratios)
            token = reference_step(list(z), list(z_blur), list(ratios), 0.9, self.config)
            tokens.append(token)
            prefix += (token,)
        return spec, tokens

    def test_tokens_match_reference(self):
        moved = 0
        for seed in range(30):
            spec, expected = self.random_table(seed)
            transcript = generate(
                ScriptedAudioLM(spec), self.x, PROMPT, self.config, max_tokens=self.STEPS, stop_token=None
            )
            self.assertEqual(transcript.tokens, expected, f"seed {seed}")
            moved += sum(1 for trace in transcript.traces if trace.chosen_token != trace.baseline_token)
        self.assertGreater(moved, 0)

    def test_gate_and_reliance_match_reference(self):
        spec, _ = self.random_table(7)
        transcript = generate(ScriptedAudioLM(spec), self.x, PROMPT, self.config, max_tokens=1, stop_token=None)
        first = spec.lookup("original", ())
        ratios = first.attn_audio_ratio_per_layer
        self.assertAlmostEqual(transcript.traces[0].r_t, (ratios[1] + ratios[2]) / 2, delta=1e-12)


class TestToyProperties(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.model = ToyAudioLM()

    def test_gate_off_equivalence(self):
        for seed in range(50):
            x = synth_event_audio(random_script(seed))
            prompt = PROMPTS[seed % len(PROMPTS)]
            base = generate(self.model, x, prompt, DecodeConfig(strategy="baseline"), max_tokens=6)
            gated = generate(self.model, x, prompt, DecodeConfig(gamma_gate=0.0), max_tokens=6)
            self.assertEqual(gated.tokens, base.tokens, f"seed {seed}")

    def test_zero_scale_equivalence(self):
        for seed in range(10):
            x = synth_event_audio(random_script(seed))
            base = generate(self.model, x, PROMPT, DecodeConfig(strategy="baseline"), max_tokens=6)
            flat = generate(self.model, x, PROMPT, DecodeConfig(lambda_min=0.0, lambda_max=0.0), max_tokens=6)
            self.assertEqual(flat.tokens, base.tokens)

    def test_transcript_sparsity(self):
        for seed in range(10):
            x = synth_event_audio(random_script(seed))
            transcript = generate(self.model, x, PROMPT, DecodeConfig(), max_tokens=8)
            for trace in transcript.traces:
                self.assertLessEqual(len(trace.candidate_ids), 24)
                self.assertTrue(set(trace.applied_bias) <= set(trace.candidate_ids))
                self.assertTrue(all(value >= 0.0 for value in trace.applied_bias.values()))
                self.assertTrue(0.0 <= trace.gate <= 1.0)

    def test_logits_depend_on_audio(self):
        clips = [Waveform(np.zeros(16000), 16000)] + [synth_event_audio(random_script(seed)) for seed in range(10)]
        first = []
        for x in clips:
            cache = self.model.prefill(self.model.encode(x), tokenize(PROMPT))
            first.append(cache.pending.logits)
        for other in first[1:]:
            self.assertGreater(np.max(np.abs(other - first[0])), 1e-6)

    def test_determinism(self):
        x = synth_event_audio(random_script(3))
        first = generate(self.model, x, PROMPT, DecodeConfig(), max_tokens=8)
        second = generate(self.model, x, PROMPT, DecodeConfig(), max_tokens=8)
        self.assertEqual(first.trace_lines(), second.trace_lines())
        self.assertEqual(first.to_record(), second.to_record())

    def test_header_echoes_config_and_stability(self):
        x = synth_event_audio(random_script(1))
        transcript = generate(self.model, x, PROMPT, DecodeConfig(), max_tokens=2)
        header = transcript.trace_lines()[0]
        self.assertTrue(header.startswith("session\tL_attn=4\t"))
        self.assertIn("\tstrategy=tcd\t", header)
        self.assertIn("\tS=", header)


def test_applicability_probe_on_bottleneck():
    x = synth_event_audio(random_script(4))
    masked = applicability_probe(ToyAudioLM(ToyConfig(audio_masked=True)), x, PROMPT, DecodeConfig(), max_tokens=4)
    assert masked.mean_reliance == 0.0
    assert masked.gate_activation_rate == 0.0
    unified = applicability_probe(ToyAudioLM(), x, PROMPT, DecodeConfig(), max_tokens=4)
    assert unified.mean_reliance > 0.0
    assert unified.steps >= 1


class TestProfile(unittest.TestCase):
    def setUp(self):
        self.model = ToyAudioLM()
        self.x = synth_event_audio(random_script(2))

    def test_pass_count_ratios(self):
        report = profile(self.model, self.x, PROMPT, DecodeConfig(), n_steps=3)
        ratios = report.ratios()
        self.assertEqual(ratios["prefill_encoder_passes"], 2.0)
        self.assertEqual(ratios["prefill_decoder_passes"], 2.0)
        self.assertEqual(ratios["decode_passes"], 2.0)
        self.assertEqual(len(report.runs["tcd"].step_seconds), 3)
        self.assertIn("2.00", report.render())

    def test_single_step(self):
        report = profile(self.model, self.x, PROMPT, DecodeConfig(), n_steps=1)
        self.assertEqual(len(report.baseline.step_seconds), 1)
        self.assertEqual(report.baseline.decode_passes, (0, 1))

    def test_baseline_only(self):
        report = profile(self.model, self.x, PROMPT, DecodeConfig(strategy="baseline"), n_steps=2)
        self.assertEqual(list(report.runs), ["baseline"])
        self.assertEqual(report.ratios(), {})
        self.assertIsNone(report.contrast)

    def test_invalid_steps(self):
        with pytest.raises(InvalidArgumentError):
            profile(self.model, self.x, PROMPT, DecodeConfig(), n_steps=0)
