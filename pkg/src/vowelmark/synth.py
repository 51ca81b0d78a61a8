"""Source-filter voice synthesizer and synthetic cohort builder.

The source is a low-passed glottal pulse train (-12 dB/oct tilt) with
per-period period and amplitude perturbations, mixed with aspiration
noise at a target harmonic-to-noise ratio, then shaped by a cascade of
three second-order resonators. Every file is deterministic given its
seed, and the generator logs all planted parameters so tests can compare
measured values against the construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import lfilter, lfilter_zi

from .audio_io import (
    AudioSignal,
    Gender,
    Instance,
    Session,
    VOWELS,
    write_manifest,
    write_text_atomic,
    write_wav,
)

SYNTH_RATE = 16000
# double pole; 0.94 keeps the -12 dB/oct tilt while its impulse response
# dies out well within one glottal period (a longer tail would smear
# per-period amplitude perturbations into the next peak)
TILT_COEF = 0.94
ONSET_RAMP_S = 0.4
EDGE_FADE_S = 0.002
PEAK_LEVEL = 0.5

# (frequency Hz, bandwidth Hz) triples per vowel template
VOWEL_FORMANTS: dict[str, tuple[tuple[float, float], ...]] = {
    "a": ((700.0, 80.0), (1220.0, 100.0), (2600.0, 120.0)),
    "e": ((450.0, 70.0), (2200.0, 100.0), (2900.0, 120.0)),
    "i": ((300.0, 60.0), (2300.0, 100.0), (3000.0, 120.0)),
    "o": ((450.0, 70.0), (850.0, 90.0), (2600.0, 120.0)),
    "u": ((320.0, 60.0), (750.0, 90.0), (2500.0, 120.0)),
}


@dataclass(frozen=True)
class VoiceParams:
    f0_hz: float
    duration_s: float
    jitter_pct: float
    shimmer_pct: float
    hnr_db: float
    formants: tuple[tuple[float, float], ...]
    loudness_onset_slope_db_s: float = 0.0
    formant_wobble_hz: float = 0.0
    wobble_rate_hz: float = 3.0
    perturbation: str = "gaussian"  # or "alternating"
    seed: int = 0

    def __post_init__(self):
        if not 55.0 <= self.f0_hz <= 500.0:
            raise ValueError("f0_hz must be in [55, 500]")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if not 0.0 <= self.jitter_pct <= 20.0:
            raise ValueError("jitter_pct must be in [0, 20]")
        if not 0.0 <= self.shimmer_pct <= 20.0:
            raise ValueError("shimmer_pct must be in [0, 20]")
        freqs = [f for f, _ in self.formants]
        if len(freqs) != 3 or sorted(freqs) != freqs:
            raise ValueError("need three ascending formants")
        if self.perturbation not in ("gaussian", "alternating"):
            raise ValueError("perturbation must be gaussian or alternating")


@dataclass
class SynthTrace:
    """Planted source facts for loop-back oracles."""

    pulse_times_s: np.ndarray
    periods_s: np.ndarray
    amplitudes: np.ndarray


def _resonator_coeffs(freq: float, bw: float, rate: int):
    r = np.exp(-np.pi * bw / rate)
    theta = 2.0 * np.pi * freq / rate
    return np.array([1.0, -2.0 * r * np.cos(theta), r * r])


def _apply_resonators(x: np.ndarray, formants, rate: int,
                      wobble_hz: float = 0.0, wobble_rate: float = 3.0):
    (f1, b1), (f2, b2), (f3, b3) = formants
    if wobble_hz > 0.0:
        # time-varying first resonator, updated per 10 ms block
        block = rate // 100
        out = np.empty_like(x)
        zi_state = None
        for start in range(0, x.size, block):
            stop = min(start + block, x.size)
            t = start / rate
            f = f1 + wobble_hz * np.sin(2.0 * np.pi * wobble_rate * t)
            a = _resonator_coeffs(max(f, 60.0), b1, rate)
            if zi_state is None:
                zi_state = lfilter_zi([1.0], a) * 0.0
            out[start:stop], zi_state = lfilter(
                [1.0], a, x[start:stop], zi=zi_state
            )
        x = out
    else:
        x = lfilter([1.0], _resonator_coeffs(f1, b1, rate), x)
    x = lfilter([1.0], _resonator_coeffs(f2, b2, rate), x)
    x = lfilter([1.0], _resonator_coeffs(f3, b3, rate), x)
    return x


def _pulse_train(params: VoiceParams, n: int, rate: int, rng):
    t0 = 1.0 / params.f0_hz
    jit = params.jitter_pct / 100.0
    shim = params.shimmer_pct / 100.0
    times = []
    periods = []
    amps = []
    # keep pulses clear of the edge fades so the first/last rendered
    # peaks sit where the trace says they do
    margin = max(0.25 * t0, EDGE_FADE_S + 0.001)
    t = margin
    k = 0
    while t < n / rate - margin:
        if params.perturbation == "alternating":
            eps_t = jit if k % 2 == 0 else -jit
            eps_a = shim if k % 2 == 0 else -shim
        else:
            eps_t = float(np.clip(rng.normal(0.0, jit), -0.45, 0.45)) if jit > 0 else 0.0
            eps_a = float(np.clip(rng.normal(0.0, shim), -0.45, 0.45)) if shim > 0 else 0.0
        period = t0 * (1.0 + eps_t)
        amp = 1.0 + eps_a
        times.append(t)
        amps.append(amp)
        periods.append(period)
        t += period
        k += 1
    x = np.zeros(n)
    for tt, aa in zip(times, amps):
        s = tt * rate
        i = int(np.floor(s))
        frac = s - i
        if i + 1 < n:
            x[i] += aa * (1.0 - frac)
            x[i + 1] += aa * frac
        elif i < n:
            x[i] += aa
    trace = SynthTrace(
        pulse_times_s=np.asarray(times),
        periods_s=np.asarray(periods[:-1]) if len(periods) > 1 else np.empty(0),
        amplitudes=np.asarray(amps),
    )
    # the k-th logged period is times[k+1] - times[k]
    trace.periods_s = np.diff(trace.pulse_times_s)
    return x, trace


def synth_vowel_traced(params: VoiceParams) -> tuple[AudioSignal, SynthTrace]:
    """Synthesize one vowel and return the planted source facts."""
    rate = SYNTH_RATE
    n = int(round(params.duration_s * rate))
    rng = np.random.default_rng(params.seed)

    pulses, trace = _pulse_train(params, n, rate, rng)
    tilted = lfilter([1.0], [1.0, -TILT_COEF], pulses)
    tilted = lfilter([1.0], [1.0, -TILT_COEF], tilted)
    voiced = _apply_resonators(
        tilted, params.formants, rate,
        wobble_hz=params.formant_wobble_hz,
        wobble_rate=params.wobble_rate_hz,
    )

    noise = rng.standard_normal(n)
    noise = _apply_resonators(noise, params.formants, rate)
    p_voiced = float(np.mean(voiced**2))
    p_noise = float(np.mean(noise**2))
    if p_noise > 0 and p_voiced > 0:
        target = p_voiced / (10.0 ** (params.hnr_db / 10.0))
        noise *= np.sqrt(target / p_noise)
    x = voiced + noise

    t = np.arange(n) / rate
    if params.loudness_onset_slope_db_s > 0:
        ramp_end = min(ONSET_RAMP_S, params.duration_s / 2.0)
        gain_db = -params.loudness_onset_slope_db_s * np.maximum(0.0, ramp_end - t)
        x = x * 10.0 ** (gain_db / 20.0)
    fade = int(EDGE_FADE_S * rate)
    if fade > 0 and n > 2 * fade:
        env = np.ones(n)
        env[:fade] = 0.5 - 0.5 * np.cos(np.pi * np.arange(fade) / fade)
        env[-fade:] = env[:fade][::-1]
        x *= env

    peak = float(np.max(np.abs(x)))
    if peak > 0:
        x *= PEAK_LEVEL / peak
    return AudioSignal(x, rate), trace


def synth_vowel(params: VoiceParams) -> AudioSignal:
    signal, _ = synth_vowel_traced(params)
    return signal


# --- cohorts ---


@dataclass(frozen=True)
class ParamDist:
    mean: float
    sd: float

    def draw(self, rng, lo: float, hi: float) -> float:
        return float(np.clip(rng.normal(self.mean, self.sd), lo, hi))


@dataclass(frozen=True)
class StateParams:
    duration_s: ParamDist
    jitter_pct: ParamDist
    shimmer_pct: ParamDist
    hnr_db: ParamDist
    wobble_hz: ParamDist
    loudness_slope_db_s: ParamDist


@dataclass(frozen=True)
class CohortSpec:
    n_speakers: int
    n_male: int
    pre: StateParams
    post: StateParams
    seed: int
    effect_size: str = "custom"
    with_phrases: bool = False

    def to_json(self) -> str:
        def dists(sp: StateParams):
            return {
                k: [getattr(sp, k).mean, getattr(sp, k).sd]
                for k in ("duration_s", "jitter_pct", "shimmer_pct",
                          "hnr_db", "wobble_hz", "loudness_slope_db_s")
            }
        return json.dumps({
            "n_speakers": self.n_speakers,
            "n_male": self.n_male,
            "pre": dists(self.pre),
            "post": dists(self.post),
            "seed": self.seed,
            "effect_size": self.effect_size,
            "with_phrases": self.with_phrases,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CohortSpec":
        d = json.loads(text)

        def state(block):
            return StateParams(**{k: ParamDist(*v) for k, v in block.items()})

        return cls(
            n_speakers=int(d["n_speakers"]),
            n_male=int(d["n_male"]),
            pre=state(d["pre"]),
            post=state(d["post"]),
            seed=int(d["seed"]),
            effect_size=d.get("effect_size", "custom"),
            with_phrases=bool(d.get("with_phrases", False)),
        )


def _state(duration, jitter, shimmer, hnr, wobble, slope) -> StateParams:
    return StateParams(
        duration_s=ParamDist(*duration),
        jitter_pct=ParamDist(*jitter),
        shimmer_pct=ParamDist(*shimmer),
        hnr_db=ParamDist(*hnr),
        wobble_hz=ParamDist(*wobble),
        loudness_slope_db_s=ParamDist(*slope),
    )


def null_spec(n_speakers: int = 50, seed: int = 0, with_phrases: bool = False) -> CohortSpec:
    """Pre and post states drawn from identical distributions."""
    s = _state((2.5, 0.7), (3.0, 1.0), (6.0, 1.5), (15.0, 3.0), (15.0, 6.0), (60.0, 20.0))
    return CohortSpec(n_speakers, n_speakers // 2, s, s, seed,
                      effect_size="null", with_phrases=with_phrases)


def moderate_spec(n_speakers: int = 50, seed: int = 0, with_phrases: bool = False) -> CohortSpec:
    pre = _state((4.71, 1.5), (4.5, 1.5), (7.0, 2.0), (12.0, 3.0), (20.0, 8.0), (80.0, 25.0))
    post = _state((6.2, 1.5), (3.0, 1.5), (5.0, 2.0), (15.0, 3.0), (12.0, 8.0), (55.0, 25.0))
    return CohortSpec(n_speakers, n_speakers // 2, pre, post, seed,
                      effect_size="moderate", with_phrases=with_phrases)


def strong_spec(n_speakers: int = 50, seed: int = 0, with_phrases: bool = False) -> CohortSpec:
    pre = _state((4.71, 0.8), (6.0, 1.0), (9.0, 1.5), (8.0, 2.0), (30.0, 8.0), (100.0, 25.0))
    post = _state((6.52, 0.8), (2.0, 1.0), (3.5, 1.5), (18.0, 2.0), (8.0, 4.0), (40.0, 15.0))
    return CohortSpec(n_speakers, n_speakers // 2, pre, post, seed,
                      effect_size="strong", with_phrases=with_phrases)


SPEC_PRESETS = {"null": null_spec, "moderate": moderate_spec, "strong": strong_spec}


@dataclass
class GeneratedCohort:
    manifest_path: str
    planted_params_path: str
    instances: list[Instance] = field(default_factory=list)


def _draw_instance_params(state: StateParams, rng) -> dict[str, float]:
    return {
        "duration_s": state.duration_s.draw(rng, 0.6, 15.0),
        "jitter_pct": state.jitter_pct.draw(rng, 0.1, 18.0),
        "shimmer_pct": state.shimmer_pct.draw(rng, 0.1, 18.0),
        "hnr_db": state.hnr_db.draw(rng, 0.0, 40.0),
        "wobble_hz": state.wobble_hz.draw(rng, 0.0, 60.0),
        "loudness_slope_db_s": state.loudness_slope_db_s.draw(rng, 0.0, 400.0),
    }


def _speaker_voice(rng, gender: Gender):
    lo, hi = (95.0, 135.0) if gender is Gender.MALE else (175.0, 225.0)
    return float(rng.uniform(lo, hi)), float(rng.uniform(0.92, 1.08))


def generate_cohort(spec: CohortSpec, out_dir) -> GeneratedCohort:
    """Write WAVs, manifest.csv, and planted_params.csv for a cohort.

    Every speaker keeps one base voice (F0 region, formant scaling)
    across both sessions; the session state only moves the perturbation
    parameters, so per-speaker normalization has an individual effect
    to remove.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    instances: list[Instance] = []
    planted = ["speaker_id,session,kind,f0_hz,duration_s,jitter_pct,"
               "shimmer_pct,hnr_db,wobble_hz,loudness_slope_db_s"]

    for si in range(spec.n_speakers):
        speaker = f"s{si + 1:03d}"
        gender = Gender.MALE if si < spec.n_male else Gender.FEMALE
        voice_rng = np.random.default_rng([spec.seed, 900_000 + si])
        base_f0, formant_scale = _speaker_voice(voice_rng, gender)
        for sess_i, (session, state) in enumerate(
            ((Session.PRE, spec.pre), (Session.POST, spec.post))
        ):
            for ki, kind in enumerate(VOWELS):
                rng = np.random.default_rng([spec.seed, si, sess_i, ki])
                draw = _draw_instance_params(state, rng)
                f0 = float(np.clip(base_f0 * rng.normal(1.0, 0.02), 55.0, 500.0))
                formants = tuple(
                    (f * formant_scale, bw) for f, bw in VOWEL_FORMANTS[kind]
                )
                params = VoiceParams(
                    f0_hz=f0,
                    duration_s=draw["duration_s"],
                    jitter_pct=draw["jitter_pct"],
                    shimmer_pct=draw["shimmer_pct"],
                    hnr_db=draw["hnr_db"],
                    formants=formants,
                    loudness_onset_slope_db_s=draw["loudness_slope_db_s"],
                    formant_wobble_hz=draw["wobble_hz"],
                    seed=spec.seed * 2_000_003 + si * 4093 + sess_i * 31 + ki,
                )
                signal = synth_vowel(params)
                fname = f"{speaker}_{session.value}_{kind}.wav"
                write_wav(out / fname, signal)
                instances.append(Instance(speaker, session, gender, kind, fname))
                planted.append(
                    f"{speaker},{session.value},{kind},{f0:.6g},"
                    f"{draw['duration_s']:.6g},{draw['jitter_pct']:.6g},"
                    f"{draw['shimmer_pct']:.6g},{draw['hnr_db']:.6g},"
                    f"{draw['wobble_hz']:.6g},{draw['loudness_slope_db_s']:.6g}"
                )
            if spec.with_phrases:
                _generate_phrases(
                    spec, out, speaker, gender, session, sess_i, state,
                    base_f0, formant_scale, si, instances, planted,
                )

    manifest_path = out / "manifest.csv"
    write_manifest(manifest_path, instances)
    planted_path = out / "planted_params.csv"
    write_text_atomic(planted_path, "\n".join(planted) + "\n")
    return GeneratedCohort(str(manifest_path), str(planted_path), instances)


def _generate_phrases(spec, out, speaker, gender, session, sess_i, state,
                      base_f0, formant_scale, si, instances, planted):
    """Pseudo-phrases: short vowel syllables separated by pauses."""
    for pi in range(20):
        kind = f"phrase{pi + 1}"
        rng = np.random.default_rng([spec.seed, si, sess_i, 100 + pi])
        draw = _draw_instance_params(state, rng)
        n_syll = int(rng.integers(5, 10))
        pieces = []
        for syll in range(n_syll):
            vowel = VOWELS[int(rng.integers(0, len(VOWELS)))]
            dur = float(rng.uniform(0.12, 0.28))
            pause = float(rng.uniform(0.04, 0.12))
            f0 = float(np.clip(base_f0 * rng.normal(1.0, 0.03), 55.0, 500.0))
            params = VoiceParams(
                f0_hz=f0,
                duration_s=dur,
                jitter_pct=draw["jitter_pct"],
                shimmer_pct=draw["shimmer_pct"],
                hnr_db=draw["hnr_db"],
                formants=tuple(
                    (f * formant_scale, bw) for f, bw in VOWEL_FORMANTS[vowel]
                ),
                formant_wobble_hz=draw["wobble_hz"],
                seed=spec.seed * 2_000_003 + si * 4093 + sess_i * 31
                     + 1000 + pi * 16 + syll,
            )
            pieces.append(synth_vowel(params).samples)
            pieces.append(np.zeros(int(pause * SYNTH_RATE)))
        x = np.concatenate(pieces)
        signal = AudioSignal(x, SYNTH_RATE)
        fname = f"{speaker}_{session.value}_{kind}.wav"
        write_wav(out / fname, signal)
        instances.append(Instance(speaker, session, gender, kind, fname))
        planted.append(
            f"{speaker},{session.value},{kind},{base_f0:.6g},"
            f"{signal.duration_s:.6g},{draw['jitter_pct']:.6g},"
            f"{draw['shimmer_pct']:.6g},{draw['hnr_db']:.6g},"
            f"{draw['wobble_hz']:.6g},{draw['loudness_slope_db_s']:.6g}"
        )
