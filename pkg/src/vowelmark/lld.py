"""Frame-level low-level descriptors.

Two framing paths share one 10 ms hop so every track has the same length:
a 25 ms Hann-windowed spectral path (FFT 512) and a 60 ms periodicity
path centred on the same frame centres (edges are zero-extended).

Voiced-only tracks (f0, jitter, shimmer, hnr, formants, h1_h2, h1_a3)
hold NaN outside their defined domain; spectral tracks are defined on
every frame and always finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .audio_io import AudioSignal
from .errors import FewerThanThreeResonances

FRAME_LEN_S = 0.025
HOP_S = 0.010
PITCH_FRAME_LEN_S = 0.060
FFT_SIZE = 512
PITCH_FFT_SIZE = 2048

F0_MIN_HZ = 55.0
F0_MAX_HZ = 500.0
VOICING_PEAK_MIN = 0.45
VOICING_RMS_DB_MIN = -50.0
OCTAVE_JUMP_COST = 0.8          # Viterbi penalty per octave of F0 movement
MAX_F0_CANDIDATES = 4

LPC_PREEMPHASIS = 0.97
FORMANT_FREQ_MIN_HZ = 90.0
FORMANT_FREQ_MAX_HZ = 5500.0
FORMANT_BW_MAX_HZ = 600.0

HNR_FLOOR_DB = -20.0
HNR_CEIL_DB = 40.0

N_LOUDNESS_BANDS = 26
LOUDNESS_FMIN_HZ = 50.0
LOUDNESS_FMAX_HZ = 5000.0
LOUDNESS_COMPRESSION = 0.33

_EPS = 1e-12

TRACK_NAMES = (
    "f0", "loudness", "jitter", "shimmer", "hnr",
    "f1_freq", "f2_freq", "f3_freq",
    "f1_bandwidth", "f2_bandwidth", "f3_bandwidth",
    "h1_h2", "h1_a3",
    "alpha_ratio", "hammarberg", "slope_0_500", "slope_500_1500", "flux",
)

# tracks meaningful on every frame (the rest are voiced-only)
UNVOICED_OK_TRACKS = (
    "loudness", "alpha_ratio", "hammarberg",
    "slope_0_500", "slope_500_1500", "flux",
)


@dataclass(frozen=True)
class FrameGrid:
    """Shared frame geometry; frame t covers samples [t*hop, t*hop+frame_len)."""

    sample_rate: int
    frame_len: int
    hop: int
    pitch_frame_len: int
    fft_size: int = FFT_SIZE

    @classmethod
    def for_rate(cls, sample_rate: int) -> "FrameGrid":
        return cls(
            sample_rate=sample_rate,
            frame_len=int(round(FRAME_LEN_S * sample_rate)),
            hop=int(round(HOP_S * sample_rate)),
            pitch_frame_len=int(round(PITCH_FRAME_LEN_S * sample_rate)),
        )

    def n_frames(self, n_samples: int) -> int:
        return max(1, (n_samples - self.frame_len) // self.hop + 1)

    def frame_center_samples(self, n_frames: int) -> np.ndarray:
        return np.arange(n_frames) * self.hop + self.frame_len // 2

    @property
    def hop_s(self) -> float:
        return self.hop / self.sample_rate


@dataclass
class LldContours:
    """Frame-synchronous descriptor tracks plus the voicing mask."""

    grid: FrameGrid
    duration_s: float
    voiced: np.ndarray
    tracks: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_frames(self) -> int:
        return self.voiced.size

    def track(self, name: str) -> np.ndarray:
        return self.tracks[name]


def _frame_matrix(x: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    if x.size < frame_len:
        x = np.concatenate([x, np.zeros(frame_len - x.size)])
    n = (x.size - frame_len) // hop + 1
    idx = np.arange(frame_len)[None, :] + hop * np.arange(n)[:, None]
    return x[idx]


def _centered_frames(x: np.ndarray, centers: np.ndarray, length: int) -> np.ndarray:
    """Frames of `length` centred on given samples, zero-extended at edges."""
    half = length // 2
    out = np.zeros((centers.size, length))
    for i, c in enumerate(centers):
        lo = c - half
        hi = lo + length
        src_lo = max(lo, 0)
        src_hi = min(hi, x.size)
        if src_hi > src_lo:
            out[i, src_lo - lo:src_hi - lo] = x[src_lo:src_hi]
    return out


# --- pitch path ---


@lru_cache(maxsize=8)
def _pitch_window_acf(length: int) -> tuple[np.ndarray, np.ndarray]:
    win = np.hanning(length)
    spec = np.fft.rfft(win, PITCH_FFT_SIZE)
    acf = np.fft.irfft(spec.real**2 + spec.imag**2)[:length]
    return win, acf / acf[0]


def _parabolic_peak(y: np.ndarray, k: int) -> tuple[float, float]:
    """Refine a discrete local maximum at index k; returns (position, value)."""
    if k <= 0 or k >= y.size - 1:
        return float(k), float(y[k])
    denom = y[k - 1] - 2.0 * y[k] + y[k + 1]
    if denom >= 0:
        return float(k), float(y[k])
    delta = 0.5 * (y[k - 1] - y[k + 1]) / denom
    pos = k + delta
    val = y[k] - 0.25 * (y[k - 1] - y[k + 1]) * delta
    return float(pos), float(val)


def estimate_f0(signal: AudioSignal, grid: FrameGrid | None = None):
    """Autocorrelation F0 with octave-jump smoothing.

    Search range 55-500 Hz on 60 ms frames. A frame is voiced when the
    window-corrected ACF peak reaches 0.45 and the frame RMS is above
    -50 dBFS. Within each voiced run, the per-frame candidate peaks are
    resolved by a shortest-path pass whose transition cost is
    OCTAVE_JUMP_COST * |log2(f_t / f_{t-1})|.

    Returns (f0_hz with NaN on unvoiced frames, voiced mask, peak
    strength per frame).
    """
    if grid is None:
        grid = FrameGrid.for_rate(signal.sample_rate)
    x = signal.samples
    rate = grid.sample_rate
    n = grid.n_frames(x.size)
    centers = grid.frame_center_samples(n)
    frames = _centered_frames(x, centers, grid.pitch_frame_len)

    rms = np.sqrt(np.mean(frames**2, axis=1))
    rms_db = 20.0 * np.log10(rms + _EPS)

    win, win_acf = _pitch_window_acf(grid.pitch_frame_len)
    fm = (frames - frames.mean(axis=1, keepdims=True)) * win
    spec = np.fft.rfft(fm, PITCH_FFT_SIZE)
    acf = np.fft.irfft(spec.real**2 + spec.imag**2, axis=1)[:, :grid.pitch_frame_len]
    r0 = acf[:, 0].copy()
    r0[r0 <= 0] = _EPS
    racf = acf / r0[:, None] / win_acf[None, :]

    lag_min = int(np.floor(rate / F0_MAX_HZ))
    lag_max = int(np.ceil(rate / F0_MIN_HZ))
    lag_max = min(lag_max, grid.pitch_frame_len - 2)

    voiced = np.zeros(n, dtype=bool)
    strength = np.zeros(n)
    candidates: list[list[tuple[float, float]]] = []
    for t in range(n):
        seg = racf[t]
        local = (
            (seg[lag_min:lag_max] > seg[lag_min - 1:lag_max - 1])
            & (seg[lag_min:lag_max] >= seg[lag_min + 1:lag_max + 1])
        )
        peaks = np.nonzero(local)[0] + lag_min
        cands = []
        for k in peaks:
            pos, val = _parabolic_peak(seg, int(k))
            cands.append((rate / pos, min(val, 1.0 - 1e-9)))
        cands.sort(key=lambda c: (-c[1], c[0]))
        cands = cands[:MAX_F0_CANDIDATES]
        candidates.append(cands)
        if cands:
            strength[t] = cands[0][1]
            voiced[t] = cands[0][1] >= VOICING_PEAK_MIN and rms_db[t] >= VOICING_RMS_DB_MIN

    f0 = np.full(n, np.nan)
    best_r = np.full(n, np.nan)
    t = 0
    while t < n:
        if not voiced[t]:
            t += 1
            continue
        end = t
        while end + 1 < n and voiced[end + 1]:
            end += 1
        _smooth_run(candidates, f0, best_r, t, end)
        t = end + 1
    return f0, voiced, best_r


def _smooth_run(candidates, f0, best_r, start, end):
    """Viterbi pass over one voiced run; writes chosen f0 and peak value."""
    prev_cost = None
    prev_back: list[list[int]] = []
    choices = []
    for t in range(start, end + 1):
        cands = candidates[t]
        cost = np.empty(len(cands))
        back = [-1] * len(cands)
        for ci, (f, v) in enumerate(cands):
            local = -v
            if prev_cost is None:
                cost[ci] = local
            else:
                trans = prev_cost + OCTAVE_JUMP_COST * np.abs(
                    np.log2(f / np.array([c[0] for c in choices[-1]]))
                )
                bi = int(np.argmin(trans))
                cost[ci] = local + trans[bi]
                back[ci] = bi
        prev_cost = cost
        prev_back.append(back)
        choices.append(cands)
    path = [int(np.argmin(prev_cost))]
    for t in range(len(choices) - 1, 0, -1):
        path.append(prev_back[t][path[-1]])
    path.reverse()
    for off, ci in enumerate(path):
        f, v = choices[off][ci]
        f0[start + off] = f
        best_r[start + off] = v


def hnr_from_peak(r: np.ndarray) -> np.ndarray:
    """Harmonicity in dB from the ACF peak value at the period lag."""
    r = np.clip(r, 1e-6, 1.0 - 1e-6)
    return np.clip(10.0 * np.log10(r / (1.0 - r)), HNR_FLOOR_DB, HNR_CEIL_DB)


# --- period marks, jitter, shimmer ---


def period_marks(signal: AudioSignal, f0: np.ndarray, voiced: np.ndarray,
                 grid: FrameGrid | None = None):
    """Glottal period boundaries: waveform peaks near multiples of 1/F0.

    Returns (mark times in seconds, peak amplitude at each mark). Marks
    are produced per voiced region and never cross region boundaries.
    """
    if grid is None:
        grid = FrameGrid.for_rate(signal.sample_rate)
    x = signal.samples
    rate = grid.sample_rate
    half_frame = grid.frame_len // 2
    marks: list[tuple[float, float]] = []

    t = 0
    n = voiced.size
    while t < n:
        if not voiced[t]:
            t += 1
            continue
        end = t
        while end + 1 < n and voiced[end + 1]:
            end += 1
        s0 = 0 if t == 0 else t * grid.hop + half_frame - grid.hop // 2
        if end == n - 1:
            s1 = x.size
        else:
            s1 = min(x.size, end * grid.hop + half_frame + grid.hop // 2 + 1)
        _mark_region(x, f0, grid, s0, s1, marks)
        t = end + 1

    times = np.asarray([m for m, _ in marks]) / rate
    amps = np.asarray([a for _, a in marks])
    return times, amps


def _f0_at_sample(f0: np.ndarray, grid: FrameGrid, s: int, fallback: float) -> float:
    t = int(round((s - grid.frame_len // 2) / grid.hop))
    t = min(max(t, 0), f0.size - 1)
    v = f0[t]
    return float(v) if np.isfinite(v) else fallback


def _refine_peak(x: np.ndarray, m: int) -> tuple[float, float]:
    # sub-sample peak position; quantized marks alone add ~0.4% jitter
    if m <= 0 or m >= x.size - 1:
        pos = float(m)
    else:
        pos, _ = _parabolic_peak(x, m)
    # short average around the peak: a single sample is too noise-sensitive
    lo = max(0, m - 4)
    hi = min(x.size, m + 5)
    return pos, float(abs(x[lo:hi].mean()))


def _mark_region(x, f0, grid, s0, s1, marks):
    rate = grid.sample_rate
    f = _f0_at_sample(f0, grid, s0, np.nan)
    if not np.isfinite(f):
        return
    period = rate / f
    # anchor on the strongest peak among the first two periods, then walk
    # both directions: onsets may be too weak to anchor reliably
    w_end = min(s1, s0 + int(round(2.2 * period)))
    if w_end - s0 < 3:
        return
    anchor = s0 + int(np.argmax(x[s0:w_end]))

    backward: list[int] = []
    m = anchor
    last_period = period
    while True:
        f = _f0_at_sample(f0, grid, m, rate / last_period)
        period = rate / f
        pred = m - period
        lo = int(round(pred - 0.3 * period))
        hi = int(round(pred + 0.3 * period)) + 1
        if lo < s0 or hi >= m:
            break
        m = lo + int(np.argmax(x[lo:hi]))
        backward.append(m)
        last_period = period
    marks.extend(_refine_peak(x, mm) for mm in reversed(backward))

    m = anchor
    marks.append(_refine_peak(x, m))
    last_period = rate / _f0_at_sample(f0, grid, anchor, f)
    while True:
        f = _f0_at_sample(f0, grid, m, rate / last_period)
        period = rate / f
        pred = m + period
        lo = int(round(pred - 0.3 * period))
        hi = int(round(pred + 0.3 * period)) + 1
        if hi > s1 or lo <= m:
            break
        m = lo + int(np.argmax(x[lo:hi]))
        marks.append(_refine_peak(x, m))
        last_period = period


def jitter_shimmer(mark_times: np.ndarray, mark_amps: np.ndarray,
                   n_frames: int, grid: FrameGrid):
    """Per-frame relative period and amplitude perturbation.

    For each frame, the periods whose midpoints fall within the 60 ms
    periodicity window contribute; frames with fewer than three periods
    stay undefined (NaN).
    """
    jitter = np.full(n_frames, np.nan)
    shimmer = np.full(n_frames, np.nan)
    if mark_times.size < 4:
        return jitter, shimmer
    periods = np.diff(mark_times)
    mids = 0.5 * (mark_times[:-1] + mark_times[1:])
    amps = mark_amps[:-1]

    centers = grid.frame_center_samples(n_frames) / grid.sample_rate
    half = PITCH_FRAME_LEN_S / 2
    lo = np.searchsorted(mids, centers - half, side="left")
    hi = np.searchsorted(mids, centers + half, side="right")
    for t in range(n_frames):
        k0, k1 = lo[t], hi[t]
        if k1 - k0 < 3:
            continue
        ts = periods[k0:k1]
        mean_t = ts.mean()
        if mean_t > 0:
            jitter[t] = np.abs(np.diff(ts)).mean() / mean_t
        As = amps[k0:k1]
        mean_a = As.mean()
        if mean_a > 0:
            shimmer[t] = np.abs(np.diff(As)).mean() / mean_a
    return jitter, shimmer


# --- linear prediction formants ---


def _levinson(r: np.ndarray, order: int) -> np.ndarray | None:
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    if err <= 0:
        return None
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1:0:-1])
        k = -acc / err
        a[1:i + 1] = a[1:i + 1] + k * a[i - 1::-1][:i]
        err *= 1.0 - k * k
        if err <= 0:
            return None
    return a


def lpc_order(sample_rate: int) -> int:
    return 2 + sample_rate // 1000


def formants(frame: np.ndarray, sample_rate: int):
    """F1-F3 frequencies and bandwidths via autocorrelation-method LPC.

    Pre-emphasis 0.97, order 2 + rate/1000. Complex root pairs with
    frequency in [90, 5500] Hz and bandwidth below 600 Hz count as
    resonances; fewer than three raises FewerThanThreeResonances.
    """
    order = lpc_order(sample_rate)
    y = np.empty_like(frame)
    y[0] = frame[0]
    y[1:] = frame[1:] - LPC_PREEMPHASIS * frame[:-1]
    y = y * np.hanning(y.size)
    r = np.correlate(y, y, mode="full")[y.size - 1:y.size + order]
    a = _levinson(r, order)
    if a is None:
        raise FewerThanThreeResonances("degenerate frame")
    roots = np.roots(a)
    roots = roots[np.imag(roots) > 0]
    freqs = np.arctan2(np.imag(roots), np.real(roots)) * sample_rate / (2 * np.pi)
    mags = np.abs(roots)
    mags = np.clip(mags, _EPS, 1.0 - 1e-12)
    bws = -(sample_rate / np.pi) * np.log(mags)
    keep = (
        (freqs >= FORMANT_FREQ_MIN_HZ)
        & (freqs <= FORMANT_FREQ_MAX_HZ)
        & (bws < FORMANT_BW_MAX_HZ)
    )
    freqs, bws = freqs[keep], bws[keep]
    if freqs.size < 3:
        raise FewerThanThreeResonances(f"only {freqs.size} resonances")
    idx = np.argsort(freqs)
    return freqs[idx][:3], bws[idx][:3]


# --- spectral path ---


@lru_cache(maxsize=8)
def _mel_filterbank(sample_rate: int, n_fft: int) -> np.ndarray:
    def to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def from_mel(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    freqs = np.fft.rfftfreq(n_fft, 1.0 / sample_rate)
    pts = from_mel(np.linspace(to_mel(LOUDNESS_FMIN_HZ), to_mel(LOUDNESS_FMAX_HZ),
                               N_LOUDNESS_BANDS + 2))
    bank = np.zeros((N_LOUDNESS_BANDS, freqs.size))
    for b in range(N_LOUDNESS_BANDS):
        left, mid, right = pts[b], pts[b + 1], pts[b + 2]
        up = (freqs - left) / max(mid - left, _EPS)
        down = (right - freqs) / max(right - mid, _EPS)
        bank[b] = np.clip(np.minimum(up, down), 0.0, None)
    return bank


def _band_energy(power: np.ndarray, freqs: np.ndarray, lo: float, hi: float):
    sel = (freqs >= lo) & (freqs < hi)
    return power[:, sel].sum(axis=1)


def _ls_slope(level_db: np.ndarray, freqs: np.ndarray, lo: float, hi: float):
    sel = (freqs >= lo) & (freqs <= hi)
    f = freqs[sel]
    fc = f - f.mean()
    denom = np.dot(fc, fc)
    return (level_db[:, sel] @ fc) / max(denom, _EPS)


def spectral_descriptors(signal: AudioSignal, grid: FrameGrid | None = None):
    """Per-frame band measures from the 25 ms Hann / FFT-512 path.

    Returns a dict with loudness, alpha_ratio, hammarberg, the two
    low-band spectral slopes, flux, plus the raw magnitude spectra for
    the harmonic measures.
    """
    if grid is None:
        grid = FrameGrid.for_rate(signal.sample_rate)
    x = signal.samples
    rate = grid.sample_rate
    frames = _frame_matrix(x, grid.frame_len, grid.hop)
    win = np.hanning(grid.frame_len)
    fm = (frames - frames.mean(axis=1, keepdims=True)) * win
    spec = np.fft.rfft(fm, grid.fft_size)
    mags = np.abs(spec)
    power = mags**2
    freqs = np.fft.rfftfreq(grid.fft_size, 1.0 / rate)

    e_low = _band_energy(power, freqs, 50.0, 1000.0)
    e_high = _band_energy(power, freqs, 1000.0, 5000.0)
    alpha = 10.0 * np.log10((e_high + _EPS) / (e_low + _EPS))

    sel_lo = (freqs >= 0.0) & (freqs <= 2000.0)
    sel_hi = (freqs > 2000.0) & (freqs <= 5000.0)
    pk_lo = power[:, sel_lo].max(axis=1)
    pk_hi = power[:, sel_hi].max(axis=1)
    hammarberg = 10.0 * np.log10((pk_lo + _EPS) / (pk_hi + _EPS))

    level_db = 20.0 * np.log10(mags + _EPS)
    slope_0_500 = _ls_slope(level_db, freqs, 0.0, 500.0)
    slope_500_1500 = _ls_slope(level_db, freqs, 500.0, 1500.0)

    sel_flux = freqs <= 5000.0
    m = mags[:, sel_flux]
    norms = np.sqrt((m**2).sum(axis=1))
    mn = m / np.maximum(norms[:, None], _EPS)
    flux = np.zeros(mags.shape[0])
    if mags.shape[0] > 1:
        d = np.diff(mn, axis=0)
        flux[1:] = (d**2).sum(axis=1)
        # a silent frame has no meaningful normalized spectrum
        dead = norms < 1e-8
        flux[1:][dead[1:] | dead[:-1]] = 0.0

    bank = _mel_filterbank(rate, grid.fft_size)
    band_e = power @ bank.T
    loudness = 10.0 * np.log10(
        (band_e ** LOUDNESS_COMPRESSION).sum(axis=1) + _EPS
    )

    return {
        "loudness": loudness,
        "alpha_ratio": alpha,
        "hammarberg": hammarberg,
        "slope_0_500": slope_0_500,
        "slope_500_1500": slope_500_1500,
        "flux": flux,
        "_mags": mags,
        "_freqs": freqs,
    }


def _peak_mag(mags_row: np.ndarray, freqs: np.ndarray, lo: float, hi: float) -> float:
    sel = (freqs >= lo) & (freqs <= hi)
    if not np.any(sel):
        return 0.0
    return float(mags_row[sel].max())


# --- full extraction ---


def extract_contours(signal: AudioSignal, grid: FrameGrid | None = None) -> LldContours:
    """Compute every descriptor track for one segment."""
    if grid is None:
        grid = FrameGrid.for_rate(signal.sample_rate)
    rate = grid.sample_rate
    x = signal.samples
    n = grid.n_frames(x.size)

    spectral = spectral_descriptors(signal, grid)
    mags = spectral.pop("_mags")
    freqs = spectral.pop("_freqs")

    f0, voiced, peak_r = estimate_f0(signal, grid)
    hnr = np.full(n, np.nan)
    hnr[voiced] = hnr_from_peak(peak_r[voiced])

    times, amps = period_marks(signal, f0, voiced, grid)
    jitter, shimmer = jitter_shimmer(times, amps, n, grid)

    frames = _frame_matrix(x, grid.frame_len, grid.hop)
    f_freq = np.full((n, 3), np.nan)
    f_bw = np.full((n, 3), np.nan)
    for t in range(n):
        if not voiced[t]:
            continue
        try:
            fr, bw = formants(frames[t], rate)
        except FewerThanThreeResonances:
            continue
        f_freq[t] = fr
        f_bw[t] = bw

    h1_h2 = np.full(n, np.nan)
    h1_a3 = np.full(n, np.nan)
    for t in range(n):
        if not voiced[t] or not np.isfinite(f0[t]):
            continue
        f = f0[t]
        m1 = _peak_mag(mags[t], freqs, 0.75 * f, 1.25 * f)
        m2 = _peak_mag(mags[t], freqs, 1.75 * f, 2.25 * f)
        if m1 > 0 and m2 > 0:
            h1_h2[t] = 20.0 * np.log10(m1 / m2)
        if np.isfinite(f_freq[t, 2]) and m1 > 0:
            a3 = _peak_mag(mags[t], freqs, f_freq[t, 2] - 200.0, f_freq[t, 2] + 200.0)
            if a3 > 0:
                h1_a3[t] = 20.0 * np.log10(m1 / a3)

    tracks = {
        "f0": f0,
        "loudness": spectral["loudness"],
        "jitter": jitter,
        "shimmer": shimmer,
        "hnr": hnr,
        "f1_freq": f_freq[:, 0],
        "f2_freq": f_freq[:, 1],
        "f3_freq": f_freq[:, 2],
        "f1_bandwidth": f_bw[:, 0],
        "f2_bandwidth": f_bw[:, 1],
        "f3_bandwidth": f_bw[:, 2],
        "h1_h2": h1_h2,
        "h1_a3": h1_a3,
        "alpha_ratio": spectral["alpha_ratio"],
        "hammarberg": spectral["hammarberg"],
        "slope_0_500": spectral["slope_0_500"],
        "slope_500_1500": spectral["slope_500_1500"],
        "flux": spectral["flux"],
    }
    for name in UNVOICED_OK_TRACKS:
        assert np.all(np.isfinite(tracks[name])), name
    return LldContours(
        grid=grid,
        duration_s=signal.duration_s,
        voiced=voiced,
        tracks=tracks,
    )


def contours_to_csv_rows(contours: LldContours) -> list[str]:
    """Debug dump: one CSV row per frame."""
    header = "frame,time_s,voiced," + ",".join(TRACK_NAMES)
    rows = [header]
    hop_s = contours.grid.hop_s
    half = contours.grid.frame_len / (2 * contours.grid.sample_rate)
    for t in range(contours.n_frames):
        vals = ",".join(
            f"{contours.tracks[name][t]:.6g}" for name in TRACK_NAMES
        )
        rows.append(f"{t},{t * hop_s + half:.4f},{int(contours.voiced[t])},{vals}")
    return rows
