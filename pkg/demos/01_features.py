"""Feature extraction walkthrough: STFT, log-mel, and cepstra on a tone.

Run:  python3 demos/01_features.py
"""

import numpy as np

from voxkit import FeatureSeq, MelConfig, StftConfig, Waveform, log_mel, mfcc, stft

SR = 22050


def tone(freq, duration_s, amp=0.5):
    t = np.arange(int(duration_s * SR)) / SR
    return Waveform(amp * np.sin(2 * np.pi * freq * t), SR)


def describe(name: str, feats: FeatureSeq) -> None:
    frames = feats.frames
    print(
        f"  {name:<10} {frames.shape[0]:>4} frames x {frames.shape[1]:>4} dims, "
        f"range [{frames.min():+.2f}, {frames.max():+.2f}], "
        f"frame rate {feats.frame_rate:.1f} Hz"
    )


def main():
    w = tone(1000.0, 1.0)
    print(f"input: 1000 Hz tone, {w.duration_s:.2f} s at {w.sample_rate} Hz")

    cfg = StftConfig(fft_size=1024, win_length=1024, hop_length=256)
    spec = stft(w, cfg)
    mel_cfg = MelConfig(n_mels=80, stft=cfg)
    mel = log_mel(w, mel_cfg)
    ceps = mfcc(w, mel_cfg)

    print("feature shapes:")
    describe("magnitude", spec)
    describe("log-mel", mel)
    describe("mfcc", ceps)

    # With a 1024-point FFT at 22050 Hz each bin spans ~21.5 Hz, so a
    # 1000 Hz tone should peak at bin 46 away from the padded edges.
    interior = spec.frames[1:-1]
    bins = np.argmax(interior, axis=1)
    print(f"spectral peak bin: {np.bincount(bins).argmax()} "
          f"(expected {round(1000 / (SR / cfg.fft_size))})")

    bands = np.argmax(mel.frames, axis=1)
    print(f"hottest mel band: {np.bincount(bands).argmax()} of {mel_cfg.n_mels}")

    energy = np.linalg.norm(ceps.frames, axis=1)
    print(f"cepstral frame energy is steady: "
          f"std/mean = {energy.std() / energy.mean():.4f}")


if __name__ == "__main__":
    main()
