"""Regenerates the files under data/ from scikit-learn / scikit-image sample data."""
import struct
from pathlib import Path

import numpy as np
from skimage import data as skdata
from skimage.transform import resize
from sklearn.datasets import load_digits

out = Path(__file__).resolve().parent.parent / "data"
out.mkdir(exist_ok=True)


def write_pgm(path, img):
    img = np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        f.write(img.tobytes())


def write_sig(path, arr):
    arr = np.asarray(arr, dtype=np.float64)
    with open(path, "wb") as f:
        f.write(b"SIG1")
        f.write(struct.pack("<I", arr.ndim))
        for n in arr.shape:
            f.write(struct.pack("<I", n))
        f.write(struct.pack("<B", 0))
        f.write(arr.astype("<f8").tobytes())


write_pgm(out / "camera_128.pgm", resize(skdata.camera() / 255.0, (128, 128), anti_aliasing=True))
write_pgm(out / "brick_64.pgm", resize(skdata.brick() / 255.0, (64, 64), anti_aliasing=True))
write_pgm(out / "grass_64.pgm", resize(skdata.grass() / 255.0, (64, 64), anti_aliasing=True))

digits = load_digits()
with open(out / "digits_8x8.csv", "w") as f:
    f.write("__label__," + ",".join(f"p{i}" for i in range(64)) + "\n")
    for img, lab in zip(digits.images, digits.target):
        f.write(str(int(lab)) + "," + ",".join(str(int(v)) for v in img.ravel()) + "\n")

# Synthetic audio: plucked harmonic notes with vibrato over a noise floor, 4096 samples at 8 kHz.
rng = np.random.default_rng(7)
fs, n = 8000.0, 4096
t = np.arange(n) / fs
audio = 0.01 * rng.standard_normal(n)
for onset, f0 in [(0.0, 220.0), (0.12, 277.2), (0.25, 329.6), (0.37, 440.0)]:
    env = np.where(t >= onset, np.exp(-(t - onset) * 9.0), 0.0)
    vib = 1.0 + 0.004 * np.sin(2 * np.pi * 5.5 * t)
    for h in range(1, 6):
        audio += env * np.sin(2 * np.pi * h * f0 * vib * t) / h
write_sig(out / "audio_4096.sig", audio / np.max(np.abs(audio)))
