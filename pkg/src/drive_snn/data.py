"""Image loading, preprocessing, spike encoding and batching."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import EmptyDatasetError
from .numerics import Rng

logger = logging.getLogger(__name__)

IMAGE_SIZE = 128
CLASS_NAMES = ("non-vehicle", "vehicle")
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


@dataclass
class ImageSample:
    pixels: np.ndarray
    label: int
    source_path: str = ""


class Dataset:
    """Preprocessed images stacked into one (n, 128, 128) array with labels."""

    def __init__(self, pixels: np.ndarray, labels, paths=None, skipped: int = 0):
        self.pixels = np.asarray(pixels, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.int64)
        if self.pixels.ndim != 3 or len(self.pixels) != len(self.labels):
            raise ValueError(f"pixels {self.pixels.shape} and labels {self.labels.shape} disagree")
        self.paths = list(paths) if paths is not None else [""] * len(self.labels)
        self.skipped = skipped

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i: int) -> ImageSample:
        return ImageSample(self.pixels[i], int(self.labels[i]), self.paths[i])

    @property
    def samples(self) -> list[ImageSample]:
        return [self[i] for i in range(len(self))]

    @property
    def class_counts(self) -> dict[int, int]:
        return {c: int((self.labels == c).sum()) for c in range(len(CLASS_NAMES))}

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.pixels[indices], self.labels[indices], [self.paths[i] for i in indices])


def to_grayscale(raw: np.ndarray) -> np.ndarray:
    """Luminosity grayscale (0.299 R + 0.587 G + 0.114 B); 2-D input passes through.

    Integer images are combined in integer arithmetic so white stays exactly 255.
    """
    raw = np.asarray(raw)
    if raw.ndim == 2:
        return raw.astype(np.float64)
    if raw.ndim != 3 or raw.shape[2] < 3:
        raise ValueError(f"expected HxW or HxWx3 image, got {raw.shape}")
    rgb = raw[..., :3]
    if np.issubdtype(rgb.dtype, np.integer):
        r, g, b = (rgb[..., i].astype(np.int64) for i in range(3))
        return (299 * r + 587 * g + 114 * b) / 1000.0
    rgb = rgb.astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def pad_to_square(img: np.ndarray) -> np.ndarray:
    """Centred zero padding; an odd remainder goes to the bottom/right."""
    h, w = img.shape
    side = max(h, w)
    top = (side - h) // 2
    left = (side - w) // 2
    out = np.zeros((side, side), dtype=img.dtype)
    out[top : top + h, left : left + w] = img
    return out


def resize_bilinear(img: np.ndarray, size: int) -> np.ndarray:
    """Bilinear resampling of a square image with pixel-centre alignment."""
    n = img.shape[0]
    if n == size:
        return img.copy()
    pos = (np.arange(size) + 0.5) * (n / size) - 0.5
    pos = np.clip(pos, 0, n - 1)
    lo = np.floor(pos).astype(np.int64)
    hi = np.minimum(lo + 1, n - 1)
    frac = pos - lo
    rows = img[lo] * (1 - frac)[:, None] + img[hi] * frac[:, None]
    return rows[:, lo] * (1 - frac)[None, :] + rows[:, hi] * frac[None, :]


def preprocess(raw, size: int = IMAGE_SIZE) -> np.ndarray:
    """Grayscale, pad to square, resize to ``size`` x ``size``, scale to [0, 1].

    Integer images are treated as 8-bit and divided by 255; float images are
    assumed to be normalized already.
    """
    raw = np.asarray(raw)
    if raw.ndim < 2 or raw.shape[0] == 0 or raw.shape[1] == 0:
        raise ValueError(f"image must have non-zero width and height, got shape {raw.shape}")
    gray = to_grayscale(raw)
    img = resize_bilinear(pad_to_square(gray), size)
    if np.issubdtype(raw.dtype, np.integer):
        img = img / 255.0
    return np.clip(img, 0.0, 1.0)


def read_image(path) -> np.ndarray:
    """Decode an image file to a uint8 array (HxW or HxWx3)."""
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8)


def _load_class_dir(directory: Path, label: int):
    if not directory.is_dir():
        raise FileNotFoundError(f"image directory not found: {directory}")
    pixels, paths, skipped = [], [], 0
    for path in sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES):
        try:
            raw = read_image(path)
        except (UnidentifiedImageError, OSError, ValueError) as exc:
            logger.warning("skipping undecodable image %s: %s", path, exc)
            skipped += 1
            continue
        pixels.append(preprocess(raw))
        paths.append(str(path))
    return pixels, [label] * len(pixels), paths, skipped


def load_directory(vehicle_dir, non_vehicle_dir) -> Dataset:
    """Load both class directories (non-vehicle = 0, vehicle = 1).

    Files are read in sorted path order per class, non-vehicles first.
    """
    pixels, labels, paths, skipped = [], [], [], 0
    for directory, label in ((Path(non_vehicle_dir), 0), (Path(vehicle_dir), 1)):
        p, l, s, k = _load_class_dir(directory, label)
        pixels += p
        labels += l
        paths += s
        skipped += k
    if not pixels:
        raise EmptyDatasetError(f"no decodable images in {vehicle_dir} or {non_vehicle_dir}")
    if skipped:
        logger.warning("skipped %d undecodable file(s)", skipped)
    return Dataset(np.stack(pixels), labels, paths, skipped)


def split_shuffle(ds: Dataset, seed: int, train_fraction: float = 0.8):
    """Shuffle, then put the first floor(fraction * n) samples in the training set."""
    if len(ds) == 0:
        raise EmptyDatasetError("cannot split an empty dataset")
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    order = Rng(seed).permutation(len(ds))
    n_train = math.floor(train_fraction * len(ds))
    return ds.subset(order[:n_train]), ds.subset(order[n_train:])


@dataclass
class EncoderConfig:
    mode: str = "rate"
    num_steps: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("rate", "constant-current"):
            raise ValueError(f"unknown encoder mode {self.mode!r}")
        if self.num_steps < 1:
            raise ValueError("num_steps must be >= 1")


def rate_encode(pixels, cfg: EncoderConfig) -> np.ndarray:
    """Turn a batch of images into a (T, B, H*W) input stack.

    Rate mode draws independent Bernoulli(pixel) spikes at every step and
    returns a bool array; constant-current mode repeats the pixel values.
    Accepts an array of images or a list of :class:`ImageSample`.
    """
    if isinstance(pixels, (list, tuple)) and pixels and isinstance(pixels[0], ImageSample):
        pixels = np.stack([s.pixels for s in pixels])
    flat = np.asarray(pixels, dtype=np.float64).reshape(len(pixels), -1)
    if flat.size and (flat.min() < 0.0 or flat.max() > 1.0):
        raise ValueError("pixel values must lie in [0, 1]")
    if cfg.mode == "constant-current":
        return np.broadcast_to(flat, (cfg.num_steps, *flat.shape)).copy()
    rng = Rng(cfg.seed)
    out = np.empty((cfg.num_steps, *flat.shape), dtype=bool)
    for t in range(cfg.num_steps):
        out[t] = rng.random(flat.shape) < flat
    return out


def batches(ds: Dataset, batch_size: int, seed: int = 0, reshuffle_each_epoch: bool = False, epoch: int = 0):
    """Yield ``(pixels, labels)`` batches; the last one may be short.

    With ``reshuffle_each_epoch`` the order is a fresh permutation derived
    from ``(seed, epoch)``; otherwise the dataset order is kept.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    n = len(ds)
    order = Rng(seed).fork(epoch).permutation(n) if reshuffle_each_epoch else np.arange(n)
    for start in range(0, n, batch_size):
        idx = order[start : start + batch_size]
        yield ds.pixels[idx], ds.labels[idx]


def synth_dataset(n_per_class: int, seed: int, size: int = IMAGE_SIZE) -> Dataset:
    """Toy two-class corpus.

    Class 0 is uniform noise on [0, 0.3]. Class 1 is the same noise with a
    bright (about 0.9) axis-aligned rectangle of random size and position.
    Samples alternate 0, 1, 0, 1, ...
    """
    if n_per_class < 1:
        raise ValueError(f"n_per_class must be >= 1, got {n_per_class}")
    rng = Rng(seed)
    min_side, max_side = size * 5 // 16, size * 3 // 4
    pixels = np.empty((2 * n_per_class, size, size))
    labels = np.empty(2 * n_per_class, dtype=np.int64)
    for i in range(n_per_class):
        pixels[2 * i] = rng.uniform(size * size, 0.0, 0.3).reshape(size, size)
        labels[2 * i] = 0
        img = rng.uniform(size * size, 0.0, 0.3).reshape(size, size)
        h, w = (int(v) for v in rng.integers(min_side, max_side + 1, size=2))
        top = int(rng.integers(0, size - h + 1))
        left = int(rng.integers(0, size - w + 1))
        img[top : top + h, left : left + w] = rng.uniform(h * w, 0.85, 0.95).reshape(h, w)
        pixels[2 * i + 1] = img
        labels[2 * i + 1] = 1
    return Dataset(pixels, labels)


def write_dataset(ds: Dataset, out_dir) -> list[Path]:
    """Write 8-bit grayscale PNGs into ``out_dir/vehicle`` and ``out_dir/non-vehicle``."""
    out_dir = Path(out_dir)
    dirs = {0: out_dir / "non-vehicle", 1: out_dir / "vehicle"}
    for d in dirs.values():
        d.mkdir(parents=True, exist_ok=True)
    written = []
    counters = {0: 0, 1: 0}
    for pixels, label in zip(ds.pixels, ds.labels):
        label = int(label)
        path = dirs[label] / f"{CLASS_NAMES[label]}_{counters[label]:05d}.png"
        counters[label] += 1
        Image.fromarray(np.round(pixels * 255.0).astype(np.uint8)).save(path)
        written.append(path)
    return written
