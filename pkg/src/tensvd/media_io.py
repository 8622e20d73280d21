"""Images and frame sequences as ``(H, W, 3)`` / ``(F, H, W, 3)`` tensors in [0, 1].

PNG goes through Pillow. Binary PPM (P6) is read and written here directly.
"""

from __future__ import annotations

import re
import warnings
from pathlib import Path

import numpy as np
from PIL import Image

from .tensor import DenseTensor

__all__ = [
    "MediaError",
    "load_image",
    "save_image",
    "load_frames",
    "save_frames",
    "read_ppm",
    "write_ppm",
]

_PPM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


class MediaError(ValueError):
    pass


def read_ppm(data: bytes) -> np.ndarray:
    """Decode a binary P6 PPM into a float ``(H, W, 3)`` array in [0, 1]."""
    pos = 0
    fields = []
    for _ in range(4):
        m = _PPM_TOKEN.match(data, pos)
        if m is None:
            raise MediaError("truncated PPM header")
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P6":
        raise MediaError(f"not a binary PPM (magic {fields[0]!r})")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError as exc:
        raise MediaError(f"bad PPM header: {exc}") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise MediaError(f"bad PPM header values {width}x{height} max {maxval}")
    pos += 1  # single whitespace byte before the raster
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    count = width * height * 3
    raw = data[pos : pos + count * dtype.itemsize]
    if len(raw) < count * dtype.itemsize:
        raise MediaError("truncated PPM raster")
    pixels = np.frombuffer(raw, dtype=dtype).reshape(height, width, 3)
    return pixels.astype(np.float64) / maxval


def write_ppm(array: np.ndarray) -> bytes:
    """Encode a ``(H, W, 3)`` uint8 array as P6."""
    h, w, _ = array.shape
    return b"P6\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(array, dtype=np.uint8).tobytes()


def _pil_to_float(img: Image.Image, path) -> np.ndarray:
    mode = img.mode
    if mode in ("I;16", "I;16B", "I;16L", "I"):
        warnings.warn(f"{path}: grayscale image expanded to 3 channels", stacklevel=3)
        a = np.asarray(img, dtype=np.float64) / 65535.0
        return np.repeat(np.clip(a, 0.0, 1.0)[:, :, None], 3, axis=2)
    if mode in ("L", "1"):
        warnings.warn(f"{path}: grayscale image expanded to 3 channels", stacklevel=3)
        img = img.convert("RGB")
    elif mode in ("LA", "RGBA", "PA"):
        warnings.warn(f"{path}: alpha channel dropped", stacklevel=3)
        img = img.convert("RGB")
    elif mode == "P":
        if "transparency" in img.info:
            warnings.warn(f"{path}: alpha channel dropped", stacklevel=3)
        img = img.convert("RGB")
    elif mode != "RGB":
        raise MediaError(f"{path}: unsupported image mode {mode}")
    return np.asarray(img, dtype=np.float64) / 255.0


def load_image(path) -> DenseTensor:
    """Read a PNG or P6 PPM as an ``(H, W, 3)`` tensor with values in [0, 1]."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise MediaError(f"cannot read {path}: {exc}") from None
    if data[:2] == b"P6":
        return DenseTensor.from_array(read_ppm(data))
    if data[:8] != b"\x89PNG\r\n\x1a\n":
        raise MediaError(f"{path}: unsupported format (expected PNG or P6 PPM)")
    with Image.open(path) as img:
        img.load()
        return DenseTensor.from_array(_pil_to_float(img, path))


def _to_uint8(array: np.ndarray) -> np.ndarray:
    return np.round(np.clip(array, 0.0, 1.0) * 255.0).astype(np.uint8)


def save_image(t: DenseTensor, path) -> None:
    """Clamp to [0, 1], quantize to 8 bits and write PNG (or PPM for .ppm/.pnm)."""
    if t.order != 3 or t.dims[2] != 3:
        raise MediaError(f"expected an (H, W, 3) tensor, got dims {t.dims}")
    pixels = _to_uint8(t.to_array())
    path = Path(path)
    if path.suffix.lower() in (".ppm", ".pnm"):
        path.write_bytes(write_ppm(pixels))
    else:
        Image.fromarray(pixels, mode="RGB").save(path, format="PNG")


def load_frames(directory, pattern: str = "*.png") -> DenseTensor:
    """Stack equally sized frames, in lexicographic filename order, into ``(F, H, W, 3)``."""
    directory = Path(directory)
    files = sorted(p for p in directory.glob(pattern) if p.is_file())
    if not files:
        raise MediaError(f"no frames matching {pattern!r} in {directory}")
    frames = []
    shape = None
    for f in files:
        a = load_image(f).to_array()
        if shape is None:
            shape = a.shape
        elif a.shape != shape:
            raise MediaError(f"{f.name}: frame size {a.shape[:2]} differs from {shape[:2]}")
        frames.append(a)
    return DenseTensor.from_array(np.stack(frames))


def save_frames(t: DenseTensor, directory, stem: str = "frame") -> list[Path]:
    if t.order != 4 or t.dims[3] != 3:
        raise MediaError(f"expected an (F, H, W, 3) tensor, got dims {t.dims}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    a = t.to_array()
    width = max(4, len(str(t.dims[0])))
    paths = []
    for i in range(t.dims[0]):
        p = directory / f"{stem}_{i + 1:0{width}d}.png"
        save_image(DenseTensor.from_array(a[i]), p)
        paths.append(p)
    return paths
