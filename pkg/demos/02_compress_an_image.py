"""
Compressing an image with tenSVD
================================

Build a synthetic RGB image, compress it to an error budget and to a
storage budget, and store the result in a ``.tsvd`` file.
"""

import tempfile
from pathlib import Path

import numpy as np

from tensvd import CompressionTarget, DenseTensor, codec, compress, decompress
from tensvd.media_io import load_image, save_image
from tensvd.metrics import quality_report

# %%
# A 360x480 image: a few smooth colour waves plus a little noise.
rng = np.random.default_rng(1)
yy, xx = np.mgrid[0:360, 0:480] / np.array([360, 480])[:, None, None]
img = np.stack([0.5 + 0.4 * np.sin(6 * xx + 2 * yy),
                0.5 + 0.3 * np.cos(9 * yy) * np.sin(4 * xx),
                np.clip(xx * yy + 0.2, 0, 1)], axis=-1)
img = np.clip(img + 0.02 * rng.standard_normal(img.shape), 0, 1)

workdir = Path(tempfile.mkdtemp())
save_image(DenseTensor.from_array(img), workdir / "wave.png")
x = load_image(workdir / "wave.png")
print(x.dims)

# %%
# Ask for at most 5% relative error. The reshape plan turns the
# 360x480x3 tensor into a near-cube of higher order first.
c = compress(x, CompressionTarget.accuracy(0.05))
print("reshaped to", c.plan.reshaped_dims)
print("kept", len(c.sparse_core), "core entries")
print(quality_report(x, decompress(c), c.stored_count).to_text())

# %%
# The discarded core energy predicts the error exactly.
print(c.predicted_error)

# %%
# Or fix the storage instead: keep 10% of the original element count.
c = compress(x, CompressionTarget.fraction(0.10))
report = quality_report(x, decompress(c), c.stored_count)
print(f"stored {report.cr_stored_fraction:.3f}, ERR {report.err:.4f}, PSNR {report.psnr:.1f} dB")

# %%
# Persist it. Factors and values are narrowed to 32-bit floats.
nbytes = codec.save(c, workdir / "wave.tsvd")
restored = decompress(codec.load(workdir / "wave.tsvd"))
save_image(restored, workdir / "wave_restored.png")
print(nbytes, "bytes written to", workdir)
