#!/usr/bin/env python3
# Copyright (c) the jpegspace authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the reference-encoder fixtures with Pillow (libjpeg).

The synthetic "photo" is deterministic: smooth gradients, a few sinusoids,
hard edges and mild noise, so it exercises every frequency band. Each
reference JPEG is stored next to libjpeg's own decode of it.
"""

import pathlib

import numpy as np
from PIL import Image, features

HERE = pathlib.Path(__file__).resolve().parent


def synthetic_photo(height, width, seed):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    r = 120 + 90 * np.sin(xx / 7.0) * np.cos(yy / 11.0) + 0.6 * xx
    g = 80 + 1.5 * yy + 40 * np.cos((xx + yy) / 5.0)
    b = 200 - 1.2 * xx + 30 * np.sin(yy / 3.0)
    edge = (xx > width * 0.6) & (yy < height * 0.5)
    r[edge] = 30
    g[edge] = 220
    rgb = np.stack([r, g, b], axis=-1) + rng.normal(0, 6, (height, width, 3))
    return np.clip(np.round(rgb), 0, 255).astype(np.uint8)


def save_jpeg(img, name, quality, subsampling=None):
    kwargs = dict(quality=quality, optimize=False, progressive=False)
    if subsampling is not None:
        kwargs["subsampling"] = subsampling
    path = HERE / name
    img.save(path, "JPEG", **kwargs)
    return path


def main():
    print("libjpeg version:", features.version("jpg"))
    photo = Image.fromarray(synthetic_photo(45, 61, seed=7), "RGB")
    photo.save(HERE / "photo.ppm")
    gray = photo.convert("L")
    gray.save(HERE / "photo.pgm")

    # Grayscale and 4:4:4 colour files, plus libjpeg's decodes of them.
    path = save_jpeg(gray, "ref_gray_q50.jpg", 50)
    Image.open(path).save(HERE / "ref_gray_q50_decoded.pgm")
    path = save_jpeg(photo, "ref_color444_q75.jpg", 75, subsampling=0)
    Image.open(path).convert("RGB").save(HERE / "ref_color444_q75_decoded.ppm")
    # 4:2:0 colour, decoded with libjpeg's default (fancy) upsampling.
    path = save_jpeg(photo, "ref_color420_q50.jpg", 50, subsampling=2)
    Image.open(path).convert("RGB").save(HERE / "ref_color420_q50_decoded.ppm")

    # Quantisation tables at the three reference qualities.
    for q in (10, 50, 100):
        save_jpeg(photo, f"ref_dqt_q{q}.jpg", q, subsampling=0)


if __name__ == "__main__":
    main()
