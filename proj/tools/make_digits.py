#!/usr/bin/env python3
# Copyright 2026 The ttfscat Authors
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
"""Writes the 8x8 handwritten digit set (UCI optdigits, as bundled with
scikit-learn) into the ttfscat binary dataset format.

Usage: make_digits.py <out_dir>
Produces digits_train.tds (1347 samples) and digits_test.tds (450 samples).
"""
import struct
import sys

import numpy as np
from sklearn.datasets import load_digits


def write(path, images, labels):
    n = images.shape[0]
    with open(path, "wb") as f:
        f.write(b"TTFSDATA")
        f.write(struct.pack("<7I", 1, n, 1, 8, 8, 10, 0))
        f.write(images.astype(np.uint8).tobytes())
        f.write(labels.astype(np.uint8).tobytes())


def main():
    out = sys.argv[1]
    digits = load_digits()
    # Pixel range is 0..16; stretch to 0..255.
    x = np.rint(digits.data * 255.0 / 16.0).astype(np.uint8)
    y = digits.target.astype(np.uint8)
    order = np.random.RandomState(0).permutation(len(y))
    x, y = x[order], y[order]
    write(f"{out}/digits_train.tds", x[:1347], y[:1347])
    write(f"{out}/digits_test.tds", x[1347:], y[1347:])


if __name__ == "__main__":
    main()
