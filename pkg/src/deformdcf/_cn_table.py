"""Generator for the packaged color-name probability table.

Maps every 15-bit quantized RGB bin to a probability distribution over ten
color-name channels via soft assignment to eleven prototype colors (white
and gray share the achromatic channel).  Run ``python -m
deformdcf._cn_table <out.bin>`` to regenerate the asset byte-for-byte.
"""

from __future__ import annotations

import sys

import numpy as np

from .features import CN_CHANNELS, CN_TABLE_ROWS

# channel order used throughout the package
CN_NAMES = ("black", "blue", "brown", "gray", "green",
            "orange", "pink", "purple", "red", "yellow")

# (prototype RGB in [0,1], target channel index)
_PROTOTYPES = (
    ((0.00, 0.00, 0.00), 0),   # black
    ((0.10, 0.25, 0.95), 1),   # blue
    ((0.55, 0.30, 0.10), 2),   # brown
    ((0.50, 0.50, 0.50), 3),   # gray
    ((1.00, 1.00, 1.00), 3),   # white -> achromatic channel
    ((0.10, 0.60, 0.15), 4),   # green
    ((1.00, 0.55, 0.05), 5),   # orange
    ((1.00, 0.70, 0.80), 6),   # pink
    ((0.55, 0.10, 0.60), 7),   # purple
    ((0.90, 0.05, 0.05), 8),   # red
    ((0.95, 0.95, 0.10), 9),   # yellow
)

_SOFTNESS = 0.22


def build_table() -> np.ndarray:
    """Return the full (32768, 10) float32 table; rows sum to 1."""
    idx = np.arange(CN_TABLE_ROWS)
    r5 = (idx >> 10) & 31
    g5 = (idx >> 5) & 31
    b5 = idx & 31
    # bin centers of the 5-bit quantization
    rgb = np.stack([(r5 * 8 + 4), (g5 * 8 + 4), (b5 * 8 + 4)], axis=1) / 255.0

    table = np.zeros((CN_TABLE_ROWS, CN_CHANNELS), dtype=np.float64)
    for proto, channel in _PROTOTYPES:
        d2 = np.sum((rgb - np.asarray(proto)) ** 2, axis=1)
        table[:, channel] += np.exp(-d2 / (2.0 * _SOFTNESS**2))
    table /= table.sum(axis=1, keepdims=True)
    return table.astype("<f4")


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m deformdcf._cn_table <out.bin>", file=sys.stderr)
        return 2
    build_table().tofile(args[0])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
