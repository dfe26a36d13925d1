"""Feature extraction: image patches, grayscale cells, Color Names, and
ingestion of precomputed feature-map files.

All extraction is deterministic: the same (image, center, size, scale,
config) always produces bit-identical output.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError, FormatError

CN_TABLE_FILENAME = "colornames10.bin"
CN_TABLE_ROWS = 32768
CN_CHANNELS = 10
ASSET_ENV_VAR = "DEFORM_DCF_ASSETS"


@dataclass(frozen=True)
class FeatureMap:
    """Multi-channel feature sample of one image region.

    Channels are grouped into blocks sharing a grid resolution; ``blocks``
    holds arrays of shape (n1, n2, d).  ``center`` and ``extent`` are the
    sampled image region in pixels ((y, x) and (h, w)); ``scale`` is the
    region scale factor relative to the base extent.
    """

    blocks: tuple[np.ndarray, ...]
    center: tuple[float, float]
    extent: tuple[float, float]
    scale: float

    def __post_init__(self):
        if not self.blocks:
            raise DimensionError("feature map needs at least one channel block")
        for b in self.blocks:
            if b.ndim != 3 or b.shape[0] < 1 or b.shape[1] < 1 or b.shape[2] < 1:
                raise DimensionError(f"bad channel block shape {b.shape}")
            if not np.all(np.isfinite(b)):
                raise ValueError("feature values must be finite")

    @property
    def channels(self) -> int:
        return sum(b.shape[2] for b in self.blocks)


def bilinear_sample(image: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Sample ``image`` at fractional (row, col) positions.

    Out-of-range positions clamp to the nearest edge pixel (edge
    replication).  ``image`` may be (H, W) or (H, W, C).
    """
    img = np.asarray(image, dtype=np.float64)
    h, w = img.shape[:2]
    r = np.clip(rows, 0.0, h - 1.0)
    c = np.clip(cols, 0.0, w - 1.0)
    r0 = np.floor(r).astype(np.intp)
    c0 = np.floor(c).astype(np.intp)
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, w - 1)
    fr = r - r0
    fc = c - c0
    if img.ndim == 3:
        fr = fr[..., None]
        fc = fc[..., None]
    top = img[r0, c0] * (1 - fc) + img[r0, c1] * fc
    bot = img[r1, c0] * (1 - fc) + img[r1, c1] * fc
    return top * (1 - fr) + bot * fr


def extract_patch(image: np.ndarray, center: tuple[float, float],
                  size: tuple[float, float], scale: float,
                  out_shape: tuple[int, int],
                  center_pixel: tuple[float, float] | None = None) -> np.ndarray:
    """Resample a fixed-resolution patch of the region around ``center``.

    The sampled region has extent ``size * scale`` pixels.  Output pixel
    (i, j) has patch coordinates (i + 0.5, j + 0.5); ``center_pixel`` is
    the patch coordinate that lands exactly on ``center`` (default: the
    patch midpoint).  Pixels outside the image replicate the edge.
    """
    if size[0] <= 0 or size[1] <= 0:
        raise ValueError(f"patch size must be positive, got {size}")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    img = np.asarray(image)
    if img.size == 0:
        raise ValueError("empty image")
    hp, wp = int(out_shape[0]), int(out_shape[1])
    if center_pixel is None:
        center_pixel = (hp / 2.0, wp / 2.0)
    step_r = size[0] * scale / hp
    step_c = size[1] * scale / wp
    rows = center[0] + (np.arange(hp) + 0.5 - center_pixel[0]) * step_r
    cols = center[1] + (np.arange(wp) + 0.5 - center_pixel[1]) * step_c
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return bilinear_sample(img, rr, cc)


def to_grayscale(frame: np.ndarray) -> np.ndarray:
    """Map a frame to float intensity in [0, 1] (luma for RGB input)."""
    arr = np.asarray(frame)
    if arr.ndim == 3:
        arr = 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]
    arr = arr.astype(np.float64)
    if np.issubdtype(np.asarray(frame).dtype, np.integer):
        arr = arr / 255.0
    return arr


def _cell_reduce(patch: np.ndarray, cell_size: int) -> np.ndarray:
    h, w = patch.shape[:2]
    if cell_size < 1:
        raise ValueError(f"cell size must be >= 1, got {cell_size}")
    if h % cell_size or w % cell_size:
        raise DimensionError(
            f"patch {patch.shape[:2]} not divisible by cell size {cell_size}"
        )
    n1, n2 = h // cell_size, w // cell_size
    if patch.ndim == 3:
        r = patch.reshape(n1, cell_size, n2, cell_size, patch.shape[2])
        return r.mean(axis=(1, 3))
    r = patch.reshape(n1, cell_size, n2, cell_size)
    return r.mean(axis=(1, 3))


def grayscale_cells(patch: np.ndarray, cell_size: int) -> np.ndarray:
    """Per-cell mean intensity shifted to [-0.5, 0.5].

    ``patch`` is a grayscale intensity grid in [0, 1] whose dimensions are
    divisible by ``cell_size``.  Returns an (n1, n2, 1) array.
    """
    cells = _cell_reduce(np.asarray(patch, dtype=np.float64), cell_size) - 0.5
    return cells[:, :, None]


# ---------------------------------------------------------------------------
# Color Names
# ---------------------------------------------------------------------------

_cn_cache: dict[str, np.ndarray] = {}


def _cn_table_path() -> str:
    override = os.environ.get(ASSET_ENV_VAR)
    if override:
        return os.path.join(override, CN_TABLE_FILENAME)
    return os.path.join(os.path.dirname(__file__), "assets", CN_TABLE_FILENAME)


def load_cn_table(path: str | None = None) -> np.ndarray:
    """Load the 32768 x 10 color-name probability table.

    The default location is the packaged asset; the ``DEFORM_DCF_ASSETS``
    environment variable overrides the directory it is read from.
    """
    path = path or _cn_table_path()
    cached = _cn_cache.get(path)
    if cached is not None:
        return cached
    if not os.path.isfile(path):
        raise ConfigurationError(f"color names table not found: {path}")
    data = np.fromfile(path, dtype="<f4")
    if data.size != CN_TABLE_ROWS * CN_CHANNELS:
        raise ConfigurationError(
            f"color names table {path} has {data.size} floats, "
            f"expected {CN_TABLE_ROWS * CN_CHANNELS}"
        )
    table = data.reshape(CN_TABLE_ROWS, CN_CHANNELS).astype(np.float64)
    table.setflags(write=False)
    _cn_cache[path] = table
    return table


def cn_bin_index(rgb: np.ndarray) -> np.ndarray:
    """Map uint8 RGB values to 15-bit table indices (r5<<10 | g5<<5 | b5)."""
    r = rgb[..., 0].astype(np.int64) >> 3
    g = rgb[..., 1].astype(np.int64) >> 3
    b = rgb[..., 2].astype(np.int64) >> 3
    return (r << 10) | (g << 5) | b


def colornames(patch: np.ndarray, cell_size: int,
               table: np.ndarray | None = None) -> np.ndarray:
    """Color-name probability cells, mean-centered per channel.

    ``patch`` is an RGB patch (H, W, 3); values in [0, 1] are quantized to
    uint8 first.  Each pixel maps to a 10-vector from the lookup table,
    cells average their pixels, and every channel is shifted to zero mean
    over the patch.  Returns (n1, n2, 10).
    """
    arr = np.asarray(patch)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionError(f"colornames needs an RGB patch, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        arr = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    if table is None:
        table = load_cn_table()
    vecs = table[cn_bin_index(arr)]
    cells = _cell_reduce(vecs, cell_size)
    return cells - cells.mean(axis=(0, 1), keepdims=True)


# ---------------------------------------------------------------------------
# Precomputed feature files ("DFF1")
# ---------------------------------------------------------------------------

DFF_MAGIC = b"DFF1"
_DFF_HEADER = struct.Struct("<4sIIII")


def save_feature_file(path: str, frames: np.ndarray):
    """Write a precomputed feature file.

    ``frames`` has shape (frame_count, H, W, D); values are stored as
    little-endian float32, frame-major, row-major, channel-last.
    """
    arr = np.asarray(frames, dtype="<f4")
    if arr.ndim != 4:
        raise DimensionError(f"expected (frames, H, W, D) array, got {arr.shape}")
    f, h, w, d = arr.shape
    with open(path, "wb") as fh:
        fh.write(_DFF_HEADER.pack(DFF_MAGIC, f, h, w, d))
        fh.write(arr.tobytes(order="C"))


class FeatureFile:
    """Random access to one sequence's precomputed feature maps."""

    def __init__(self, path: str):
        self.path = path
        with open(path, "rb") as fh:
            header = fh.read(_DFF_HEADER.size)
        if len(header) < _DFF_HEADER.size:
            raise FormatError(
                f"{path}: truncated header, expected {_DFF_HEADER.size} bytes, "
                f"got {len(header)} (at byte 0)"
            )
        magic, f, h, w, d = _DFF_HEADER.unpack(header)
        if magic != DFF_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r} at byte 0")
        if min(f, h, w, d) < 1:
            raise FormatError(f"{path}: non-positive dimension in header at byte 4")
        self.frame_count, self.height, self.width, self.depth = f, h, w, d
        expected = _DFF_HEADER.size + 4 * f * h * w * d
        actual = os.path.getsize(path)
        if actual != expected:
            raise FormatError(
                f"{path}: payload size mismatch, expected {expected} bytes, "
                f"got {actual} (at byte {min(expected, actual)})"
            )
        self._data = np.memmap(path, dtype="<f4", mode="r",
                               offset=_DFF_HEADER.size,
                               shape=(f, h, w, d))

    def frame(self, index: int) -> np.ndarray:
        if not 0 <= index < self.frame_count:
            raise IndexError(
                f"frame index {index} out of range [0, {self.frame_count})"
            )
        return np.asarray(self._data[index], dtype=np.float64)


def load_precomputed(path: str, frame_index: int) -> np.ndarray:
    """Load one stored frame feature map as an (H, W, D) float array."""
    return FeatureFile(path).frame(frame_index)


def resample_feature_grid(grid: np.ndarray, frame_shape: tuple[int, int],
                          center: tuple[float, float], size: tuple[float, float],
                          scale: float, out_n: tuple[int, int],
                          center_node: tuple[float, float] | None = None) -> np.ndarray:
    """Resample a full-frame feature grid over a target region.

    The stored grid is assumed to cover the frame uniformly with node
    (i, j) centered at image pixel ((i+0.5)*H/h, (j+0.5)*W/w).  The output
    samples the region of extent ``size*scale`` around ``center`` with
    ``out_n`` nodes per axis; ``center_node`` is the fractional output node
    coordinate that lands on ``center`` (default: the grid midpoint).
    """
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 3:
        raise DimensionError(f"expected (H, W, D) feature grid, got {g.shape}")
    fh, fw = frame_shape
    n1, n2 = int(out_n[0]), int(out_n[1])
    if center_node is None:
        center_node = (n1 / 2.0, n2 / 2.0)
    step_r = size[0] * scale / n1
    step_c = size[1] * scale / n2
    rows_img = center[0] + (np.arange(n1) + 0.5 - center_node[0]) * step_r
    cols_img = center[1] + (np.arange(n2) + 0.5 - center_node[1]) * step_c
    rows = rows_img * (g.shape[0] / fh) - 0.5
    cols = cols_img * (g.shape[1] / fw) - 0.5
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    return bilinear_sample(g, rr, cc)
