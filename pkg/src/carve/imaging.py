"""Image loading and visual-complexity measurement.

Texture complexity is the density of a Canny edge map: the L1 norm of
the binary edge image divided by the pixel count, in [0, 1]. Color
complexity is the normalized Shannon entropy of a 180-bin hue histogram
(2-degree bins), in [0, 1]. Both are computed from 8-bit RGB frames.

The Canny stage is pinned down so results are reproducible anywhere:
luma grayscale (0.299 R + 0.587 G + 0.114 B), separable Gaussian blur
with kernel radius ceil(3*sigma) and reflect padding, 3x3 Sobel
gradients (also reflect-padded), non-maximum suppression over four
22.5-degree direction sectors where ties keep the pixel and pixels
outside the image count as zero magnitude, then double-threshold
hysteresis: pixels >= high seed edges, pixels >= low join when
8-connected to a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import kernels
from .errors import ImageDecodeError, ValidationError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
HUE_BINS = 180


@dataclass(frozen=True)
class ImageRGB:
    """An 8-bit RGB raster with shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if not isinstance(px, np.ndarray) or px.ndim != 3 or px.shape[2] != 3:
            raise ValidationError("pixels must be an (H, W, 3) array")
        if px.dtype != np.uint8:
            raise ValidationError("pixels must be uint8")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValidationError("image must have at least one pixel")
        px = np.ascontiguousarray(px).copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @classmethod
    def load(cls, path) -> "ImageRGB":
        """Decode a PNG or JPEG file. Alpha is composited over black."""
        try:
            with Image.open(path) as img:
                if img.mode == "RGB":
                    rgb = img.copy()
                else:
                    rgba = img.convert("RGBA")
                    black = Image.new("RGBA", rgba.size, (0, 0, 0, 255))
                    rgb = Image.alpha_composite(black, rgba).convert("RGB")
        except UnidentifiedImageError as exc:
            raise ImageDecodeError(f"cannot decode image {path}: {exc}") from exc
        return cls(np.asarray(rgb, dtype=np.uint8))

    def save_png(self, path) -> None:
        Image.fromarray(np.asarray(self.pixels)).save(path, format="PNG")

    def to_gray(self) -> np.ndarray:
        """Luma grayscale as float64, shape (H, W)."""
        wr, wg, wb = LUMA_WEIGHTS
        px = self.pixels.astype(np.float64)
        return wr * px[..., 0] + wg * px[..., 1] + wb * px[..., 2]


@dataclass(frozen=True)
class EdgeMap:
    """Binary edge raster produced by `canny_edges`."""

    bits: np.ndarray

    def __post_init__(self):
        bits = self.bits
        if not isinstance(bits, np.ndarray) or bits.ndim != 2:
            raise ValidationError("edge bits must be a 2-d array")
        if bits.dtype != np.uint8 or not np.isin(bits, (0, 1)).all():
            raise ValidationError("edge bits must be uint8 zeros and ones")
        bits = np.ascontiguousarray(bits).copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def density(self) -> float:
        """Edge pixels over total pixels (the L1 norm over H*W)."""
        return float(self.bits.mean(dtype=np.float64))


@dataclass(frozen=True)
class HueHistogram:
    """Proportions over the 180 two-degree hue bins."""

    proportions: np.ndarray
    total_pixels: int

    def __post_init__(self):
        p = self.proportions
        if not isinstance(p, np.ndarray) or p.shape != (HUE_BINS,):
            raise ValidationError(f"proportions must have shape ({HUE_BINS},)")
        p = np.ascontiguousarray(p, dtype=np.float64).copy()
        if (p < 0).any():
            raise ValidationError("proportions must be non-negative")
        if self.total_pixels < 0:
            raise ValidationError("total_pixels must be >= 0")
        if self.total_pixels > 0 and abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError("proportions must sum to 1")
        if self.total_pixels == 0 and p.any():
            raise ValidationError("empty histogram must have zero proportions")
        p.flags.writeable = False
        object.__setattr__(self, "proportions", p)


def rgb_to_hue_bin(r: int, g: int, b: int) -> int:
    """Map one RGB pixel to its hue bin, floor(hue_degrees / 2).

    Achromatic pixels (r == g == b) land in bin 0 by convention. Hues
    that fall exactly on a two-degree boundary may round into either
    adjacent bin; all other hues sit at least 1/255 of a degree from a
    boundary and bin unambiguously.
    """
    for name, v in (("r", r), ("g", g), ("b", b)):
        if not 0 <= int(v) <= 255:
            raise ValidationError(f"{name} must be in [0, 255]")
    rf, gf, bf = float(r), float(g), float(b)
    mx = max(rf, gf, bf)
    mn = min(rf, gf, bf)
    delta = mx - mn
    if delta == 0.0:
        return 0
    if mx == rf:
        hue = 60.0 * (((gf - bf) / delta) % 6.0)
    elif mx == gf:
        hue = 60.0 * ((bf - rf) / delta + 2.0)
    else:
        hue = 60.0 * ((rf - gf) / delta + 4.0)
    return int(hue / 2.0)


def _correlate1d(arr: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(arr, pad, mode="reflect")
    out = np.zeros_like(arr, dtype=np.float64)
    for offset, weight in enumerate(kernel):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(offset, offset + arr.shape[axis])
        out += weight * padded[tuple(sl)]
    return out


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gradient_sectors(ang_deg: np.ndarray) -> np.ndarray:
    """Quantize gradient directions (degrees mod 180) to sector codes 0..3."""
    sector = np.zeros(ang_deg.shape, np.uint8)
    sector[(ang_deg >= 22.5) & (ang_deg < 67.5)] = 1
    sector[(ang_deg >= 67.5) & (ang_deg < 112.5)] = 2
    sector[(ang_deg >= 112.5) & (ang_deg < 157.5)] = 3
    return sector


def canny_edges(
    image: ImageRGB,
    low: float = 50.0,
    high: float = 150.0,
    sigma: float = 1.4,
) -> EdgeMap:
    """Binary Canny edge map with the conventions fixed in the module doc.

    Raises ValidationError for images smaller than 3x3, non-positive
    sigma, or thresholds violating 0 < low <= high.
    """
    if not isinstance(image, ImageRGB):
        raise ValidationError("image must be an ImageRGB")
    if image.height < 3 or image.width < 3:
        raise ValidationError("canny needs an image of at least 3x3 pixels")
    if not (low > 0.0 and high >= low):
        raise ValidationError("thresholds must satisfy 0 < low <= high")
    if not sigma > 0.0:
        raise ValidationError("sigma must be positive")

    gray = image.to_gray()
    gk = _gaussian_kernel(sigma)
    blurred = _correlate1d(_correlate1d(gray, gk, axis=0), gk, axis=1)

    smooth = np.array([1.0, 2.0, 1.0])
    diff = np.array([-1.0, 0.0, 1.0])
    gx = _correlate1d(_correlate1d(blurred, smooth, axis=0), diff, axis=1)
    gy = _correlate1d(_correlate1d(blurred, smooth, axis=1), diff, axis=0)

    mag = np.hypot(gx, gy)
    ang = np.degrees(np.arctan2(gy, gx)) % 180.0
    suppressed = kernels.nms(mag, gradient_sectors(ang))
    return EdgeMap(kernels.hysteresis(suppressed, low, high))


def texture_complexity(
    image: ImageRGB,
    low: float = 50.0,
    high: float = 150.0,
    sigma: float = 1.4,
) -> float:
    """Edge density of the Canny map: edge pixel count / (H * W)."""
    return canny_edges(image, low=low, high=high, sigma=sigma).density


def hue_histogram(image: ImageRGB, exclude_achromatic: bool = False) -> HueHistogram:
    """Histogram of hue bins. Achromatic pixels land in bin 0 unless excluded."""
    if not isinstance(image, ImageRGB):
        raise ValidationError("image must be an ImageRGB")
    bins = kernels.hue_bins(image.pixels)
    if exclude_achromatic:
        px = image.pixels
        chromatic = ~((px[..., 0] == px[..., 1]) & (px[..., 1] == px[..., 2]))
        bins = bins[chromatic]
    counts = np.bincount(bins.ravel(), minlength=HUE_BINS).astype(np.float64)
    total = int(counts.sum())
    if total == 0:
        return HueHistogram(np.zeros(HUE_BINS), 0)
    return HueHistogram(counts / total, total)


def color_complexity(image: ImageRGB, exclude_achromatic: bool = False) -> float:
    """Normalized hue entropy: -(1/ln 180) * sum(p * ln p), in [0, 1].

    A single occupied bin gives exactly 0.0; a uniform spread over all
    180 bins gives 1.0. With `exclude_achromatic` and no chromatic
    pixels at all the measure is defined as 0.0.
    """
    hist = hue_histogram(image, exclude_achromatic=exclude_achromatic)
    if hist.total_pixels == 0:
        return 0.0
    p = hist.proportions[hist.proportions > 0]
    entropy = -float(np.sum(p * np.log(p)))
    return entropy / math.log(HUE_BINS)
