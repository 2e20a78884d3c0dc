"""Hot per-pixel kernels: hue binning, edge NMS, hysteresis, labeling.

Every kernel ships two equivalent builds: a numba ``@njit(cache=True)``
loop used when the compiler is importable, and a pure numpy fallback.
Setting the environment variable ``CARVE_NO_NUMBA`` to anything other
than empty or ``"0"`` forces the numpy path. Dispatch happens per call,
so benchmarks and tests can flip paths at runtime. Both builds are kept
operation-for-operation identical so results match bit for bit.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def numba_active() -> bool:
    """True when calls will dispatch to the compiled kernels."""
    if not HAS_NUMBA:
        return False
    return os.environ.get("CARVE_NO_NUMBA", "") in ("", "0")


def active_path() -> str:
    return "numba" if numba_active() else "numpy"


# ---------------------------------------------------------------- hue bins


def _hue_bins_loop(rgb):
    h_px, w_px = rgb.shape[0], rgb.shape[1]
    out = np.zeros((h_px, w_px), np.int64)
    for i in range(h_px):
        for j in range(w_px):
            r = float(rgb[i, j, 0])
            g = float(rgb[i, j, 1])
            b = float(rgb[i, j, 2])
            mx = max(r, g, b)
            mn = min(r, g, b)
            delta = mx - mn
            if delta == 0.0:
                out[i, j] = 0
            else:
                if mx == r:
                    hue = 60.0 * (((g - b) / delta) % 6.0)
                elif mx == g:
                    hue = 60.0 * ((b - r) / delta + 2.0)
                else:
                    hue = 60.0 * ((r - g) / delta + 4.0)
                out[i, j] = int(hue / 2.0)
    return out


def _hue_bins_np(rgb):
    rgbf = rgb.astype(np.float64)
    r, g, b = rgbf[..., 0], rgbf[..., 1], rgbf[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    safe = np.where(delta == 0.0, 1.0, delta)
    hue_r = 60.0 * (((g - b) / safe) % 6.0)
    hue_g = 60.0 * ((b - r) / safe + 2.0)
    hue_b = 60.0 * ((r - g) / safe + 4.0)
    hue = np.where(mx == r, hue_r, np.where(mx == g, hue_g, hue_b))
    hue = np.where(delta == 0.0, 0.0, hue)
    return (hue / 2.0).astype(np.int64)


# ------------------------------------------------------ non-max suppression
# Sector codes partition the gradient direction (degrees mod 180) into
# four 45-degree bands: 0 = horizontal axis (compare west/east),
# 1 = 45-degree axis (NE/SW), 2 = vertical (north/south), 3 = 135 (NW/SE).
# Out-of-image neighbors count as magnitude 0; ties keep the pixel.


def _nms_loop(mag, sector):
    h_px, w_px = mag.shape
    out = np.zeros_like(mag)
    for i in range(h_px):
        for j in range(w_px):
            m = mag[i, j]
            if m <= 0.0:
                continue
            s = sector[i, j]
            if s == 0:
                n1 = mag[i, j - 1] if j - 1 >= 0 else 0.0
                n2 = mag[i, j + 1] if j + 1 < w_px else 0.0
            elif s == 1:
                n1 = mag[i - 1, j + 1] if (i - 1 >= 0 and j + 1 < w_px) else 0.0
                n2 = mag[i + 1, j - 1] if (i + 1 < h_px and j - 1 >= 0) else 0.0
            elif s == 2:
                n1 = mag[i - 1, j] if i - 1 >= 0 else 0.0
                n2 = mag[i + 1, j] if i + 1 < h_px else 0.0
            else:
                n1 = mag[i - 1, j - 1] if (i - 1 >= 0 and j - 1 >= 0) else 0.0
                n2 = mag[i + 1, j + 1] if (i + 1 < h_px and j + 1 < w_px) else 0.0
            if m >= n1 and m >= n2:
                out[i, j] = m
    return out


def _nms_np(mag, sector):
    h_px, w_px = mag.shape
    pad = np.zeros((h_px + 2, w_px + 2), np.float64)
    pad[1:-1, 1:-1] = mag
    west, east = pad[1:-1, :-2], pad[1:-1, 2:]
    north, south = pad[:-2, 1:-1], pad[2:, 1:-1]
    ne, sw = pad[:-2, 2:], pad[2:, :-2]
    nw, se = pad[:-2, :-2], pad[2:, 2:]
    n1 = np.choose(sector, [west, ne, north, nw])
    n2 = np.choose(sector, [east, sw, south, se])
    keep = (mag > 0.0) & (mag >= n1) & (mag >= n2)
    return np.where(keep, mag, 0.0)


# --------------------------------------------------------------- hysteresis
# Strong pixels (>= high) seed a flood that claims 8-connected candidates
# (>= low). Everything else is dropped.


def _hysteresis_loop(mag, low, high):
    h_px, w_px = mag.shape
    out = np.zeros((h_px, w_px), np.uint8)
    stack = np.empty((h_px * w_px, 2), np.int64)
    top = 0
    for i in range(h_px):
        for j in range(w_px):
            if mag[i, j] >= high:
                out[i, j] = 1
                stack[top, 0] = i
                stack[top, 1] = j
                top += 1
    while top > 0:
        top -= 1
        ci = stack[top, 0]
        cj = stack[top, 1]
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                ni = ci + di
                nj = cj + dj
                if 0 <= ni < h_px and 0 <= nj < w_px:
                    if out[ni, nj] == 0 and mag[ni, nj] >= low:
                        out[ni, nj] = 1
                        stack[top, 0] = ni
                        stack[top, 1] = nj
                        top += 1
    return out


def _hysteresis_np(mag, low, high):
    cand = mag >= low
    edges = mag >= high
    h_px, w_px = mag.shape
    while True:
        pad = np.zeros((h_px + 2, w_px + 2), bool)
        pad[1:-1, 1:-1] = edges
        grown = (
            pad[:-2, :-2] | pad[:-2, 1:-1] | pad[:-2, 2:]
            | pad[1:-1, :-2] | pad[1:-1, 1:-1] | pad[1:-1, 2:]
            | pad[2:, :-2] | pad[2:, 1:-1] | pad[2:, 2:]
        ) & cand
        if np.array_equal(grown, edges):
            return grown.astype(np.uint8)
        edges = grown


# ------------------------------------------------------- component labeling
# Labels are assigned in row-major discovery order starting at 1, so a
# component's id is determined by its first pixel in row-major order.
# Both builds produce identical label arrays.


def _label_loop(mask, use_diag):
    h_px, w_px = mask.shape
    labels = np.zeros((h_px, w_px), np.int32)
    stack = np.empty((h_px * w_px, 2), np.int64)
    nxt = 0
    for si in range(h_px):
        for sj in range(w_px):
            if mask[si, sj] != 0 and labels[si, sj] == 0:
                nxt += 1
                labels[si, sj] = nxt
                stack[0, 0] = si
                stack[0, 1] = sj
                top = 1
                while top > 0:
                    top -= 1
                    ci = stack[top, 0]
                    cj = stack[top, 1]
                    for di in (-1, 0, 1):
                        for dj in (-1, 0, 1):
                            if di == 0 and dj == 0:
                                continue
                            if not use_diag and di != 0 and dj != 0:
                                continue
                            ni = ci + di
                            nj = cj + dj
                            if 0 <= ni < h_px and 0 <= nj < w_px:
                                if mask[ni, nj] != 0 and labels[ni, nj] == 0:
                                    labels[ni, nj] = nxt
                                    stack[top, 0] = ni
                                    stack[top, 1] = nj
                                    top += 1
    return labels


def _label_np(mask, use_diag):
    h_px, w_px = mask.shape
    big = np.int64(h_px * w_px + 2)
    idx = np.arange(1, h_px * w_px + 1, dtype=np.int64).reshape(h_px, w_px)
    lab = np.where(mask != 0, idx, big)
    while True:
        pad = np.full((h_px + 2, w_px + 2), big, dtype=np.int64)
        pad[1:-1, 1:-1] = lab
        neigh = np.minimum(
            np.minimum(pad[:-2, 1:-1], pad[2:, 1:-1]),
            np.minimum(pad[1:-1, :-2], pad[1:-1, 2:]),
        )
        if use_diag:
            neigh = np.minimum(
                neigh,
                np.minimum(
                    np.minimum(pad[:-2, :-2], pad[:-2, 2:]),
                    np.minimum(pad[2:, :-2], pad[2:, 2:]),
                ),
            )
        new = np.where(mask != 0, np.minimum(lab, neigh), big)
        if np.array_equal(new, lab):
            break
        lab = new
    flat = np.where(lab == big, 0, lab).ravel()
    fg = flat > 0
    if not fg.any():
        return np.zeros((h_px, w_px), np.int32)
    # each component converged to its minimum linear index + 1, which is
    # exactly the row-major discovery order the loop build uses
    uniq = np.unique(flat[fg])
    out = np.zeros(h_px * w_px, np.int32)
    out[fg] = (np.searchsorted(uniq, flat[fg]) + 1).astype(np.int32)
    return out.reshape(h_px, w_px)


# ----------------------------------------------------------------- dispatch

if HAS_NUMBA:
    _hue_bins_jit = njit(cache=True)(_hue_bins_loop)
    _nms_jit = njit(cache=True)(_nms_loop)
    _hysteresis_jit = njit(cache=True)(_hysteresis_loop)
    _label_jit = njit(cache=True)(_label_loop)


def hue_bins(rgb: np.ndarray) -> np.ndarray:
    """Per-pixel hue bin floor(hue_degrees / 2) for uint8 RGB, shape (H, W)."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if numba_active():
        return _hue_bins_jit(rgb)
    return _hue_bins_np(rgb)


def nms(mag: np.ndarray, sector: np.ndarray) -> np.ndarray:
    """Directional non-maximum suppression of a gradient magnitude map."""
    mag = np.ascontiguousarray(mag, dtype=np.float64)
    sector = np.ascontiguousarray(sector, dtype=np.uint8)
    if numba_active():
        return _nms_jit(mag, sector)
    return _nms_np(mag, sector)


def hysteresis(mag: np.ndarray, low: float, high: float) -> np.ndarray:
    """Double-threshold edge tracking; returns a uint8 0/1 map."""
    mag = np.ascontiguousarray(mag, dtype=np.float64)
    if numba_active():
        return _hysteresis_jit(mag, float(low), float(high))
    return _hysteresis_np(mag, float(low), float(high))


def label_components(mask: np.ndarray, connectivity: int = 8) -> np.ndarray:
    """Label connected foreground regions 1..n in row-major discovery order."""
    mask = np.ascontiguousarray(mask != 0).astype(np.uint8)
    use_diag = connectivity == 8
    if numba_active():
        return _label_jit(mask, use_diag)
    return _label_np(mask, use_diag)


def warmup() -> None:
    """Force-compile the jit kernels on tiny inputs (no-op on numpy path)."""
    rgb = np.zeros((3, 3, 3), np.uint8)
    mag = np.zeros((3, 3), np.float64)
    sec = np.zeros((3, 3), np.uint8)
    hue_bins(rgb)
    nms(mag, sec)
    hysteresis(mag, 1.0, 2.0)
    label_components(np.zeros((3, 3), np.uint8), 8)
