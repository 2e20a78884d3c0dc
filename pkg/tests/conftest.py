"""Shared fixtures and independent reference implementations.

The reference implementations here are deliberately written in a
different style from the package (plain loops, stdlib containers) so
they can serve as oracles: both sides implement the same documented
conventions, and tests compare their outputs.
"""

from __future__ import annotations

import colorsys
import math
from collections import deque
from fractions import Fraction

import numpy as np
import pytest

from carve.attention import stack_from_grids

# --------------------------------------------------------- canny reference


def _reflect(idx: int, n: int) -> int:
    if n == 1:
        return 0
    period = 2 * n - 2
    m = idx % period
    return period - m if m >= n else m


def _ref_correlate(arr, kernel, axis):
    h, w = arr.shape
    r = len(kernel) // 2
    out = np.zeros((h, w), np.float64)
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for o, kv in enumerate(kernel):
                d = o - r
                if axis == 0:
                    acc += kv * arr[_reflect(i + d, h), j]
                else:
                    acc += kv * arr[i, _reflect(j + d, w)]
            out[i, j] = acc
    return out


def reference_canny(pixels, low=50.0, high=150.0, sigma=1.4):
    """Plain-loop Canny sharing the package's documented conventions."""
    h, w = pixels.shape[:2]
    px = pixels.astype(np.float64)
    gray = 0.299 * px[..., 0] + 0.587 * px[..., 1] + 0.114 * px[..., 2]

    radius = int(math.ceil(3.0 * sigma))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    gk = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    gk = gk / gk.sum()
    blurred = _ref_correlate(_ref_correlate(gray, gk, 0), gk, 1)

    smooth = [1.0, 2.0, 1.0]
    diff = [-1.0, 0.0, 1.0]
    gx = _ref_correlate(_ref_correlate(blurred, smooth, 0), diff, 1)
    gy = _ref_correlate(_ref_correlate(blurred, smooth, 1), diff, 0)

    mag = np.hypot(gx, gy)
    ang = np.degrees(np.arctan2(gy, gx)) % 180.0

    nms = np.zeros((h, w), np.float64)
    for i in range(h):
        for j in range(w):
            m = mag[i, j]
            if m <= 0.0:
                continue
            a = ang[i, j]
            if a < 22.5 or a >= 157.5:
                pairs = ((i, j - 1), (i, j + 1))
            elif a < 67.5:
                pairs = ((i - 1, j + 1), (i + 1, j - 1))
            elif a < 112.5:
                pairs = ((i - 1, j), (i + 1, j))
            else:
                pairs = ((i - 1, j - 1), (i + 1, j + 1))
            neigh = []
            for (ni, nj) in pairs:
                neigh.append(mag[ni, nj] if 0 <= ni < h and 0 <= nj < w else 0.0)
            if m >= neigh[0] and m >= neigh[1]:
                nms[i, j] = m

    edges = set()
    dq = deque()
    for i in range(h):
        for j in range(w):
            if nms[i, j] >= high:
                edges.add((i, j))
                dq.append((i, j))
    while dq:
        ci, cj = dq.popleft()
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                ni, nj = ci + di, cj + dj
                if 0 <= ni < h and 0 <= nj < w and (ni, nj) not in edges:
                    if nms[ni, nj] >= low:
                        edges.add((ni, nj))
                        dq.append((ni, nj))
    out = np.zeros((h, w), np.uint8)
    for (i, j) in edges:
        out[i, j] = 1
    return out


# ----------------------------------------------------- labeling reference


def flood_regions(mask, connectivity):
    """Connected regions as a set of frozensets of (row, col)."""
    h, w = mask.shape
    if connectivity == 8:
        nbrs = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    else:
        nbrs = [(-1, 0), (0, -1), (0, 1), (1, 0)]
    seen = [[False] * w for _ in range(h)]
    regions = set()
    for r in range(h):
        for c in range(w):
            if mask[r, c] and not seen[r][c]:
                comp = []
                dq = deque([(r, c)])
                seen[r][c] = True
                while dq:
                    cr, cc = dq.popleft()
                    comp.append((cr, cc))
                    for dr, dc in nbrs:
                        nr, nc = cr + dr, cc + dc
                        if 0 <= nr < h and 0 <= nc < w and mask[nr, nc] and not seen[nr][nc]:
                            seen[nr][nc] = True
                            dq.append((nr, nc))
                regions.add(frozenset(comp))
    return regions


# ------------------------------------------------------------ hue reference


def hue_bin_via_colorsys(r, g, b):
    """Independent hue binning through the stdlib color conversion."""
    if r == g == b:
        return 0
    h, _, _ = colorsys.rgb_to_hsv(r / 255.0, g / 255.0, b / 255.0)
    deg = (h * 360.0) % 360.0
    return min(int(deg // 2.0), 179)


def hue_bin_exact(r, g, b):
    """Hue bin in exact rational arithmetic.

    Returns (bin, on_edge). on_edge marks hues that fall exactly on a
    two-degree bin boundary; any float implementation may legitimately
    round those to either adjacent bin. Off-edge hues sit at least
    1/255 of a degree from a boundary, far beyond float error, so
    there the bin is unambiguous.
    """
    mx, mn = max(r, g, b), min(r, g, b)
    if mx == mn:
        return 0, False
    delta = mx - mn
    if mx == r:
        sixth = Fraction(g - b, delta) % 6
    elif mx == g:
        sixth = Fraction(b - r, delta) + 2
    else:
        sixth = Fraction(r - g, delta) + 4
    hue = 60 * sixth
    return int(hue // 2), hue % 2 == 0


def hue_wheel_rgbs():
    """One saturated RGB triple per hue bin, found via the reference.

    Skips colors whose exact hue lands on a bin boundary so the picks
    bin identically under any correctly rounded float conversion.
    """
    found = {}
    ramps = (
        lambda x: (255, x, 0),
        lambda x: (255 - x, 255, 0),
        lambda x: (0, 255, x),
        lambda x: (0, 255 - x, 255),
        lambda x: (x, 0, 255),
        lambda x: (255, 0, 255 - x),
    )
    for ramp in ramps:
        for x in range(256):
            rgb = ramp(x)
            b, on_edge = hue_bin_exact(*rgb)
            if not on_edge and b not in found:
                found[b] = rgb
    assert len(found) == 180, f"hue wheel covers {len(found)} bins"
    return [found[b] for b in range(180)]


# ------------------------------------------------------------ stack makers


def pair_from_grids(q_grid, g_grid, layers=range(20, 26), steps=range(10)):
    """Question/general stacks repeating one grid each over layers x steps."""
    q_grid = np.asarray(q_grid, dtype=np.float64)
    g_grid = np.asarray(g_grid, dtype=np.float64)
    q_grid = q_grid / q_grid.sum()
    g_grid = g_grid / g_grid.sum()
    layers = tuple(layers)
    steps = tuple(steps)
    question = stack_from_grids(
        {(l, t): q_grid for l in layers for t in steps},
        model_id="fixture",
        prompt_kind="question",
        prompt_text="What object is most prominent in the image?",
    )
    general = stack_from_grids(
        {(l, t): g_grid for l in layers for t in steps},
        model_id="fixture",
        prompt_kind="general",
        prompt_text="Write a general description of the image.",
    )
    return question, general


def block_fixture():
    """The known-answer semantic-block construction on a 14x14 grid.

    Returns (question, general, expected_pixel_bbox) for a 448x448
    image: f_sem = 100 on token rows 4..6 x cols 8..10 and 1 elsewhere;
    f_vis = 1; the general stack's perturbation boosts a disjoint
    5-column band (rows 0..9, cols 0..4) so the percentile cut at
    p = 0.3 retains exactly the block plus that band, and the block
    dominates on cumulative score.
    """
    gh = gw = 14
    f_sem = np.ones((gh, gw))
    f_sem[4:7, 8:11] = 100.0
    eps = np.full((gh, gw), 0.4)
    eps[0:10, 0:5] = -0.4
    eps[4:7, 8:11] = 0.0
    q_grid = f_sem.copy()  # f_vis = 1
    g_grid = 1.0 + eps
    question, general = pair_from_grids(q_grid, g_grid)
    token_px = 448 // gh
    bbox = (4 * token_px, 8 * token_px, 7 * token_px - 1, 11 * token_px - 1)
    return question, general, bbox


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
