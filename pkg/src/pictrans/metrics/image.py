"""Image similarity: SSIM and normalized L1 distance.

SSIM uses the common reference constants: 11x11 Gaussian window with
sigma 1.5, C1=(0.01*L)^2, C2=(0.03*L)^2, Gaussian-weighted (population)
statistics, valid-mode windows, computed on the luma channel.
"""

from __future__ import annotations

import numpy as np

WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _to_luma(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 3:
        w = np.asarray(LUMA_WEIGHTS)
        return arr @ w
    if arr.ndim == 3 and arr.shape[2] == 1:
        return arr[:, :, 0]
    if arr.ndim == 2:
        return arr
    raise ValueError(f"unsupported image shape {arr.shape}")


def gaussian_window(size: int = WINDOW_SIZE, sigma: float = WINDOW_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g1 = np.exp(-(coords**2) / (2.0 * sigma**2))
    win = np.outer(g1, g1)
    return win / win.sum()


def _filter_valid(img: np.ndarray, kernel1d: np.ndarray) -> np.ndarray:
    """Separable valid-mode correlation with a normalized 1-D kernel."""
    k = kernel1d.size
    rows = np.lib.stride_tricks.sliding_window_view(img, k, axis=1) @ kernel1d
    return (np.lib.stride_tricks.sliding_window_view(rows, k, axis=0) @ kernel1d).astype(np.float64)


def ssim(a: np.ndarray, b: np.ndarray, value_range: float | None = None) -> float:
    """Mean structural similarity between two rasters of equal dims."""
    if np.asarray(a).shape != np.asarray(b).shape:
        raise ValueError(f"dims mismatch: {np.asarray(a).shape} vs {np.asarray(b).shape}")
    if value_range is None:
        value_range = 255.0 if np.asarray(a).dtype == np.uint8 else 1.0
    x = _to_luma(a)
    y = _to_luma(b)
    if min(x.shape) < WINDOW_SIZE:
        raise ValueError(f"images smaller than the {WINDOW_SIZE}x{WINDOW_SIZE} window")
    half = (WINDOW_SIZE - 1) / 2.0
    coords = np.arange(WINDOW_SIZE) - half
    g1 = np.exp(-(coords**2) / (2.0 * WINDOW_SIGMA**2))
    g1 = g1 / g1.sum()

    c1 = (K1 * value_range) ** 2
    c2 = (K2 * value_range) ** 2
    mu_x = _filter_valid(x, g1)
    mu_y = _filter_valid(y, g1)
    sigma_x = _filter_valid(x * x, g1) - mu_x**2
    sigma_y = _filter_valid(y * y, g1) - mu_y**2
    sigma_xy = _filter_valid(x * y, g1) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sigma_xy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (sigma_x + sigma_y + c2)
    return float(np.mean(num / den))


def l1_distance(a: np.ndarray, b: np.ndarray, value_range: float | None = None) -> float:
    """Mean absolute per-channel difference scaled into [0, 1]."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dims mismatch: {a.shape} vs {b.shape}")
    if value_range is None:
        value_range = 255.0 if a.dtype == np.uint8 else 1.0
    return float(np.mean(np.abs(a.astype(np.float64) - b.astype(np.float64))) / value_range)
