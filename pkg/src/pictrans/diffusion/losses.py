"""Training objectives: noise-prediction loss, glyph-region perceptual
loss on the decoded denoised estimate, and their weighted combination.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .. import raster
from ..backfill.prompts import build_region_prompt
from .autodiff import Tensor
from .conditioning import ConditioningBundle, glyph_latent, hash_prompts, style_latent
from .params import BackfillModel
from .schedule import NoiseSchedule, q_sample


@dataclass
class BatchArrays:
    """Float NCHW views of a batch of image pairs, in [-1, 1]."""

    source: np.ndarray
    background: np.ndarray
    target: np.ndarray
    glyph: np.ndarray
    position: np.ndarray   # {0,1} float
    masked: np.ndarray
    prompts: list[str]


def _nchw(img: np.ndarray, dtype) -> np.ndarray:
    return np.ascontiguousarray(raster.to_float(img).transpose(2, 0, 1)).astype(dtype)


def batch_from_pairs(pairs, dtype=np.float32, tgt_lang: str | None = None) -> BatchArrays:
    """Stack ImagePairs into model-ready arrays; prompts via the region rule."""
    if not pairs:
        raise ValueError("empty batch")
    return BatchArrays(
        source=np.stack([_nchw(p.source_img, dtype) for p in pairs]),
        background=np.stack([_nchw(p.background, dtype) for p in pairs]),
        target=np.stack([_nchw(p.target_img, dtype) for p in pairs]),
        glyph=np.stack([_nchw(p.glyph_img, dtype) for p in pairs]),
        position=np.stack(
            [p.position_mask.transpose(2, 0, 1).astype(dtype) for p in pairs]
        ),
        masked=np.stack([_nchw(p.masked_img, dtype) for p in pairs]),
        prompts=[build_region_prompt(p.tgt_text, tgt_lang or p.tgt_lang) for p in pairs],
    )


def build_conditioning(model: BackfillModel, batch: BatchArrays, t: np.ndarray) -> ConditioningBundle:
    z_s = style_latent(
        Tensor(batch.source), Tensor(batch.background), model.encode_latent, model.style_fuse
    )
    z_a = glyph_latent(
        Tensor(batch.glyph), Tensor(batch.position), Tensor(batch.masked),
        model.glyph_map, model.pos_map, model.encode_latent, model.glyph_fuse,
    )
    prompt_vec = hash_prompts(batch.prompts, model.spec.prompt_dim)
    return ConditioningBundle(z_style=z_s, z_glyph=z_a, prompt_vec=prompt_vec, t=t)


def diffusion_loss_given(
    model: BackfillModel,
    schedule: NoiseSchedule,
    batch: BatchArrays,
    t: np.ndarray,
    eps: np.ndarray,
):
    """Deterministic core of the noise-prediction loss.

    Returns (loss, eps_hat, noisy_latent, target_latent); separating the
    random draws out keeps this a pure function, which the
    finite-difference gradient checks rely on.
    """
    target_latent = model.encode_latent(Tensor(batch.target)).data
    noisy = q_sample(target_latent, t, eps, schedule)
    bundle = build_conditioning(model, batch, t)
    eps_hat = model.denoiser(Tensor(noisy), bundle)
    loss = ((eps_hat - eps) ** 2).mean()
    return loss, eps_hat, noisy, target_latent


def diffusion_loss(model, schedule, batch: BatchArrays, rng: np.random.Generator):
    """Noise-prediction loss with per-item uniform t and Gaussian eps."""
    n = batch.target.shape[0]
    t = rng.integers(0, schedule.t_steps, size=n)
    latent_shape = (
        n,
        model.spec.latent_ch,
        batch.target.shape[2] // model.spec.latent_factor,
        batch.target.shape[3] // model.spec.latent_factor,
    )
    eps = rng.standard_normal(latent_shape).astype(batch.target.dtype)
    loss, eps_hat, noisy, _ = diffusion_loss_given(model, schedule, batch, t, eps)
    return loss, eps_hat, noisy, t


def predicted_x0(eps_hat: Tensor, noisy: np.ndarray, t: np.ndarray,
                 schedule: NoiseSchedule) -> Tensor:
    """Denoised estimate: (T_t - sqrt(1-ab_t)*eps_hat) / sqrt(ab_t)."""
    c_sig, c_noise = schedule.coeffs(t)
    shape = (-1,) + (1,) * (eps_hat.data.ndim - 1)
    c_sig = c_sig.reshape(shape).astype(eps_hat.data.dtype)
    c_noise = c_noise.reshape(shape).astype(eps_hat.data.dtype)
    return (Tensor(noisy) - eps_hat * c_noise) * (1.0 / c_sig)


def masked_region_mse(pred: Tensor, target: np.ndarray, mask: np.ndarray):
    """MSE restricted to mask: sum(mask * (pred-target)^2) / (rows * channels).

    `mask` is (B,1,H,W) {0,1}; the normalizer counts masked pixels times
    color channels. An all-zero mask yields 0 with a warning.
    """
    total = float(mask.sum()) * pred.shape[1]
    if total == 0:
        warnings.warn("perceptual loss: empty position mask, returning 0")
        return Tensor(np.asarray(0.0, dtype=pred.data.dtype))
    diff = (pred - target) ** 2
    return (diff * mask).sum() * (1.0 / total)


def perceptual_loss(predicted_img: np.ndarray, target_img: np.ndarray,
                    position_mask: np.ndarray) -> float:
    """Glyph-region MSE between two rasters in [-1, 1] scale.

    `position_mask` is (H, W, 1) {0,1}. Accepts uint8 rasters too, which
    are rescaled to [-1, 1] first.
    """
    if predicted_img.shape != target_img.shape:
        raise ValueError(f"dims disagree: {predicted_img.shape} vs {target_img.shape}")
    a = raster.to_float(predicted_img) if predicted_img.dtype == np.uint8 else predicted_img
    b = raster.to_float(target_img) if target_img.dtype == np.uint8 else target_img
    m = (np.asarray(position_mask) > 0).astype(np.float64)
    if m.ndim == 2:
        m = m[:, :, None]
    total = float(m.sum()) * a.shape[2]
    if total == 0:
        warnings.warn("perceptual loss: empty position mask, returning 0")
        return 0.0
    return float((((a - b) ** 2) * m).sum() / total)


def perceptual_loss_term(model, eps_hat: Tensor, noisy: np.ndarray, t: np.ndarray,
                         schedule: NoiseSchedule, batch: BatchArrays):
    """Differentiable perceptual loss on the decoded denoised estimate."""
    x0 = predicted_x0(eps_hat, noisy, t, schedule)
    decoded = model.decode_latent(x0)
    return masked_region_mse(decoded, batch.target, batch.position)


def total_loss(loss_d, loss_p, lam: float):
    """L = L_d + lam * L_p; works on floats and Tensors alike."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    return loss_d + lam * loss_p
