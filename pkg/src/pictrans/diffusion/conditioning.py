"""Conditioning branches of the backfill model.

Style branch: fuse the latent encodings of the style image and its
text-free background with one convolutional fusion layer. Glyph branch:
downsample the glyph image and position mask through learned strided
stacks, add the encoded masked image, and fuse the sum the same way.
Both latents stay spatially congruent with the noisy image latent and
enter the denoiser by channel concatenation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, silu
from .layers import Conv2d, Module

PROMPT_DIM = 64


class ChannelDownsampler(Module):
    """Strided-convolution stack: 1-channel canvas raster -> latent dims."""

    def __init__(self, rng: np.random.Generator, latent_factor: int, latent_ch: int,
                 width: int = 16, dtype=np.float32):
        n_down = int(np.log2(latent_factor))
        widths = [min(width * 2**i, 4 * width) for i in range(n_down)]
        self.downs = [
            Conv2d(1 if i == 0 else widths[i - 1], widths[i], rng, stride=2, dtype=dtype)
            for i in range(n_down)
        ]
        self.head = Conv2d(widths[-1], latent_ch, rng, dtype=dtype)

    def __call__(self, x: Tensor) -> Tensor:
        h = x
        for down in self.downs:
            h = silu(down(h))
        return self.head(h)


@dataclass
class ConditioningBundle:
    """Inputs the denoiser is conditioned on at one step."""

    z_style: Tensor        # fused style-background latent
    z_glyph: Tensor        # fused glyph/position/masked-image latent
    prompt_vec: np.ndarray  # (B, PROMPT_DIM) hashed prompt embedding
    t: np.ndarray           # (B,) timestep indices

    def __post_init__(self):
        if self.z_style.shape != self.z_glyph.shape:
            raise ValueError(
                f"conditioning latents disagree: {self.z_style.shape} vs {self.z_glyph.shape}"
            )
        if len(self.prompt_vec) != self.z_style.shape[0] or len(self.t) != self.z_style.shape[0]:
            raise ValueError("conditioning batch sizes disagree")


def style_latent(style_img: Tensor, background: Tensor, encode, fuse: Conv2d) -> Tensor:
    """Fused style latent: fuse(encode(style) + encode(background)).

    The sum makes the operation symmetric in its two image arguments.
    """
    if style_img.shape != background.shape:
        raise ValueError(f"style/background dims disagree: {style_img.shape} vs {background.shape}")
    return fuse(encode(style_img) + encode(background))


def glyph_latent(glyph: Tensor, position: Tensor, masked: Tensor,
                 glyph_map: ChannelDownsampler, pos_map: ChannelDownsampler,
                 encode, fuse: Conv2d) -> Tensor:
    """Fused glyph latent: fuse(G(glyph) + P(position) + encode(masked))."""
    g = glyph_map(glyph)
    p = pos_map(position)
    m = encode(masked)
    if g.shape != p.shape or g.shape != m.shape:
        raise ValueError(f"glyph-branch dims disagree: {g.shape}, {p.shape}, {m.shape}")
    return fuse(g + p + m)


def hash_prompt(prompt: str, dim: int = PROMPT_DIM) -> np.ndarray:
    """Vocabulary-free bag-of-characters embedding, L2-normalized."""
    v = np.zeros(dim, dtype=np.float64)
    for ch in prompt:
        digest = hashlib.blake2b(ch.encode("utf-8"), digest_size=4).digest()
        v[int.from_bytes(digest, "big") % dim] += 1.0
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


def hash_prompts(prompts: list[str], dim: int = PROMPT_DIM) -> np.ndarray:
    return np.stack([hash_prompt(p, dim) for p in prompts])


def timestep_embedding(t: np.ndarray, dim: int) -> np.ndarray:
    """Standard sinusoidal embedding of integer timesteps, (B, dim)."""
    t = np.asarray(t, dtype=np.float64).reshape(-1, 1)
    half = dim // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half) / max(half - 1, 1))
    angles = t * freqs
    emb = np.concatenate([np.sin(angles), np.cos(angles)], axis=1)
    if emb.shape[1] < dim:
        emb = np.pad(emb, ((0, 0), (0, dim - emb.shape[1])))
    return emb
