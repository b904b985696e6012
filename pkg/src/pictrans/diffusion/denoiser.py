"""Noise-prediction network: a small U-shaped conv net with two
downsampling stages, skip connections, and per-channel scale-shift
conditioning from the timestep and prompt embeddings. The final layer is
zero-initialized so an untrained model predicts exactly zero noise.
"""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor, concat, conv2d, reshape, silu, upsample2x
from .conditioning import ConditioningBundle, timestep_embedding
from .layers import Conv2d, GroupNorm, Linear, Module


class ResBlock(Module):
    def __init__(self, c_in: int, c_out: int, emb_dim: int, rng: np.random.Generator,
                 groups: int = 8, dtype=np.float32):
        self.norm1 = GroupNorm(c_in, groups, dtype=dtype)
        self.conv1 = Conv2d(c_in, c_out, rng, dtype=dtype)
        self.emb_proj = Linear(emb_dim, 2 * c_out, rng, dtype=dtype)
        self.norm2 = GroupNorm(c_out, groups, dtype=dtype)
        self.conv2 = Conv2d(c_out, c_out, rng, dtype=dtype)
        self.skip = Conv2d(c_in, c_out, rng, k=1, padding=0, dtype=dtype) if c_in != c_out else None
        self.c_out = c_out

    def __call__(self, x: Tensor, emb: Tensor) -> Tensor:
        h = self.conv1(silu(self.norm1(x)))
        ss = self.emb_proj(silu(emb))
        scale = reshape(ss[:, : self.c_out], (-1, self.c_out, 1, 1))
        shift = reshape(ss[:, self.c_out :], (-1, self.c_out, 1, 1))
        h = self.norm2(h) * (scale + 1.0) + shift
        h = self.conv2(silu(h))
        return (self.skip(x) if self.skip is not None else x) + h


class DenoiserUNet(Module):
    """epsilon-prediction network conditioned by channel concatenation."""

    def __init__(self, latent_ch: int, rng: np.random.Generator, base_width: int = 32,
                 emb_dim: int = 64, prompt_dim: int = 64, groups: int = 8, dtype=np.float32):
        w = base_width
        self.latent_ch = latent_ch
        self.emb_dim = emb_dim
        self.time_fc1 = Linear(emb_dim, emb_dim, rng, dtype=dtype)
        self.time_fc2 = Linear(emb_dim, emb_dim, rng, dtype=dtype)
        self.prompt_fc = Linear(prompt_dim, emb_dim, rng, dtype=dtype)

        self.stem = Conv2d(3 * latent_ch, w, rng, dtype=dtype)
        self.enc1 = ResBlock(w, w, emb_dim, rng, groups, dtype)
        self.down1 = Conv2d(w, 2 * w, rng, stride=2, dtype=dtype)
        self.enc2 = ResBlock(2 * w, 2 * w, emb_dim, rng, groups, dtype)
        self.down2 = Conv2d(2 * w, 2 * w, rng, stride=2, dtype=dtype)
        self.mid = ResBlock(2 * w, 2 * w, emb_dim, rng, groups, dtype)
        self.up1 = Conv2d(2 * w, 2 * w, rng, dtype=dtype)
        self.dec1 = ResBlock(4 * w, 2 * w, emb_dim, rng, groups, dtype)
        self.up2 = Conv2d(2 * w, w, rng, dtype=dtype)
        self.dec2 = ResBlock(2 * w, w, emb_dim, rng, groups, dtype)
        self.out_norm = GroupNorm(w, groups, dtype=dtype)
        self.out_conv = Conv2d(w, latent_ch, rng, zero_init=True, dtype=dtype)

    def _embedding(self, t: np.ndarray, prompt_vec: np.ndarray, dtype) -> Tensor:
        t_emb = Tensor(timestep_embedding(t, self.emb_dim).astype(dtype))
        e = self.time_fc2(silu(self.time_fc1(t_emb)))
        p = self.prompt_fc(Tensor(np.asarray(prompt_vec, dtype=dtype)))
        return e + p

    def __call__(self, noisy_latent: Tensor, bundle: ConditioningBundle) -> Tensor:
        if bundle.z_style.shape != noisy_latent.shape:
            raise ValueError(
                f"conditioning {bundle.z_style.shape} incongruent with latent {noisy_latent.shape}"
            )
        emb = self._embedding(bundle.t, bundle.prompt_vec, noisy_latent.data.dtype)
        x = concat([noisy_latent, bundle.z_style, bundle.z_glyph], axis=1)
        h0 = self.stem(x)
        h1 = self.enc1(h0, emb)
        h2 = self.enc2(self.down1(h1), emb)
        hm = self.mid(self.down2(h2), emb)
        u1 = self.up1(upsample2x(hm))
        d1 = self.dec1(concat([u1, h2], axis=1), emb)
        u2 = self.up2(upsample2x(d1))
        d2 = self.dec2(concat([u2, h1], axis=1), emb)
        return self.out_conv(silu(self.out_norm(d2)))
