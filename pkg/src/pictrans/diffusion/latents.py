"""Latent codecs: a small convolutional VAE and an invertible fallback.

The VAE is the production path: pretrained on corpus images with MSE
plus a small KL term, then frozen for diffusion training. The
space-to-depth codec is a lossless, parameter-free alternative with the
same interface; it keeps fast tests and overfit fixtures independent of
VAE quality.
"""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor, concat, exp, reshape, silu, tanh, transpose
from .layers import Conv2d, GroupNorm, Module


class ConvVAE(Module):
    """Encoder/decoder pair with 2**n_down spatial reduction."""

    def __init__(self, rng: np.random.Generator, latent_factor: int = 8,
                 latent_ch: int = 4, width: int = 16, dtype=np.float32):
        if latent_factor & (latent_factor - 1):
            raise ValueError("latent_factor must be a power of two")
        self.latent_factor = latent_factor
        self.latent_ch = latent_ch
        n_down = int(np.log2(latent_factor))
        widths = [min(width * 2**i, 4 * width) for i in range(n_down)]

        self.enc_stem = Conv2d(3, widths[0], rng, dtype=dtype)
        self.enc_downs = [
            Conv2d(widths[i], widths[min(i + 1, n_down - 1)], rng, stride=2, dtype=dtype)
            for i in range(n_down)
        ]
        self.enc_norms = [GroupNorm(widths[min(i + 1, n_down - 1)], dtype=dtype) for i in range(n_down)]
        self.enc_head = Conv2d(widths[-1], 2 * latent_ch, rng, dtype=dtype)

        self.dec_stem = Conv2d(latent_ch, widths[-1], rng, dtype=dtype)
        self.dec_ups = [
            Conv2d(widths[min(n_down - 1 - i, n_down - 1)], widths[max(n_down - 2 - i, 0)], rng, dtype=dtype)
            for i in range(n_down)
        ]
        self.dec_norms = [GroupNorm(widths[max(n_down - 2 - i, 0)], dtype=dtype) for i in range(n_down)]
        self.dec_head = Conv2d(widths[0], 3, rng, dtype=dtype)

    def encode(self, x: Tensor) -> tuple[Tensor, Tensor]:
        """(mu, logvar); x is (B, 3, H, W) in [-1, 1]."""
        h = silu(self.enc_stem(x))
        for down, norm in zip(self.enc_downs, self.enc_norms):
            h = silu(norm(down(h)))
        stats = self.enc_head(h)
        c = self.latent_ch
        return stats[:, :c], stats[:, c:]

    def decode(self, z: Tensor) -> Tensor:
        """(B, 3, H, W) in [-1, 1] via tanh."""
        from .autodiff import upsample2x

        h = silu(self.dec_stem(z))
        for up, norm in zip(self.dec_ups, self.dec_norms):
            h = silu(norm(up(upsample2x(h))))
        return tanh(self.dec_head(h))

    def reparameterize(self, mu: Tensor, logvar: Tensor, rng: np.random.Generator) -> Tensor:
        eps = rng.standard_normal(mu.shape).astype(mu.data.dtype)
        return mu + exp(logvar * 0.5) * Tensor(eps)


class SpaceToDepthCodec(Module):
    """Lossless pixel-shuffle codec: (B,3,H,W) <-> (B, 3*f*f, H/f, W/f)."""

    def __init__(self, latent_factor: int = 4):
        self.latent_factor = latent_factor
        self.latent_ch = 3 * latent_factor * latent_factor

    def encode(self, x: Tensor) -> tuple[Tensor, None]:
        f = self.latent_factor
        b, c, h, w = x.shape
        if h % f or w % f:
            raise ValueError(f"canvas {h}x{w} not divisible by factor {f}")
        z = reshape(x, (b, c, h // f, f, w // f, f))
        z = transpose(z, (0, 1, 3, 5, 2, 4))
        return reshape(z, (b, c * f * f, h // f, w // f)), None

    def decode(self, z: Tensor) -> Tensor:
        f = self.latent_factor
        b, cff, hf, wf = z.shape
        c = cff // (f * f)
        x = reshape(z, (b, c, f, f, hf, wf))
        x = transpose(x, (0, 1, 4, 2, 5, 3))
        return reshape(x, (b, c, hf * f, wf * f))


def vae_kl(mu: Tensor, logvar: Tensor) -> Tensor:
    """Mean KL(N(mu, var) || N(0, 1)) per latent element."""
    return ((mu**2) + exp(logvar) - logvar - 1.0).mean() * 0.5
