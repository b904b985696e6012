"""Model assembly and versioned checkpoint container."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .autodiff import Tensor
from .conditioning import ChannelDownsampler, PROMPT_DIM
from .denoiser import DenoiserUNet
from .latents import ConvVAE, SpaceToDepthCodec
from .layers import Conv2d, Module
from .schedule import NoiseSchedule

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class ModelSpec:
    """Architecture hyperparameters; shapes derive from these."""

    canvas: int = 64
    latent_mode: str = "vae"          # "vae" | "s2d"
    latent_factor: int = 8
    vae_latent_ch: int = 4
    base_width: int = 32
    emb_dim: int = 64
    prompt_dim: int = PROMPT_DIM
    vae_width: int = 16
    mapper_width: int = 16
    groups: int = 8
    dtype: str = "float32"

    def __post_init__(self):
        if self.latent_mode not in ("vae", "s2d"):
            raise ValueError(f"unknown latent_mode {self.latent_mode!r}")
        if self.canvas % self.latent_factor:
            raise ValueError("canvas must be divisible by latent_factor")
        if (self.canvas // self.latent_factor) % 4:
            raise ValueError("latent side must be divisible by 4 (two U-net downsamplings)")

    @property
    def latent_ch(self) -> int:
        if self.latent_mode == "s2d":
            return 3 * self.latent_factor * self.latent_factor
        return self.vae_latent_ch

    @property
    def latent_hw(self) -> int:
        return self.canvas // self.latent_factor

    @property
    def np_dtype(self):
        return np.float64 if self.dtype == "float64" else np.float32


class BackfillModel(Module):
    """All learnable pieces of the text-backfill diffusion model.

    Components: latent codec (VAE or space-to-depth), the two fusion
    convolutions, the glyph/position downsampling stacks, and the
    denoiser U-net. `latent_scale` normalizes VAE latents to roughly
    unit variance before diffusion.
    """

    def __init__(self, spec: ModelSpec, seed: int = 0):
        self.spec = spec
        dtype = spec.np_dtype
        rng = np.random.default_rng(seed)
        if spec.latent_mode == "vae":
            self.vae = ConvVAE(rng, spec.latent_factor, spec.vae_latent_ch, spec.vae_width, dtype)
        else:
            self.vae = SpaceToDepthCodec(spec.latent_factor)
        c = spec.latent_ch
        self.style_fuse = Conv2d(c, c, rng, dtype=dtype)
        self.glyph_fuse = Conv2d(c, c, rng, dtype=dtype)
        self.glyph_map = ChannelDownsampler(rng, spec.latent_factor, c, spec.mapper_width, dtype)
        self.pos_map = ChannelDownsampler(rng, spec.latent_factor, c, spec.mapper_width, dtype)
        self.denoiser = DenoiserUNet(
            c, rng, spec.base_width, spec.emb_dim, spec.prompt_dim, spec.groups, dtype
        )
        self.latent_scale = 1.0

    # -- latent codec interface ------------------------------------------------
    def encode_latent(self, images: Tensor) -> Tensor:
        """Images (B,3,H,W) in [-1,1] -> scaled latent (B,c,h,w)."""
        mu, _ = self.vae.encode(images)
        return mu * self.latent_scale if self.latent_scale != 1.0 else mu

    def decode_latent(self, z: Tensor) -> Tensor:
        if self.latent_scale != 1.0:
            z = z * (1.0 / self.latent_scale)
        return self.vae.decode(z)

    def trainable_parameters(self) -> dict[str, Tensor]:
        """Diffusion-phase parameters: everything except the codec."""
        return {
            name: t for name, t in self.parameters().items() if not name.startswith("vae.")
        }

    # -- persistence -------------------------------------------------------------
    def save(self, path: Path, schedule: NoiseSchedule, extra_meta: dict | None = None) -> None:
        meta = {
            "version": CHECKPOINT_VERSION,
            "spec": asdict(self.spec),
            "schedule": schedule.to_dict(),
            "latent_scale": self.latent_scale,
            "extra": extra_meta or {},
        }
        meta["config_hash"] = config_hash(meta["spec"], meta["schedule"], meta["extra"])
        arrays = {f"p/{name}": t.data for name, t in self.parameters().items()}
        np.savez_compressed(path, meta=json.dumps(meta, sort_keys=True), **arrays)

    @classmethod
    def load(cls, path: Path) -> tuple["BackfillModel", NoiseSchedule, dict]:
        with np.load(path, allow_pickle=False) as bundle:
            meta = json.loads(str(bundle["meta"]))
            if meta.get("version") != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {meta.get('version')}")
            spec = ModelSpec(**meta["spec"])
            model = cls(spec, seed=0)
            state = {name[2:]: bundle[name] for name in bundle.files if name.startswith("p/")}
        model.load_state(state)
        model.latent_scale = float(meta["latent_scale"])
        return model, NoiseSchedule.from_dict(meta["schedule"]), meta


def config_hash(*parts: dict) -> str:
    blob = json.dumps(parts, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]
