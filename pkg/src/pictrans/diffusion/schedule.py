"""DDPM noise schedule and the closed-form forward noising step."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_T_STEPS = 100  # desk-scale default; 1000 matches full-scale setups
DEFAULT_BETA_START = 1e-4
DEFAULT_BETA_END = 0.02


@dataclass(frozen=True)
class NoiseSchedule:
    t_steps: int = DEFAULT_T_STEPS
    beta_start: float = DEFAULT_BETA_START
    beta_end: float = DEFAULT_BETA_END
    betas: np.ndarray = field(init=False, repr=False)
    alphas: np.ndarray = field(init=False, repr=False)
    alpha_bars: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.t_steps < 1:
            raise ValueError("t_steps must be >= 1")
        betas = np.linspace(self.beta_start, self.beta_end, self.t_steps, dtype=np.float64)
        if np.any(betas <= 0.0) or np.any(betas >= 1.0):
            raise ValueError("betas must lie strictly inside (0, 1)")
        if np.any(np.diff(betas) < 0):
            raise ValueError("betas must be non-decreasing")
        alphas = 1.0 - betas
        alpha_bars = np.cumprod(alphas)
        if np.any(np.diff(alpha_bars) >= 0) or np.any(alpha_bars <= 0) or np.any(alpha_bars > 1):
            raise ValueError("alpha_bars must be strictly decreasing within (0, 1]")
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "alpha_bars", alpha_bars)

    def check_t(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64)
        if np.any(t < 0) or np.any(t >= self.t_steps):
            raise ValueError(f"timestep {t} outside [0, {self.t_steps})")
        return t

    def coeffs(self, t) -> tuple[np.ndarray, np.ndarray]:
        """(sqrt(alpha_bar_t), sqrt(1 - alpha_bar_t)) for scalar or array t."""
        t = self.check_t(t)
        ab = self.alpha_bars[t]
        return np.sqrt(ab), np.sqrt(1.0 - ab)

    def to_dict(self) -> dict:
        return {"t_steps": self.t_steps, "beta_start": self.beta_start, "beta_end": self.beta_end}

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSchedule":
        return cls(int(d["t_steps"]), float(d["beta_start"]), float(d["beta_end"]))


def q_sample(latent: np.ndarray, t, eps: np.ndarray, schedule: NoiseSchedule) -> np.ndarray:
    """Forward noising: sqrt(ab_t) * latent + sqrt(1 - ab_t) * eps.

    `t` may be a scalar or one index per batch item; `eps` must match
    the latent's shape.
    """
    latent = np.asarray(latent)
    eps = np.asarray(eps)
    if eps.shape != latent.shape:
        raise ValueError(f"eps shape {eps.shape} != latent shape {latent.shape}")
    c_sig, c_noise = schedule.coeffs(t)
    if np.ndim(c_sig):  # one t per batch item: broadcast over trailing dims
        extra = (1,) * (latent.ndim - 1)
        c_sig = c_sig.reshape(-1, *extra)
        c_noise = c_noise.reshape(-1, *extra)
    return c_sig * latent + c_noise * eps
