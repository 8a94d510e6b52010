"""Rician fading with maximum ratio combining.

The post-combining gain γ = ‖h‖² follows a scaled noncentral chi-square law
with 2L degrees of freedom and noncentrality 2K:

    γ = (LΩ / (2(K+L))) · Y,   Y ~ χ'²(2L, 2K)

so E[γ] = LΩ. Every density evaluation is done in log space and exponentiated
once. The vector model (LOS vector plus circular Gaussian scatter) is kept for
the MRC simulation; for L > 1 its aggregate noncentrality differs from the law
above, and the law above is what the capacity code uses.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from rician_lowsnr.errors import DomainError
from rician_lowsnr.specfun import DEFAULT_CONFIG, NumericConfig, integrate_semi_infinite, log_bessel_i

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_SHARD_STRIDE = 1 << 32


@dataclass(frozen=True)
class ChannelSpec:
    """Rician factor K, branch count L and per-branch mean gain Ω."""

    K: float
    L: int
    omega: float = 1.0

    def __post_init__(self):
        if isinstance(self.L, bool) or int(self.L) != self.L or self.L < 1:
            raise DomainError(f"L must be an integer >= 1, got {self.L!r}")
        if not (self.K >= 0 and math.isfinite(self.K)):
            raise DomainError(f"K must be finite and >= 0, got {self.K!r}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be finite and > 0, got {self.omega!r}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "K", float(self.K))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def mean(self) -> float:
        return self.L * self.omega

    @property
    def rate(self) -> float:
        """(K+L)/(LΩ), the exponential decay rate of the density."""
        return (self.K + self.L) / (self.L * self.omega)

    @property
    def lambda_scale(self) -> float:
        """LΩ/(K+L), the prefactor of every low-SNR formula."""
        return 1.0 / self.rate

    @property
    def std_gamma(self) -> float:
        return self.L * self.omega * math.sqrt(self.L + 2.0 * self.K) / (self.K + self.L)

    @property
    def chi2_scale(self) -> float:
        return self.L * self.omega / (2.0 * (self.K + self.L))

    def breakpoints(self, width: float = 8.0) -> tuple[float, ...]:
        """Quadrature split points around the bulk of the density."""
        m, s = self.mean, self.std_gamma
        return tuple(p for p in (m - width * s, m, m + width * s) if p > 0)

    def label(self) -> str:
        return f"K={self.K:g}, L={self.L}, Ω={self.omega:g}"


@dataclass(frozen=True)
class RandomStream:
    """Reproducible random stream: same (seed, stream_id), same draws."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed & _MASK64, spawn_key=(self.stream_id & _MASK64,))
        return np.random.default_rng(seq)

    def spawn(self, n: int) -> list[RandomStream]:
        """n child streams for sharded simulation."""
        base = ((self.stream_id + 1) * _SHARD_STRIDE) & _MASK64
        return [RandomStream(self.seed, (base + i) & _MASK64) for i in range(n)]


@dataclass(frozen=True)
class MrcSnapshot:
    """Per-draw quantities of z = hᴴ(h x + v)."""

    gain: np.ndarray
    signal_power: np.ndarray
    noise_power: np.ndarray


# ─── Density ──────────────────────────────────────────────────


def log_pdf_gamma(spec: ChannelSpec, x: float) -> float:
    """log f_γ(x)."""
    if not x > 0:
        raise DomainError(f"x must be > 0, got {x}")
    L, K, r = spec.L, spec.K, spec.rate
    if K == 0.0:
        # central chi-square: Gamma(shape L, scale Ω)
        return L * math.log(r) + (L - 1) * math.log(x) - r * x - math.lgamma(L)
    z = 2.0 * math.sqrt(K * r * x)
    # -r x - K + z written as a square to avoid cancellation at large K
    exponent = -(math.sqrt(r * x) - math.sqrt(K)) ** 2
    log_scaled_bessel = log_bessel_i(L - 1, z) - z
    return (
        0.5 * (L + 1) * math.log(r)
        + 0.5 * (L - 1) * (math.log(x) - math.log(K))
        + exponent
        + log_scaled_bessel
    )


def pdf_gamma(spec: ChannelSpec, x: float) -> float:
    """Density of the post-MRC gain γ at x > 0."""
    return math.exp(log_pdf_gamma(spec, x))


def ccdf_gamma(spec: ChannelSpec, threshold: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """Prob(γ >= threshold)."""
    if not threshold >= 0:
        raise DomainError(f"threshold must be >= 0, got {threshold}")
    if threshold == 0:
        return 1.0
    value = integrate_semi_infinite(lambda t: pdf_gamma(spec, t), threshold, cfg, points=spec.breakpoints())
    return min(max(value, 0.0), 1.0)


def mean_gamma(spec: ChannelSpec) -> float:
    """E[γ] = LΩ."""
    return spec.mean


def moment_gamma_quadrature(spec: ChannelSpec, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """E[γ] by quadrature, for checking the density against mean_gamma."""
    return integrate_semi_infinite(lambda t: t * pdf_gamma(spec, t), 0.0, cfg, points=spec.breakpoints())


def normalization_quadrature(spec: ChannelSpec, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """∫₀^∞ f_γ, which should be 1."""
    return integrate_semi_infinite(lambda t: pdf_gamma(spec, t), 0.0, cfg, points=spec.breakpoints())


# ─── Sampling ─────────────────────────────────────────────────


def draw_gamma(spec: ChannelSpec, gen: np.random.Generator, n: int) -> np.ndarray:
    """n gains from an already-seeded generator."""
    if spec.K == 0.0:
        y = gen.chisquare(2 * spec.L, size=n)
    else:
        y = gen.noncentral_chisquare(2 * spec.L, 2.0 * spec.K, size=n)
    return spec.chi2_scale * y


def sample_gamma(spec: ChannelSpec, stream: RandomStream, n: int) -> np.ndarray:
    """n draws of γ from the canonical law (float array)."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return draw_gamma(spec, stream.generator(), int(n))


def los_vector(L: int) -> np.ndarray:
    """Equal-entry line-of-sight vector with ‖h̄‖² = L."""
    return np.ones(L, dtype=complex)


def _draw_vectors(spec: ChannelSpec, gen: np.random.Generator, n: int) -> np.ndarray:
    L, K = spec.L, spec.K
    scatter = (gen.standard_normal((n, L)) + 1j * gen.standard_normal((n, L))) / math.sqrt(2.0)
    h = math.sqrt(K / (1.0 + K)) * los_vector(L) + math.sqrt(1.0 / (1.0 + K)) * scatter
    return math.sqrt(spec.omega) * h


def sample_channel_vectors(spec: ChannelSpec, stream: RandomStream, n: int) -> np.ndarray:
    """n channel vectors h, shape (n, L), with E[‖h‖²] = LΩ."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return _draw_vectors(spec, stream.generator(), int(n))


def sample_channel_vector(spec: ChannelSpec, stream: RandomStream) -> np.ndarray:
    """One channel vector h of length L."""
    return sample_channel_vectors(spec, stream, 1)[0]


def mrc_combine(h, y):
    """hᴴy. Works on single vectors or on (n, L) batches row by row."""
    h = np.asarray(h)
    y = np.asarray(y)
    if h.shape != y.shape:
        raise DomainError(f"dimension mismatch: h{h.shape} vs y{y.shape}")
    z = np.sum(np.conj(h) * y, axis=-1)
    return complex(z) if z.ndim == 0 else z


def simulate_mrc_output(spec: ChannelSpec, stream: RandomStream, n: int, x: complex = 1.0) -> MrcSnapshot:
    """Send x through y = h x + v with unit noise and combine.

    The combined signal power is ‖h‖⁴|x|² and the noise power has mean ‖h‖²,
    so the output SNR is ‖h‖²|x|².
    """
    gen = stream.generator()
    h = _draw_vectors(spec, gen, int(n))
    v = (gen.standard_normal(h.shape) + 1j * gen.standard_normal(h.shape)) / math.sqrt(2.0)
    gain = np.sum(np.abs(h) ** 2, axis=-1)
    signal = mrc_combine(h, h * x)
    noise = mrc_combine(h, v)
    log.debug("simulated %d MRC outputs for %s", n, spec.label())
    return MrcSnapshot(gain=gain, signal_power=np.abs(signal) ** 2, noise_power=np.abs(noise) ** 2)
