"""rician-lowsnr: exact and asymptotic low-SNR capacity of MRC Rician fading channels."""

from rician_lowsnr.channel import ChannelSpec, RandomStream
from rician_lowsnr.exact import Method, WaterfillSolution, capacity_exact, solve_lambda
from rician_lowsnr.specfun import NumericConfig

__all__ = [
    "ChannelSpec",
    "RandomStream",
    "Method",
    "WaterfillSolution",
    "NumericConfig",
    "capacity_exact",
    "solve_lambda",
]
