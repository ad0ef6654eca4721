"""Spin-1/2 operator algebra, singlet correlations and partitioned CHSH sampling."""
from .chsh import ChshSetting, chsh_quantum, chsh_sampled, noncontextual_bound_check
from .ensemble import build_partition, classify, sample_run
from .singlet import correlation, fk_decomposition, joint_distribution, singlet_state
from .spin import Direction, Spinor, X, Y, Z

__all__ = [
    "ChshSetting",
    "Direction",
    "Spinor",
    "X",
    "Y",
    "Z",
    "build_partition",
    "chsh_quantum",
    "chsh_sampled",
    "classify",
    "correlation",
    "fk_decomposition",
    "joint_distribution",
    "noncontextual_bound_check",
    "sample_run",
    "singlet_state",
]

__version__ = "0.1.0"
