"""Box projection and soft thresholding.

Both operators act componentwise and are the two halves of the Moreau
decomposition w = soft_threshold(t, w) + box_project(t, w).
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["Box", "box_project", "soft_threshold"]


def box_project(lam: float, w: np.ndarray) -> np.ndarray:
    """Clamp ``w`` componentwise into the box [-lam, lam].

    Implemented as a min/max composition (branch-free) so results are
    identical across platforms. ``lam`` must be nonnegative.
    """
    if lam < 0:
        raise ValueError(f"box half-width must be nonnegative, got {lam}")
    return np.clip(w, -lam, lam)


def soft_threshold(t: float, v: np.ndarray) -> np.ndarray:
    """Shrink each entry of ``v`` toward zero by ``t``: sign(v) * max(|v| - t, 0)."""
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


@dataclass(frozen=True)
class Box:
    """The set [-lam, lam]^l, lam >= 0."""

    lam: float

    def __post_init__(self):
        if not (self.lam >= 0):
            raise ValueError(f"box half-width must be nonnegative, got {self.lam}")

    def project(self, w: np.ndarray) -> np.ndarray:
        return box_project(self.lam, w)
