"""Scalar diffusivities ``g(s^2)`` with contrast parameter ``lambda``."""
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DiffusivityKind(str, Enum):
    CHARBONNIER = "charbonnier"
    AUBERT = "aubert"
    PERONA_MALIK = "perona-malik"
    PERONA_MALIK2 = "perona-malik2"
    GEMAN_REYNOLDS = "geman-reynolds"


def _charbonnier(s2, lam2):
    return 1.0 / np.sqrt(1.0 + s2 / lam2)


def _aubert(s2, lam2):
    # not normalised: g(0) = 0
    return (s2 / lam2) / (s2 + lam2) ** 2


def _perona_malik(s2, lam2):
    return 1.0 / (1.0 + s2 / lam2)


def _perona_malik2(s2, lam2):
    return np.exp(-s2 / lam2)


def _geman_reynolds(s2, lam2):
    # not normalised: g(0) = 2 / lambda^2
    return 2.0 * lam2 / (s2 + lam2) ** 2


_FUNCS = {
    DiffusivityKind.CHARBONNIER: _charbonnier,
    DiffusivityKind.AUBERT: _aubert,
    DiffusivityKind.PERONA_MALIK: _perona_malik,
    DiffusivityKind.PERONA_MALIK2: _perona_malik2,
    DiffusivityKind.GEMAN_REYNOLDS: _geman_reynolds,
}


@dataclass(frozen=True)
class Diffusivity:
    """A diffusivity function evaluated on the *squared* gradient magnitude.

    >>> Diffusivity("perona-malik", 2.0)(4.0)
    0.5
    """

    kind: DiffusivityKind = DiffusivityKind.CHARBONNIER
    lam: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "kind", DiffusivityKind(self.kind))
        if not self.lam > 0:
            raise ValueError(f"contrast parameter must be positive, got {self.lam}")

    def __call__(self, s2):
        s2 = np.asarray(s2, dtype=float)
        out = _FUNCS[self.kind](s2, self.lam * self.lam)
        return out if out.ndim else float(out)

    @property
    def g0(self):
        return self(0.0)


def evaluate(kind, lam, s2):
    return Diffusivity(kind, lam)(s2)
