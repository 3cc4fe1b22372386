"""Synthetic piecewise-constant test image: bars, a rectangle, a circle, two stars."""
from dataclasses import dataclass, field

import numpy as np
from skimage import draw


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float
    value: float = 255.0

    def pixels(self, shape=None):
        r = np.arange(int(np.ceil(self.y0)), int(np.ceil(self.y1)))
        c = np.arange(int(np.ceil(self.x0)), int(np.ceil(self.x1)))
        rr, cc = np.meshgrid(r, c, indexing="ij")
        return rr.ravel(), cc.ravel()


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    radius: float
    value: float = 255.0

    def pixels(self, shape=None):
        return draw.disk((self.cy, self.cx), self.radius, shape=shape)


@dataclass(frozen=True)
class Star:
    cx: float
    cy: float
    outer: float
    inner: float
    points: int = 5
    rotation: float = 0.0
    value: float = 255.0

    def vertices(self):
        n = 2 * self.points
        ang = self.rotation - np.pi / 2 + np.pi * np.arange(n) / self.points
        rad = np.where(np.arange(n) % 2 == 0, self.outer, self.inner)
        return self.cx + rad * np.cos(ang), self.cy + rad * np.sin(ang)

    def pixels(self, shape=None):
        xs, ys = self.vertices()
        return draw.polygon(ys, xs, shape=shape)


def default_shapes():
    return (
        Rect(40, 30, 260, 32),      # thin bar, 2 px
        Rect(40, 55, 260, 67),      # thick bar, 12 px
        Rect(30, 100, 130, 190),
        Circle(215, 145, 45),
        Star(80, 245, 45, 18),
        Star(215, 245, 45, 18, rotation=np.pi / 5),
    )


@dataclass(frozen=True)
class SynthSpec:
    size: int = 300
    shapes: tuple = field(default_factory=default_shapes)
    background: float = 0.0

    def __post_init__(self):
        for s in self.shapes:
            rr, cc = s.pixels()
            if len(rr) and (rr.min() < 0 or cc.min() < 0 or rr.max() >= self.size or cc.max() >= self.size):
                raise ValueError(f"{s} leaves the {self.size}x{self.size} canvas")


def make_test_image(spec=None):
    """Render ``spec`` (the default layout if omitted) as a float image."""
    spec = SynthSpec() if spec is None else spec
    img = np.full((spec.size, spec.size), float(spec.background))
    for s in spec.shapes:
        rr, cc = s.pixels(img.shape)
        img[rr, cc] = s.value
    return img
