"""
Closed-form generating functions of the comb walk.

With s = sqrt(1 - z^2):
    G(z)  = sqrt(2) / sqrt(s (1 + s))        Green function at the origin
    F1(z) = z / (1 + s + sqrt(2 s (1 + s)))  first passage to a backbone neighbour
    F2(z) = z / (1 + s)                       first passage one step up a tooth

F1 and F2 are written in cancellation-free form; both vanish at z = 0.
"""

import math
from typing import NamedTuple


class GenFnPoint(NamedTuple):
    z: float
    green: float
    backbone_passage: float
    tooth_passage: float


class BackboneGenFn(NamedTuple):
    """H(z) and the rescaled value H(z) sqrt(1 - z)."""

    value: float
    scaled: float


def _check_radius(z: float) -> None:
    if not 0 <= z < 1:
        raise ValueError(f"z must lie in [0, 1), got {z}")


def genfn_point(z: float) -> GenFnPoint:
    """G, F1 and F2 at z."""
    _check_radius(z)
    s = math.sqrt(1.0 - z * z)
    return GenFnPoint(
        z=z,
        green=math.sqrt(2.0) / math.sqrt(s * (1.0 + s)),
        backbone_passage=z / (1.0 + s + math.sqrt(2.0 * s * (1.0 + s))),
        tooth_passage=z / (1.0 + s),
    )


def green_function_eval(k: int, l: int, z: float) -> float:
    """
    sum_n p((0,0), (k,l), n) z^n.

    l == 0: G F1^|k|. Otherwise 1/2 G F1^|k| F2^|l|.
    """
    point = genfn_point(z)
    value = point.green * point.backbone_passage ** abs(k)
    if l == 0:
        return value
    return 0.5 * value * point.tooth_passage ** abs(l)


def backbone_generating_fn(z: float) -> BackboneGenFn:
    """H(z) = sum_k G((0,0),(k,0)|z) = G (1 + F1) / (1 - F1)."""
    point = genfn_point(z)
    f1 = point.backbone_passage
    value = point.green * (1.0 + f1) / (1.0 - f1)
    return BackboneGenFn(value=value, scaled=value * math.sqrt(1.0 - z))
