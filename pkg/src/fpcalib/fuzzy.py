"""Mamdani fuzzy complexity measurement for function point components.

Replaces the crisp complexity matrices with trapezoidal input sets and
triangular output sets so that each component receives a continuous
weight instead of one of three step values.  Inference is min for AND
and implication, max for aggregation, and centroid defuzzification.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .fp import (
    KINDS,
    ComponentKind,
    FileCounts,
    WeightMatrix,
    _DET_BANDS,
    _PRIMARY_BANDS,
)

INPUT_TERMS = ("small", "medium", "large")
OUTPUT_TERMS = ("low", "average", "high")

#: Rule base shared by all components, keyed (input2 term, input1 term).
#: Input 1 is the DET axis, input 2 the RET/FTR axis; the grid mirrors
#: the crisp complexity matrices.
RULE_BASE: Mapping[Tuple[str, str], str] = {
    ("small", "small"): "low",
    ("small", "medium"): "low",
    ("small", "large"): "average",
    ("medium", "small"): "low",
    ("medium", "medium"): "average",
    ("medium", "large"): "high",
    ("large", "small"): "average",
    ("large", "medium"): "high",
    ("large", "large"): "high",
}


@dataclass(frozen=True)
class TrapezoidMF:
    """Trapezoidal membership function with feet (a, d) and shoulders (b, c).

    a = b or c = d gives a vertical edge, used at domain boundaries.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c <= self.d):
            raise ValueError(f"trapezoid parameters must be ordered, got {self}")
        if self.a == self.d:
            raise ValueError(f"trapezoid support is empty: {self}")

    def membership(self, x: float) -> float:
        if x < self.a or x > self.d:
            return 0.0
        if self.b <= x <= self.c:
            return 1.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.d - x) / (self.d - self.c)

    def params(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class TriangleMF:
    """Triangular membership function with feet (a, c) and peak b."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c):
            raise ValueError(f"triangle parameters must be ordered, got {self}")
        if self.a == self.c:
            raise ValueError(f"triangle support is empty: {self}")

    def membership(self, x: float) -> float:
        if x < self.a or x > self.c:
            return 0.0
        if x == self.b:
            return 1.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.c - x) / (self.c - self.b)

    def params(self) -> Tuple[float, float, float]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class InputFuzzySets:
    """Small/medium/large trapezoids over one input axis."""

    small: TrapezoidMF
    medium: TrapezoidMF
    large: TrapezoidMF

    def __post_init__(self) -> None:
        if not (self.small.a <= self.medium.a <= self.large.a):
            raise ValueError("input set supports must be ordered small, medium, large")

    @property
    def top(self) -> float:
        return self.large.d

    def memberships(self, x: float) -> Dict[str, float]:
        x = min(max(x, 0.0), self.top)
        return {
            "small": self.small.membership(x),
            "medium": self.medium.membership(x),
            "large": self.large.membership(x),
        }

    def by_term(self, term: str) -> TrapezoidMF:
        return {"small": self.small, "medium": self.medium, "large": self.large}[term]


@dataclass(frozen=True)
class OutputFuzzySets:
    """Low/average/high triangles over the weight axis."""

    low: TriangleMF
    average: TriangleMF
    high: TriangleMF

    def __post_init__(self) -> None:
        if not (self.low.b < self.average.b < self.high.b):
            raise ValueError("output peaks must be ordered low < average < high")

    def by_term(self, term: str) -> TriangleMF:
        return {"low": self.low, "average": self.average, "high": self.high}[term]

    @property
    def hull(self) -> Tuple[float, float]:
        return (self.low.a, self.high.c)


@dataclass(frozen=True)
class ComponentFuzzySets:
    """Per-component sets: input1 is the DET axis, input2 the RET/FTR axis."""

    input1: InputFuzzySets
    input2: InputFuzzySets
    output: OutputFuzzySets


@dataclass(frozen=True)
class FuzzySystemConfig:
    """Membership parameters for all five components plus the shared rules."""

    components: Mapping[ComponentKind, ComponentFuzzySets]

    def __post_init__(self) -> None:
        missing = [k for k in KINDS if k not in self.components]
        if missing:
            raise ValueError(f"missing fuzzy sets for {[k.value for k in missing]}")
        object.__setattr__(self, "components", dict(self.components))

    def sets_for(self, kind: ComponentKind) -> ComponentFuzzySets:
        return self.components[kind]


def _output_triangles(low_w: float, avg_w: float, high_w: float) -> OutputFuzzySets:
    # Feet of each triangle sit on the neighbouring weights; the extreme
    # triangles get a vertical edge at the domain boundary.
    return OutputFuzzySets(
        low=TriangleMF(low_w, low_w, avg_w),
        average=TriangleMF(low_w, avg_w, high_w),
        high=TriangleMF(avg_w, high_w, high_w),
    )


def _band_input_sets(band1_start: int, band2_start: int, band3_start: int) -> InputFuzzySets:
    """Trapezoids blurring the two interior boundaries of a crisp axis.

    A wide first band gets a symmetric overlap of radius r around both
    boundaries; a narrow first band (a point or a pair, like RET {1} or
    FTR {0,1}) keeps small/medium anchored at the axis origin.
    """
    t1 = float(band2_start)
    if band2_start - band1_start > 2:
        t2 = float(band3_start - 1)
        r = max(1.0, round((t2 - t1) / 6.0))
        small = TrapezoidMF(0.0, 0.0, t1 - r, t1 + r)
        medium = TrapezoidMF(t1 - r, t1 + r, t2 - r, t2 + r)
        large = TrapezoidMF(t2 - r, t2 + r, t2 + 4 * r, t2 + 4 * r)
    else:
        t2 = float(band3_start)
        r = max(1.0, round((t2 - t1) / 2.0))
        small = TrapezoidMF(0.0, 0.0, t1 - 1, t1)
        medium = TrapezoidMF(0.0, t1, t2 - r, t2)
        large = TrapezoidMF(t2 - r, t2, t2 + 2 * r, t2 + 2 * r)
    return InputFuzzySets(small, medium, large)


_TRANSACTIONS = (ComponentKind.EI, ComponentKind.EO, ComponentKind.EQ)


def _input_sets_for(kind: ComponentKind) -> Tuple[InputFuzzySets, InputFuzzySets]:
    det2, det3 = _DET_BANDS[kind]
    pf2, pf3 = _PRIMARY_BANDS[kind]
    input1 = _band_input_sets(1, det2, det3)
    input2 = _band_input_sets(0 if kind in _TRANSACTIONS else 1, pf2, pf3)
    return input1, input2


def default_config(weights: WeightMatrix) -> FuzzySystemConfig:
    """Build the measurement system for a weight matrix.

    Input sets derive from the crisp classification bands; output
    triangles peak at the matrix weights with feet on the neighbouring
    weights, so low/average/high weights become the anchor points of a
    continuous scale.
    """
    components = {}
    for kind in KINDS:
        input1, input2 = _input_sets_for(kind)
        low_w, avg_w, high_w = weights.row(kind)
        components[kind] = ComponentFuzzySets(
            input1=input1,
            input2=input2,
            output=_output_triangles(low_w, avg_w, high_w),
        )
    return FuzzySystemConfig(components)


def retune(config: FuzzySystemConfig, calibrated: WeightMatrix) -> FuzzySystemConfig:
    """Rebuild the output triangles from calibrated weights.

    Input sets and rules are untouched; only the weight axis moves.
    """
    components = {}
    for kind in KINDS:
        sets = config.sets_for(kind)
        low_w, avg_w, high_w = calibrated.row(kind)
        components[kind] = ComponentFuzzySets(
            input1=sets.input1,
            input2=sets.input2,
            output=_output_triangles(low_w, avg_w, high_w),
        )
    return FuzzySystemConfig(components)


def _rule_strengths(
    sets: ComponentFuzzySets, det: float, primary: float
) -> Dict[str, float]:
    """Firing strength per output term: min for AND, max across rules."""
    mu1 = sets.input1.memberships(det)
    mu2 = sets.input2.memberships(primary)
    strengths = {term: 0.0 for term in OUTPUT_TERMS}
    for (term2, term1), out in RULE_BASE.items():
        strength = min(mu2[term2], mu1[term1])
        if strength > strengths[out]:
            strengths[out] = strength
    return strengths


Clipped = Tuple[float, TriangleMF]


def _envelope(clipped: Sequence[Clipped], y: float) -> float:
    return max((min(s, tri.membership(y)) for s, tri in clipped), default=0.0)


def _clipped_segments(strength: float, tri: TriangleMF) -> List[Tuple[float, float, float, float]]:
    """Non-vertical line segments (x0, g0, x1, g1) of min(strength, triangle)."""
    segs: List[Tuple[float, float, float, float]] = []
    rise_end = tri.a + strength * (tri.b - tri.a)
    fall_start = tri.c - strength * (tri.c - tri.b)
    if tri.a < tri.b:
        segs.append((tri.a, 0.0, rise_end, strength))
    if rise_end < fall_start:
        segs.append((rise_end, strength, fall_start, strength))
    if tri.b < tri.c:
        segs.append((fall_start, strength, tri.c, 0.0))
    return segs


def _segment_crossings(
    s1: Tuple[float, float, float, float], s2: Tuple[float, float, float, float]
) -> Iterable[float]:
    (p0, g0, p1, g1), (q0, h0, q1, h1) = s1, s2
    lo, hi = max(p0, q0), min(p1, q1)
    if lo >= hi:
        return ()
    m1 = (g1 - g0) / (p1 - p0)
    m2 = (h1 - h0) / (q1 - q0)
    if m1 == m2:
        return ()
    x = (h0 - m2 * q0 - g0 + m1 * p0) / (m1 - m2)
    if lo < x < hi:
        return (x,)
    return ()


def _centroid_analytic(clipped: Sequence[Clipped]) -> float:
    """Exact centroid of the max-envelope of clipped triangles.

    The envelope is piecewise linear; integrating between every
    breakpoint (set parameters, clip corners, and pairwise crossings)
    gives the area and first moment in closed form.
    """
    points: set = set()
    all_segments: List[List[Tuple[float, float, float, float]]] = []
    for strength, tri in clipped:
        points.update(tri.params())
        segs = _clipped_segments(strength, tri)
        for x0, _, x1, _ in segs:
            points.update((x0, x1))
        all_segments.append(segs)
    for segs_a, segs_b in combinations(all_segments, 2):
        for sa in segs_a:
            for sb in segs_b:
                points.update(_segment_crossings(sa, sb))

    xs = sorted(points)
    nodes: List[float] = []
    for left, right in zip(xs, xs[1:]):
        nodes.extend((left, 0.5 * (left + right)))
    nodes.append(xs[-1])

    area = 0.0
    moment = 0.0
    for y0, y1 in zip(nodes, nodes[1:]):
        h = y1 - y0
        if h <= 0.0:
            continue
        g0 = _envelope(clipped, y0)
        g1 = _envelope(clipped, y1)
        area += 0.5 * (g0 + g1) * h
        moment += h * (y0 * 0.5 * (g0 + g1) + h * (g0 / 6.0 + g1 / 3.0))
    if area <= 0.0:
        raise RuntimeError("aggregated fuzzy region has zero area")
    return moment / area


def _centroid_grid(clipped: Sequence[Clipped], samples: int = 2001) -> float:
    """Discretized centroid over a uniform grid; fallback and test oracle."""
    lo = min(tri.a for _, tri in clipped)
    hi = max(tri.c for _, tri in clipped)
    ys = np.linspace(lo, hi, samples)
    g = np.zeros_like(ys)
    for strength, tri in clipped:
        mu = np.array([tri.membership(y) for y in ys])
        np.maximum(g, np.minimum(strength, mu), out=g)
    area = np.trapezoid(g, ys)
    if area <= 0.0:
        raise RuntimeError("aggregated fuzzy region has zero area")
    return float(np.trapezoid(ys * g, ys) / area)


def fuzzy_weight_values(
    config: FuzzySystemConfig,
    kind: ComponentKind,
    data_elements: float,
    primary_files: float,
    method: str = "analytic",
) -> float:
    """Continuous complexity weight at real-valued inputs.

    The inference surface is continuous, so fractional inputs are
    legitimate; counted projects go through :func:`fuzzy_weight`.
    """
    if data_elements < 0 or primary_files < 0:
        raise ValueError("file counts must be nonnegative")
    sets = config.sets_for(kind)
    strengths = _rule_strengths(sets, float(data_elements), float(primary_files))
    clipped = [
        (strength, sets.output.by_term(term))
        for term, strength in strengths.items()
        if strength > 0.0
    ]
    if not clipped:
        raise RuntimeError(
            f"no rule fired for {kind.value} at DET={data_elements}, "
            f"primary={primary_files}; input sets do not cover the axis"
        )
    if method == "analytic":
        return _centroid_analytic(clipped)
    if method == "grid":
        return _centroid_grid(clipped)
    raise ValueError(f"unknown centroid method {method!r}")


def fuzzy_weight(
    config: FuzzySystemConfig,
    kind: ComponentKind,
    files: FileCounts,
    method: str = "analytic",
) -> float:
    """Continuous complexity weight of one component.

    Inputs beyond the top foot of an axis clamp to the axis top.  The
    result always lies within the component's output support hull.
    """
    return fuzzy_weight_values(
        config, kind, files.data_elements, files.primary_files, method=method
    )


def fuzzy_ufp(
    config: FuzzySystemConfig,
    components: Sequence[Tuple[ComponentKind, FileCounts]],
    method: str = "analytic",
) -> float:
    """Sum of fuzzy weights over a project's component inventory."""
    return sum(fuzzy_weight(config, kind, files, method=method) for kind, files in components)


def config_to_json_dict(config: FuzzySystemConfig) -> Dict[str, Dict[str, Dict[str, List[float]]]]:
    """Nested JSON form: kind -> set group -> term -> parameter array."""
    out: Dict[str, Dict[str, Dict[str, List[float]]]] = {}
    for kind in KINDS:
        sets = config.sets_for(kind)
        out[kind.value] = {
            "input1": {term: list(sets.input1.by_term(term).params()) for term in INPUT_TERMS},
            "input2": {term: list(sets.input2.by_term(term).params()) for term in INPUT_TERMS},
            "output": {term: list(sets.output.by_term(term).params()) for term in OUTPUT_TERMS},
        }
    return out


def config_from_json_dict(data: Mapping[str, Mapping[str, Mapping[str, Sequence[float]]]]) -> FuzzySystemConfig:
    components = {}
    for kind in KINDS:
        try:
            entry = data[kind.value]
        except KeyError:
            raise ValueError(f"missing fuzzy sets for {kind.value}") from None
        def trap(group: str, term: str) -> TrapezoidMF:
            return TrapezoidMF(*(float(v) for v in entry[group][term]))
        def tri(term: str) -> TriangleMF:
            return TriangleMF(*(float(v) for v in entry["output"][term]))
        components[kind] = ComponentFuzzySets(
            input1=InputFuzzySets(*(trap("input1", t) for t in INPUT_TERMS)),
            input2=InputFuzzySets(*(trap("input2", t) for t in INPUT_TERMS)),
            output=OutputFuzzySets(*(tri(t) for t in OUTPUT_TERMS)),
        )
    return FuzzySystemConfig(components)
