"""Closed-form reference surfaces: revolution, helicoidal groups, ruled graphs.

Each catalog entry serves two roles: it is an independent oracle for the
Bjorling construction (the closed forms are evaluated directly in numpy,
sharing no code with the representation-formula path), and it carries its
own generating data (orbit curve, conormal, constant metric m) so the
construction can be pointed back at it.

The three helicoidal groups are the shear family (g1, orbits through
(0, b, c)), the rotation family (g2, orbits of (c, 0, 0)) and the
hyperbolic-scaling family (g3, orbits of (c, 1, 0)), each composed with a
vertical translation at rate a.  Their metric densities D(t) with
h = D(t)(ds^2 - dt^2):

    g1: D = m + (1 - a^2) t
    g2: D = m cos 2t - (a^2 - c^4 + m^2)/c^2 * cos t sin t
    g3: D = m cosh 2t + (4c^2 + m^2 - a^2)/(4c) * sinh 2t

with D(0) = m, the metric prescribed along the orbit, in every case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import curve_lang as cl
from . import kernels, tape
from .bjorling_core import AffineSurface, build_surface, check_admissible
from .curve_lang import AnalyticCurve3
from .errors import SpecInvalid
from .quadrature import DEFAULT_TOL

TWO_PI = 2.0 * math.pi

KIND_CAYLEY = "CayleyFlatComplete"
KIND_SINGULAR_CURVE = "SingularCurve"
KIND_ISOLATED = "IsolatedSingularity"
KIND_COMPLETE = "CompleteNonFlat"
KIND_BOUNDARY = "ImmersionIncomplete"


@dataclass(frozen=True)
class HelicoidalSpec:
    """Orbit parameters: group g1|g2|g3, shear/pitch a, metric m > 0.

    For g2/g3 the base point uses c > 0; for g1 the orbit passes through
    p = (0, b, c) and c is just a height offset.
    """

    group: str
    a: float
    m: float
    c: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if self.group not in ("g1", "g2", "g3"):
            raise SpecInvalid(f"unknown group {self.group!r}")
        if not self.m > 0.0:
            raise SpecInvalid(f"m must be positive, got {self.m}")
        if self.group in ("g2", "g3") and not self.c > 0.0:
            raise SpecInvalid(f"group {self.group} needs c > 0, got {self.c}")


@dataclass(frozen=True)
class Classification:
    kind: str
    locus: Optional[Dict[str, float]] = None


@dataclass
class CatalogSurface:
    """Closed-form psi/density evaluators plus the generating Bjorling data."""

    name: str
    params: Dict[str, float]
    psi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    density: Callable[[np.ndarray], np.ndarray]
    alpha: AnalyticCurve3
    conormal: AnalyticCurve3
    metric: cl.Expr

    def rho(self, s, t) -> np.ndarray:
        """Conformal factor: h = 2 rho dz dzbar, so rho = D(t)/2."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        return np.broadcast_arrays(s, 0.5 * self.density(t))[1]

    def grid(self, s_vals, t_vals):
        ss, tt = np.meshgrid(
            np.asarray(s_vals, dtype=float), np.asarray(t_vals, dtype=float), indexing="ij"
        )
        return self.psi(ss, tt), self.rho(ss, tt)

    def bjorling_surface(self, s0: Optional[float] = None, quad_tol: float = DEFAULT_TOL) -> AffineSurface:
        """The same surface through the representation formula (oracle twin)."""
        if s0 is None:
            s0 = 0.5 * (self.alpha.domain[0] + self.alpha.domain[1])
        pair = check_admissible(self.alpha, self.conormal)
        return build_surface(pair, s0=s0, quad_tol=quad_tol)


def _curves(alpha_exprs, u_exprs, params, domain) -> Tuple[AnalyticCurve3, AnalyticCurve3]:
    return (
        AnalyticCurve3.from_strings(alpha_exprs, params, domain),
        AnalyticCurve3.from_strings(u_exprs, params, domain),
    )


def revolution(c: float, m: float, domain=(0.0, TWO_PI)) -> CatalogSurface:
    """Surface of revolution containing the circle of radius c with metric m.

    Radial factor c cos t - (m/c) sin t; it vanishes on the lines
    c^2 cos t = m sin t, where the whole circle collapses to one point on
    the axis (isolated singularities of the image).
    """
    if not (c > 0.0 and m > 0.0):
        raise SpecInvalid(f"revolution needs c > 0 and m > 0, got c={c}, m={m}")
    k = m / c

    def psi(s, t):
        rad = c * np.cos(t) - k * np.sin(t)
        p3 = (
            -0.5 * (c * c + k * k) * t
            + m * (np.cos(t) ** 2 - 1.0)
            + 0.25 * (c * c - k * k) * np.sin(2.0 * t)
        )
        return np.stack([np.cos(s) * rad, np.sin(s) * rad, p3 * np.ones_like(s)], axis=-1)

    def density(t):
        return m * np.cos(2.0 * t) - (m * m - c**4) / (c * c) * np.sin(t) * np.cos(t)

    params = {"c": c, "m": m}
    alpha, conormal = _curves(
        ("c*cos(s)", "c*sin(s)", "0"),
        ("-(m/c)*cos(s)", "-(m/c)*sin(s)", "1"),
        params,
        domain,
    )
    return CatalogSurface("revolution", params, psi, density, alpha, conormal, cl.Param("m"))


def _helicoidal_g1(spec: HelicoidalSpec, domain) -> CatalogSurface:
    a, m, b, c = spec.a, spec.m, spec.b, spec.c

    def psi(s, t):
        p1 = s - a * t
        p2 = b + s * s / 2.0 + m * t - a * s * t + t * t / 2.0
        p3 = (
            c
            + a * b * s
            + a * s**3 / 6.0
            - m * m * t
            - a * a * b * t
            + a * m * s * t
            - 0.5 * s * s * a * a * t
            - m * t * t
            + 0.5 * t * t * a * s
            - t**3 / 3.0
            + a * a * t**3 / 6.0
        )
        return np.stack([p1, p2, p3], axis=-1)

    def density(t):
        return m + (1.0 - a * a) * t

    params = {"a": a, "m": m, "b": b, "c": c}
    alpha, conormal = _curves(
        ("s", "b + s^2/2", "a*b*s + c + a*s^3/6"),
        ("-a*b - m*s + a*s^2/2", "m - a*s", "1"),
        params,
        domain,
    )
    return CatalogSurface("helicoidal-g1", params, psi, density, alpha, conormal, cl.Param("m"))


def _helicoidal_g2(spec: HelicoidalSpec, domain) -> CatalogSurface:
    a, m, c = spec.a, spec.m, spec.c

    def psi(s, t):
        rad = c * np.cos(t) - (m / c) * np.sin(t)
        p1 = np.cos(s) * rad + a * np.sin(s) * np.sin(t) / c
        p2 = np.sin(s) * rad - a * np.cos(s) * np.sin(t) / c
        p3 = (
            a * s
            - 0.5 * (c * c + (m * m + a * a) / (c * c)) * t
            + m * (np.cos(t) ** 2 - 1.0)
            + 0.25 * (c * c - (m * m + a * a) / (c * c)) * np.sin(2.0 * t)
        )
        return np.stack([p1, p2, p3], axis=-1)

    def density(t):
        return m * np.cos(2.0 * t) - (a * a - c**4 + m * m) / (c * c) * np.cos(t) * np.sin(t)

    params = {"a": a, "m": m, "c": c}
    alpha, conormal = _curves(
        ("c*cos(s)", "c*sin(s)", "a*s"),
        ("(-m*cos(s) + a*sin(s))/c", "(-a*cos(s) - m*sin(s))/c", "1"),
        params,
        domain,
    )
    return CatalogSurface("helicoidal-g2", params, psi, density, alpha, conormal, cl.Param("m"))


def _helicoidal_g3(spec: HelicoidalSpec, domain) -> CatalogSurface:
    a, m, c = spec.a, spec.m, spec.c

    def psi(s, t):
        e2t = np.exp(2.0 * t)
        p1 = 0.25 * np.exp(s - t) * (e2t * (a + 2.0 * c + m) - a + 2.0 * c - m)
        p2 = (
            0.25
            / c
            * np.exp(-s - t)
            * (e2t * (-a + 2.0 * c + m) + a + 2.0 * c - m)
        )
        # the m/2 constant anchors psi3(s, 0) = a s, so the evaluator is the
        # representative that actually contains the orbit (translations are
        # the only freedom the representation leaves)
        p3 = a * s + 0.5 * m + (
            np.exp(-2.0 * t) * (-a * a + (m - 2.0 * c) ** 2)
            + e2t * (a * a - (2.0 * c + m) ** 2)
            + 4.0 * (a * a + 4.0 * c * c - m * m) * t
        ) / (16.0 * c)
        return np.stack([p1, p2, p3], axis=-1)

    def density(t):
        return m * np.cosh(2.0 * t) + (4.0 * c * c + m * m - a * a) / (4.0 * c) * np.sinh(2.0 * t)

    params = {"a": a, "m": m, "c": c}
    alpha, conormal = _curves(
        ("c*exp(s)", "exp(-s)", "a*s"),
        ("exp(-s)*(m - a)/(2*c)", "exp(s)*(a + m)/2", "1"),
        params,
        domain,
    )
    return CatalogSurface("helicoidal-g3", params, psi, density, alpha, conormal, cl.Param("m"))


def helicoidal(spec: HelicoidalSpec, domain=(0.0, TWO_PI)) -> CatalogSurface:
    """Closed-form evaluator and metric density for a helicoidal orbit."""
    builder = {"g1": _helicoidal_g1, "g2": _helicoidal_g2, "g3": _helicoidal_g3}[spec.group]
    return builder(spec, domain)


def classify(spec: HelicoidalSpec) -> Classification:
    """Case analysis of the singular set as a function of the orbit data.

    The boundary case 4cm = |4c^2 + m^2 - a^2| keeps a positive density
    (m e^{+-2t}) but sits outside the strict completeness criterion; it is
    reported as ImmersionIncomplete without any completeness claim.
    """
    a, m, c = spec.a, spec.m, spec.c
    if spec.group == "g1":
        if a * a == 1.0:
            return Classification(KIND_CAYLEY)
        return Classification(KIND_SINGULAR_CURVE, {"t": m / (a * a - 1.0)})
    if spec.group == "g2":
        if a == 0.0:
            return Classification(KIND_ISOLATED, {"t": math.atan2(c * c, m)})
        kappa = (a * a - c**4 + m * m) / (c * c)
        t0 = 0.5 * math.atan2(2.0 * m, kappa)
        return Classification(KIND_SINGULAR_CURVE, {"t": t0, "period": 0.5 * math.pi})
    # g3
    crit = 4.0 * c * m
    gap = abs(4.0 * c * c + m * m - a * a)
    if crit > gap:
        return Classification(KIND_COMPLETE)
    if a == 0.0 and m > 2.0 * c:
        return Classification(KIND_ISOLATED, {"t": 0.5 * math.log((m - 2.0 * c) / (m + 2.0 * c))})
    if crit == gap:
        return Classification(KIND_BOUNDARY)
    # D = m cosh 2t + K sinh 2t vanishes at tanh 2t = -m/K; valid since m < |K| here
    k_coef = (4.0 * c * c + m * m - a * a) / (4.0 * c)
    t0 = 0.25 * math.log((k_coef - m) / (k_coef + m))
    return Classification(KIND_SINGULAR_CURVE, {"t": t0})


def density_min(spec: HelicoidalSpec, t_window=(-10.0, 10.0), n: int = 4001) -> float:
    """min over a dense grid of the metric density (numerical scan oracle)."""
    surf = helicoidal(spec)
    t = np.linspace(t_window[0], t_window[1], n)
    return float(np.min(surf.density(t)))


@dataclass
class RuledGraph:
    """The ruled family f(x, y) = x y + g(x); Hessian determinant -1 exactly."""

    g: cl.Expr
    params: Dict[str, float]

    def __post_init__(self):
        self.g = cl.as_expr(self.g)
        self._tape = tape.compile_expr(self.g, self.params)

    def f(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        g = kernels.eval_values(self._tape, np.atleast_1d(x).ravel()).reshape(x.shape)
        return x * y + g

    def hessian_det(self, x, y) -> np.ndarray:
        """f_xx f_yy - f_xy^2 = g''(x) * 0 - 1: identically -1."""
        x = np.asarray(x, dtype=float)
        return np.broadcast_arrays(x, np.asarray(y, dtype=float))[0] * 0.0 - 1.0


def ruled_graph(g, params: Optional[Dict[str, float]] = None) -> RuledGraph:
    return RuledGraph(cl.as_expr(g), dict(params or {}))


def by_name(name: str, params: Dict[str, float], domain=(0.0, TWO_PI)):
    """Catalog lookup for run configs: revolution, helicoidal-g*, cayley, ruled."""
    p = dict(params)
    if name == "revolution":
        return revolution(p.get("c", 1.0), p.get("m", 1.0), domain)
    if name in ("helicoidal-g1", "helicoidal-g2", "helicoidal-g3"):
        group = name[-2:]
        spec = HelicoidalSpec(
            group, p.get("a", 0.0), p.get("m", 1.0), p.get("c", 1.0), p.get("b", 0.0)
        )
        return helicoidal(spec, domain)
    if name == "cayley":
        spec = HelicoidalSpec("g1", 1.0, p.get("m", 1.0), p.get("c", 0.0), p.get("b", 0.0))
        return helicoidal(spec, domain)
    if name == "ruled":
        return ruled_graph(p.get("g", "0"), {k: v for k, v in p.items() if k != "g"})
    raise SpecInvalid(f"unknown catalog entry {name!r}")
