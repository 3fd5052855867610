"""Explicit solver for the Cauchy problem of the Hessian -1 equation.

Data a(x), b(x) on an interval (a'' > 0) determine the unique solution f
with f(x,0) = a and f_y(x,0) = b.  The solver builds the Bjorling pair
alpha = (s, 0, a(s)), U = (-a'(s), -b(s), 1) and reads the graph off the
resulting surface: the chart maps are simply (x, y) = (psi1, psi2) and
f = psi3, with a closed-form chart Jacobian (so Newton inversion needs no
finite differences).  The displayed explicit integral for f is implemented
separately as a cross-check (two independent code paths to the same
number).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from . import curve_lang as cl
from . import kernels, tape
from .bjorling_core import AdmissiblePair, AffineSurface, build_surface, check_admissible
from .curve_lang import AnalyticCurve3, Expr
from .errors import ConvexityViolation, JacobianSingular, OutOfChart
from .quadrature import DEFAULT_TOL, integrate_scaled

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50


@dataclass
class CauchyData:
    """Initial values a, slope b, their interval and the anchor x0."""

    a: Expr
    b: Expr
    params: Dict[str, float] = field(default_factory=dict)
    interval: Tuple[float, float] = (-1.0, 1.0)
    x0: float = 0.0

    def __post_init__(self):
        self.a = cl.as_expr(self.a)
        self.b = cl.as_expr(self.b)
        self.params = {k: float(v) for k, v in self.params.items()}
        lo, hi = self.interval
        if not lo < hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        if not lo <= self.x0 <= hi:
            raise ValueError(f"x0={self.x0} outside interval [{lo}, {hi}]")
        self._validate_convexity()

    def _validate_convexity(self, n: int = 513):
        dda = cl.diff(cl.diff(self.a))
        x = np.linspace(self.interval[0], self.interval[1], n)
        vals = kernels.eval_values(tape.compile_expr(dda, self.params), x)
        k = int(np.argmin(vals))
        if vals[k] <= 0.0:
            raise ConvexityViolation(float(x[k]), float(vals[k]))


class GraphSolution:
    """f as a parametric graph over the (x, y) chart of the surface."""

    def __init__(
        self,
        data: CauchyData,
        pair: AdmissiblePair,
        surface: AffineSurface,
        t_halfwidth: float,
        seed_shape: Tuple[int, int] = (201, 201),
    ):
        self.data = data
        self.pair = pair
        self.surface = surface
        self.t_halfwidth = float(t_halfwidth)
        lo, hi = data.interval
        self.param_window = ((lo, hi), (-self.t_halfwidth, self.t_halfwidth))
        ns, nt = seed_shape
        s_seed = np.linspace(lo, hi, ns)
        t_seed = np.linspace(-self.t_halfwidth, self.t_halfwidth, nt)
        ss, tt = np.meshgrid(s_seed, t_seed, indexing="ij")
        self._seed_s = ss.ravel()
        self._seed_t = tt.ravel()
        x, y = self.chart(self._seed_s, self._seed_t)
        self._seed_x = x
        self._seed_y = y
        # coarse stride for the nearest-seed lookup; full grid refines rare misses
        self._stride = max(1, int(np.sqrt(self._seed_s.size) / 40))

    # -- chart -------------------------------------------------------------

    def chart(self, s, t) -> Tuple[np.ndarray, np.ndarray]:
        """(x, y)(s, t) = (psi1, psi2): x = s - Im b(z), y = Im a'(z)."""
        f = self.surface._fields(np.asarray(s, float), np.asarray(t, float))
        return f["psi1"], f["psi2"]

    def chart_jacobian(self, s, t):
        """Closed-form d(x,y)/d(s,t); det equals 2 rho."""
        f = self.surface._fields(np.asarray(s, float), np.asarray(t, float))
        return f["psi1_s"], f["psi1_t"], f["psi2_s"], f["psi2_t"]

    def _nearest_seed(self, xq: np.ndarray, yq: np.ndarray):
        st = self._stride
        sx = self._seed_x[::st]
        sy = self._seed_y[::st]
        out_s = np.empty_like(xq)
        out_t = np.empty_like(xq)
        chunk = 1024
        for k in range(0, xq.size, chunk):
            d2 = (xq[k : k + chunk, None] - sx[None, :]) ** 2 + (
                yq[k : k + chunk, None] - sy[None, :]
            ) ** 2
            idx = np.argmin(d2, axis=1) * st
            out_s[k : k + chunk] = self._seed_s[idx]
            out_t[k : k + chunk] = self._seed_t[idx]
        return out_s, out_t

    def invert_chart(self, xq, yq) -> Tuple[np.ndarray, np.ndarray]:
        """Damped Newton for (s,t) with chart(s,t) = (x,y).

        Raises OutOfChart when iteration fails to converge or lands outside
        the parameter rectangle, JacobianSingular when it runs into the
        degenerate set.
        """
        xq = np.atleast_1d(np.asarray(xq, dtype=float))
        yq = np.atleast_1d(np.asarray(yq, dtype=float))
        s, t = self._nearest_seed(xq, yq)
        return newton_invert_chart(
            self.chart, self.chart_jacobian, xq, yq, s, t, self.param_window
        )

    # -- f -----------------------------------------------------------------

    def f_points(self, xq, yq) -> np.ndarray:
        xq = np.atleast_1d(np.asarray(xq, dtype=float))
        yq = np.atleast_1d(np.asarray(yq, dtype=float))
        s, t = self.invert_chart(xq, yq)
        return self.surface.psi3(s, t)

    def eval_f(self, x: float, y: float) -> float:
        return float(self.f_points(np.array([x]), np.array([y]))[0])

    def f_explicit(self, s, t) -> np.ndarray:
        """f by the explicit Cauchy integral formula (independent route).

        Integrates (a'(z) + conj a'(z))(1 - j b'(z)) + a''(z)(j b(z) +
        j conj b(z) - z + conj z) over the axis-parallel path from x0,
        taking half the real part, plus a(x0).  Shares nothing with the
        psi3 evaluation except the quadrature driver.
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s, t = np.broadcast_arrays(s, t)
        p = self.data.params
        ta = tape.compile_expr(cl.diff(self.data.a), p)
        tddda = tape.compile_expr(cl.diff(cl.diff(self.data.a)), p)
        tb = tape.compile_expr(self.data.b, p)
        tdb = tape.compile_expr(cl.diff(self.data.b), p)

        def split_eval(tp, u, v):
            fu = kernels.eval_values(tp, u.ravel()).reshape(u.shape)
            fv = kernels.eval_values(tp, v.ravel()).reshape(v.shape)
            return 0.5 * (fu + fv), 0.5 * (fu - fv)

        def integrand(sig: np.ndarray, tau: np.ndarray):
            """(re, im) of the displayed integrand at z = sig + j tau."""
            u = sig + tau
            v = sig - tau
            da_re, da_im = split_eval(ta, u, v)
            dda_re, dda_im = split_eval(tddda, u, v)
            b_re, _ = split_eval(tb, u, v)
            db_re, db_im = split_eval(tdb, u, v)
            # (a' + conj a') = 2 Re a'; and 1 - j b'(z) = (1 - db_im) - j db_re
            t1_re = 2.0 * da_re
            w_re = 1.0 - db_im
            w_im = -db_re
            term1_re = t1_re * w_re
            term1_im = t1_re * w_im
            # j b + j conj b - z + conj z = j*(2 Re b) - 2 j tau = j*(2 b_re - 2 tau)
            q = 2.0 * b_re - 2.0 * tau
            # a'' * (j q): j*q has (re, im) = (0, q); product with (dda_re, dda_im)
            term2_re = dda_im * q
            term2_im = dda_re * q
            return term1_re + term2_re, term1_im + term2_im

        x0 = self.data.x0
        lengths_h = s - x0

        def g_h(tau_nodes: np.ndarray) -> np.ndarray:
            sig = x0 + lengths_h[:, None] * tau_nodes[None, :]
            re, _ = integrand(sig, np.zeros_like(sig))
            return re  # dz = dsigma: Re(integrand dz) = re

        h_leg, _ = integrate_scaled(
            g_h, lengths_h, tol=self.surface.quad_tol, max_depth=self.surface.max_depth
        )

        lengths_v = t

        def g_v(tau_nodes: np.ndarray) -> np.ndarray:
            tau = lengths_v[:, None] * tau_nodes[None, :]
            sig = np.broadcast_to(s[:, None], tau.shape)
            _, im = integrand(sig, tau)
            return im  # dz = j dtau: Re(integrand * j) = im

        v_leg, _ = integrate_scaled(
            g_v, lengths_v, tol=self.surface.quad_tol, max_depth=self.surface.max_depth
        )
        a_x0 = kernels.eval_values(tape.compile_expr(self.data.a, p), np.array([x0]))[0]
        return a_x0 + 0.5 * (h_leg + v_leg)


def newton_invert_chart(chart, jacobian, xq, yq, s, t, window):
    """Damped Newton solve of chart(s, t) = (xq, yq) from given seeds.

    chart and jacobian are vectorized callables of (s, t); window bounds
    the acceptable parameter rectangle (5% padding).  Shared by the Cauchy
    graph solution and the Monge-Ampere patch diagnostics.
    """
    s = s.copy()
    t = t.copy()
    (s_lo, s_hi), (t_lo, t_hi) = window
    pad_s = 0.05 * (s_hi - s_lo)
    pad_t = 0.05 * (t_hi - t_lo)
    active = np.ones(s.shape, dtype=bool)
    for _ in range(NEWTON_MAX_ITER):
        x, y = chart(s, t)
        rx = x - xq
        ry = y - yq
        res = np.hypot(rx, ry)
        active = res > NEWTON_TOL
        if not np.any(active):
            break
        xs, xt, ys, yt = jacobian(s, t)
        det = xs * yt - xt * ys
        sing = active & (np.abs(det) < 1e-14)
        if np.any(sing):
            k = int(np.nonzero(sing)[0][0])
            raise JacobianSingular(
                f"chart Jacobian vanishes near (s,t)=({s[k]:.6g},{t[k]:.6g})"
            )
        ds = (yt * rx - xt * ry) / det
        dt = (-ys * rx + xs * ry) / det
        # damping by halving while the residual does not decrease
        step = np.ones_like(s)
        for _ in range(20):
            s_new = np.where(active, s - step * ds, s)
            t_new = np.where(active, t - step * dt, t)
            x_new, y_new = chart(s_new, t_new)
            res_new = np.hypot(x_new - xq, y_new - yq)
            worse = active & (res_new > res)
            if not np.any(worse):
                break
            step = np.where(worse, 0.5 * step, step)
        s = s_new
        t = t_new
    if np.any(active):
        k = int(np.nonzero(active)[0][0])
        raise OutOfChart(
            f"Newton did not reach (x,y)=({xq[k]:.6g},{yq[k]:.6g}); "
            "the point may lie beyond the singular set"
        )
    inside = (
        (s >= s_lo - pad_s)
        & (s <= s_hi + pad_s)
        & (t >= t_lo - pad_t)
        & (t <= t_hi + pad_t)
    )
    if not np.all(inside):
        k = int(np.nonzero(~inside)[0][0])
        raise OutOfChart(
            f"(x,y)=({xq[k]:.6g},{yq[k]:.6g}) maps to (s,t)=({s[k]:.6g},{t[k]:.6g}) "
            "outside the parameter rectangle"
        )
    return s, t


def solve_cauchy(
    data: CauchyData,
    t_halfwidth: Optional[float] = None,
    quad_tol: float = DEFAULT_TOL,
    seed_shape: Tuple[int, int] = (201, 201),
) -> GraphSolution:
    """Solve the Cauchy problem; see module docstring for the construction."""
    lo, hi = data.interval
    if t_halfwidth is None:
        t_halfwidth = 0.5 * (hi - lo)
    da = cl.diff(data.a)
    alpha = AnalyticCurve3((cl.S, cl.ZERO, data.a), dict(data.params), data.interval)
    conormal = AnalyticCurve3(
        (cl.simplify(cl.Neg(da)), cl.simplify(cl.Neg(data.b)), cl.ONE),
        dict(data.params),
        data.interval,
    )
    pair = check_admissible(alpha, conormal)
    surface = build_surface(pair, s0=data.x0, quad_tol=quad_tol)
    return GraphSolution(data, pair, surface, t_halfwidth, seed_shape)


def hessian_residual(
    sol: GraphSolution,
    window: Tuple[Tuple[float, float], Tuple[float, float]],
    grid: Tuple[int, int] = (21, 21),
    h: float = 1e-3,
) -> np.ndarray:
    """f_xx f_yy - f_xy^2 + 1 by central second differences on the chart.

    h = 1e-3 balances the O(h^2) truncation against O(eps/h^2) rounding for
    double-precision f values.  Propagates OutOfChart from stencil points.
    """
    (x_lo, x_hi), (y_lo, y_hi) = window
    nx, ny = grid
    xs = np.linspace(x_lo, x_hi, nx)
    ys = np.linspace(y_lo, y_hi, ny)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    x0 = xx.ravel()
    y0 = yy.ravel()
    offsets = [(0, 0), (h, 0), (-h, 0), (0, h), (0, -h), (h, h), (h, -h), (-h, h), (-h, -h)]
    xq = np.concatenate([x0 + dx for dx, _ in offsets])
    yq = np.concatenate([y0 + dy for _, dy in offsets])
    f = sol.f_points(xq, yq).reshape(len(offsets), x0.size)
    f_c, f_px, f_mx, f_py, f_my, f_pp, f_pm, f_mp, f_mm = f
    fxx = (f_px - 2.0 * f_c + f_mx) / h**2
    fyy = (f_py - 2.0 * f_c + f_my) / h**2
    fxy = (f_pp - f_pm - f_mp + f_mm) / (4.0 * h**2)
    return (fxx * fyy - fxy**2 + 1.0).reshape(nx, ny)
