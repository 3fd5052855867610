"""Surfaces with constant affine normal from curve/conormal Cauchy data.

Construction summary, in the e3 gauge.  An admissible pair (alpha, U)
determines two real-analytic curves

    P = (U + e3 x alpha) / 2,      M = (U - e3 x alpha) / 2,

the idempotent components of the holomorphic data.  Writing u = s + t and
v = s - t (null coordinates of z = s + jt), every surface quantity reduces
to evaluations of P, M and their derivatives:

    N    = (P1(u) + M1(v), P2(u) + M2(v), 1)
    psi1 = P2(u) - M2(v)
    psi2 = M1(v) - P1(u)
    rho  = P1'(u) M2'(v) - P2'(u) M1'(v)
    dpsi3 = A du - B dv,   A = P1'(u) N2 - P2'(u) N1,
                           B = M1'(v) N2 - M2'(v) N1,

and psi3 is recovered by one-dimensional quadrature of the exact form
dpsi3 along an axis-parallel path anchored at alpha3(s0).  The derivative
identities were re-verified against finite differences (see the structure
equation tests); note psi1_z = +j Phi2', psi2_z = -j Phi1'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import curve_lang as cl
from . import kernels
from .curve_lang import AnalyticCurve3, Expr
from .equiaffine import E3, normalize_frame
from .errors import (
    DegenerateProjection,
    DomainError,
    EvalError,
    LambdaNonPositive,
    NotAdmissible,
)
from .quadrature import DEFAULT_TOL, MAX_DEPTH, integrate_scaled

ADMISSIBILITY_TOL = 1e-7
DEGENERACY_TOL = 1e-9


# ---------------------------------------------------------------------------
# symbolic 3-vector helpers (tuples of Expr)
# ---------------------------------------------------------------------------


def _s(e: Expr) -> Expr:
    return cl.simplify(e)


def vec_cross(a, b) -> Tuple[Expr, Expr, Expr]:
    return (
        _s(cl.Sub(cl.Mul(a[1], b[2]), cl.Mul(a[2], b[1]))),
        _s(cl.Sub(cl.Mul(a[2], b[0]), cl.Mul(a[0], b[2]))),
        _s(cl.Sub(cl.Mul(a[0], b[1]), cl.Mul(a[1], b[0]))),
    )


def vec_dot(a, b) -> Expr:
    return _s(
        cl.Add(cl.Add(cl.Mul(a[0], b[0]), cl.Mul(a[1], b[1])), cl.Mul(a[2], b[2]))
    )


def vec_det3_e3(a, b) -> Expr:
    """[a, b, e3] = a1 b2 - a2 b1."""
    return _s(cl.Sub(cl.Mul(a[0], b[1]), cl.Mul(a[1], b[0])))


def xi_cross(a) -> Tuple[Expr, Expr, Expr]:
    """e3 x a = (-a2, a1, 0)."""
    return (_s(cl.Neg(a[1])), a[0], cl.ZERO)


def _merge_params(*dicts: Dict[str, float]) -> Dict[str, float]:
    out: Dict[str, float] = {}
    for d in dicts:
        for k, v in d.items():
            if k in out and out[k] != v:
                raise ValueError(f"conflicting bindings for parameter {k!r}: {out[k]} vs {v}")
            out[k] = float(v)
    return out


def _matvec_exprs(a: np.ndarray, comps) -> Tuple[Expr, Expr, Expr]:
    out = []
    for i in range(3):
        acc: Expr = cl.ZERO
        for k in range(3):
            acc = cl.Add(acc, cl.Mul(cl.Lit(float(a[i, k])), comps[k]))
        out.append(_s(acc))
    return tuple(out)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    tangency: float  # max |<alpha', U>|
    normalization: float  # max |<xi, U> - 1|
    compatibility: float  # max |<alpha'', U> + <alpha', U'>|
    lambda_min: float
    lambda_max: float

    def max_residual(self) -> float:
        return max(self.tangency, self.normalization, self.compatibility)


@dataclass
class AdmissiblePair:
    """Bjorling data (alpha, U) in the e3 gauge, with lambda = <alpha'', U>."""

    alpha: AnalyticCurve3
    conormal: AnalyticCurve3
    lam: Expr
    report: AdmissibilityReport

    @property
    def params(self) -> Dict[str, float]:
        return _merge_params(self.alpha.params, self.conormal.params)

    @property
    def domain(self) -> Tuple[float, float]:
        return self.alpha.domain

    def lambda_values(self, s) -> np.ndarray:
        from . import tape

        t = tape.compile_expr(self.lam, self.params)
        return kernels.eval_values(t, np.atleast_1d(np.asarray(s, dtype=float)))


def check_admissible(
    alpha: AnalyticCurve3,
    conormal: AnalyticCurve3,
    xi=E3,
    n: int = 513,
    tol: float = ADMISSIBILITY_TOL,
) -> AdmissiblePair:
    """Verify the admissibility equations on a dense grid.

    General xi is reduced to the internal e3 gauge by a unimodular frame
    first; the returned pair always lives in that gauge.  Raises
    NotAdmissible naming the failing condition and location, or
    LambdaNonPositive when the metric along the curve is not positive.
    """
    if alpha.domain != conormal.domain:
        raise ValueError(
            f"curve domains differ: {alpha.domain} vs {conormal.domain}"
        )
    xi = np.asarray(xi, dtype=float)
    if not np.array_equal(xi, E3):
        frame = normalize_frame(xi)
        alpha = AnalyticCurve3(
            _matvec_exprs(frame.A, alpha.components), dict(alpha.params), alpha.domain
        )
        ainv_t = np.linalg.inv(frame.A).T
        conormal = AnalyticCurve3(
            _matvec_exprs(ainv_t, conormal.components), dict(conormal.params), conormal.domain
        )
    alpha.assert_regular()
    s = alpha.sample(n)
    da = alpha.derivative().values(s)
    dda = alpha.derivative().derivative().values(s)
    uvals = conormal.values(s)
    du = conormal.derivative().values(s)

    tangency = np.abs(np.sum(da * uvals, axis=-1))
    normalization = np.abs(uvals[:, 2] - 1.0)
    lam_vals = np.sum(dda * uvals, axis=-1)
    compatibility = np.abs(lam_vals + np.sum(da * du, axis=-1))

    for name, res in (
        ("<alpha', U> = 0", tangency),
        ("<xi, U> = 1", normalization),
        ("<alpha'', U> = -<alpha', U'>", compatibility),
    ):
        k = int(np.argmax(res))
        if res[k] > tol:
            raise NotAdmissible(name, float(s[k]), float(res[k]))
    k = int(np.argmin(lam_vals))
    if lam_vals[k] <= 0.0:
        raise LambdaNonPositive(float(s[k]), float(lam_vals[k]))

    lam = vec_dot(
        tuple(cl.diff(cl.diff(c)) for c in alpha.components), conormal.components
    )
    report = AdmissibilityReport(
        float(tangency.max()),
        float(normalization.max()),
        float(compatibility.max()),
        float(lam_vals.min()),
        float(lam_vals.max()),
    )
    return AdmissiblePair(alpha, conormal, lam, report)


def conormal_from_metric(
    alpha: AnalyticCurve3,
    lam,
    params: Optional[Dict[str, float]] = None,
    n: int = 513,
) -> AnalyticCurve3:
    """The unique conormal with prescribed metric lambda along alpha.

    U = alpha' x (alpha'' - lambda e3) / [alpha', alpha'', e3]; requires the
    projection determinant to stay away from zero (else the conormal is a
    one-parameter family and we raise DegenerateProjection).
    """
    lam = cl.as_expr(lam)
    merged = _merge_params(alpha.params, dict(params or {}))
    da = tuple(cl.diff(c) for c in alpha.components)
    dda = tuple(cl.diff(c) for c in da)
    den = vec_det3_e3(da, dda)

    from . import tape

    den_tape = tape.compile_expr(den, merged)
    den_vals = kernels.eval_values(den_tape, alpha.sample(n))
    k = int(np.argmin(np.abs(den_vals)))
    if np.abs(den_vals[k]) < DEGENERACY_TOL:
        raise DegenerateProjection(
            f"[alpha', alpha'', xi] = {den_vals[k]:.3e} at s={alpha.sample(n)[k]:.6g}; "
            "the conormal is not unique there"
        )
    shifted = (dda[0], dda[1], _s(cl.Sub(dda[2], lam)))
    num = vec_cross(da, shifted)
    comps = (_s(cl.Div(num[0], den)), _s(cl.Div(num[1], den)), cl.ONE)
    return AnalyticCurve3(comps, merged, alpha.domain)


def conormal_family(
    alpha: AnalyticCurve3, conormal: AnalyticCurve3, mu, params: Optional[Dict] = None
) -> AnalyticCurve3:
    """U + mu e3 x alpha', the non-uniqueness family when [alpha',alpha'',e3] = 0.

    No canonical mu exists; the caller chooses and re-checks admissibility.
    """
    mu = cl.as_expr(mu)
    w = xi_cross(tuple(cl.diff(c) for c in alpha.components))
    comps = tuple(
        _s(cl.Add(conormal.components[i], cl.Mul(mu, w[i]))) for i in range(3)
    )
    merged = _merge_params(alpha.params, conormal.params, dict(params or {}))
    return AnalyticCurve3(comps, merged, alpha.domain)


# ---------------------------------------------------------------------------
# holomorphic data and the surface evaluator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HolomorphicData:
    """Idempotent components of Phi = (U + j xi x alpha)/2 along the curve.

    phi_plus is Phi+ = (U + xi x alpha)/2 evaluated at u, phi_minus is
    Phi- = (U - xi x alpha)/2 evaluated at v; both third components are
    exactly 1/2, which encodes the normalization 2<Phi, xi> = 1.
    """

    phi_plus: AnalyticCurve3
    phi_minus: AnalyticCurve3
    s0: float


def _holomorphic_data(
    alpha: AnalyticCurve3, conormal: AnalyticCurve3, s0: float
) -> HolomorphicData:
    merged = _merge_params(alpha.params, conormal.params)
    w = xi_cross(alpha.components)
    half = cl.Lit(0.5)
    plus = tuple(
        _s(cl.Mul(half, cl.Add(conormal.components[i], w[i]))) for i in range(2)
    ) + (half,)
    minus = tuple(
        _s(cl.Mul(half, cl.Sub(conormal.components[i], w[i]))) for i in range(2)
    ) + (half,)
    lo, hi = alpha.domain
    if not (lo <= s0 <= hi):
        raise ValueError(f"base point s0={s0} outside curve domain [{lo}, {hi}]")
    return HolomorphicData(
        AnalyticCurve3(plus, merged, alpha.domain),
        AnalyticCurve3(minus, merged, alpha.domain),
        float(s0),
    )


class AffineSurface:
    """Pointwise evaluator (psi, N, rho) built from holomorphic data.

    Immutable after construction; evaluation at any batch of points is a
    pure function, so instances can be shared across threads.  rho may
    become <= 0 away from the data curve: that locus is the singular set.
    """

    def __init__(
        self,
        data: HolomorphicData,
        alpha: AnalyticCurve3,
        lam: Optional[Expr] = None,
        quad_tol: float = DEFAULT_TOL,
        max_depth: int = MAX_DEPTH,
    ):
        self.data = data
        self.alpha = alpha
        self.lam = lam
        self.quad_tol = float(quad_tol)
        self.max_depth = int(max_depth)
        self._plus = data.phi_plus
        self._minus = data.phi_minus
        self._dplus = data.phi_plus.derivative()
        self._dminus = data.phi_minus.derivative()
        self._alpha3_s0 = float(alpha.values(np.array([data.s0]))[0, 2])

    @property
    def s0(self) -> float:
        return self.data.s0

    # -- algebraic point fields ------------------------------------------

    def _fields(self, s: np.ndarray, t: np.ndarray, strict: bool = True) -> Dict[str, np.ndarray]:
        u = s + t
        v = s - t
        try:
            p = self._plus.values(u, strict=strict)
            m = self._minus.values(v, strict=strict)
            dp = self._dplus.values(u, strict=strict)
            dm = self._dminus.values(v, strict=strict)
        except EvalError as exc:
            raise DomainError(str(exc)) from exc
        n1 = p[..., 0] + m[..., 0]
        n2 = p[..., 1] + m[..., 1]
        a = dp[..., 0] * n2 - dp[..., 1] * n1
        b = dm[..., 0] * n2 - dm[..., 1] * n1
        return {
            "psi1": p[..., 1] - m[..., 1],
            "psi2": m[..., 0] - p[..., 0],
            "n1": n1,
            "n2": n2,
            "rho": dp[..., 0] * dm[..., 1] - dp[..., 1] * dm[..., 0],
            "a": a,
            "b": b,
            "psi1_s": dp[..., 1] - dm[..., 1],
            "psi1_t": dp[..., 1] + dm[..., 1],
            "psi2_s": dm[..., 0] - dp[..., 0],
            "psi2_t": -(dm[..., 0] + dp[..., 0]),
        }

    def _ab(self, s: np.ndarray, t: np.ndarray, strict: bool = True) -> Tuple[np.ndarray, np.ndarray]:
        f = self._fields(s, t, strict=strict)
        return f["a"], f["b"]

    # -- psi3 by quadrature of the exact form ------------------------------

    def _psi3_horizontal(self, s_end: np.ndarray, t_level: np.ndarray, strict: bool = True) -> np.ndarray:
        """int over sigma from s0 to s_end of (A - B)(sigma, t_level)."""
        lengths = s_end - self.s0

        def g(tau: np.ndarray) -> np.ndarray:
            sig = self.s0 + lengths[:, None] * tau[None, :]
            lev = np.broadcast_to(t_level[:, None], sig.shape)
            a, b = self._ab(sig.ravel(), lev.ravel(), strict=strict)
            return (a - b).reshape(sig.shape)

        total, _ = integrate_scaled(g, lengths, tol=self.quad_tol, max_depth=self.max_depth)
        return total

    def _psi3_vertical(self, s_fixed: np.ndarray, t_end: np.ndarray, strict: bool = True) -> np.ndarray:
        """int over tau from 0 to t_end of (A + B)(s_fixed, tau)."""
        lengths = t_end

        def g(tau: np.ndarray) -> np.ndarray:
            lev = lengths[:, None] * tau[None, :]
            sig = np.broadcast_to(s_fixed[:, None], lev.shape)
            a, b = self._ab(sig.ravel(), lev.ravel(), strict=strict)
            return (a + b).reshape(lev.shape)

        total, _ = integrate_scaled(g, lengths, tol=self.quad_tol, max_depth=self.max_depth)
        return total

    def psi3(self, s: np.ndarray, t: np.ndarray, path: str = "hv", strict: bool = True) -> np.ndarray:
        """psi3 anchored at alpha3(s0), along an axis-parallel path.

        path = "hv": (s0,0) -> (s,0) -> (s,t)   (default)
        path = "vh": (s0,0) -> (s0,t) -> (s,t)  (exactness probe)
        """
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if path == "hv":
            uniq, inverse = np.unique(s, return_inverse=True)
            h = self._psi3_horizontal(uniq, np.zeros_like(uniq), strict=strict)[inverse]
            v = self._psi3_vertical(s, t, strict=strict)
        elif path == "vh":
            uniq, inverse = np.unique(t, return_inverse=True)
            v = self._psi3_vertical(np.full_like(uniq, self.s0), uniq, strict=strict)[inverse]
            h = self._psi3_horizontal(s, t, strict=strict)
        else:
            raise ValueError(f"unknown path {path!r}")
        return self._alpha3_s0 + h + v

    # -- public evaluation --------------------------------------------------

    def evaluate_points(self, s, t, path: str = "hv", strict: bool = True):
        """Batched evaluation; returns (psi (n,3), N (n,3), rho (n,))."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s, t = np.broadcast_arrays(s, t)
        f = self._fields(s, t, strict=strict)
        p3 = self.psi3(s, t, path=path, strict=strict)
        psi = np.stack([f["psi1"], f["psi2"], p3], axis=-1)
        n = np.stack([f["n1"], f["n2"], np.ones_like(f["n1"])], axis=-1)
        return psi, n, f["rho"]

    def evaluate(self, s: float, t: float):
        """(psi, N, rho) at one conformal parameter point."""
        psi, n, rho = self.evaluate_points(np.array([s]), np.array([t]))
        return psi[0], n[0], float(rho[0])

    def rho_points(self, s, t) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s, t = np.broadcast_arrays(s, t)
        return self._fields(s, t)["rho"]

    def tangents(self, s, t):
        """Closed-form psi_s and psi_t (no finite differences)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s, t = np.broadcast_arrays(s, t)
        f = self._fields(s, t)
        psi_s = np.stack([f["psi1_s"], f["psi2_s"], f["a"] - f["b"]], axis=-1)
        psi_t = np.stack([f["psi1_t"], f["psi2_t"], f["a"] + f["b"]], axis=-1)
        return psi_s, psi_t

    def normals(self, s, t) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s, t = np.broadcast_arrays(s, t)
        f = self._fields(s, t)
        return np.stack([f["n1"], f["n2"], np.ones_like(f["n1"])], axis=-1)

    def evaluate_grid(self, s_vals, t_vals, path: str = "hv", strict: bool = True):
        """Evaluate on the tensor grid; arrays come back shaped (ns, nt, ...)."""
        s_vals = np.asarray(s_vals, dtype=float)
        t_vals = np.asarray(t_vals, dtype=float)
        ss, tt = np.meshgrid(s_vals, t_vals, indexing="ij")
        psi, n, rho = self.evaluate_points(ss.ravel(), tt.ravel(), path=path, strict=strict)
        shape = ss.shape
        return (
            psi.reshape(shape + (3,)),
            n.reshape(shape + (3,)),
            rho.reshape(shape),
        )

    def immersion_by_integration(self, s, t) -> np.ndarray:
        """All of psi by quadrature of the full vector representation form.

        Independent route used to cross-check the algebraic psi1/psi2
        formulas: integrates dpsi = Avec du - Bvec dv from alpha(s0) with
        Avec = -N x Phi+' and Bvec = -N x Phi-'.
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s, t = np.broadcast_arrays(s, t)

        def vec_ab(sig: np.ndarray, lev: np.ndarray, shape):
            f = self._fields(sig, lev)
            avec = np.stack([f["psi1_s"] + f["psi1_t"], f["psi2_s"] + f["psi2_t"], 2 * f["a"]], 0)
            bvec = np.stack([f["psi1_t"] - f["psi1_s"], f["psi2_t"] - f["psi2_s"], 2 * f["b"]], 0)
            # halves: Avec = (P2', -P1', A), Bvec = (M2', -M1', B)
            return 0.5 * avec.reshape((3,) + shape), 0.5 * bvec.reshape((3,) + shape)

        lengths_h = s - self.s0

        def g_h(tau: np.ndarray) -> np.ndarray:
            sig = self.s0 + lengths_h[:, None] * tau[None, :]
            lev = np.zeros_like(sig)
            avec, bvec = vec_ab(sig.ravel(), lev.ravel(), sig.shape)
            return avec - bvec

        h, _ = integrate_scaled(g_h, lengths_h, tol=self.quad_tol, max_depth=self.max_depth)

        lengths_v = t

        def g_v(tau: np.ndarray) -> np.ndarray:
            lev = lengths_v[:, None] * tau[None, :]
            sig = np.broadcast_to(s[:, None], lev.shape)
            avec, bvec = vec_ab(sig.ravel(), lev.ravel(), lev.shape)
            return avec + bvec

        v, _ = integrate_scaled(g_v, lengths_v, tol=self.quad_tol, max_depth=self.max_depth)
        base = self.alpha.values(np.array([self.s0]))[0]
        return base[None, :] + (h + v).T

    # -- data reproduction metrics -----------------------------------------

    def containment_error(self, n: int = 101) -> float:
        s = self.alpha.sample(n)
        psi, _, _ = self.evaluate_points(s, np.zeros_like(s))
        return float(np.max(np.abs(psi - self.alpha.values(s))))

    def conormal_error(self, conormal: AnalyticCurve3, n: int = 101) -> float:
        s = self.alpha.sample(n)
        return float(np.max(np.abs(self.normals(s, np.zeros_like(s)) - conormal.values(s))))


def build_surface(pair: AdmissiblePair, s0: float, quad_tol: float = DEFAULT_TOL) -> AffineSurface:
    """The unique surface containing alpha with conormal U along it."""
    data = _holomorphic_data(pair.alpha, pair.conormal, s0)
    return AffineSurface(data, pair.alpha, lam=pair.lam, quad_tol=quad_tol)


def build_affine_map(
    alpha: AnalyticCurve3, s0: float, n: int = 513, quad_tol: float = DEFAULT_TOL
) -> AffineSurface:
    """The affine map singular along alpha (the lambda = 0 construction).

    Same representation formula with U = alpha' x alpha''/[alpha',alpha'',e3],
    so rho vanishes identically along the data curve.
    """
    alpha.assert_regular()
    da = tuple(cl.diff(c) for c in alpha.components)
    dda = tuple(cl.diff(c) for c in da)
    den = vec_det3_e3(da, dda)

    from . import tape

    den_tape = tape.compile_expr(den, alpha.params)
    den_vals = kernels.eval_values(den_tape, alpha.sample(n))
    k = int(np.argmin(np.abs(den_vals)))
    if np.abs(den_vals[k]) < DEGENERACY_TOL:
        raise DegenerateProjection(
            f"[alpha', alpha'', xi] = {den_vals[k]:.3e} at s={alpha.sample(n)[k]:.6g}"
        )
    num = vec_cross(da, dda)
    comps = (_s(cl.Div(num[0], den)), _s(cl.Div(num[1], den)), cl.ONE)
    conormal = AnalyticCurve3(comps, dict(alpha.params), alpha.domain)
    data = _holomorphic_data(alpha, conormal, s0)
    return AffineSurface(data, alpha, lam=None, quad_tol=quad_tol)


# ---------------------------------------------------------------------------
# singular set scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularPoint:
    s: float
    t: float
    rho: float
    isolated_candidate: bool


def _bisect_edges(surface, s_lo, t_lo, s_hi, t_hi, rho_lo, tol, max_iter=120):
    """Vectorized bisection of rho sign changes along grid edges."""
    s_lo = s_lo.copy()
    t_lo = t_lo.copy()
    s_hi = s_hi.copy()
    t_hi = t_hi.copy()
    sign_lo = np.sign(rho_lo)
    for _ in range(max_iter):
        s_mid = 0.5 * (s_lo + s_hi)
        t_mid = 0.5 * (t_lo + t_hi)
        rho_mid = surface.rho_points(s_mid, t_mid)
        done = np.abs(rho_mid) < tol
        if np.all(done):
            break
        go_lo = np.sign(rho_mid) == sign_lo
        move_hi = ~done & ~go_lo
        move_lo = ~done & go_lo
        s_hi[move_hi] = s_mid[move_hi]
        t_hi[move_hi] = t_mid[move_hi]
        s_lo[move_lo] = s_mid[move_lo]
        t_lo[move_lo] = t_mid[move_lo]
    s_mid = 0.5 * (s_lo + s_hi)
    t_mid = 0.5 * (t_lo + t_hi)
    return s_mid, t_mid, surface.rho_points(s_mid, t_mid)


def singular_scan(
    surface: AffineSurface,
    window: Tuple[Tuple[float, float], Tuple[float, float]],
    grid: Tuple[int, int] = (64, 64),
    refine_tol: float = 1e-10,
    collapse_tol: float = 1e-6,
) -> List[SingularPoint]:
    """Locate the rho = 0 set inside a parameter window.

    Sign changes of rho along grid edges are refined by bisection until
    |rho| < refine_tol.  A refined point is flagged as a candidate isolated
    singularity when the immersion degenerates there beyond the metric:
    one of the coordinate tangent vectors (closed forms, no FD) collapses,
    which is exactly what happens when a whole rho = 0 line maps to one
    point.  Returns an empty list for windows free of singularities.
    """
    (s_min, s_max), (t_min, t_max) = window
    ns, nt = grid
    s_vals = np.linspace(s_min, s_max, ns)
    t_vals = np.linspace(t_min, t_max, nt)
    ss, tt = np.meshgrid(s_vals, t_vals, indexing="ij")
    rho = surface.rho_points(ss.ravel(), tt.ravel()).reshape(ns, nt)

    edges = []
    # s-direction edges
    change = rho[:-1, :] * rho[1:, :] < 0.0
    idx = np.nonzero(change)
    edges.append((ss[:-1, :][idx], tt[:-1, :][idx], ss[1:, :][idx], tt[1:, :][idx], rho[:-1, :][idx]))
    # t-direction edges
    change = rho[:, :-1] * rho[:, 1:] < 0.0
    idx = np.nonzero(change)
    edges.append((ss[:, :-1][idx], tt[:, :-1][idx], ss[:, 1:][idx], tt[:, 1:][idx], rho[:, :-1][idx]))

    points: List[SingularPoint] = []
    # exact zeros on grid nodes
    zidx = np.nonzero(rho == 0.0)
    for s_z, t_z in zip(ss[zidx], tt[zidx]):
        points.append((float(s_z), float(t_z), 0.0))

    for s_lo, t_lo, s_hi, t_hi, rho_lo in edges:
        if s_lo.size == 0:
            continue
        s_m, t_m, rho_m = _bisect_edges(surface, s_lo, t_lo, s_hi, t_hi, rho_lo, refine_tol)
        points.extend(
            (float(a), float(b), float(r)) for a, b, r in zip(s_m, t_m, rho_m)
        )

    if not points:
        return []
    arr = np.asarray(points)
    psi_s, psi_t = surface.tangents(arr[:, 0], arr[:, 1])
    collapse = np.minimum(
        np.linalg.norm(psi_s, axis=-1), np.linalg.norm(psi_t, axis=-1)
    )
    out = [
        SingularPoint(float(a), float(b), float(r), bool(c < collapse_tol))
        for (a, b, r), c in zip(points, collapse)
    ]
    out.sort(key=lambda p: (p.t, p.s))
    return out
