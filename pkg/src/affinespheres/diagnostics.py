"""Geodesic criteria, the symmetry principle, and structure-equation suites.

Everything here verifies constructed surfaces against identities they must
satisfy: the pre-geodesic determinant criterion [alpha',alpha'',xi] =
[U,U',U''], equivariance under symmetries of the data, and the full
first-order system (wave equation for N, conformal Laplacian of psi,
conormal orthogonality, volume identity, and the Monge-Ampere equation on
a graph patch).  Derivatives entering the residuals are central finite
differences on purpose: they are independent of the closed forms used to
build the evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import curve_lang as cl
from . import kernels, tape
from .bjorling_core import AdmissiblePair, AffineSurface, build_surface
from .curve_lang import AnalyticCurve3, Expr
from .equiaffine import E3, EquiaffineFrame
from .errors import DegenerateProjection, JacobianSingular, OutOfChart, SymmetryMismatch
from .hessian_cauchy import newton_invert_chart
from .quadrature import DEFAULT_TOL

FD_STEP = 1e-4


# ---------------------------------------------------------------------------
# geodesic criteria
# ---------------------------------------------------------------------------


def pregeodesic_residual(pair: AdmissiblePair) -> Callable[[np.ndarray], np.ndarray]:
    """r(s) = [alpha', alpha'', xi] - [U, U', U'']; alpha is pre-geodesic iff r = 0."""

    def residual(s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        ja = pair.alpha.jets(s, 2)
        da = ja[1]
        dda = 2.0 * ja[2]
        det_a = da[:, 0] * dda[:, 1] - da[:, 1] * dda[:, 0]
        ju = pair.conormal.jets(s, 2)
        u0 = ju[0]
        u1 = ju[1]
        u2 = 2.0 * ju[2]
        det_u = np.sum(u0 * np.cross(u1, u2), axis=-1)
        return det_a - det_u

    return residual


def pregeodesic_supnorm(pair: AdmissiblePair, n: int = 257) -> float:
    r = pregeodesic_residual(pair)
    return float(np.max(np.abs(r(pair.alpha.sample(n)))))


@dataclass(frozen=True)
class GeodesicCheck:
    is_geodesic: bool
    residual_sup: float


def geodesic_check(
    alpha: AnalyticCurve3, m: float, n: int = 257, tol: float = 1e-8
) -> GeodesicCheck:
    """Can alpha be a geodesic with constant metric m along it?

    Builds the metric-m conormal and tests the pre-geodesic criterion; the
    constant-lambda construction already makes h(alpha', alpha') constant,
    so the residual alone decides.  Raises DegenerateProjection when the
    conormal is not determined by alpha.
    """
    from .bjorling_core import check_admissible, conormal_from_metric

    if not m > 0.0:
        raise ValueError(f"the metric constant must be positive, got {m}")
    conormal = conormal_from_metric(alpha, cl.Lit(float(m)))
    pair = check_admissible(alpha, conormal)
    sup = pregeodesic_supnorm(pair, n)
    return GeodesicCheck(bool(sup < tol), sup)


# ---------------------------------------------------------------------------
# symmetry principle
# ---------------------------------------------------------------------------


@dataclass
class SymmetrySpec:
    """A candidate symmetry: unimodular T fixing xi plus a reparametrization."""

    frame: EquiaffineFrame
    reparam: Expr
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.reparam = cl.as_expr(self.reparam)
        self.params = {k: float(v) for k, v in self.params.items()}
        dev = float(np.max(np.abs(self.frame.A @ E3 - E3)))
        if dev > 1e-12:
            raise SymmetryMismatch("A xi = xi", 0.0, dev)

    def gamma_values(self, s) -> np.ndarray:
        t = tape.compile_expr(self.reparam, self.params)
        s = np.asarray(s, dtype=float)
        return kernels.eval_values(t, np.atleast_1d(s).ravel()).reshape(s.shape)

    def gamma_prime_values(self, s) -> np.ndarray:
        t = tape.compile_expr(cl.diff(self.reparam), self.params)
        s = np.asarray(s, dtype=float)
        return kernels.eval_values(t, np.atleast_1d(s).ravel()).reshape(s.shape)


def symmetry_check(
    pair: AdmissiblePair,
    sym: SymmetrySpec,
    window: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None,
    grid: Tuple[int, int] = (13, 9),
    s0: Optional[float] = None,
    quad_tol: float = DEFAULT_TOL,
    data_tol: float = 1e-8,
) -> float:
    """Numerically certify that a data symmetry is a global surface symmetry.

    First verifies alpha(Gamma(s)) = T(alpha(s)) and U(Gamma(s)) =
    (A^t)^{-1} U(s) on a dense grid (else SymmetryMismatch), then compares
    T(psi(s,t)) against psi at the induced parameter map -- Gamma extended
    split-holomorphically, i.e. applied separately in each null coordinate.
    Returns the max deviation over the window grid.
    """
    s_dense = pair.alpha.sample(257)
    dgam = sym.gamma_prime_values(s_dense)
    if np.min(np.abs(dgam)) == 0.0:
        raise SymmetryMismatch("Gamma' != 0", float(s_dense[np.argmin(np.abs(dgam))]), 0.0)
    gam = sym.gamma_values(s_dense)
    lhs_alpha = pair.alpha.values(gam)
    rhs_alpha = sym.frame.apply(pair.alpha.values(s_dense))
    dev_alpha = np.abs(lhs_alpha - rhs_alpha)
    k = int(np.argmax(dev_alpha.max(axis=-1)))
    if dev_alpha.max() > data_tol:
        raise SymmetryMismatch(
            "alpha o Gamma = T o alpha", float(s_dense[k]), float(dev_alpha.max())
        )
    lhs_u = pair.conormal.values(gam)
    rhs_u = sym.frame.apply_conormal(pair.conormal.values(s_dense))
    dev_u = np.abs(lhs_u - rhs_u)
    k = int(np.argmax(dev_u.max(axis=-1)))
    if dev_u.max() > data_tol:
        raise SymmetryMismatch(
            "U o Gamma = (A^t)^{-1} U", float(s_dense[k]), float(dev_u.max())
        )

    if s0 is None:
        s0 = 0.5 * (pair.domain[0] + pair.domain[1])
    if window is None:
        window = (pair.domain, (-0.5, 0.5))
    surface = build_surface(pair, s0=s0, quad_tol=quad_tol)
    (s_min, s_max), (t_min, t_max) = window
    ss, tt = np.meshgrid(
        np.linspace(s_min, s_max, grid[0]), np.linspace(t_min, t_max, grid[1]), indexing="ij"
    )
    s_flat = ss.ravel()
    t_flat = tt.ravel()
    psi, _, _ = surface.evaluate_points(s_flat, t_flat)
    # induced map: Gamma acts on each null coordinate
    gu = sym.gamma_values(s_flat + t_flat)
    gv = sym.gamma_values(s_flat - t_flat)
    psi_mapped, _, _ = surface.evaluate_points(0.5 * (gu + gv), 0.5 * (gu - gv))
    return float(np.max(np.abs(sym.frame.apply(psi) - psi_mapped)))


# ---------------------------------------------------------------------------
# structure-equation residual suite
# ---------------------------------------------------------------------------


@dataclass
class DiagnosticsReport:
    """Sup-norms (and raw per-point fields) of the structure residuals."""

    residuals: Dict[str, float]
    rho_range: Tuple[float, float]
    window: Tuple[Tuple[float, float], Tuple[float, float]]
    grid: Tuple[int, int]
    fd_step: float
    fields: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def supremum(self) -> float:
        return max(self.residuals.values())

    def to_dict(self) -> Dict:
        return {
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "rho_range": [self.rho_range[0], self.rho_range[1]],
            "window": {"s": list(self.window[0]), "t": list(self.window[1])},
            "grid": list(self.grid),
            "fd_step": self.fd_step,
        }


def _monge_ampere_patch(
    surface: AffineSurface,
    s_c: np.ndarray,
    t_c: np.ndarray,
    h: float = 3e-4,
) -> Optional[float]:
    """FD Monge-Ampere residual over the (psi1, psi2) chart, if invertible."""

    def chart(s, t):
        f = surface._fields(s, t)
        return f["psi1"], f["psi2"]

    def jac(s, t):
        f = surface._fields(s, t)
        return f["psi1_s"], f["psi1_t"], f["psi2_s"], f["psi2_t"]

    x_c, y_c = chart(s_c, t_c)
    offsets = [(0, 0), (h, 0), (-h, 0), (0, h), (0, -h), (h, h), (h, -h), (-h, h), (-h, -h)]
    xq = np.concatenate([x_c + dx for dx, _ in offsets])
    yq = np.concatenate([y_c + dy for _, dy in offsets])
    seeds_s = np.tile(s_c, len(offsets))
    seeds_t = np.tile(t_c, len(offsets))
    big = 1e9
    window = ((-big, big), (-big, big))  # seeds are exact; no rectangle constraint
    try:
        s_sol, t_sol = newton_invert_chart(chart, jac, xq, yq, seeds_s, seeds_t, window)
    except (OutOfChart, JacobianSingular):
        return None
    f = surface.psi3(s_sol, t_sol).reshape(len(offsets), s_c.size)
    f_c, f_px, f_mx, f_py, f_my, f_pp, f_pm, f_mp, f_mm = f
    fxx = (f_px - 2.0 * f_c + f_mx) / h**2
    fyy = (f_py - 2.0 * f_c + f_my) / h**2
    fxy = (f_pp - f_pm - f_mp + f_mm) / (4.0 * h**2)
    return float(np.max(np.abs(fxx * fyy - fxy**2 + 1.0)))


def full_residual_report(
    surface: AffineSurface,
    window: Tuple[Tuple[float, float], Tuple[float, float]],
    grid: Tuple[int, int] = (17, 13),
    h: float = FD_STEP,
    ma_patch: bool = True,
) -> DiagnosticsReport:
    """Evaluate every structure-equation residual over a window.

    Residuals, each reported as a sup-norm over the grid:

    * wave_equation:        N_ss - N_tt
    * conformal_laplacian:  (psi_ss - psi_tt)/4 - rho xi
    * tangency_s/t:         <N, psi_s>, <N, psi_t>
    * conormal_norm:        <N, xi> - 1
    * volume_psi:           (psi1_s psi2_t - psi2_s psi1_t)/2 - rho
    * volume_N:             -[N, N_s, N_t]/2 - rho
    * monge_ampere:         f_xx f_yy - f_xy^2 + 1 on the (psi1,psi2) chart
                            (omitted when the window is not a graph patch)
    """
    (s_min, s_max), (t_min, t_max) = window
    ns, nt = grid
    ss, tt = np.meshgrid(np.linspace(s_min, s_max, ns), np.linspace(t_min, t_max, nt), indexing="ij")
    s_c = ss.ravel()
    t_c = tt.ravel()
    n_pts = s_c.size

    offsets = [(0.0, 0.0), (h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
    s_all = np.concatenate([s_c + ds for ds, _ in offsets])
    t_all = np.concatenate([t_c + dt for _, dt in offsets])
    psi_all, n_all, rho_all = surface.evaluate_points(s_all, t_all)
    psi = psi_all.reshape(5, n_pts, 3)
    nrm = n_all.reshape(5, n_pts, 3)
    rho = rho_all.reshape(5, n_pts)[0]

    psi_c, psi_px, psi_mx, psi_pt, psi_mt = psi
    n_c, n_px, n_mx, n_pt, n_mt = nrm

    psi_s = (psi_px - psi_mx) / (2.0 * h)
    psi_t = (psi_pt - psi_mt) / (2.0 * h)
    psi_ss = (psi_px - 2.0 * psi_c + psi_mx) / h**2
    psi_tt = (psi_pt - 2.0 * psi_c + psi_mt) / h**2
    n_s = (n_px - n_mx) / (2.0 * h)
    n_t = (n_pt - n_mt) / (2.0 * h)
    n_ss = (n_px - 2.0 * n_c + n_mx) / h**2
    n_tt = (n_pt - 2.0 * n_c + n_mt) / h**2

    wave = np.abs(n_ss - n_tt)
    laplace = 0.25 * (psi_ss - psi_tt)
    laplace[:, 2] -= rho
    tang_s = np.abs(np.sum(n_c * psi_s, axis=-1))
    tang_t = np.abs(np.sum(n_c * psi_t, axis=-1))
    conormal_norm = np.abs(n_c[:, 2] - 1.0)
    vol_psi = np.abs(
        0.5 * (psi_s[:, 0] * psi_t[:, 1] - psi_s[:, 1] * psi_t[:, 0]) - rho
    )
    vol_n = np.abs(-0.5 * np.sum(n_c * np.cross(n_s, n_t), axis=-1) - rho)

    residuals = {
        "wave_equation": float(wave.max()),
        "conformal_laplacian": float(np.abs(laplace).max()),
        "tangency_s": float(tang_s.max()),
        "tangency_t": float(tang_t.max()),
        "conormal_norm": float(conormal_norm.max()),
        "volume_psi": float(vol_psi.max()),
        "volume_N": float(vol_n.max()),
    }
    if ma_patch:
        ma = _monge_ampere_patch(surface, s_c, t_c)
        if ma is not None:
            residuals["monge_ampere"] = ma

    fields = {
        "rho": rho.reshape(ns, nt),
        "wave_equation": wave.max(axis=-1).reshape(ns, nt),
        "conformal_laplacian": np.abs(laplace).max(axis=-1).reshape(ns, nt),
        "volume_psi": vol_psi.reshape(ns, nt),
    }
    return DiagnosticsReport(
        residuals=residuals,
        rho_range=(float(rho.min()), float(rho.max())),
        window=window,
        grid=grid,
        fd_step=h,
        fields=fields,
    )
