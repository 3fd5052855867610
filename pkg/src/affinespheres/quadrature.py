"""Adaptive composite Gauss-Legendre quadrature for batches of line integrals.

Panels are refined by comparing 7- and 15-point Gauss rules; because every
integrand here is real-analytic, disagreement signals an under-resolved
panel rather than roughness, and convergence is spectral.  A whole batch of
integrals shares one panel subdivision (controlled by the worst member),
which keeps node evaluation vectorized and -- importantly for the
finite-difference residual suites -- makes the quadrature error vary
smoothly across neighbouring evaluation points.
"""

from __future__ import annotations

from typing import Callable, Tuple

import numpy as np

from .errors import QuadratureFailure

_N7, _W7 = np.polynomial.legendre.leggauss(7)
_N15, _W15 = np.polynomial.legendre.leggauss(15)

DEFAULT_TOL = 1e-10
MAX_DEPTH = 14  # per-segment subdivision cap 2**14


def integrate_unit(
    f: Callable[[np.ndarray], np.ndarray],
    tol: float = DEFAULT_TOL,
    max_depth: int = MAX_DEPTH,
) -> Tuple[np.ndarray, float]:
    """Integrate f over [0, 1]; f maps nodes (m,) to values (..., m).

    Returns (integrals (...,), accumulated error estimate).  The tolerance
    is absolute and distributed over panels proportionally to length.
    Panels are processed generation by generation so each refinement level
    costs a single batched call of f.
    """
    panels = np.array([[0.0, 1.0]])
    total = None
    err_total = 0.0
    depth = 0
    while panels.shape[0]:
        a = panels[:, 0]
        b = panels[:, 1]
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        # nodes: (npanels, 22) -> flattened single call
        x7 = mid[:, None] + half[:, None] * _N7[None, :]
        x15 = mid[:, None] + half[:, None] * _N15[None, :]
        nodes = np.concatenate([x7, x15], axis=1)
        vals = f(nodes.ravel())
        vals = vals.reshape(vals.shape[:-1] + (panels.shape[0], 22))
        i7 = (vals[..., :7] @ _W7) * half
        i15 = (vals[..., 7:] @ _W15) * half
        err = np.abs(i15 - i7)
        # batch members with non-finite values (unevaluable points) must not
        # drive refinement; their totals stay NaN and are flagged downstream
        err = np.where(np.isfinite(err), err, 0.0)
        while err.ndim > 1:
            err = err.max(axis=0)
        ok = (err <= tol * (b - a)) | (depth >= max_depth)
        if total is None:
            total = np.zeros(i15.shape[:-1])
        total = total + np.sum(np.where(ok, i15, 0.0), axis=-1)
        err_total += float(np.sum(np.where(ok, err, 0.0)))
        bad = ~ok
        if not np.any(bad):
            break
        a_bad = a[bad]
        b_bad = b[bad]
        m_bad = 0.5 * (a_bad + b_bad)
        panels = np.concatenate(
            [np.stack([a_bad, m_bad], axis=1), np.stack([m_bad, b_bad], axis=1)]
        )
        depth += 1
    return total, err_total


def integrate_scaled(
    g: Callable[[np.ndarray], np.ndarray],
    lengths: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_depth: int = MAX_DEPTH,
) -> Tuple[np.ndarray, float]:
    """Batched integrals int_0^{L_k} g_k; g gets unit-interval nodes.

    g(tau) must return values of the k-th integrand at parameter
    tau*L_k, shaped (..., k..., m); the Jacobian factor L_k is applied
    here.  Raises QuadratureFailure when the error estimate ends up more
    than an order of magnitude over the requested tolerance (possible only
    when the subdivision cap bites).
    """
    lengths = np.asarray(lengths, dtype=float)

    def f(tau: np.ndarray) -> np.ndarray:
        return g(tau) * lengths[..., None]

    # tolerance is per integral; the absolute scale of each leg is |L_k|
    scale = max(1.0, float(np.max(np.abs(lengths))) if lengths.size else 1.0)
    total, err = integrate_unit(f, tol=tol, max_depth=max_depth)
    if err > 10.0 * tol * scale:
        raise QuadratureFailure(tol, err)
    return total, err
