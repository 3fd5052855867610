"""Tape interpreters: numba-jitted hot kernels with a pure-numpy fallback.

These evaluators are the innermost loop of everything numeric here: surface
grids, quadrature nodes, singular-set bisection and jet-based diagnostics
all funnel through them.  Two interchangeable backends execute the same
tape:

* ``numba`` - per-point stack machine, @njit compiled (default when numba
  imports);
* ``numpy`` - the same program run with vectorized array ops, used as
  reference implementation and fallback.

Selection: the AFFINESPHERES_BACKEND environment variable ("numba",
"numpy", or "auto"; default auto), overridable per call for benchmarks and
cross-checks.  Domain violations surface as NaN/inf in the raw kernels;
the eval_values/eval_jets wrappers turn them into EvalError with the
offending expression when strict=True.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

from . import split_algebra as sa
from .errors import EvalError
from .tape import (
    OP_ADD,
    OP_CONST,
    OP_COS,
    OP_COSH,
    OP_DIV,
    OP_EXP,
    OP_LOG,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_SIN,
    OP_SINH,
    OP_SUB,
    OP_VAR,
    Tape,
)

try:  # pragma: no cover - exercised indirectly via backend dispatch
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _resolve_backend(name: Optional[str]) -> str:
    if name is None:
        name = os.environ.get("AFFINESPHERES_BACKEND", "auto").strip().lower() or "auto"
    if name == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    return name


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _values_numpy(codes, iargs, consts, x, stack_need):
    n = x.shape[0]
    stack = np.empty((stack_need, n))
    sp = -1
    with np.errstate(all="ignore"):
        for k in range(codes.shape[0]):
            op = codes[k]
            if op == OP_CONST:
                sp += 1
                stack[sp, :] = consts[iargs[k]]
            elif op == OP_VAR:
                sp += 1
                stack[sp, :] = x
            elif op == OP_ADD:
                stack[sp - 1] += stack[sp]
                sp -= 1
            elif op == OP_SUB:
                stack[sp - 1] -= stack[sp]
                sp -= 1
            elif op == OP_MUL:
                stack[sp - 1] *= stack[sp]
                sp -= 1
            elif op == OP_DIV:
                stack[sp - 1] /= stack[sp]
                sp -= 1
            elif op == OP_NEG:
                np.negative(stack[sp], out=stack[sp])
            elif op == OP_POW:
                stack[sp] = stack[sp] ** iargs[k]
            elif op == OP_SIN:
                np.sin(stack[sp], out=stack[sp])
            elif op == OP_COS:
                np.cos(stack[sp], out=stack[sp])
            elif op == OP_SINH:
                np.sinh(stack[sp], out=stack[sp])
            elif op == OP_COSH:
                np.cosh(stack[sp], out=stack[sp])
            elif op == OP_EXP:
                np.exp(stack[sp], out=stack[sp])
            elif op == OP_LOG:
                stack[sp] = np.log(stack[sp])
            else:
                raise ValueError(f"bad opcode {op}")
    return stack[0].copy()


def _jets_numpy(codes, iargs, consts, x, order, stack_need):
    n = x.shape[0]
    stack = np.zeros((stack_need, order + 1, n))
    sp = -1
    with np.errstate(all="ignore"):
        for k in range(codes.shape[0]):
            op = codes[k]
            if op == OP_CONST:
                sp += 1
                stack[sp, :, :] = 0.0
                stack[sp, 0, :] = consts[iargs[k]]
            elif op == OP_VAR:
                sp += 1
                stack[sp, :, :] = 0.0
                stack[sp, 0, :] = x
                if order >= 1:
                    stack[sp, 1, :] = 1.0
            elif op == OP_ADD:
                stack[sp - 1] += stack[sp]
                sp -= 1
            elif op == OP_SUB:
                stack[sp - 1] -= stack[sp]
                sp -= 1
            elif op == OP_MUL:
                stack[sp - 1] = sa.jet_mul(stack[sp - 1], stack[sp])
                sp -= 1
            elif op == OP_DIV:
                stack[sp - 1] = sa.jet_div(stack[sp - 1], stack[sp])
                sp -= 1
            elif op == OP_NEG:
                stack[sp] = -stack[sp]
            elif op == OP_POW:
                stack[sp] = sa.jet_pow_int(stack[sp], int(iargs[k]))
            elif op == OP_SIN:
                stack[sp] = sa.jet_sin_cos(stack[sp])[0]
            elif op == OP_COS:
                stack[sp] = sa.jet_sin_cos(stack[sp])[1]
            elif op == OP_SINH:
                stack[sp] = sa.jet_sinh_cosh(stack[sp])[0]
            elif op == OP_COSH:
                stack[sp] = sa.jet_sinh_cosh(stack[sp])[1]
            elif op == OP_EXP:
                stack[sp] = sa.jet_exp(stack[sp])
            elif op == OP_LOG:
                stack[sp] = sa.jet_log(stack[sp])
            else:
                raise ValueError(f"bad opcode {op}")
    return stack[0].copy()


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _values_numba(codes, iargs, consts, x, stack_need):
        n = x.shape[0]
        out = np.empty(n)
        stack = np.empty(stack_need)
        for p in range(n):
            sp = -1
            for k in range(codes.shape[0]):
                op = codes[k]
                if op == OP_CONST:
                    sp += 1
                    stack[sp] = consts[iargs[k]]
                elif op == OP_VAR:
                    sp += 1
                    stack[sp] = x[p]
                elif op == OP_ADD:
                    stack[sp - 1] += stack[sp]
                    sp -= 1
                elif op == OP_SUB:
                    stack[sp - 1] -= stack[sp]
                    sp -= 1
                elif op == OP_MUL:
                    stack[sp - 1] *= stack[sp]
                    sp -= 1
                elif op == OP_DIV:
                    stack[sp - 1] /= stack[sp]
                    sp -= 1
                elif op == OP_NEG:
                    stack[sp] = -stack[sp]
                elif op == OP_POW:
                    stack[sp] = stack[sp] ** iargs[k]
                elif op == OP_SIN:
                    stack[sp] = np.sin(stack[sp])
                elif op == OP_COS:
                    stack[sp] = np.cos(stack[sp])
                elif op == OP_SINH:
                    stack[sp] = np.sinh(stack[sp])
                elif op == OP_COSH:
                    stack[sp] = np.cosh(stack[sp])
                elif op == OP_EXP:
                    stack[sp] = np.exp(stack[sp])
                elif op == OP_LOG:
                    stack[sp] = np.log(stack[sp])
            out[p] = stack[0]
        return out

    @njit(cache=True)
    def _jet_mul_nb(a, b, order, tmp):
        for k in range(order + 1):
            acc = 0.0
            for i in range(k + 1):
                acc += a[i] * b[k - i]
            tmp[k] = acc
        for k in range(order + 1):
            a[k] = tmp[k]

    @njit(cache=True)
    def _jet_div_nb(a, b, order, tmp):
        for k in range(order + 1):
            acc = a[k]
            for j in range(k):
                acc -= tmp[j] * b[k - j]
            tmp[k] = acc / b[0]
        for k in range(order + 1):
            a[k] = tmp[k]

    @njit(cache=True)
    def _jets_numba(codes, iargs, consts, x, order, stack_need):
        n = x.shape[0]
        out = np.empty((order + 1, n))
        stack = np.zeros((stack_need, order + 1))
        tmp = np.zeros(order + 1)
        tmp2 = np.zeros(order + 1)
        tmp3 = np.zeros(order + 1)
        for p in range(n):
            sp = -1
            for k in range(codes.shape[0]):
                op = codes[k]
                if op == OP_CONST:
                    sp += 1
                    for i in range(order + 1):
                        stack[sp, i] = 0.0
                    stack[sp, 0] = consts[iargs[k]]
                elif op == OP_VAR:
                    sp += 1
                    for i in range(order + 1):
                        stack[sp, i] = 0.0
                    stack[sp, 0] = x[p]
                    if order >= 1:
                        stack[sp, 1] = 1.0
                elif op == OP_ADD:
                    for i in range(order + 1):
                        stack[sp - 1, i] += stack[sp, i]
                    sp -= 1
                elif op == OP_SUB:
                    for i in range(order + 1):
                        stack[sp - 1, i] -= stack[sp, i]
                    sp -= 1
                elif op == OP_MUL:
                    _jet_mul_nb(stack[sp - 1], stack[sp], order, tmp)
                    sp -= 1
                elif op == OP_DIV:
                    _jet_div_nb(stack[sp - 1], stack[sp], order, tmp)
                    sp -= 1
                elif op == OP_NEG:
                    for i in range(order + 1):
                        stack[sp, i] = -stack[sp, i]
                elif op == OP_POW:
                    m = iargs[k]
                    neg = m < 0
                    if neg:
                        m = -m
                    # binary powering on the truncated series
                    for i in range(order + 1):
                        tmp2[i] = 0.0
                        tmp3[i] = stack[sp, i]
                    tmp2[0] = 1.0
                    while m > 0:
                        if m & 1:
                            _jet_mul_nb(tmp2, tmp3, order, tmp)
                        _jet_mul_nb(tmp3, tmp3, order, tmp)
                        m >>= 1
                    if neg:
                        for i in range(order + 1):
                            stack[sp, i] = 0.0
                        stack[sp, 0] = 1.0
                        _jet_div_nb(stack[sp], tmp2, order, tmp)
                    else:
                        for i in range(order + 1):
                            stack[sp, i] = tmp2[i]
                elif op == OP_SIN or op == OP_COS or op == OP_SINH or op == OP_COSH:
                    hyper = op == OP_SINH or op == OP_COSH
                    if hyper:
                        tmp2[0] = np.sinh(stack[sp, 0])
                        tmp3[0] = np.cosh(stack[sp, 0])
                        sign = 1.0
                    else:
                        tmp2[0] = np.sin(stack[sp, 0])
                        tmp3[0] = np.cos(stack[sp, 0])
                        sign = -1.0
                    for i in range(1, order + 1):
                        sacc = 0.0
                        cacc = 0.0
                        for j in range(1, i + 1):
                            sacc += j * stack[sp, j] * tmp3[i - j]
                            cacc += j * stack[sp, j] * tmp2[i - j]
                        tmp2[i] = sacc / i
                        tmp3[i] = sign * cacc / i
                    if op == OP_SIN or op == OP_SINH:
                        for i in range(order + 1):
                            stack[sp, i] = tmp2[i]
                    else:
                        for i in range(order + 1):
                            stack[sp, i] = tmp3[i]
                elif op == OP_EXP:
                    tmp[0] = np.exp(stack[sp, 0])
                    for i in range(1, order + 1):
                        acc = 0.0
                        for j in range(1, i + 1):
                            acc += j * stack[sp, j] * tmp[i - j]
                        tmp[i] = acc / i
                    for i in range(order + 1):
                        stack[sp, i] = tmp[i]
                elif op == OP_LOG:
                    tmp[0] = np.log(stack[sp, 0])
                    for i in range(1, order + 1):
                        acc = i * stack[sp, i]
                        for j in range(1, i):
                            acc -= j * tmp[j] * stack[sp, i - j]
                        tmp[i] = acc / (i * stack[sp, 0])
                    for i in range(order + 1):
                        stack[sp, i] = tmp[i]
            for i in range(order + 1):
                out[i, p] = stack[0, i]
        return out


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------


def eval_values(tape: Tape, x, backend: Optional[str] = None, strict: bool = True) -> np.ndarray:
    """Evaluate a tape at the 1-D float array x."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _resolve_backend(backend) == "numba":
        out = _values_numba(tape.codes, tape.iargs, tape.consts, x, tape.stack_need)
    else:
        out = _values_numpy(tape.codes, tape.iargs, tape.consts, x, tape.stack_need)
    if strict and not np.all(np.isfinite(out)):
        bad = float(x[np.nonzero(~np.isfinite(out))[0][0]])
        raise EvalError(f"non-finite value at s={bad:.6g}", tape.source)
    return out


def eval_jets(
    tape: Tape, x, order: int, backend: Optional[str] = None, strict: bool = True
) -> np.ndarray:
    """Taylor coefficients 0..order of a tape at x; shape (order+1, n)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _resolve_backend(backend) == "numba":
        out = _jets_numba(tape.codes, tape.iargs, tape.consts, x, order, tape.stack_need)
    else:
        out = _jets_numpy(tape.codes, tape.iargs, tape.consts, x, order, tape.stack_need)
    if strict and not np.all(np.isfinite(out)):
        bad = float(x[np.nonzero(~np.isfinite(out).all(axis=0))[0][0]])
        raise EvalError(f"non-finite jet at s={bad:.6g}", tape.source)
    return out
