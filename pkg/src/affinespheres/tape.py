"""Compile expression ASTs to flat instruction tapes.

A tape is a postorder program for a small stack machine: integer opcode and
argument arrays plus a constant pool.  Parameters are frozen into the pool
at compile time.  The interpreters live in kernels.py (numba and numpy
backends); keeping the program as plain arrays is what lets the same tape
drive both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from . import curve_lang as cl
from .errors import UnboundParameter

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_NEG = 6
OP_POW = 7
OP_SIN = 8
OP_COS = 9
OP_SINH = 10
OP_COSH = 11
OP_EXP = 12
OP_LOG = 13

_CALL_OPS = {
    "sin": OP_SIN,
    "cos": OP_COS,
    "sinh": OP_SINH,
    "cosh": OP_COSH,
    "exp": OP_EXP,
    "log": OP_LOG,
}

_BINARY = {cl.Add: OP_ADD, cl.Sub: OP_SUB, cl.Mul: OP_MUL, cl.Div: OP_DIV}


@dataclass(frozen=True)
class Tape:
    codes: np.ndarray  # int64 opcodes
    iargs: np.ndarray  # int64 per-op argument (const index / exponent)
    consts: np.ndarray  # float64 constant pool
    stack_need: int
    source: str  # formatted expression, for error messages

    def __len__(self) -> int:
        return len(self.codes)


def compile_expr(expr: cl.Expr, params: Optional[Mapping[str, float]] = None) -> Tape:
    params = params or {}
    codes: list = []
    iargs: list = []
    consts: list = []

    def const_index(value: float) -> int:
        consts.append(float(value))
        return len(consts) - 1

    def emit(e: cl.Expr) -> int:
        """Emit postorder code; returns the stack depth the subtree needs."""
        if isinstance(e, cl.Lit):
            codes.append(OP_CONST)
            iargs.append(const_index(e.value))
            return 1
        if isinstance(e, cl.Var):
            codes.append(OP_VAR)
            iargs.append(0)
            return 1
        if isinstance(e, cl.Param):
            if e.name not in params:
                raise UnboundParameter(f"parameter {e.name!r} is unbound")
            codes.append(OP_CONST)
            iargs.append(const_index(params[e.name]))
            return 1
        if type(e) in _BINARY:
            da = emit(e.a)
            db_start = len(codes)
            db = emit(e.b)
            codes_op = _BINARY[type(e)]
            codes.append(codes_op)
            iargs.append(0)
            del db_start
            return max(da, db + 1)
        if isinstance(e, cl.Neg):
            d = emit(e.a)
            codes.append(OP_NEG)
            iargs.append(0)
            return d
        if isinstance(e, cl.Pow):
            d = emit(e.base)
            codes.append(OP_POW)
            iargs.append(int(e.n))
            return d
        if isinstance(e, cl.Call):
            d = emit(e.arg)
            codes.append(_CALL_OPS[e.fn])
            iargs.append(0)
            return d
        raise TypeError(f"not an Expr: {e!r}")

    depth = emit(expr)
    return Tape(
        codes=np.asarray(codes, dtype=np.int64),
        iargs=np.asarray(iargs, dtype=np.int64),
        consts=np.asarray(consts if consts else [0.0], dtype=np.float64),
        stack_need=depth,
        source=cl.format_expr(expr),
    )
