"""Real and split 3-vector algebra and equiaffine frame normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroVector
from .split_algebra import SplitScalar, SplitVec3

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])
XI = E3  # internal gauge: the affine normal is e3


def _is_split(a) -> bool:
    return isinstance(a, SplitVec3)


def cross(a, b):
    """Cross product; accepts numpy (...,3) arrays or SplitVec3."""
    if _is_split(a) or _is_split(b):
        return SplitVec3(
            a.y * b.z - a.z * b.y,
            a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x,
        )
    return np.cross(a, b)


def dot(a, b):
    """Inner product; accepts numpy (...,3) arrays or SplitVec3."""
    if _is_split(a) or _is_split(b):
        return a.x * b.x + a.y * b.y + a.z * b.z
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def det3(a, b, c):
    """Determinant [a, b, c] = <a x b, c>."""
    return dot(cross(a, b), c)


@dataclass(frozen=True)
class EquiaffineFrame:
    """Unimodular affine map T(v) = A v + v0 with det A = 1."""

    A: np.ndarray
    v0: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float).reshape(3, 3))
        object.__setattr__(self, "v0", np.asarray(self.v0, dtype=float).reshape(3))
        d = float(np.linalg.det(self.A))
        if abs(d - 1.0) > 1e-9:
            raise ValueError(f"frame matrix is not unimodular: det = {d!r}")

    def apply(self, v: np.ndarray) -> np.ndarray:
        """T(v) for points; v has shape (..., 3)."""
        return np.asarray(v) @ self.A.T + self.v0

    def apply_conormal(self, u: np.ndarray) -> np.ndarray:
        """(A^t)^{-1} u, the conormal transformation law."""
        return np.asarray(u) @ np.linalg.inv(self.A)

    def inverse(self) -> "EquiaffineFrame":
        ainv = np.linalg.inv(self.A)
        return EquiaffineFrame(ainv, -ainv @ self.v0)

    @classmethod
    def identity(cls) -> "EquiaffineFrame":
        return cls(np.eye(3))


def rotation_z(theta: float, v0=None) -> EquiaffineFrame:
    c, s = np.cos(theta), np.sin(theta)
    a = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return EquiaffineFrame(a, np.zeros(3) if v0 is None else v0)


def normalize_frame(xi) -> EquiaffineFrame:
    """Unimodular A with A xi = e3 (and v0 = 0).

    Construction: complete xi to a basis with the two coordinate axes least
    aligned with xi, Gram-Schmidt them against xi, then scale the pair so
    the basis matrix B = [b1 b2 xi] has det 1; A = B^{-1}.  Deterministic
    and continuous except where the selected axes switch.
    """
    xi = np.asarray(xi, dtype=float).reshape(3)
    norm = np.linalg.norm(xi)
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    # two standard axes least aligned with xi, in index order
    i1, i2 = sorted(np.argsort(np.abs(xi))[:2])
    b1 = np.eye(3)[i1] - (xi[i1] / (norm * norm)) * xi
    b1 /= np.linalg.norm(b1)
    b2 = np.eye(3)[i2] - (xi[i2] / (norm * norm)) * xi - np.dot(np.eye(3)[i2], b1) * b1
    b2 /= np.linalg.norm(b2)
    if det3(b1, b2, xi) < 0.0:
        b1, b2 = b2, b1
    k = 1.0 / np.sqrt(norm)
    basis = np.stack([k * b1, k * b2, xi], axis=1)
    return EquiaffineFrame(np.linalg.inv(basis))
