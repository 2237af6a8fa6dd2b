"""Rank-1 and quadratic seminorms on R^d.

A rank-1 seminorm is H(x) = |<x, eta>|; a quadratic seminorm is
H(x) = |diag(alphas) R^T x| for an orthogonal R and nonnegative alphas.
Both are immutable; every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSeminormError, SingularMapError

SEMINORM_TOL = 1e-12


def _as_matrix(A, d: int) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (d, d):
        raise InvalidSeminormError(f"expected a {d} x {d} matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidSeminormError("matrix entries must be finite")
    if abs(np.linalg.det(A)) <= SEMINORM_TOL:
        raise SingularMapError("non-invertible map")
    return A


class Rank1Seminorm:
    """H(x) = |<x, eta>|; vanishes on the hyperplane orthogonal to eta."""

    __slots__ = ("eta",)

    def __init__(self, eta):
        e = np.array(np.atleast_1d(eta), dtype=float)
        if e.ndim != 1 or e.size < 1:
            raise InvalidSeminormError("eta must be a one-dimensional vector")
        if not np.all(np.isfinite(e)):
            raise InvalidSeminormError("eta entries must be finite")
        if np.linalg.norm(e) <= SEMINORM_TOL:
            raise InvalidSeminormError("eta must be nonzero")
        e.flags.writeable = False
        self.eta = e

    @property
    def dimension(self) -> int:
        return self.eta.size

    @property
    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.eta))

    @property
    def kernel_codim(self) -> int:
        return 1

    @property
    def direction(self) -> np.ndarray:
        return self.eta / np.linalg.norm(self.eta)

    def evaluate(self, xi) -> float | np.ndarray:
        xi = np.asarray(xi, dtype=float)
        out = np.abs(xi @ self.eta)
        return float(out) if out.ndim == 0 else out

    def compose(self, A) -> "Rank1Seminorm":
        """The seminorm x -> H(Ax), which is rank-1 with eta' = A^T eta."""
        A = _as_matrix(A, self.dimension)
        return Rank1Seminorm(A.T @ self.eta)

    def normalized(self) -> "Rank1Seminorm":
        return Rank1Seminorm(self.direction)

    def scaled(self, t: float) -> "Rank1Seminorm":
        if t <= 0:
            raise InvalidSeminormError("scale factor must be positive")
        return Rank1Seminorm(t * self.eta)

    def __call__(self, xi):
        return self.evaluate(xi)

    def __repr__(self):
        return f"Rank1Seminorm(eta={self.eta.tolist()})"


class QuadraticSeminorm:
    """H(x) = |diag(alphas) R^T x| with R orthogonal and alphas >= 0.

    Stored in canonical form: alphas descending, each rotation column's
    largest-magnitude entry positive. The zero seminorm (all alphas zero)
    is representable.
    """

    __slots__ = ("rotation", "alphas")

    def __init__(self, rotation, alphas, tol: float = 1e-12):
        a = np.array(np.atleast_1d(alphas), dtype=float)
        if a.ndim != 1 or a.size < 1:
            raise InvalidSeminormError("alphas must be a one-dimensional vector")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise InvalidSeminormError("alphas must be nonnegative and finite")
        d = a.size
        R = np.eye(d) if rotation is None else np.array(rotation, dtype=float)
        if R.shape != (d, d):
            raise InvalidSeminormError("rotation must be a d x d matrix")
        if not np.all(np.isfinite(R)):
            raise InvalidSeminormError("rotation entries must be finite")
        if np.abs(R.T @ R - np.eye(d)).max() > tol:
            raise InvalidSeminormError("rotation must be orthogonal within 1e-12")
        order = np.argsort(-a, kind="stable")
        a = a[order]
        R = R[:, order]
        for j in range(d):
            k = int(np.argmax(np.abs(R[:, j])))
            if R[k, j] < 0:
                R[:, j] = -R[:, j]
        a.flags.writeable = False
        R.flags.writeable = False
        self.alphas = a
        self.rotation = R

    @classmethod
    def euclidean(cls, d: int) -> "QuadraticSeminorm":
        return cls(None, np.ones(d))

    @classmethod
    def from_gram(cls, Q) -> "QuadraticSeminorm":
        """Build from the Gram matrix Q of H^2 (symmetric positive semidefinite)."""
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise InvalidSeminormError("Gram matrix must be square")
        if np.abs(Q - Q.T).max() > 1e-10 * max(1.0, np.abs(Q).max()):
            raise InvalidSeminormError("Gram matrix must be symmetric")
        w, V = np.linalg.eigh(0.5 * (Q + Q.T))
        if w.min() < -1e-10 * max(1.0, abs(w.max())):
            raise InvalidSeminormError("Gram matrix must be positive semidefinite")
        return cls(V, np.sqrt(np.clip(w, 0.0, None)))

    @property
    def dimension(self) -> int:
        return self.alphas.size

    @property
    def operator_norm(self) -> float:
        return float(self.alphas[0])

    @property
    def kernel_codim(self) -> int:
        return int(np.count_nonzero(self.alphas > 0.0))

    @property
    def is_zero(self) -> bool:
        return self.kernel_codim == 0

    def gram(self) -> np.ndarray:
        R = self.rotation
        return R @ np.diag(self.alphas**2) @ R.T

    def evaluate(self, xi) -> float | np.ndarray:
        xi = np.asarray(xi, dtype=float)
        comp = (xi @ self.rotation) * self.alphas
        out = np.sqrt(np.sum(comp * comp, axis=-1))
        return float(out) if out.ndim == 0 else out

    def compose(self, A) -> "QuadraticSeminorm":
        """The seminorm x -> H(Ax), quadratic with Gram matrix A^T Q A."""
        A = _as_matrix(A, self.dimension)
        w, V = np.linalg.eigh(A.T @ self.gram() @ A)
        return QuadraticSeminorm(V, np.sqrt(np.clip(w, 0.0, None)))

    def normalized(self) -> "QuadraticSeminorm":
        n = self.operator_norm
        if n <= 0.0:
            raise InvalidSeminormError("cannot normalize zero")
        return QuadraticSeminorm(self.rotation, self.alphas / n)

    def scaled(self, t: float) -> "QuadraticSeminorm":
        if t <= 0:
            raise InvalidSeminormError("scale factor must be positive")
        return QuadraticSeminorm(self.rotation, t * self.alphas)

    def __call__(self, xi):
        return self.evaluate(xi)

    def __repr__(self):
        return f"QuadraticSeminorm(alphas={self.alphas.tolist()})"


Seminorm = Rank1Seminorm | QuadraticSeminorm


@dataclass(frozen=True)
class SeminormMeta:
    """Operator norm together with the codimension of the kernel."""

    operator_norm: float
    kernel_codim: int


def seminorm_meta(H) -> SeminormMeta:
    return SeminormMeta(operator_norm=H.operator_norm, kernel_codim=H.kernel_codim)


def evaluate(H, xi):
    return H.evaluate(xi)


def operator_norm(H) -> float:
    return H.operator_norm


def kernel_codim(H) -> int:
    return H.kernel_codim


def compose(H, A):
    return H.compose(A)


def normalize(H):
    return H.normalized()


def seminorm_from_json(obj):
    """Build a seminorm from its JSON dict form."""
    from .errors import InputError

    if not isinstance(obj, dict):
        raise InputError("seminorm JSON must be an object")
    kind = obj.get("kind")
    try:
        if kind == "rank1":
            return Rank1Seminorm(obj["eta"])
        if kind == "quadratic":
            return QuadraticSeminorm(obj.get("rotation"), obj["alphas"])
    except KeyError as exc:
        raise InputError(f"seminorm JSON is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad seminorm JSON: {exc}") from exc
    raise InputError(f"unknown seminorm kind {kind!r}")


def seminorm_to_json(H) -> dict:
    if isinstance(H, Rank1Seminorm):
        return {"kind": "rank1", "eta": H.eta.tolist()}
    if isinstance(H, QuadraticSeminorm):
        return {"kind": "quadratic", "alphas": H.alphas.tolist(), "rotation": H.rotation.tolist()}
    raise InvalidSeminormError(f"unknown seminorm type {type(H).__name__}")
