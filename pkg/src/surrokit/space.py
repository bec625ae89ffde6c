"""Bounded, named parameter domains and their unit-hypercube normalization.

All modeling code in this package works in normalized coordinates on
[0, 1]^d; native units appear only at I/O boundaries (CSV files, the
simulator, reports). Distances and network inputs are scale-sensitive,
so the box mapping lives here and nowhere else.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OutOfBounds, OutOfUnitCube, check_format_version

# Relative slack accepted when checking native values against bounds.
BOUNDS_RTOL = 1e-12

FORMAT_VERSION = "1"


@dataclass(frozen=True)
class ParameterDef:
    """One named design/process variable with bounds and a nominal value."""

    name: str
    lower: float
    upper: float
    nominal: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"{self.name}: lower {self.lower} must be < upper {self.upper}")
        if not (self.lower <= self.nominal <= self.upper):
            raise ValueError(
                f"{self.name}: nominal {self.nominal} outside [{self.lower}, {self.upper}]"
            )


class ParameterSpace:
    """Ordered collection of :class:`ParameterDef` forming the design box.

    Immutable after construction; dimension order is the order of
    ``dims`` and is preserved by every serialization.
    """

    def __init__(self, dims):
        dims = tuple(dims)
        if not dims:
            raise ValueError("a parameter space needs at least one dimension")
        names = [p.name for p in dims]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        self.dims = dims
        self._lower = np.array([p.lower for p in dims], dtype=float)
        self._upper = np.array([p.upper for p in dims], dtype=float)
        self._nominal = np.array([p.nominal for p in dims], dtype=float)
        self._span = self._upper - self._lower

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.dims]

    @property
    def lower(self) -> np.ndarray:
        return self._lower.copy()

    @property
    def upper(self) -> np.ndarray:
        return self._upper.copy()

    @property
    def nominal(self) -> np.ndarray:
        return self._nominal.copy()

    def __len__(self) -> int:
        return len(self.dims)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParameterSpace) and self.dims == other.dims

    def _check_dim(self, x: np.ndarray):
        if x.ndim != 1 or x.shape[0] != self.d:
            raise DimensionMismatch(f"expected a length-{self.d} vector, got shape {x.shape}")

    def normalize(self, x) -> np.ndarray:
        """Map a native-units vector onto [0, 1]^d.

        Raises OutOfBounds if any component leaves its interval by more
        than a 1e-12 relative slack (values inside the slack are clipped
        onto the box edge).
        """
        x = np.asarray(x, dtype=float)
        self._check_dim(x)
        tol = BOUNDS_RTOL * np.maximum(np.abs(self._lower), np.abs(self._upper))
        low_bad = x < self._lower - tol
        high_bad = x > self._upper + tol
        if low_bad.any() or high_bad.any():
            i = int(np.argmax(low_bad | high_bad))
            raise OutOfBounds(self.dims[i].name, float(x[i]))
        u = (x - self._lower) / self._span
        return np.clip(u, 0.0, 1.0)

    def denormalize(self, u) -> np.ndarray:
        """Map a [0, 1]^d vector back to native units (inverse of normalize)."""
        u = np.asarray(u, dtype=float)
        self._check_dim(u)
        if (u < 0.0).any() or (u > 1.0).any():
            i = int(np.argmax((u < 0.0) | (u > 1.0)))
            raise OutOfUnitCube(f"component {i} = {u[i]!r} outside [0, 1]")
        return self._lower + u * self._span

    def normalize_many(self, X) -> np.ndarray:
        """Row-wise :meth:`normalize` for an (n, d) matrix."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise DimensionMismatch(f"expected (n, {self.d}) matrix, got shape {X.shape}")
        tol = BOUNDS_RTOL * np.maximum(np.abs(self._lower), np.abs(self._upper))
        bad = (X < self._lower - tol) | (X > self._upper + tol)
        if bad.any():
            i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
            raise OutOfBounds(self.dims[j].name, float(X[i, j]),
                              f"row {i}, dimension {self.dims[j].name}: "
                              f"value {X[i, j]!r} outside bounds")
        return np.clip((X - self._lower) / self._span, 0.0, 1.0)

    def denormalize_many(self, U) -> np.ndarray:
        """Row-wise :meth:`denormalize` for an (n, d) matrix."""
        U = np.asarray(U, dtype=float)
        if U.ndim != 2 or U.shape[1] != self.d:
            raise DimensionMismatch(f"expected (n, {self.d}) matrix, got shape {U.shape}")
        if (U < 0.0).any() or (U > 1.0).any():
            raise OutOfUnitCube("matrix has entries outside [0, 1]")
        return self._lower[None, :] + U * self._span[None, :]

    def contains(self, x) -> bool:
        """True when the native-units vector lies inside the box (with slack)."""
        x = np.asarray(x, dtype=float)
        self._check_dim(x)
        tol = BOUNDS_RTOL * np.maximum(np.abs(self._lower), np.abs(self._upper))
        return bool(((x >= self._lower - tol) & (x <= self._upper + tol)).all())

    def clip(self, X) -> np.ndarray:
        """Clamp native-units rows onto the box."""
        return np.clip(np.asarray(X, dtype=float), self._lower, self._upper)

    def fingerprint(self) -> str:
        """Stable 12-hex-digit identifier of the space definition."""
        payload = json.dumps(
            [[p.name, repr(p.lower), repr(p.upper), repr(p.nominal)] for p in self.dims]
        )
        return hashlib.sha256(payload.encode("ascii")).hexdigest()[:12]

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "parameters": [
                {"name": p.name, "lower": p.lower, "upper": p.upper, "nominal": p.nominal}
                for p in self.dims
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ParameterSpace":
        check_format_version(payload)
        params = payload["parameters"]
        return cls(
            ParameterDef(
                name=str(p["name"]),
                lower=float(p["lower"]),
                upper=float(p["upper"]),
                nominal=float(p["nominal"]),
            )
            for p in params
        )

    def save(self, path):
        with open(path, "w", encoding="ascii") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ParameterSpace":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_dict(json.load(fh))


def space_around_nominals(names, nominals, spread: float = 0.30) -> ParameterSpace:
    """Build a box of ``nominal*(1-spread) .. nominal*(1+spread)`` per dimension.

    The default 30% spread is three times the 10%-of-nominal process
    sigma used by the Monte Carlo module, so Gaussian draws rarely leave
    the box (out-of-box draws are clamped to the edge).
    """
    dims = []
    for name, nom in zip(names, nominals):
        lo, hi = nom * (1.0 - spread), nom * (1.0 + spread)
        if lo > hi:  # negative nominal flips the interval
            lo, hi = hi, lo
        dims.append(ParameterDef(name=name, lower=lo, upper=hi, nominal=nom))
    return ParameterSpace(dims)
