"""Random Latin Hypercube sampling and the sample-set container.

The sampler is the stratified "random LHS" variant: each dimension is
cut into n equal intervals, every interval receives exactly one point,
and the point sits at a uniform-random offset inside its interval.

RNG consumption order is part of the contract so results are
reproducible: for each dimension in order, one permutation of
``range(n)`` is drawn first, then the n in-cell offsets for that
dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    LengthMismatch,
    MalformedCSV,
    NonNumericCell,
    UnknownColumn,
    ZeroSamples,
)
from .space import ParameterSpace


@dataclass
class SampleSet:
    """A design matrix in normalized coordinates plus response columns.

    ``inputs`` is (n, d) with every entry in [0, 1]; ``responses`` maps a
    figure-of-merit name to a length-n vector in that FoM's native units.
    """

    inputs: np.ndarray
    responses: dict[str, np.ndarray] = field(default_factory=dict)
    seed: int | None = None
    space_ref: str = ""

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        if self.inputs.ndim != 2:
            raise ValueError(f"inputs must be 2-D, got shape {self.inputs.shape}")
        if self.inputs.shape[0] < 1:
            raise ZeroSamples("a sample set needs at least one row")
        if (self.inputs < 0.0).any() or (self.inputs > 1.0).any():
            raise ValueError("inputs must be normalized to [0, 1]")
        clean = {}
        for name, vec in self.responses.items():
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (self.n,):
                raise LengthMismatch(
                    f"response {name!r} has length {vec.shape}, expected ({self.n},)"
                )
            clean[name] = vec
        self.responses = clean

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]

    @property
    def fom_names(self) -> list[str]:
        return list(self.responses.keys())

    def with_responses(self, responses: dict[str, np.ndarray]) -> "SampleSet":
        """Copy of this set with the given response columns attached."""
        return SampleSet(
            inputs=self.inputs.copy(),
            responses={k: np.asarray(v, dtype=float).copy() for k, v in responses.items()},
            seed=self.seed,
            space_ref=self.space_ref,
        )

    def subset(self, idx) -> "SampleSet":
        """Row subset (keeps every response column)."""
        idx = np.asarray(idx, dtype=int)
        return SampleSet(
            inputs=self.inputs[idx].copy(),
            responses={k: v[idx].copy() for k, v in self.responses.items()},
            seed=self.seed,
            space_ref=self.space_ref,
        )


def lhs_sample(space: ParameterSpace, n: int, seed: int) -> SampleSet:
    """Draw an n-point random Latin Hypercube design over the unit cube.

    For every dimension j the values ``(perm_j + jitter_j) / n`` place
    exactly one point in each interval [k/n, (k+1)/n). Fixed
    ``(space, n, seed)`` always yields the bit-identical matrix.
    """
    if n < 1:
        raise ZeroSamples(f"n must be >= 1, got {n}")
    d = space.d
    rng = np.random.default_rng(seed)
    u = np.empty((n, d), dtype=float)
    for j in range(d):
        perm = rng.permutation(n)
        jitter = rng.random(n)
        u[:, j] = (perm + jitter) / n
    return SampleSet(inputs=u, seed=seed, space_ref=space.fingerprint())


def stratification_counts(inputs: np.ndarray) -> np.ndarray:
    """Per-dimension bin occupancy: entry [k, j] counts points of column j
    whose value falls in [k/n, (k+1)/n). A valid LHS design is all ones."""
    inputs = np.asarray(inputs, dtype=float)
    n, d = inputs.shape
    counts = np.zeros((n, d), dtype=int)
    bins = np.minimum((inputs * n).astype(int), n - 1)
    for j in range(d):
        for k in bins[:, j]:
            counts[k, j] += 1
    return counts


# ---------------------------------------------------------------------------
# CSV exchange format: header `p01,...,p21[,FoM...]`, one row per sample,
# inputs serialized in native units for human inspection. 17 significant
# digits so every float round-trips exactly.
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def save_samples(samples: SampleSet, path, space: ParameterSpace) -> None:
    """Write a sample set as CSV with denormalized (native-units) inputs."""
    X = space.denormalize_many(samples.inputs)
    foms = samples.fom_names
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(space.names + foms) + "\n")
        for i in range(samples.n):
            row = [_fmt(v) for v in X[i]]
            row += [_fmt(samples.responses[f][i]) for f in foms]
            fh.write(",".join(row) + "\n")


def load_samples(path, space: ParameterSpace, fom_names=None) -> SampleSet:
    """Read a CSV sample file back into normalized coordinates.

    Columns are matched by name, so a permuted header still loads into
    the space's canonical dimension order. Header columns that are
    neither parameters nor (when given) members of ``fom_names`` raise
    UnknownColumn; every parameter of the space must be present.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n").rstrip("\r") for ln in fh]
    lines = [ln for ln in lines if ln.strip() != ""]
    if not lines:
        raise MalformedCSV(1, "empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if len(set(header)) != len(header):
        raise MalformedCSV(1, "duplicate header columns")

    param_cols = {}
    response_cols = {}
    for pos, name in enumerate(header):
        if name in space.names:
            param_cols[name] = pos
        elif fom_names is not None and name not in fom_names:
            raise UnknownColumn(f"column {name!r} is neither a parameter nor a known FoM")
        else:
            response_cols[name] = pos
    missing = [name for name in space.names if name not in param_cols]
    if missing:
        raise MalformedCSV(1, f"missing parameter columns {missing}")

    data_lines = lines[1:]
    if not data_lines:
        raise MalformedCSV(2, "no data rows")

    n = len(data_lines)
    X = np.empty((n, space.d), dtype=float)
    resp = {name: np.empty(n, dtype=float) for name in response_cols}
    for i, ln in enumerate(data_lines):
        cells = ln.split(",")
        if len(cells) != len(header):
            raise MalformedCSV(i + 2, f"expected {len(header)} cells, got {len(cells)}")

        def parse(pos, col):
            try:
                return float(cells[pos])
            except ValueError:
                raise NonNumericCell(i + 2, col) from None

        for j, name in enumerate(space.names):
            X[i, j] = parse(param_cols[name], name)
        for name, pos in response_cols.items():
            resp[name][i] = parse(pos, name)

    return SampleSet(
        inputs=space.normalize_many(X),
        responses=resp,
        space_ref=space.fingerprint(),
    )
