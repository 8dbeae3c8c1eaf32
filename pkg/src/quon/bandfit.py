"""Fit the quon-rotor parameters (A, q) to a rotational band.

For fixed ``q`` the energies are linear in ``A``, so ``A`` is profiled out in
closed form and only a one-dimensional search over ``q`` remains: a uniform
grid followed by golden-section refinement around the best grid point.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .models import rotor_shape

GRID_STEP = 1e-3
REFINE_TOL = 1e-8
BOUNDARY_TOL = 1e-6


class BandFormatError(ValueError):
    """Malformed or insufficient band data."""


class BoundaryWarning(UserWarning):
    """The best q sits on the edge of the search interval."""


@dataclass(frozen=True)
class BandData:
    """Levels ``(l, energy_kev)`` of one band, with optional weights."""

    l: tuple[int, ...]
    energy: tuple[float, ...]
    weight: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.l) != len(self.energy):
            raise BandFormatError("l and energy columns differ in length")
        if not self.weight:
            object.__setattr__(self, "weight", (1.0,) * len(self.l))
        elif len(self.weight) != len(self.l):
            raise BandFormatError("weight column has the wrong length")
        if any(w < 0 for w in self.weight):
            raise BandFormatError("weights must be non-negative")
        for a, b in zip(self.l, self.l[1:]):
            if b <= a:
                raise BandFormatError("l values must be strictly increasing")
        for l, e in zip(self.l, self.energy):
            if l < 0 or int(l) != l:
                raise BandFormatError(f"invalid angular momentum {l!r}")
            if l == 0 and e != 0:
                raise BandFormatError("the l=0 band head must have energy 0")
        if sum(1 for l in self.l if l > 0) < 2:
            raise BandFormatError("need at least two levels with l > 0 to fit A and q")

    @classmethod
    def from_levels(cls, levels: Iterable[Sequence[float]]) -> "BandData":
        rows = [tuple(r) for r in levels]
        l = tuple(int(r[0]) for r in rows)
        e = tuple(float(r[1]) for r in rows)
        w = tuple(float(r[2]) for r in rows) if rows and all(len(r) > 2 for r in rows) else ()
        return cls(l, e, w)

    def __len__(self) -> int:
        return len(self.l)


def parse_band_csv(text: str) -> BandData:
    """Parse ``l,energy_kev[,weight]`` CSV; ``#`` lines are comments.

    ``energy`` is accepted in place of ``energy_kev`` so rotor spectra
    written by the CLI can be fed straight back in.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise BandFormatError("no data in band file")
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    if header[:1] != ["l"] or header[1:2] not in (["energy_kev"], ["energy"]) or len(header) > 3 or (
            len(header) == 3 and header[2] != "weight"):
        raise BandFormatError(f"expected header l,energy_kev[,weight], got {','.join(header)}")
    rows = []
    for k, rec in enumerate(reader, start=2):
        if len(rec) != len(header):
            raise BandFormatError(f"row {k}: expected {len(header)} fields")
        try:
            l = float(rec[0])
            if not l.is_integer():
                raise BandFormatError(f"row {k}: l must be an integer")
            rows.append((int(l),) + tuple(float(x) for x in rec[1:]))
        except ValueError as exc:
            if isinstance(exc, BandFormatError):
                raise
            raise BandFormatError(f"row {k}: {exc}") from None
    return BandData.from_levels(rows)


def read_band(path: Union[str, Path]) -> BandData:
    return parse_band_csv(Path(path).read_text())


def format_band_csv(band: BandData, comment: str = "") -> str:
    buf = io.StringIO()
    for line in comment.splitlines():
        buf.write(f"# {line}\n")
    buf.write("l,energy_kev\n")
    for l, e in zip(band.l, band.energy):
        buf.write(f"{l},{e:.10g}\n")
    return buf.getvalue()


def _shapes(band: BandData, q) -> np.ndarray:
    return np.array([rotor_shape(l, q) for l in band.l])


def optimal_A_given_q(band: BandData, q: float) -> tuple[float, float]:
    """Weighted least-squares ``A`` at fixed ``q`` and the resulting SSE."""
    f = _shapes(band, q)
    e = np.asarray(band.energy)
    w = np.asarray(band.weight)
    denom = float(np.sum(w * f * f))
    if denom == 0.0:
        raise BandFormatError("no level with l > 0 carries weight")
    A = float(np.sum(w * f * e)) / denom
    sse = float(np.sum(w * (A * f - e) ** 2))
    return A, sse


def _sse_grid(band: BandData, qs: np.ndarray) -> np.ndarray:
    e = np.asarray(band.energy)[:, None]
    w = np.asarray(band.weight)[:, None]
    f = np.stack([rotor_shape(l, qs) for l in band.l])
    A = np.sum(w * f * e, axis=0) / np.sum(w * f * f, axis=0)
    return np.sum(w * (A * f - e) ** 2, axis=0)


@dataclass(frozen=True)
class FitResult:
    A: float
    q: float
    rms_residual: float
    per_level_residuals: tuple[float, ...]
    evaluations: int
    at_boundary: bool = False
    fitted: tuple[float, ...] = field(default=(), repr=False)


def fit_band(band: BandData, q_interval: tuple[float, float] = (0.0, 1.0),
             grid_step: float = GRID_STEP, tol: float = REFINE_TOL,
             threads: int = 1) -> FitResult:
    """Least-squares fit of ``E_l = A ([2l]/2)([2l]/2 + 1)``.

    The interval is open at the bottom and closed at the top; the default
    ``(0, 1]`` is the near-bosonic range.  The grid is evaluated in chunks
    (in parallel when ``threads > 1``) and its argmin, lowest q on ties, is
    refined by golden-section search.  A :class:`BoundaryWarning` is emitted
    when the optimum lands on an interval edge.
    """
    lo, hi = map(float, q_interval)
    if not -1.0 <= lo < hi <= 1.0:
        raise ValueError(f"q interval {q_interval} must satisfy -1 <= lo < hi <= 1")
    n_steps = max(1, int(round((hi - lo) / grid_step)))
    grid = lo + (hi - lo) * np.arange(1, n_steps + 1) / n_steps
    chunks = np.array_split(grid, max(1, threads))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _sse_grid(band, c), chunks))
    else:
        parts = [_sse_grid(band, c) for c in chunks]
    sse = np.concatenate(parts)
    evaluations = grid.size
    k = int(np.argmin(sse))
    a = grid[k - 1] if k > 0 else lo
    b = grid[k + 1] if k + 1 < grid.size else hi

    def objective(x: float) -> float:
        return optimal_A_given_q(band, x)[1]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = objective(c), objective(d)
    evaluations += 2
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = objective(d)
        evaluations += 1
    candidates = [(fc, c), (fd, d), (float(sse[k]), float(grid[k]))]
    if b >= hi:
        candidates.append((objective(hi), hi))
        evaluations += 1
    best_sse, best_q = min(candidates)
    A, _ = optimal_A_given_q(band, best_q)
    fitted = A * _shapes(band, best_q)
    resid = fitted - np.asarray(band.energy)
    at_boundary = bool(best_q >= hi - BOUNDARY_TOL or best_q <= lo + BOUNDARY_TOL)
    if at_boundary:
        warnings.warn(f"best q={best_q:.8g} lies on the edge of the search interval "
                      f"[{lo:g}, {hi:g}]", BoundaryWarning, stacklevel=2)
    return FitResult(
        A=A,
        q=float(best_q),
        rms_residual=float(math.sqrt(np.mean(resid ** 2))),
        per_level_residuals=tuple(float(r) for r in resid),
        evaluations=evaluations,
        at_boundary=at_boundary,
        fitted=tuple(float(x) for x in fitted),
    )


def synthetic_band(A: float, q: float, l_values: Iterable[int]) -> BandData:
    """Noiseless band from the quon-rotor formula."""
    ls = tuple(l_values)
    return BandData(ls, tuple(A * rotor_shape(l, q) for l in ls))


def rigid_refit(band: BandData) -> tuple[float, tuple[float, ...]]:
    """Best rigid-rotor (q = 1) inertia constant and its predicted energies."""
    A, _ = optimal_A_given_q(band, 1.0)
    return A, tuple(float(A * l * (l + 1)) for l in band.l)


def load_demo_band() -> BandData:
    """The bundled synthetic demonstration band."""
    return read_band(Path(__file__).with_name("data") / "synthetic_band.csv")


DEMO_A_KEV = 7.156
DEMO_Q = 0.99478
DEMO_L = tuple(range(0, 26, 2))
