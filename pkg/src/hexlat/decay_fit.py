"""Power-law fits of decay series, Strichartz space-time norms and admissible pairs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWindowError, ZeroValueError

MIN_WINDOW_SAMPLES = 8
FIT_METHODS = ("direct", "dyadic_envelope")


@dataclass(frozen=True)
class DecaySample:
    t: float
    value: float
    argmax: tuple[int, int] = (0, 0)
    backend: str = "synthetic"


@dataclass
class DecaySeries:
    samples: list[DecaySample]
    lattice: str = "hex"
    velocity_sampling: str = ""

    def __post_init__(self):
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("decay series times must be strictly increasing")
        if any(s.value < 0 or not math.isfinite(s.value) for s in self.samples):
            raise ValueError("decay series values must be finite and nonnegative")

    @classmethod
    def from_arrays(cls, times, values, lattice="hex", velocity_sampling="synthetic"):
        return cls(
            [DecaySample(float(t), float(v)) for t, v in zip(times, values)],
            lattice,
            velocity_sampling,
        )

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "sup_abs", "argmax_l1", "argmax_l2", "backend"])
            for s in self.samples:
                w.writerow([f"{s.t:.17g}", f"{s.value:.17g}", s.argmax[0], s.argmax[1], s.backend])


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    method: str
    n_samples: int
    points: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "method": self.method,
            "n_samples": self.n_samples,
        }


def dyadic_envelope(times, values):
    """Keep the largest value inside each dyadic block ``[2^k, 2^{k+1})``."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    blocks = np.floor(np.log2(times)).astype(int)
    keep_t, keep_v = [], []
    for b in np.unique(blocks):
        sel = np.flatnonzero(blocks == b)
        i = sel[np.argmax(values[sel])]
        keep_t.append(times[i])
        keep_v.append(values[i])
    return np.array(keep_t), np.array(keep_v)


def _line_fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), min(1.0, max(0.0, r2))


def fit_power_law(series: DecaySeries, window=None, method: str = "dyadic_envelope") -> PowerLawFit:
    """Least-squares line through ``(log t, log value)`` inside ``window``."""
    if method not in FIT_METHODS:
        raise ValueError(f"unknown fit method {method!r}")
    t, v = series.times, series.values
    if window is None:
        window = (float(t.min()), float(t.max())) if t.size else (0.0, 0.0)
    lo, hi = float(window[0]), float(window[1])
    sel = (t >= lo) & (t <= hi)
    t, v = t[sel], v[sel]
    if t.size < MIN_WINDOW_SAMPLES:
        raise DegenerateWindowError(
            f"{t.size} samples in [{lo}, {hi}], need at least {MIN_WINDOW_SAMPLES}"
        )
    if np.any(v <= 0) or np.any(t <= 0):
        raise ZeroValueError("log-log fit needs strictly positive times and values")
    if method == "dyadic_envelope":
        t, v = dyadic_envelope(t, v)
        if t.size < 2:
            raise DegenerateWindowError("window spans fewer than two dyadic blocks")
    slope, intercept, r2 = _line_fit(np.log(t), np.log(v))
    return PowerLawFit(
        slope,
        intercept,
        r2,
        (lo, hi),
        method,
        int(sel.sum()),
        tuple(zip(t.tolist(), v.tolist())),
    )


def _field_values(u) -> np.ndarray:
    return np.asarray(getattr(u, "data", u))


def lr_norm(u, r: float) -> float:
    a = np.abs(_field_values(u))
    if math.isinf(r):
        return float(a.max())
    return float(np.sum(a**r) ** (1.0 / r))


def strichartz_norm(trajectory, q: float, r: float) -> float:
    """``‖u‖_{L^q_t l^r}`` over the sampled trajectory.

    ``trajectory`` is an iterable of ``(t, field)`` pairs with increasing
    ``t``; it is consumed once, so a generator keeps memory at one field.  The
    time integral is the composite trapezoid rule on those samples.
    """
    if r < 1 or (not math.isinf(q) and q < 1):
        raise ValueError("need r >= 1 and q >= 1")
    ts, norms = [], []
    for t, u in trajectory:
        t = float(t)
        if ts and t <= ts[-1]:
            raise ValueError("trajectory times must be increasing")
        ts.append(t)
        norms.append(lr_norm(u, r))
    if not ts:
        raise ValueError("empty trajectory")
    norms = np.array(norms)
    if math.isinf(q):
        return float(norms.max())
    if len(ts) == 1:
        return 0.0
    return float(np.trapezoid(norms**q, np.array(ts)) ** (1.0 / q))


def is_admissible(q: float, r: float, sigma: float, tol: float = 1e-12) -> bool:
    """True iff ``2 <= q, r <= ∞``, ``1/q + σ/r = σ/2`` and ``(q, r, σ) != (2, ∞, 1)``."""
    if not (q >= 2 and r >= 2 and sigma > 0):
        return False
    if q == 2 and math.isinf(r) and sigma == 1:
        return False
    return abs(1.0 / q + sigma / r - sigma / 2.0) <= tol


@dataclass(frozen=True)
class AdmissiblePair:
    q: float
    r: float
    sigma: float = 0.75

    def __post_init__(self):
        if not is_admissible(self.q, self.r, self.sigma):
            raise ValueError(f"(q, r, sigma) = {(self.q, self.r, self.sigma)} is not admissible")

    @classmethod
    def from_r(cls, r: float, sigma: float = 0.75) -> "AdmissiblePair":
        """The admissible partner ``q`` of a given ``r``."""
        inv_q = sigma / 2.0 - sigma / r
        return cls(math.inf if inv_q == 0 else 1.0 / inv_q, r, sigma)
