"""Discrete NLS ``i u_t + Δu + |u|^{2σ} u = 0`` on the periodic box.

Time stepping is Strang splitting: the pointwise flow of ``i u_t = -|u|^{2σ} u``
is ``u exp(i t |u|^{2σ})`` exactly, and the linear flow is the exact Fourier
multiplier, so both substeps preserve the ℓ² norm to roundoff.
:func:`duhamel_picard` iterates the integral form on a time grid and serves as
an independent check at short times.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .errors import BoxTooSmallError, DivergedError
from .propagator import WaveField, free_multiplier, min_box_size
from .symbols import symbol_for


def _rotate(data: np.ndarray, tau: float, sigma_pow: float) -> np.ndarray:
    mod2 = data.real**2 + data.imag**2
    return data * np.exp(1j * tau * mod2**sigma_pow)


def step_strang(field: WaveField, sym, dt: float, sigma_pow: float = 2.0, linear: bool = True, workers: int = 1) -> WaveField:
    """One Strang step: half nonlinear rotation, full linear flow, half rotation."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    sym = symbol_for(sym)
    data = _rotate(field.data, dt / 2.0, sigma_pow)
    if linear:
        spec = scipy.fft.fft2(data, workers=workers)
        spec *= free_multiplier(sym, field.n, dt)
        data = scipy.fft.ifft2(spec, workers=workers)
    return field.with_data(_rotate(data, dt / 2.0, sigma_pow))


@dataclass
class Diagnostics:
    t: float
    mass: float
    linf: float
    l4: float
    l6: float
    strichartz_partial: float


@dataclass
class Trajectory:
    """Snapshots ``(t, field)`` and their diagnostics.

    Iterating yields the ``(t, field)`` pairs, so a trajectory can be passed
    directly to :func:`hexlat.decay_fit.strichartz_norm`.  Fields are only kept
    when the run asked for them.
    """

    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    q: float = 4.0
    r: float = 6.0

    def __iter__(self):
        return iter(self.snapshots)

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    @property
    def times(self) -> np.ndarray:
        return np.array([d.t for d in self.diagnostics])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(d, name) for d in self.diagnostics])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "mass", "linf", "l4", "l6", "strichartz_partial"])
            for d in self.diagnostics:
                w.writerow([f"{v:.17g}" for v in (d.t, d.mass, d.linf, d.l4, d.l6, d.strichartz_partial)])


def _norms(data: np.ndarray):
    a2 = data.real**2 + data.imag**2
    return (
        float(a2.sum()),
        float(math.sqrt(a2.max())),
        float(np.sum(a2**2) ** 0.25),
        float(np.sum(a2**3) ** (1.0 / 6.0)),
    )


def evolve_dnls(
    psi: WaveField,
    sym,
    T: float,
    dt: float,
    sigma_pow: float = 2.0,
    snapshot_every: float | None = None,
    keep_fields: bool = True,
    linear: bool = True,
    workers: int = 1,
    q: float = 4.0,
    r: float = 6.0,
) -> Trajectory:
    """Strang time stepping from ``psi`` to time ``T``.

    Snapshots are taken at ``t = 0`` and every ``snapshot_every`` (default
    ``T``).  Each snapshot records mass, the ℓ^∞, ℓ⁴ and ℓ⁶ norms, and the
    running ``L^q_t l^r`` norm on the snapshot grid.
    """
    sym = symbol_for(sym)
    if dt <= 0 or T < 0:
        raise ValueError("need dt > 0 and T >= 0")
    need = min_box_size(T)
    if psi.n < need:
        raise BoxTooSmallError(f"box {psi.n} < {need} required up to T={T}")
    every = float(T if snapshot_every is None else snapshot_every)
    per = round(every / dt) if every > 0 else 0
    if every > 0 and (per < 1 or abs(per * dt - every) > 1e-9 * max(1.0, every)):
        raise ValueError(f"dt={dt} does not divide the snapshot interval {every}")
    n_steps = round(T / dt)
    if abs(n_steps * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"dt={dt} does not divide T={T}")

    traj = Trajectory(q=q, r=r)
    acc = 0.0
    prev = None

    def record(t, data):
        nonlocal acc, prev
        mass, linf, l4, l6 = _norms(data)
        lr = {math.inf: linf, 4.0: l4, 6.0: l6, 2.0: math.sqrt(mass)}.get(
            r, float(np.sum(np.abs(data) ** r) ** (1 / r))
        )
        if prev is not None:
            t0, v0 = prev
            acc += 0.5 * (t - t0) * (v0**q + lr**q)
        prev = (t, lr)
        traj.diagnostics.append(Diagnostics(t, mass, linf, l4, l6, acc ** (1.0 / q)))
        if keep_fields:
            traj.snapshots.append((t, WaveField(psi.n, data.copy(), psi.origin)))

    data = psi.data.copy()
    record(0.0, data)
    mult = free_multiplier(sym, psi.n, dt) if linear else None
    half = dt / 2.0
    # consecutive half rotations merge into one full rotation (|u| is unchanged)
    data = _rotate(data, half, sigma_pow)
    for k in range(1, n_steps + 1):
        if linear:
            spec = scipy.fft.fft2(data, workers=workers)
            spec *= mult
            data = scipy.fft.ifft2(spec, workers=workers)
        snap = per > 0 and k % per == 0
        if snap or k == n_steps:
            data = _rotate(data, half, sigma_pow)
            if snap:
                record(k * dt, data)
            if k < n_steps:
                data = _rotate(data, half, sigma_pow)
        else:
            data = _rotate(data, dt, sigma_pow)
    if traj.diagnostics[-1].t != n_steps * dt and n_steps > 0:
        record(n_steps * dt, data)
    return traj


def duhamel_picard(
    psi: WaveField,
    sym,
    T: float,
    iterations: int = 8,
    sigma_pow: float = 2.0,
    n_time: int = 64,
    workers: int = 1,
    return_history: bool = False,
):
    """Fixed-point iteration of the Duhamel map

    ``L(u)(t) = e^{itΔ} ψ + i ∫_0^t e^{i(t-s)Δ} |u|^{2σ} u(s) ds``

    on ``n_time`` equal time steps with the trapezoid rule in ``s``.  Returns
    the final iterate at ``T`` (and the successive-difference history when
    ``return_history``).  Raises :class:`DivergedError` if the sup-in-time ℓ²
    distance between successive iterates grows.
    """
    sym = symbol_for(sym)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if T < 0:
        raise ValueError("T must be nonnegative")
    n = psi.n
    ts = np.linspace(0.0, T, n_time + 1)
    h = T / n_time
    gridg = sym.value(np.meshgrid(*(2 * (2.0 * np.pi * np.arange(n) / n,)), indexing="ij"))
    psi_hat = scipy.fft.fft2(psi.data, workers=workers)

    def free(t):
        return np.exp(-1j * t * gridg)

    # u^(0): free evolution on the time grid, kept in physical space
    u = [scipy.fft.ifft2(free(t) * psi_hat, workers=workers) for t in ts]
    floor = 1e-14 * max(1.0, float(np.linalg.norm(psi.data)))
    history = []
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(iterations):
            acc = np.zeros_like(psi_hat)
            prev_w = None
            new = []
            for k, t in enumerate(ts):
                nl = (np.abs(u[k]) ** (2 * sigma_pow)) * u[k]
                w = np.exp(1j * t * gridg) * scipy.fft.fft2(nl, workers=workers)
                if prev_w is not None:
                    acc = acc + 0.5 * h * (prev_w + w)
                prev_w = w
                new.append(scipy.fft.ifft2(free(t) * (psi_hat + 1j * acc), workers=workers))
            diff = max(float(np.linalg.norm(a - b)) for a, b in zip(new, u))
            u = new
            if not math.isfinite(diff) or (history and diff > history[-1] and diff > floor):
                history.append(diff)
                raise DivergedError(f"Picard iterates diverged: successive distances {history}")
            history.append(diff)
            if diff <= floor:
                break
    out = WaveField(n, u[-1], psi.origin)
    return (out, history) if return_history else out


def strichartz_constant(psi: WaveField, sym, T: float, dt: float, q: float = 4.0, r: float = 6.0, workers: int = 1) -> float:
    """Empirical ``‖e^{itΔ}ψ‖_{L^q l^r([0,T])} / ‖ψ‖₂`` on the snapshot grid ``dt``."""
    from .propagator import propagate_linear

    ts = np.arange(0.0, T + 0.5 * dt, dt)
    norms = []
    for t in ts:
        data = propagate_linear(psi, sym, float(t), workers=workers).data
        a = np.abs(data)
        norms.append(float(a.max()) if math.isinf(r) else float(np.sum(a**r) ** (1.0 / r)))
    norms = np.array(norms)
    total = float(norms.max()) if math.isinf(q) else float(np.trapezoid(norms**q, ts) ** (1.0 / q))
    return total / psi.norm()
