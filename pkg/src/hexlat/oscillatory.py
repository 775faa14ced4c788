"""Direct quadrature of the lattice kernel, and sup-norm decay series.

The integrand ``exp(-i t g(x) + i <l, x>)`` is smooth and 2π-periodic in both
variables, so the tensor rectangle rule on ``m × m`` nodes ``2πj/m`` converges
spectrally.  With ``m = N`` it is the same finite sum that the inverse DFT in
:func:`hexlat.propagator.kernel_fft` evaluates, which makes the two an
independent cross-check of one another.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .decay_fit import DecaySample, DecaySeries
from .errors import InsufficientResolutionError
from .propagator import kernel_fft, min_box_size
from .symbols import GRADIENT_BOUND, symbol_for

MIN_QUADRATURE_POINTS = 16
OVERSAMPLING = 4
# default largest FFT box used by decay_series before switching to quadrature
DEFAULT_FFT_BUDGET = 4096
SMALL_T_MARGIN = 40
_ROW_CHUNK_POINTS = 1 << 22


def nyquist_points(t: float, l) -> int:
    """Points per axis needed to resolve the kernel integrand at ``(l, t)``.

    ``4 * ceil((4|t| + max(|l1|, |l2|, |l1 + l2|)) / π)``, clamped below at 16.
    """
    l1, l2 = int(l[0]), int(l[1])
    fastest = 4.0 * abs(float(t)) + max(abs(l1), abs(l2), abs(l1 + l2))
    return max(MIN_QUADRATURE_POINTS, OVERSAMPLING * math.ceil(fastest / math.pi))


def default_points(t: float, l) -> int:
    """Points per axis used when the caller does not choose.

    The Nyquist policy has only about 27% headroom over the band edge
    ``4|t| + |l|``, which is too little below ``4|t| + |l| ≈ 150``: the
    Bessel-type tail of the integrand's Fourier coefficients is still above
    1e-10 there.  A fixed margin of 40 points covers that regime.
    """
    l1, l2 = int(l[0]), int(l[1])
    band = 4.0 * abs(float(t)) + max(abs(l1), abs(l2), abs(l1 + l2))
    return max(nyquist_points(t, l), OVERSAMPLING * math.ceil((band + SMALL_T_MARGIN) / OVERSAMPLING))


def kernel_quadrature(sym, l, t: float, m: int | None = None) -> complex:
    """``(2π)^{-2} ∫ exp(-i t g(x) + i <l, x>) dx`` by the ``m × m`` rectangle rule.

    ``m`` defaults to :func:`default_points`; anything below
    :func:`nyquist_points` is rejected.
    """
    sym = symbol_for(sym)
    l1, l2 = int(l[0]), int(l[1])
    need = nyquist_points(t, (l1, l2))
    if m is None:
        m = default_points(t, (l1, l2))
    if m < need:
        raise InsufficientResolutionError(f"m={m} below {need} required at t={t}, l={(l1, l2)}")
    t = float(t)

    ctab = np.cos(2.0 * np.pi * np.arange(m) / m)
    j2 = np.arange(m, dtype=np.int64)[None, :]
    rows = max(1, _ROW_CHUNK_POINTS // m)
    re_parts, im_parts = [], []
    for start in range(0, m, rows):
        j1 = np.arange(start, min(m, start + rows), dtype=np.int64)[:, None]
        g = np.zeros((j1.shape[0], m))
        for a, b in sym.lattice.half_offsets:
            g += 2.0 * (1.0 - ctab[(a * j1 + b * j2) % m])
        # <l, x> reduced modulo 2π exactly, through the integer node index
        phase = (2.0 * np.pi / m) * ((l1 * j1 + l2 * j2) % m) - t * g
        re_parts.append(np.cos(phase).sum())
        im_parts.append(np.sin(phase).sum())
    scale = 1.0 / (m * m)
    return complex(math.fsum(re_parts) * scale, math.fsum(im_parts) * scale)


def velocity_grid(k: int, radius: float = GRADIENT_BOUND + 1.0) -> np.ndarray:
    """``k × k`` uniform velocities on ``[-radius, radius]²`` clipped to the disc."""
    # symmetric integer construction keeps v = 0 exact for odd k
    axis = (np.arange(k) - (k - 1) / 2.0) * (2.0 * radius / max(k - 1, 1))
    v1, v2 = np.meshgrid(axis, axis, indexing="ij")
    inside = v1**2 + v2**2 <= radius**2 * (1 + 1e-12)
    return np.column_stack([v1[inside], v2[inside]])


def decay_series(
    sym,
    times,
    velocity_samples,
    fft_budget: int = DEFAULT_FFT_BUDGET,
    threads: int = 1,
    velocity_descriptor: str | None = None,
) -> DecaySeries:
    """Sup-norm of the kernel at each time.

    When the anti-aliased box fits in ``fft_budget`` the whole kernel is
    computed by FFT and the supremum is taken over every site of the box,
    which contains all ``round(t v)``.  Beyond the budget, the kernel is
    evaluated by quadrature at the distinct sites ``round(t v)`` only.
    """
    sym = symbol_for(sym)
    times = [float(t) for t in times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    if any(t < 0 for t in times):
        raise ValueError("times must be nonnegative")
    vel = np.asarray(velocity_samples, dtype=float).reshape(-1, 2)
    samples = []
    for t in times:
        n = min_box_size(t)
        if n <= fft_budget:
            k = kernel_fft(sym, n, t, workers=threads)
            value, where = k.sup()
            samples.append(DecaySample(t, value, where, "fft"))
            continue
        sites = sorted({(int(round(t * a)), int(round(t * b))) for a, b in vel})
        if not sites:
            raise ValueError("no velocity samples")
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            vals = list(pool.map(lambda l: abs(kernel_quadrature(sym, l, t)), sites))
        i = int(np.argmax(vals))
        samples.append(DecaySample(t, float(vals[i]), sites[i], "quadrature"))
    if velocity_descriptor is None:
        velocity_descriptor = f"{len(vel)} velocity samples"
    return DecaySeries(samples, sym.lattice.value, velocity_descriptor)
