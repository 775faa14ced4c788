"""Exact linear evolution e^{itΔ} on an N×N periodic box.

In frequency space the free flow is the multiplier ``exp(-i t g(2πj/N))``;
everything here is one forward DFT, a pointwise product and one inverse DFT.
The lattice kernel ``K(l, t) = (2π)^{-2} ∫ e^{-itg(x) + i<l,x>} dx`` is the
evolution of a unit delta, normalised so that ``K(·, 0) = δ``.
"""

from __future__ import annotations

import csv
import math
import struct
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.fft

from .errors import BoxTooSmallError
from .symbols import GRADIENT_BOUND, DispersionSymbol, symbol_for

# anti-aliasing margin, in lattice sites, added to the light cone on each side
BOX_MARGIN = 64
BINARY_MAGIC = b"HEXLATWF"


def min_box_size(t: float) -> int:
    """Smallest power of two ``N >= 2 ((4√2 + 1)|t| + 64)``."""
    need = 2.0 * ((GRADIENT_BOUND + 1.0) * abs(float(t)) + BOX_MARGIN)
    return 1 << max(0, math.ceil(math.log2(need)))


@dataclass
class WaveField:
    """Complex amplitudes on an ``n × n`` periodic box.

    ``data[i, j]`` holds the amplitude at lattice site
    ``((i - origin[0]) mod n, (j - origin[1]) mod n)``, with residues taken in
    ``[-n/2, n/2)``.
    """

    n: int
    data: np.ndarray
    origin: tuple[int, int] = (0, 0)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.shape != (self.n, self.n):
            raise ValueError(f"data has shape {self.data.shape}, expected {(self.n, self.n)}")
        if self.n < 1:
            raise ValueError("empty field")
        self.origin = (int(self.origin[0]) % self.n, int(self.origin[1]) % self.n)

    @classmethod
    def zeros(cls, n: int, origin=(0, 0)) -> "WaveField":
        return cls(n, np.zeros((n, n), dtype=np.complex128), origin)

    @classmethod
    def delta(cls, n: int, amplitude: complex = 1.0, site=(0, 0), origin=(0, 0)) -> "WaveField":
        f = cls.zeros(n, origin)
        f[site] = amplitude
        return f

    def index(self, site) -> tuple[int, int]:
        return ((int(site[0]) + self.origin[0]) % self.n, (int(site[1]) + self.origin[1]) % self.n)

    def __getitem__(self, site) -> complex:
        return complex(self.data[self.index(site)])

    def __setitem__(self, site, value) -> None:
        self.data[self.index(site)] = value

    def copy(self) -> "WaveField":
        return WaveField(self.n, self.data.copy(), self.origin)

    def with_data(self, data) -> "WaveField":
        return WaveField(self.n, data, self.origin)

    def site_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Lattice coordinates of every array cell, residues in ``[-n/2, n/2)``."""
        idx = np.arange(self.n)
        half = self.n // 2
        l1 = (idx - self.origin[0] + half) % self.n - half
        l2 = (idx - self.origin[1] + half) % self.n - half
        return np.meshgrid(l1, l2, indexing="ij")

    def lp_norm(self, r: float) -> float:
        a = np.abs(self.data)
        if math.isinf(r):
            return float(a.max())
        return float(np.sum(a**r) ** (1.0 / r))

    def norm(self) -> float:
        return self.lp_norm(2.0)

    def mass(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))

    # -- export -----------------------------------------------------------

    def to_csv(self, path, threshold: float = 0.0) -> None:
        """Write ``l1, l2, re, im`` rows; sites with ``|u| <= threshold`` are skipped."""
        l1, l2 = self.site_coords()
        order = np.lexsort((l2.ravel(), l1.ravel()))
        vals = self.data.ravel()[order]
        a1, a2 = l1.ravel()[order], l2.ravel()[order]
        keep = np.abs(vals) > threshold if threshold > 0 else np.ones(vals.shape, bool)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["l1", "l2", "re", "im"])
            for i, j, z in zip(a1[keep], a2[keep], vals[keep]):
                w.writerow([int(i), int(j), f"{z.real:.17g}", f"{z.imag:.17g}"])

    def to_bytes(self) -> bytes:
        # header: 8-byte magic + little-endian uint64 N; body: row-major complex128,
        # rolled so that site (0, 0) sits at array index (0, 0)
        body = np.roll(self.data, (-self.origin[0], -self.origin[1]), axis=(0, 1))
        return BINARY_MAGIC + struct.pack("<Q", self.n) + body.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "WaveField":
        if blob[:8] != BINARY_MAGIC:
            raise ValueError("not a hexlat wave-field dump")
        (n,) = struct.unpack("<Q", blob[8:16])
        data = np.frombuffer(blob[16:], dtype="<c16")
        if data.size != n * n:
            raise ValueError(f"truncated dump: {data.size} values for N={n}")
        return cls(n, data.reshape(n, n).astype(np.complex128))

    def dump(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "WaveField":
        return cls.from_bytes(Path(path).read_bytes())


@lru_cache(maxsize=16)
def _symbol_grid(sym: DispersionSymbol, n: int) -> np.ndarray:
    k = 2.0 * np.pi * np.arange(n) / n
    grid = sym.value(np.meshgrid(k, k, indexing="ij"))
    grid.setflags(write=False)
    return grid


def free_multiplier(sym: DispersionSymbol, n: int, t: float) -> np.ndarray:
    return np.exp(-1j * float(t) * _symbol_grid(sym, n))


def propagate_linear(field: WaveField, sym, t: float, workers: int = 1) -> WaveField:
    """Return ``e^{itΔ}`` applied to ``field``."""
    sym = symbol_for(sym)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    if t == 0:
        return field.copy()
    spec = scipy.fft.fft2(field.data, workers=workers)
    spec *= free_multiplier(sym, field.n, t)
    return field.with_data(scipy.fft.ifft2(spec, workers=workers))


@dataclass
class KernelMap(Mapping):
    """``K(l, t)`` for ``|l|_∞ <= n/2 - 1``, read-only mapping keyed by site."""

    t: float
    n: int
    array: np.ndarray = field(repr=False)

    @property
    def radius(self) -> int:
        return self.n // 2 - 1

    def __getitem__(self, l) -> complex:
        l1, l2 = int(l[0]), int(l[1])
        if max(abs(l1), abs(l2)) > self.radius:
            raise KeyError(l)
        return complex(self.array[l1 % self.n, l2 % self.n])

    def __iter__(self):
        r = self.radius
        for l1 in range(-r, r + 1):
            for l2 in range(-r, r + 1):
                yield (l1, l2)

    def __len__(self) -> int:
        return (2 * self.radius + 1) ** 2

    def centered(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Values with coordinates, restricted to ``|l|_∞ <= radius``."""
        r = self.radius
        idx = np.arange(-r, r + 1)
        vals = self.array[np.ix_(idx % self.n, idx % self.n)]
        l1, l2 = np.meshgrid(idx, idx, indexing="ij")
        return l1, l2, vals

    def sup(self) -> tuple[float, tuple[int, int]]:
        """Largest ``|K(l, t)|`` and the first site (row-major) attaining it."""
        l1, l2, vals = self.centered()
        a = np.abs(vals)
        i = int(np.argmax(a))
        return float(a.ravel()[i]), (int(l1.ravel()[i]), int(l2.ravel()[i]))

    def total_mass(self) -> float:
        return float(np.sum(np.abs(self.centered()[2]) ** 2))


def kernel_fft(sym, n: int, t: float, workers: int = 1) -> KernelMap:
    """Evolve a unit delta for time ``t`` on an ``n × n`` box."""
    sym = symbol_for(sym)
    need = min_box_size(t)
    if n < need:
        raise BoxTooSmallError(f"box {n} < {need} required at t={t}")
    arr = scipy.fft.ifft2(free_multiplier(sym, n, t), workers=workers)
    return KernelMap(float(t), int(n), arr)
