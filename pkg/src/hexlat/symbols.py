"""Dispersion symbols of the lattice Laplacian and the phase functions built on them.

The Laplacian is ``(Δf)(u) = Σ_{v~u} (f(v) - f(u))`` with unit weights, whose
Fourier multiplier is ``-g(x)``.  Writing the neighbour offsets as ``±h`` for
``h`` in a half-set ``H``::

    g(x)      = Σ_{h∈H} 2 (1 - cos<h, x>)
    ∇g(x)     = Σ_{h∈H} 2 sin<h, x> h
    Hess g(x) = Σ_{h∈H} 2 cos<h, x> h hᵀ

All evaluators broadcast over numpy arrays: ``x`` may be a pair of scalars or
a pair of equally shaped arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# |∇g| ≤ 4√2 on the hexagonal lattice.
GRADIENT_BOUND = 4.0 * np.sqrt(2.0)


class LatticeKind(enum.Enum):
    HexTriangulation = "hex"
    SquareZ2 = "square"

    @classmethod
    def parse(cls, tag: "str | LatticeKind") -> "LatticeKind":
        if isinstance(tag, cls):
            return tag
        key = str(tag).strip().lower()
        aliases = {
            "hex": cls.HexTriangulation,
            "hextriangulation": cls.HexTriangulation,
            "triangular": cls.HexTriangulation,
            "square": cls.SquareZ2,
            "squarez2": cls.SquareZ2,
            "z2": cls.SquareZ2,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown lattice {tag!r}") from None

    @property
    def half_offsets(self) -> tuple[tuple[int, int], ...]:
        if self is LatticeKind.HexTriangulation:
            return ((1, 0), (0, 1), (1, 1))
        return ((1, 0), (0, 1))

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        """All neighbour offsets; every edge has weight one."""
        half = self.half_offsets
        return half + tuple((-a, -b) for a, b in half)

    @property
    def degree(self) -> int:
        return len(self.offsets)


def _split(x):
    x1, x2 = x
    return np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)


def _maybe_scalar(a):
    return a.item() if np.ndim(a) == 0 else a


@dataclass(frozen=True)
class DispersionSymbol:
    lattice: LatticeKind = LatticeKind.HexTriangulation

    def __post_init__(self):
        object.__setattr__(self, "lattice", LatticeKind.parse(self.lattice))

    @property
    def is_hex(self) -> bool:
        return self.lattice is LatticeKind.HexTriangulation

    def value(self, x):
        x1, x2 = _split(x)
        out = np.zeros(np.broadcast(x1, x2).shape)
        for a, b in self.lattice.half_offsets:
            out = out + 2.0 * (1.0 - np.cos(a * x1 + b * x2))
        return _maybe_scalar(out)

    def gradient(self, x):
        x1, x2 = _split(x)
        shape = np.broadcast(x1, x2).shape
        g1 = np.zeros(shape)
        g2 = np.zeros(shape)
        for a, b in self.lattice.half_offsets:
            s = 2.0 * np.sin(a * x1 + b * x2)
            g1 = g1 + a * s
            g2 = g2 + b * s
        return np.stack([g1, g2])

    def hessian(self, x):
        """Hessian as an array of shape ``(2, 2) + x1.shape``."""
        x1, x2 = _split(x)
        shape = np.broadcast(x1, x2).shape
        h = np.zeros((2, 2) + shape)
        for a, b in self.lattice.half_offsets:
            c = 2.0 * np.cos(a * x1 + b * x2)
            h[0, 0] = h[0, 0] + a * a * c
            h[0, 1] = h[0, 1] + a * b * c
            h[1, 1] = h[1, 1] + b * b * c
        h[1, 0] = h[0, 1]
        return h

    def hessian_determinant(self, x):
        h = self.hessian(x)
        return _maybe_scalar(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])

    def discriminant(self, x):
        """Reduced Hessian discriminant; ``det Hess g = 4 * discriminant``.

        Only defined for the hexagonal lattice, where it reads
        ``(cos x1 + cos x2) cos(x1 + x2) + cos x1 cos x2``.
        """
        if not self.is_hex:
            raise ValueError(
                "the reduced discriminant is defined for the hexagonal lattice; "
                "on Z^2 det Hess g = 4 cos x1 cos x2"
            )
        x1, x2 = _split(x)
        c1, c2 = np.cos(x1), np.cos(x2)
        return _maybe_scalar((c1 + c2) * np.cos(x1 + x2) + c1 * c2)


HEX = DispersionSymbol(LatticeKind.HexTriangulation)
SQUARE = DispersionSymbol(LatticeKind.SquareZ2)


def symbol_for(lattice) -> DispersionSymbol:
    if isinstance(lattice, DispersionSymbol):
        return lattice
    return DispersionSymbol(LatticeKind.parse(lattice))


def eval_symbol(sym: DispersionSymbol, x):
    return sym.value(x)


def grad_symbol(sym: DispersionSymbol, x):
    return sym.gradient(x)


def hessian_symbol(sym: DispersionSymbol, x):
    return sym.hessian(x)


def hessian_discriminant(sym: DispersionSymbol, x):
    return sym.discriminant(x)


@dataclass(frozen=True)
class PhaseFunction:
    """``φ(v, x) = g(x) - <v, x>``; its Hessian does not depend on ``v``."""

    symbol: DispersionSymbol
    velocity: tuple[float, float]

    def value(self, x):
        x1, x2 = _split(x)
        v1, v2 = self.velocity
        return self.symbol.value((x1, x2)) - v1 * x1 - v2 * x2

    def gradient(self, x):
        grad = self.symbol.gradient(x)
        v = np.asarray(self.velocity, dtype=float).reshape((2,) + (1,) * (grad.ndim - 1))
        return grad - v

    def hessian(self, x):
        return self.symbol.hessian(x)
