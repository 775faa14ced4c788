"""Critical points of ``φ(v, x) = g(x) - <v, x>`` on the hexagonal lattice.

Covers multistart Newton root finding for ``∇g(x) = v``, classification of
degenerate critical points into the normal forms

    Normal1:  a20 u1² + a12 u1 u2² + a04 u2⁴   (exponent -3/4)
    Normal2:  b20 u1² + b03 u2³               (exponent -5/6)

through the case split A–D on ``λ = -cos x2 / cos x1``, zero-set extraction
for the degeneracy curves Σ0, Σ1² and Σ2', and a floating-point certification
of where Σ1² and Σ2' meet.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CertificationFailedError, UnclassifiedSingularityError
from .newton_poly import TaylorSupport, check_r_nondegenerate_quartic
from .symbols import GRADIENT_BOUND, HEX, DispersionSymbol

TWO_PI = 2.0 * np.pi
DEGENERACY_TOL = 1e-8
COEFF_TOL = 1e-8
NEWTON_TOL = 1e-12
ACCEPT_TOL = 1e-10
MAX_NEWTON_ITER = 50
DEDUP_TOL = 1e-6
CURVE_TOL = 1e-6
DEGENERATE_MERGE = 1e-4
DEGENERATE_DISC = 1e-6

HALF_PERIOD_POINTS = (
    (np.pi / 2, np.pi / 2),
    (np.pi / 2, 3 * np.pi / 2),
    (3 * np.pi / 2, np.pi / 2),
    (3 * np.pi / 2, 3 * np.pi / 2),
)

MORSE_PAIR = (Fraction(-1), 0)
NORMAL1_PAIR = (Fraction(-3, 4), 0)
NORMAL2_PAIR = (Fraction(-5, 6), 0)


class CaseLabel(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    Nondegenerate = "Nondegenerate"


class NormalForm(str, enum.Enum):
    Normal1 = "Normal1"
    Normal2 = "Normal2"
    Morse = "Morse"


@dataclass(frozen=True)
class CriticalPoint:
    v: tuple[float, float]
    x: tuple[float, float]
    grad_norm: float
    discriminant: float


@dataclass
class SingularityReport:
    point: CriticalPoint
    lam: float | None
    case_label: CaseLabel
    normal_form: NormalForm | None
    coeffs: dict
    exponent_pair: tuple[Fraction, int] | None
    swapped: bool = False
    derived_by_analogy: bool = False
    quadratic_residual: float = 0.0

    @property
    def support(self) -> TaylorSupport:
        """Principal quasi-homogeneous part as a Taylor support."""
        c = self.coeffs
        if self.normal_form is NormalForm.Normal1:
            return TaylorSupport({(2, 0): c["a20"], (1, 2): c["a12"], (0, 4): c["a04"]})
        if self.normal_form is NormalForm.Normal2:
            return TaylorSupport({(2, 0): c["b20"], (0, 3): c["b03"]})
        return TaylorSupport({(2, 0): c["h1"], (0, 2): c["h2"]})

    def to_dict(self) -> dict:
        pair = self.exponent_pair
        return {
            "v": list(self.point.v),
            "x": list(self.point.x),
            "grad_norm": self.point.grad_norm,
            "discriminant": self.point.discriminant,
            "lambda": self.lam,
            "case": self.case_label.value,
            "normal_form": self.normal_form.value if self.normal_form else None,
            "coeffs": dict(sorted(self.coeffs.items())),
            "exponent_pair": None if pair is None else [str(pair[0]), pair[1]],
            "swapped": self.swapped,
            "derived_by_analogy": self.derived_by_analogy,
        }


# ---------------------------------------------------------------------------
# root finding


def _wrap(x):
    x = np.mod(x, TWO_PI)
    return np.where(x >= TWO_PI - 1e-12, 0.0, x)


def _periodic_dist(a, b) -> float:
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    d = np.minimum(d, TWO_PI - d)
    return float(np.hypot(d[0], d[1]))


def _newton(sym: DispersionSymbol, v, seeds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised Newton on ``∇g(x) = v`` from seeds of shape ``(2, S)``."""
    x = np.array(seeds, dtype=float, copy=True)
    v = np.asarray(v, dtype=float).reshape(2, 1)
    active = np.ones(x.shape[1], dtype=bool)
    for _ in range(MAX_NEWTON_ITER):
        r = sym.gradient(x) - v
        active &= np.hypot(r[0], r[1]) >= NEWTON_TOL
        if not active.any():
            break
        h = sym.hessian(x)
        det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
        scale = np.maximum(1.0, np.abs(h).max(axis=(0, 1)) ** 2)
        ok = np.abs(det) > 1e-14 * scale
        safe = np.where(ok, det, 1.0)
        d1 = (h[1, 1] * r[0] - h[0, 1] * r[1]) / safe
        d2 = (-h[1, 0] * r[0] + h[0, 0] * r[1]) / safe
        # singular Jacobian: fall back to a gradient step on |r|^2 / 2
        g1 = h[0, 0] * r[0] + h[1, 0] * r[1]
        g2 = h[0, 1] * r[0] + h[1, 1] * r[1]
        d1 = np.where(ok, d1, 0.05 * g1)
        d2 = np.where(ok, d2, 0.05 * g2)
        step = np.hypot(d1, d2)
        damp = np.where(step > 1.0, 1.0 / np.maximum(step, 1e-300), 1.0)
        x[0] -= np.where(active, damp * d1, 0.0)
        x[1] -= np.where(active, damp * d2, 0.0)
    r = sym.gradient(x) - v
    return x, np.hypot(r[0], r[1])


def find_critical_points(v, grid_seeds: int = 32, extra_seeds=(), sym: DispersionSymbol = HEX):
    """Solutions of ``∇g(x) = v`` in ``[0, 2π)²``.

    Newton runs from ``grid_seeds²`` cell-centred seeds plus any
    ``extra_seeds`` and, on the hexagonal lattice, the exact half-period and
    cusp points; those seeds take precedence when deduplicating.  Roots closer
    than ``1e-6`` modulo 2π are merged.  Near a degenerate root Newton only
    converges linearly and leaves a cloud of approximate roots, so roots with
    ``|D| < 1e-6`` are merged within ``1e-4``.
    """
    if grid_seeds < 16:
        raise ValueError("grid_seeds must be at least 16")
    v = (float(v[0]), float(v[1]))
    axis = (np.arange(grid_seeds) + 0.5) * TWO_PI / grid_seeds
    s1, s2 = np.meshgrid(axis, axis, indexing="ij")
    grid = np.vstack([s1.ravel(), s2.ravel()])
    special = list(HALF_PERIOD_POINTS) + list(AXIS_CUSPS) if sym.is_hex else []
    extra = np.asarray(list(extra_seeds) + special, dtype=float).reshape(-1, 2).T
    seeds = np.hstack([extra, grid]) if extra.size else grid
    x, res = _newton(sym, v, seeds)
    x = _wrap(x)
    if sym.is_hex:
        disc = np.abs(sym.discriminant(x))
    else:
        disc = np.abs(np.cos(x[0]) * np.cos(x[1]))
    good = np.flatnonzero(res < ACCEPT_TOL)
    n_extra = extra.shape[1] if extra.size else 0
    head = [i for i in good if i < n_extra]
    tail = sorted((i for i in good if i >= n_extra), key=lambda i: (res[i], x[0, i], x[1, i]))
    kept: list[int] = []
    for i in head + tail:
        merged = False
        for j in kept:
            d = _periodic_dist(x[:, i], x[:, j])
            if d <= DEDUP_TOL or (d <= DEGENERATE_MERGE and disc[i] < DEGENERATE_DISC and disc[j] < DEGENERATE_DISC):
                merged = True
                break
        if not merged:
            kept.append(i)
    kept.sort(key=lambda i: (x[0, i], x[1, i]))
    out = []
    for i in kept:
        p = (float(x[0, i]), float(x[1, i]))
        d = sym.discriminant(p) if sym.is_hex else float(np.cos(p[0]) * np.cos(p[1]))
        out.append(CriticalPoint(v, p, float(res[i]), float(d)))
    return out


# ---------------------------------------------------------------------------
# classification


def _normal_form(report_kwargs, a20, a12, a03, a04):
    """Pick Normal2 when the u2³ coefficient survives, else Normal1 if R-nondegenerate."""
    coeffs = {"a20": a20, "a12": a12, "a03": a03, "a04": a04}
    if abs(a03) > COEFF_TOL and abs(a20) > COEFF_TOL:
        return SingularityReport(
            normal_form=NormalForm.Normal2,
            coeffs={**coeffs, "b20": a20, "b03": a03},
            exponent_pair=NORMAL2_PAIR,
            **report_kwargs,
        )
    if abs(a03) <= COEFF_TOL and check_r_nondegenerate_quartic(a20, a12, a04, COEFF_TOL):
        return SingularityReport(
            normal_form=NormalForm.Normal1,
            coeffs=coeffs,
            exponent_pair=NORMAL1_PAIR,
            **report_kwargs,
        )
    report = SingularityReport(normal_form=None, coeffs=coeffs, exponent_pair=None, **report_kwargs)
    raise UnclassifiedSingularityError(
        f"UNCLASSIFIED singularity at x={report.point.x}: a03={a03:.3e}, "
        f"quartic discriminant={a12 * a12 - 4 * a20 * a04:.3e}",
        report,
    )


def _case_c_or_d(x1, x2, lam):
    """Closed-form coefficients for λ > 0 (u1 = x1'/√λ + √λ x2') or its λ < 0 analogue."""
    c1, c2, c12 = math.cos(x1), math.cos(x2), math.cos(x1 + x2)
    s1, s2, s12 = math.sin(x1), math.sin(x2), math.sin(x1 + x2)
    r = math.sqrt(abs(lam))
    sign = 1.0 if lam > 0 else -1.0
    a20 = sign * c12
    a12 = -s12 * r * (1 - lam) ** 2 - s1 * r * lam**2
    a03 = -(s12 * (1 - lam) ** 3 - s1 * lam**3 + s2) / 3.0
    a04 = -(c12 * (1 - lam) ** 4 + c1 * lam**4 + c2) / 12.0
    return a20, a12, a03, a04


def _quadratic_in_u(x1, x2, m):
    """Coefficients (u1², u1u2, u2²) of ½ x'ᵀ Hess g x' after x' = m u."""
    h = HEX.hessian((x1, x2)) / 2.0
    q = m.T @ h @ m
    return q[0, 0], 2 * q[0, 1], q[1, 1]


def classify_singularity(x, v, check_critical: bool = True) -> SingularityReport:
    """Classify the critical point ``x`` of ``φ(v, ·)`` on the hexagonal lattice.

    Nondegenerate points (``|D(x)| > 1e-8``) are Morse with exponent (-1, 0).
    Degenerate points go through the case split A–D and receive Normal1
    (-3/4, 0) or Normal2 (-5/6, 0) from the computed coefficients.  A point
    where neither applies raises :class:`UnclassifiedSingularityError`.
    """
    x1, x2 = float(x[0]), float(x[1])
    v = (float(v[0]), float(v[1]))
    grad = HEX.gradient((x1, x2))
    gnorm = float(math.hypot(grad[0] - v[0], grad[1] - v[1]))
    if check_critical and gnorm >= 1e-8:
        raise ValueError(f"x={x} is not a critical point for v={v} (|∇φ|={gnorm:.2e})")
    disc = float(HEX.discriminant((x1, x2)))
    point = CriticalPoint(v, (x1, x2), gnorm, disc)

    if abs(disc) > DEGENERACY_TOL:
        h = HEX.hessian((x1, x2))
        ev = np.linalg.eigvalsh(h)
        return SingularityReport(
            point,
            None,
            CaseLabel.Nondegenerate,
            NormalForm.Morse,
            {"h1": float(ev[0]) / 2.0, "h2": float(ev[1]) / 2.0},
            MORSE_PAIR,
        )

    c1, c2 = math.cos(x1), math.cos(x2)
    kw = {"point": point}

    if abs(c1) <= COEFF_TOL and abs(c2) <= COEFF_TOL:
        # Case A: u1 = x1' + x2', u2 = x2'
        s1, s2 = math.sin(x1), math.sin(x2)
        c12 = math.cos(x1 + x2)
        m = np.array([[1.0, -1.0], [0.0, 1.0]])
        kw.update(lam=None, case_label=CaseLabel.A)
        kw["quadratic_residual"] = _quadratic_residual(x1, x2, m)
        return _normal_form(kw, c12, -s1, -(s2 - s1) / 3.0, -(c1 + c2) / 12.0)

    swapped = abs(c1) <= COEFF_TOL
    if swapped:
        # the case split assumes cos x1 != 0; g is symmetric under x1 <-> x2
        x1, x2 = x2, x1
        c1, c2 = c2, c1
    lam = -c2 / c1
    kw.update(lam=lam, swapped=swapped)

    if abs(lam) <= COEFF_TOL:
        # Case B: u = x'
        s2, s12 = math.sin(x2), math.sin(x1 + x2)
        c12 = math.cos(x1 + x2)
        kw.update(case_label=CaseLabel.B)
        kw["quadratic_residual"] = _quadratic_residual(x1, x2, np.eye(2))
        return _normal_form(kw, c1, -s12, -(s2 + s12) / 3.0, -(c2 + c12) / 12.0)

    r = math.sqrt(abs(lam))
    # x1' = √|λ| u1 - λ u2, x2' = u2
    m = np.array([[r, -lam], [0.0, 1.0]])
    kw["quadratic_residual"] = _quadratic_residual(x1, x2, m)
    if lam > 0:
        kw.update(case_label=CaseLabel.C)
    else:
        kw.update(case_label=CaseLabel.D, derived_by_analogy=True)
    return _normal_form(kw, *_case_c_or_d(x1, x2, lam))


def _quadratic_residual(x1, x2, m) -> float:
    """Size of the u1 u2 and u2² terms that the change of variables must remove."""
    _, q12, q22 = _quadratic_in_u(x1, x2, m)
    return float(max(abs(q12), abs(q22)))


# ---------------------------------------------------------------------------
# degeneracy curves


def sigma0(x1, x2):
    """Reduced Hessian discriminant; zero on Σ0."""
    c1, c2 = np.cos(x1), np.cos(x2)
    return (c1 + c2) * np.cos(x1 + x2) + c1 * c2


def sigma0_gradient(x1, x2):
    c1, c2, c12 = np.cos(x1), np.cos(x2), np.cos(x1 + x2)
    s1, s2, s12 = np.sin(x1), np.sin(x2), np.sin(x1 + x2)
    d1 = -s1 * c12 - (c1 + c2) * s12 - s1 * c2
    d2 = -s2 * c12 - (c1 + c2) * s12 - c1 * s2
    return d1, d2


def sigma1_2(x1, x2):
    """``(cos x1 + cos x2)³ + cos² x1 + cos² x2 - cos x1 cos x2 cos(x1 - x2)``."""
    c1, c2 = np.cos(x1), np.cos(x2)
    return (c1 + c2) ** 3 + c1**2 + c2**2 - c1 * c2 * np.cos(x1 - x2)


def sigma1(x1, x2):
    """Cubic-coefficient numerator ``(c1 + c2)³ s12 + c2³ s1 + c1³ s2``; zero on Σ1 = Σ1¹ ∪ Σ1²."""
    c1, c2 = np.cos(x1), np.cos(x2)
    return (c1 + c2) ** 3 * np.sin(x1 + x2) + c2**3 * np.sin(x1) + c1**3 * np.sin(x2)


def sigma2_prime(x1, x2):
    """``cos²x1 cos²x2 cos²A - sin²A (cos²A + sin²B)²`` with ``A, B = (x1 ∓ x2)/2``."""
    a = (x1 - x2) / 2.0
    b = (x1 + x2) / 2.0
    c1, c2 = np.cos(x1), np.cos(x2)
    return c1**2 * c2**2 * np.cos(a) ** 2 - np.sin(a) ** 2 * (np.cos(a) ** 2 + np.sin(b) ** 2) ** 2


CURVES = {
    "Sigma0": sigma0,
    "Sigma1_2": sigma1_2,
    "Sigma2prime": sigma2_prime,
}


@dataclass
class CurveSet:
    label: str
    points: np.ndarray
    residuals: np.ndarray
    grid_n: int

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x1", "x2", "residual"])
            for (p1, p2), res in zip(self.points, self.residuals):
                w.writerow([f"{p1:.17g}", f"{p2:.17g}", f"{res:.17g}"])

    def nearest(self, p) -> float:
        if len(self.points) == 0:
            return math.inf
        d = np.abs(self.points - np.asarray(p)[None, :]) % TWO_PI
        d = np.minimum(d, TWO_PI - d)
        return float(np.hypot(d[:, 0], d[:, 1]).min())


def _bisect_edges(f, a, b, fa, tol, max_iter=80):
    """Vectorised bisection of ``f`` on segments ``a → b`` with a sign change."""
    a = a.copy()
    b = b.copy()
    fa = fa.copy()
    mid = 0.5 * (a + b)
    fm = f(mid[:, 0], mid[:, 1])
    for _ in range(max_iter):
        if np.all(np.abs(fm) < tol * 1e-6):
            break
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left[:, None], mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left[:, None], b, mid)
        mid = 0.5 * (a + b)
        fm = f(mid[:, 0], mid[:, 1])
    return mid, np.abs(fm)


def trace_curve(label: str, grid_n: int = 512) -> CurveSet:
    """Zero set of a defining function on ``[0, 2π]²``.

    Every grid edge across which the function changes sign contributes one
    vertex, refined by bisection along that edge; grid nodes where the
    function already vanishes to within ``1e-6`` are emitted as they are,
    which keeps isolated zeros that no edge brackets.
    """
    if grid_n < 256:
        raise ValueError("grid_n must be at least 256")
    f = CURVES[label]
    axis = np.arange(grid_n + 1) * (TWO_PI / grid_n)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    vals = f(g1, g2)
    nodes = np.column_stack([g1.ravel(), g2.ravel()])
    flat = vals.ravel()

    pieces, resids = [], []
    zero_nodes = np.abs(flat) < CURVE_TOL
    pieces.append(nodes[zero_nodes])
    resids.append(np.abs(flat[zero_nodes]))

    idx = np.arange(flat.size).reshape(vals.shape)
    for sl_a, sl_b in (
        ((slice(None, -1), slice(None)), (slice(1, None), slice(None))),
        ((slice(None), slice(None, -1)), (slice(None), slice(1, None))),
    ):
        ia, ib = idx[sl_a].ravel(), idx[sl_b].ravel()
        fa, fb = flat[ia], flat[ib]
        cross = (fa * fb < 0) & ~zero_nodes[ia] & ~zero_nodes[ib]
        if cross.any():
            mid, res = _bisect_edges(f, nodes[ia[cross]], nodes[ib[cross]], fa[cross], CURVE_TOL)
            pieces.append(mid)
            resids.append(res)
    pts = np.vstack(pieces)
    res = np.concatenate(resids)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts, res = pts[order], res[order]
    keep = res < CURVE_TOL
    return CurveSet(label, pts[keep], res[keep], grid_n)


# ---------------------------------------------------------------------------
# appendix certification


def _distance_to_half_periods(x1, x2):
    best = np.full(np.shape(x1), np.inf)
    for p1, p2 in HALF_PERIOD_POINTS:
        d1 = np.abs(x1 - p1) % TWO_PI
        d2 = np.abs(x2 - p2) % TWO_PI
        d1 = np.minimum(d1, TWO_PI - d1)
        d2 = np.minimum(d2, TWO_PI - d2)
        best = np.minimum(best, np.hypot(d1, d2))
    return best


def _polish_intersection(seed, f=sigma1_2, g=sigma2_prime, iters=60):
    """Newton on ``(f, g) = 0`` with a finite-difference Jacobian."""
    z = np.array(seed, dtype=float)
    h = 1e-7
    for _ in range(iters):
        fz = np.array([f(*z), g(*z)])
        if np.max(np.abs(fz)) < 1e-15:
            break
        jac = np.empty((2, 2))
        for k in range(2):
            dz = np.zeros(2)
            dz[k] = h
            jac[:, k] = (np.array([f(*(z + dz)), g(*(z + dz))]) - np.array([f(*(z - dz)), g(*(z - dz))])) / (2 * h)
        try:
            step = np.linalg.solve(jac, fz)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        z = z - step
    return _wrap(z), float(max(abs(f(*z)), abs(g(*z))))


@dataclass
class CertificationReport:
    grid_n: int
    epsilon: float
    hits: list
    offending: list
    triple_hits_lambda_positive: list
    radius: float
    crossings: list = field(default_factory=list)
    cusps: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.offending and not self.triple_hits_lambda_positive

    def to_dict(self) -> dict:
        return {
            "grid_n": self.grid_n,
            "epsilon": self.epsilon,
            "radius": self.radius,
            "hits": self.hits,
            "offending": self.offending,
            "triple_hits_lambda_positive": self.triple_hits_lambda_positive,
            "crossings": self.crossings,
            "cusps": self.cusps,
            "pass": self.passed,
        }


def certify_appendix(
    grid_n: int = 2048,
    epsilon: float = 1e-3,
    second=sigma2_prime,
    raise_on_fail: bool = True,
    cusp_grid: int | None = 48,
):
    """Scan ``[0, 2π)²`` for joint near-zeros of the Σ1² and Σ2' equations.

    Every grid node with both residuals below ``epsilon`` is a hit; hits more
    than four grid cells from the half-period points ``(π/2 + k1 π, π/2 + k2 π)``
    are offending.  Independently, any node with all three residuals (Σ0, Σ1²,
    Σ2') below ``epsilon`` and ``λ = -cos x2 / cos x1 > 0`` that is not within
    the same radius of a half-period point violates the case-C exclusion.
    Hits that form sign-change crossings are polished to exact intersection
    points and reported under ``crossings``.  ``second`` replaces the Σ2'
    equation (used for negative controls).

    As supplementary evidence that does not enter ``passed``, the report lists
    every point of Σ0 where the u2³ coefficient vanishes (:func:`cusp_points`
    on a ``cusp_grid²`` start grid) with its λ and classification.
    """
    if grid_n < 256:
        raise ValueError("grid_n too small")
    if not 0 < epsilon <= 1e-2:
        raise ValueError("epsilon must lie in (0, 1e-2]")
    h = TWO_PI / grid_n
    radius = 4 * h
    axis = np.arange(grid_n) * h
    hits, offending, triple = [], [], []
    crossing_seeds = []
    # row blocks keep memory bounded at large grid_n
    block = max(1, (1 << 21) // grid_n)
    for start in range(0, grid_n, block):
        r1 = axis[start : start + block][:, None]
        r2 = axis[None, :]
        x1 = np.broadcast_to(r1, (r1.shape[0], grid_n))
        x2 = np.broadcast_to(r2, x1.shape)
        f = sigma1_2(x1, x2)
        g = second(x1, x2)
        both = (np.abs(f) < epsilon) & (np.abs(g) < epsilon)
        if not both.any():
            continue
        d0 = sigma0(x1, x2)
        c1 = np.cos(x1)
        lam = np.where(np.abs(c1) > 1e-12, -np.cos(x2) / np.where(c1 == 0, 1, c1), np.nan)
        dist = _distance_to_half_periods(x1, x2)
        for i, j in zip(*np.nonzero(both)):
            p = (float(x1[i, j]), float(x2[i, j]))
            entry = [p[0], p[1], float(f[i, j]), float(g[i, j])]
            hits.append(entry)
            far = dist[i, j] > radius
            if far:
                offending.append(entry)
            if far and abs(d0[i, j]) < epsilon and lam[i, j] > 0:
                triple.append(entry + [float(d0[i, j]), float(lam[i, j])])
            if far:
                crossing_seeds.append(p)

    crossings = []
    for seed in crossing_seeds:
        z, res = _polish_intersection(seed, sigma1_2, second)
        if res > 1e-12 or _periodic_dist(z, seed) > 4 * radius:
            continue
        if any(_periodic_dist(z, c[:2]) < 1e-7 for c in crossings):
            continue
        c1 = math.cos(z[0])
        lam = -math.cos(z[1]) / c1 if abs(c1) > 1e-12 else None
        crossings.append([float(z[0]), float(z[1]), res, float(sigma0(*z)), lam])
    crossings.sort()

    cusps = []
    if cusp_grid:
        for p in cusp_points(cusp_grid):
            rep = classify_singularity(p, HEX.gradient(p))
            cusps.append([p[0], p[1], rep.lam, rep.case_label.value, rep.normal_form.value])

    report = CertificationReport(grid_n, epsilon, hits, offending, triple, radius, crossings, cusps)
    if raise_on_fail and not report.passed:
        raise CertificationFailedError(
            f"CERTIFICATION_FAILED: {len(offending)} offending cells, "
            f"{len(triple)} λ>0 triple-intersection cells",
            report,
        )
    return report


# ---------------------------------------------------------------------------
# degenerate-point sampling and classification sweeps


def project_to_sigma0(x, iters: int = 60):
    """Newton projection of points onto Σ0 along the gradient of the discriminant."""
    z = np.array(x, dtype=float).reshape(2, -1).copy()
    for _ in range(iters):
        d = sigma0(z[0], z[1])
        if np.all(np.abs(d) < 1e-15):
            break
        g1, g2 = sigma0_gradient(z[0], z[1])
        n2 = np.maximum(g1 * g1 + g2 * g2, 1e-300)
        z[0] -= d * g1 / n2
        z[1] -= d * g2 / n2
    return _wrap(z), np.abs(sigma0(z[0], z[1]))


def sample_sigma0(n: int, rng: np.random.Generator, lam_sign: int | None = None, tol: float = 1e-13):
    """``n`` points on Σ0 (``|D| < tol``), optionally restricted to ``sign(λ)``."""
    found = []
    while len(found) < n:
        z, res = project_to_sigma0(rng.uniform(0, TWO_PI, size=(2, 4 * n)))
        for k in range(z.shape[1]):
            if res[k] >= tol:
                continue
            c1, c2 = math.cos(z[0, k]), math.cos(z[1, k])
            if abs(c1) < 1e-3 or abs(c2) < 1e-3:
                continue
            lam = -c2 / c1
            if lam_sign is not None and lam_sign * lam <= 1e-3:
                continue
            found.append((float(z[0, k]), float(z[1, k])))
            if len(found) == n:
                break
    return found


# Degenerate points with a vanishing u2³ coefficient that sit on cos x1 = 0 or
# cos x2 = 0 (cases A and B); closed form, see cusp_points.
AXIS_CUSPS = (
    (np.pi / 2, np.pi / 2),
    (3 * np.pi / 2, 3 * np.pi / 2),
    (np.pi, np.pi / 2),
    (np.pi, 3 * np.pi / 2),
    (np.pi / 2, np.pi),
    (3 * np.pi / 2, np.pi),
)


def _scaled_cusp_system(z):
    # σ1 / (c1² + c2²)^{3/2} is, up to a bounded factor, the u2³ coefficient itself
    c1, c2 = np.cos(z[0]), np.cos(z[1])
    return [sigma0(z[0], z[1]), sigma1(z[0], z[1]) / (c1 * c1 + c2 * c2) ** 1.5]


def cusp_points(grid: int = 48, snap: float = 1e-4):
    """Points of ``Σ0`` where the u2³ coefficient vanishes.

    Multistart root finding on ``(D, σ1 / |c|³)``.  The roots at the axis
    points of cases A and B are degenerate, so Newton only reaches them to
    about ``1e-5``; roots within ``snap`` of one of :data:`AXIS_CUSPS` are
    replaced by the exact point.
    """
    from scipy.optimize import root

    axis = (np.arange(grid) + 0.5) * TWO_PI / grid
    found: list[tuple[float, float]] = []
    for a in axis:
        for b in axis:
            with np.errstate(all="ignore"):
                sol = root(_scaled_cusp_system, [a, b], method="hybr", tol=1e-15)
            z = _wrap(sol.x)
            res = _scaled_cusp_system(z)
            if not (abs(res[0]) < 1e-10 and abs(res[1]) < 1e-8):
                continue
            exact = [p for p in AXIS_CUSPS if _periodic_dist(z, p) < snap]
            p = tuple(float(c) for c in (exact[0] if exact else z))
            if any(_periodic_dist(p, q) < snap for q in found):
                continue
            found.append(p)
    return sorted(found)


@dataclass
class SweepResult:
    velocities: list
    reports: list
    unclassified: list
    seed: int

    @property
    def worst_pair(self):
        pairs = [r.exponent_pair for r in self.reports if r.exponent_pair is not None]
        return max(pairs, key=lambda p: (p[0], p[1])) if pairs else None

    def counts(self) -> dict:
        out: dict = {}
        for r in self.reports:
            key = r.case_label.value if r.normal_form is NormalForm.Morse else (
                f"{r.case_label.value}/{r.normal_form.value}"
            )
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        wp = self.worst_pair
        return {
            "seed": self.seed,
            "n_velocities": len(self.velocities),
            "n_reports": len(self.reports),
            "n_unclassified": len(self.unclassified),
            "worst_exponent_pair": None if wp is None else [str(wp[0]), wp[1]],
            "counts": self.counts(),
            "unclassified": [u.to_dict() for u in self.unclassified],
        }


def classification_sweep(n_v: int = 200, seed: int = 0, grid_seeds: int = 32, cusp_grid: int = 48, map_fn=map):
    """Classify every critical point for ``n_v`` velocities in ``B(0, 4√2 + 1)``.

    Velocities uniform in the disc almost surely give only Morse points, so
    the sweep is stratified: half uniform in the disc, 40% on the caustic
    ``∇g(Σ0)``, and 10% at cusp velocities ``∇g(Σ0 ∩ Σ1)``, the only place the
    quartic normal form can occur.  For the last two strata the generating
    degenerate point is passed to Newton as an extra seed.
    """
    rng = np.random.default_rng(seed)
    radius = GRADIENT_BOUND + 1.0
    n_cusp = max(1, n_v // 10)
    n_caustic = (2 * n_v) // 5
    n_uniform = n_v - n_cusp - n_caustic

    jobs = []
    rad = radius * np.sqrt(rng.uniform(0, 1, n_uniform))
    ang = rng.uniform(0, TWO_PI, n_uniform)
    for r_, a_ in zip(rad, ang):
        jobs.append(((float(r_ * np.cos(a_)), float(r_ * np.sin(a_))), ()))
    for p in sample_sigma0(n_caustic, rng):
        jobs.append((tuple(float(c) for c in HEX.gradient(p)), (p,)))
    cusps = cusp_points(cusp_grid)
    for k in rng.integers(0, len(cusps), n_cusp):
        p = cusps[int(k)]
        jobs.append((tuple(float(c) for c in HEX.gradient(p)), (p,)))

    def run(job):
        v, extra = job
        reps, bad = [], []
        for cp in find_critical_points(v, grid_seeds, extra):
            try:
                reps.append(classify_singularity(cp.x, v))
            except UnclassifiedSingularityError as exc:
                bad.append(exc.report)
        return reps, bad

    reports, unclassified = [], []
    for reps, bad in map_fn(run, jobs):
        reports.extend(reps)
        unclassified.extend(bad)
    return SweepResult([v for v, _ in jobs], reports, unclassified, seed)
