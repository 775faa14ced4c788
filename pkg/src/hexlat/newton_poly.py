"""Newton polyhedra of bivariate phases and the Varchenko exponent bound.

Exponents are integers, so hulls, Newton distances and predicted exponents are
computed exactly with :class:`fractions.Fraction`.  Coefficients may be floats;
they only decide which exponents belong to the support.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SubprincipalMonomialError, UnsupportedSupportError

Exponent = tuple[int, int]


@dataclass(frozen=True)
class TaylorSupport:
    """Monomials ``coefficient * u1^a * u2^b`` keyed by ``(a, b)``."""

    monomials: dict

    def __post_init__(self):
        clean = {}
        for exp, coeff in dict(self.monomials).items():
            a, b = int(exp[0]), int(exp[1])
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent {exp}")
            if coeff != 0:
                clean[(a, b)] = coeff
        object.__setattr__(self, "monomials", clean)

    @classmethod
    def from_exponents(cls, exponents) -> "TaylorSupport":
        return cls({tuple(e): 1 for e in exponents})

    @classmethod
    def parse(cls, text: str) -> "TaylorSupport":
        """Parse ``"2,0;1,2;0,4"`` (optionally ``a,b:coeff``) into a support."""
        mons = {}
        for item in text.replace(" ", "").split(";"):
            if not item:
                continue
            exp, _, coeff = item.partition(":")
            a, b = exp.split(",")
            mons[(int(a), int(b))] = Fraction(coeff) if coeff else 1
        return cls(mons)

    @property
    def exponents(self) -> list[Exponent]:
        return sorted(self.monomials)

    def __len__(self):
        return len(self.monomials)


@dataclass(frozen=True)
class NewtonPolyhedron:
    vertices: tuple[Exponent, ...]
    edges: tuple[tuple[int, int], ...]
    distance: Fraction
    principal_face_dim: int
    principal_face: tuple[int, ...]

    @property
    def k(self) -> int:
        return 2 - self.principal_face_dim

    def to_dict(self) -> dict:
        beta, p = varchenko_bound(self)
        return {
            "vertices": [list(v) for v in self.vertices],
            "distance_num": self.distance.numerator,
            "distance_den": self.distance.denominator,
            "face_dim": self.principal_face_dim,
            "bound_beta_num": beta.numerator,
            "bound_beta_den": beta.denominator,
            "bound_p": p,
        }


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _staircase_hull(points: list[Exponent]) -> list[Exponent]:
    """Vertices of the compact boundary of ``conv(∪ (p + R_+^2))``, by increasing first exponent."""
    pts = sorted(set(points))
    # Pareto-minimal points: for each first exponent keep the smallest second
    # exponent, and drop points dominated by one further left.
    frontier = []
    best_b = None
    for a, b in pts:
        if best_b is None or b < best_b:
            frontier.append((a, b))
            best_b = b
    # lower convex chain (monotone chain, strict left turns only)
    hull: list[Exponent] = []
    for p in frontier:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def build_polyhedron(support: TaylorSupport) -> NewtonPolyhedron:
    """Newton polyhedron, Newton distance and principal face of ``support``."""
    if isinstance(support, (list, tuple, set)):
        support = TaylorSupport.from_exponents(support)
    if len(support) == 0:
        raise ValueError("empty support")
    verts = _staircase_hull(support.exponents)
    edges = tuple((i, i + 1) for i in range(len(verts) - 1))

    a0, b0 = verts[0]
    if b0 <= a0:
        # the diagonal meets the vertical ray {a0} × [b0, ∞) at (a0, a0)
        distance = Fraction(a0)
        face = (0,) if a0 == b0 else ()
        dim = 0 if a0 == b0 else 1
        return NewtonPolyhedron(tuple(verts), edges, distance, dim, face)
    an, bn = verts[-1]
    if an <= bn:
        distance = Fraction(bn)
        last = len(verts) - 1
        face = (last,) if an == bn else ()
        dim = 0 if an == bn else 1
        return NewtonPolyhedron(tuple(verts), edges, distance, dim, face)
    for i, ((a1, b1), (a2, b2)) in enumerate(zip(verts, verts[1:])):
        # (a - b) changes sign from negative to nonnegative along the chain
        if a1 - b1 < 0 <= a2 - b2:
            if a2 == b2:
                return NewtonPolyhedron(tuple(verts), edges, Fraction(a2), 0, (i + 1,))
            # (a1 + s(a2 - a1), b1 + s(b2 - b1)) on the diagonal
            s = Fraction(b1 - a1, (a2 - a1) - (b2 - b1))
            d = a1 + s * (a2 - a1)
            return NewtonPolyhedron(tuple(verts), edges, d, 1, (i, i + 1))
    raise AssertionError("diagonal does not meet the Newton boundary")  # unreachable


def varchenko_bound(poly: NewtonPolyhedron) -> tuple[Fraction, int]:
    """Predicted oscillation exponent pair ``(-1/d, k - 1)``."""
    return -1 / poly.distance, poly.k - 1


def reduce_dimension(beta, p: int, quadratic_variables: int):
    """Exponent pair after splitting off ``m`` nondegenerate quadratic variables."""
    return beta - Fraction(quadratic_variables, 2), p


def check_r_nondegenerate_quartic(a20, a12, a04, tol: float = 1e-8) -> bool:
    """R-nondegeneracy of ``a20 u1² + a12 u1 u2² + a04 u2⁴``.

    True iff ``a20 != 0`` and ``a12² - 4 a20 a04 != 0``.
    """
    if a20 == 0 and a12 == 0 and a04 == 0:
        raise ValueError("all coefficients vanish")
    return abs(a20) > tol and abs(a12 * a12 - 4 * a20 * a04) > tol


def weighted_degree(exp, weight) -> Fraction:
    return Fraction(weight[0]) * exp[0] + Fraction(weight[1]) * exp[1]


def quasi_homogeneous_filter(support: TaylorSupport, weight):
    """Split ``support`` into its weighted-degree-one part and the rest.

    Raises :class:`SubprincipalMonomialError` if some monomial has weighted
    degree below one.
    """
    w = (Fraction(weight[0]), Fraction(weight[1]))
    if w[0] <= 0 or w[1] <= 0:
        raise ValueError("weights must be positive")
    principal, higher = {}, {}
    for exp, coeff in support.monomials.items():
        deg = weighted_degree(exp, w)
        if deg < 1:
            raise SubprincipalMonomialError(f"monomial {exp} has weighted degree {deg} < 1")
        (principal if deg == 1 else higher)[exp] = coeff
    return TaylorSupport(principal), TaylorSupport(higher)


QUARTIC_WEIGHT = (Fraction(1, 2), Fraction(1, 4))
CUBIC_WEIGHT = (Fraction(1, 2), Fraction(1, 3))


def is_r_nondegenerate(support: TaylorSupport, tol: float = 1e-8) -> bool:
    """Decide R-nondegeneracy for the two normal-form families only.

    ``a20 u1² + a12 u1 u2² + a04 u2⁴`` and ``b20 u1² + b03 u2³``; any other
    support raises :class:`UnsupportedSupportError`.
    """
    exps = set(support.monomials)
    mons = support.monomials
    if exps and exps <= {(2, 0), (1, 2), (0, 4)}:
        return check_r_nondegenerate_quartic(
            float(mons.get((2, 0), 0)), float(mons.get((1, 2), 0)), float(mons.get((0, 4), 0)), tol
        )
    if exps == {(2, 0), (0, 3)}:
        return abs(float(mons[(2, 0)])) > tol and abs(float(mons[(0, 3)])) > tol
    raise UnsupportedSupportError(f"R-nondegeneracy not decided for support {sorted(exps)}")
