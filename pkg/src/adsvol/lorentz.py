"""Lorentz linear algebra and the hyperboloid model of H^n.

Conventions, fixed once for the whole package:

* The quadratic form is I_{n,1} = diag(+1, ..., +1, -1): the last
  coordinate is the timelike one.
* H^n is the upper sheet of <x,x> = -1 (last coordinate >= 1), with the
  induced metric of constant curvature -1.
* SO0(n,1) is the identity component: Lorentz matrices with det = +1 and
  positive lower-right entry.
* The bilinear form on the Lie algebra is kappa(A,B) = Tr(AB)/2.  Boost
  generators have kappa = +1, rotation generators kappa = -1, and pushing
  the boost block to the tangent space at the base point reproduces the
  hyperboloid metric exactly.
* The ordered algebra basis (boosts in coordinate order, then rotations in
  lexicographic order) is declared positively oriented.

Constructors re-project onto the constraint manifold so that invariant
drift does not accumulate across long products of matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "LorentzForm",
    "Isometry",
    "AlgebraVector",
    "HPoint",
    "TangentVector",
    "minkowski",
    "lorentz_inner",
    "base_point",
    "boost_generator",
    "rotation_generator",
    "so_basis",
    "killing",
    "dist",
    "act",
    "group_exp",
    "group_log",
    "killing_field",
    "stabilizer_split",
    "transporter",
    "tangent_frame",
    "frame_coords",
    "frame_vector",
    "exp_map",
    "log_map",
    "geodesic_point",
    "random_algebra",
    "random_isometry",
    "random_point",
]

# Construction re-projects, so post-construction residuals sit at roundoff;
# these are the advertised guarantees.
ISOMETRY_TOL = 1e-12
POINT_TOL = 1e-12
DRIFT_TOL = 1e-6  # inputs farther than this from the manifold are rejected


def minkowski(n: int) -> np.ndarray:
    """The diagonal form I_{n,1} = diag(+1,...,+1,-1) on R^{n+1}."""
    j = np.ones(n + 1)
    j[-1] = -1.0
    return np.diag(j)


def lorentz_inner(u: np.ndarray, v: np.ndarray) -> float:
    """<u,v> for the form I_{n,1} (spatial dot minus product of last entries)."""
    return float(np.dot(u[:-1], v[:-1]) - u[-1] * v[-1])


@dataclass(frozen=True)
class LorentzForm:
    """The ambient quadratic form of signature (n,1), 2 <= n <= 4 supported."""

    n: int

    def __post_init__(self):
        if self.n < 2 or self.n > 4:
            raise ValueError(f"supported dimension range is 2..4, got n={self.n}")

    @property
    def matrix(self) -> np.ndarray:
        return minkowski(self.n)


def base_point(n: int) -> "HPoint":
    """The point e_{n+1}, center of all deterministic frame conventions."""
    x = np.zeros(n + 1)
    x[-1] = 1.0
    return HPoint(x)


class HPoint:
    """A point on the upper sheet of the hyperboloid <x,x> = -1.

    The constructor rescales the input onto the sheet; inputs that are not
    clearly timelike and future-pointing are rejected.
    """

    __slots__ = ("x", "n")

    def __init__(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] < 3:
            raise ValueError("HPoint needs an (n+1)-vector with n >= 2")
        q = lorentz_inner(x, x)
        if q >= -DRIFT_TOL:
            raise ValueError(f"vector is not timelike: <x,x> = {q:g}")
        if x[-1] <= 0:
            raise ValueError("point lies on the lower sheet")
        self.x = x / np.sqrt(-q)
        self.n = x.shape[0] - 1

    def __repr__(self):
        return f"HPoint({self.x!r})"

    def close_to(self, other: "HPoint", tol: float = 1e-9) -> bool:
        return dist(self, other) < tol


class Isometry:
    """An element of SO0(n,1) as an (n+1)x(n+1) matrix.

    Construction runs a Lorentz Gram-Schmidt pass on the columns, so
    m^T I m = I holds to roundoff no matter how many products produced the
    input.  det = +1 and a positive lower-right entry are required.
    """

    __slots__ = ("m", "n")

    def __init__(self, m: np.ndarray):
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Isometry needs a square matrix")
        n = m.shape[0] - 1
        j = np.ones(n + 1)
        j[-1] = -1.0
        gram = (m.T * j) @ m - np.diag(j)
        if np.max(np.abs(gram)) > DRIFT_TOL:
            raise ValueError("matrix is not Lorentz-orthogonal within drift tolerance")
        self.m = _lorentz_gram_schmidt(m, j)
        self.n = n
        if self.m[-1, -1] <= 0:
            raise ValueError("matrix does not preserve the upper sheet")
        if np.linalg.det(self.m) < 0:
            raise ValueError("matrix has determinant -1")

    @classmethod
    def identity(cls, n: int) -> "Isometry":
        return cls(np.eye(n + 1))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return Isometry(self.m @ other.m)

    def inverse(self) -> "Isometry":
        # g^{-1} = J g^T J, exact for Lorentz matrices
        j = np.ones(self.n + 1)
        j[-1] = -1.0
        return Isometry((j[:, None] * self.m.T) * j[None, :])

    def apply(self, p: HPoint) -> HPoint:
        return act(self, p)

    def __repr__(self):
        return f"Isometry(n={self.n})"


def _lorentz_gram_schmidt(m: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Orthonormalize columns for the J-inner product, spacelike block first."""
    n = m.shape[0] - 1
    cols = [m[:, k].copy() for k in range(n + 1)]
    for k in range(n):
        v = cols[k]
        for l in range(k):
            v = v - (np.dot(v * j, cols[l])) * cols[l]
        nrm2 = np.dot(v * j, v)
        if nrm2 <= 0:
            raise ValueError("degenerate spacelike column during re-orthonormalization")
        cols[k] = v / np.sqrt(nrm2)
    v = cols[n]
    for l in range(n):
        v = v - (np.dot(v * j, cols[l])) * cols[l]
    nrm2 = -np.dot(v * j, v)
    if nrm2 <= 0:
        raise ValueError("degenerate timelike column during re-orthonormalization")
    cols[n] = v / np.sqrt(nrm2)
    return np.column_stack(cols)


class AlgebraVector:
    """An element of so(n,1): a^T I + I a = 0.

    The constructor projects onto the Lorentz-antisymmetric part, which
    satisfies the constraint exactly in floating point, and rejects inputs
    that needed more than a drift-sized correction.
    """

    __slots__ = ("a", "n")

    def __init__(self, a: np.ndarray):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("AlgebraVector needs a square matrix")
        n = a.shape[0] - 1
        s = np.ones(n + 1)
        s[-1] = -1.0
        # (a - J a^T J)/2 is exactly Lorentz-antisymmetric entrywise
        proj = (a - (s[:, None] * a.T) * s[None, :]) / 2.0
        if np.max(np.abs(a - proj)) > DRIFT_TOL:
            raise ValueError("matrix is not in so(n,1) within drift tolerance")
        self.a = proj
        self.n = n

    @classmethod
    def zero(cls, n: int) -> "AlgebraVector":
        return cls(np.zeros((n + 1, n + 1)))

    def __add__(self, other: "AlgebraVector") -> "AlgebraVector":
        return AlgebraVector(self.a + other.a)

    def __mul__(self, t: float) -> "AlgebraVector":
        return AlgebraVector(self.a * t)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.a))

    def __repr__(self):
        return f"AlgebraVector(n={self.n})"


class TangentVector:
    """A vector tangent to H^n at a base point: <base, v> = 0.

    The constructor projects out the component along the base point, so the
    orthogonality invariant holds to roundoff.
    """

    __slots__ = ("base", "v")

    def __init__(self, base: HPoint, v: np.ndarray):
        v = np.asarray(v, dtype=float)
        if v.shape != base.x.shape:
            raise ValueError("dimension mismatch")
        self.base = base
        self.v = v + lorentz_inner(base.x, v) * base.x

    def norm(self) -> float:
        return float(np.sqrt(max(lorentz_inner(self.v, self.v), 0.0)))

    def __repr__(self):
        return f"TangentVector(base={self.base!r})"


def boost_generator(n: int, i: int) -> AlgebraVector:
    """Boost along coordinate axis i (0-based, i < n): E_{i,n} + E_{n,i}."""
    if not 0 <= i < n:
        raise ValueError("boost index out of range")
    a = np.zeros((n + 1, n + 1))
    a[i, n] = 1.0
    a[n, i] = 1.0
    return AlgebraVector(a)


def rotation_generator(n: int, i: int, k: int) -> AlgebraVector:
    """Rotation in the (i,k) coordinate plane, i < k < n: E_{ik} - E_{ki}."""
    if not 0 <= i < k < n:
        raise ValueError("rotation indices out of range")
    a = np.zeros((n + 1, n + 1))
    a[i, k] = 1.0
    a[k, i] = -1.0
    return AlgebraVector(a)


def so_basis(n: int) -> tuple[list[AlgebraVector], list[AlgebraVector]]:
    """Basis of so(n,1) split as (boosts, rotations), in the declared order.

    Boosts b_i satisfy kappa(b_i,b_j) = delta_ij, rotations r_a satisfy
    kappa(r_a,r_b) = -delta_ab, and the two blocks are kappa-orthogonal.
    """
    boosts = [boost_generator(n, i) for i in range(n)]
    rots = [rotation_generator(n, i, k) for i in range(n) for k in range(i + 1, n)]
    return boosts, rots


def killing(a: AlgebraVector, b: AlgebraVector) -> float:
    """The bilinear form Tr(ab)/2 on so(n,1)."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    return float(np.trace(a.a @ b.a)) / 2.0


def dist(x: HPoint, y: HPoint) -> float:
    """Hyperbolic distance arccosh(-<x,y>), clamped against roundoff."""
    if x.n != y.n:
        raise ValueError("dimension mismatch")
    c = -lorentz_inner(x.x, y.x)
    return float(np.arccosh(max(c, 1.0)))


def act(g: Isometry, x: HPoint) -> HPoint:
    """The linear action of SO0(n,1) on the hyperboloid."""
    if g.n != x.n:
        raise ValueError("dimension mismatch")
    return HPoint(g.m @ x.x)


def group_exp(a: AlgebraVector) -> Isometry:
    """Matrix exponential so(n,1) -> SO0(n,1)."""
    return Isometry(scipy.linalg.expm(a.a))


def group_log(g: Isometry) -> AlgebraVector:
    """Principal matrix logarithm, inverse of group_exp near the identity.

    Raises ValueError when the principal log fails to land in so(n,1) with a
    clean round trip (e.g. far from the identity where the branch breaks).
    """
    l = scipy.linalg.logm(g.m)
    if np.max(np.abs(np.imag(l))) > 1e-9:
        raise ValueError("principal log did not converge to a real logarithm")
    l = np.real(l)
    try:
        a = AlgebraVector(l)
    except ValueError:
        raise ValueError("principal log left so(n,1); input too far from identity")
    if np.max(np.abs(scipy.linalg.expm(a.a) - g.m)) > 1e-8:
        raise ValueError("log/exp round trip failed to converge")
    return a


def killing_field(u: AlgebraVector, x: HPoint) -> TangentVector:
    """Value at x of the vector field generated by u: d/dt exp(tu).x at t=0."""
    if u.n != x.n:
        raise ValueError("dimension mismatch")
    return TangentVector(x, u.a @ x.x)


def transporter(x: HPoint) -> Isometry:
    """The unique pure boost mapping the base point to x.

    Deterministic in x; used to conjugate stabilizers and sample fibers.
    """
    n = x.n
    xs = x.x[:n]
    xt = x.x[n]
    m = np.eye(n + 1)
    m[:n, :n] += np.outer(xs, xs) / (1.0 + xt)
    m[:n, n] = xs
    m[n, :n] = xs
    m[n, n] = xt
    return Isometry(m)


def stabilizer_split(x: HPoint) -> tuple[list[AlgebraVector], list[AlgebraVector]]:
    """Split so(n,1) = k_x + k_x^perp at the stabilizer of x.

    Returns (basis of k_x, basis of k_x^perp), orthonormal for -kappa and
    kappa respectively; the split at x is the Ad-image of the split at the
    base point under the transporter, so the bases stay exactly orthonormal.
    """
    t = transporter(x)
    ti = t.inverse()
    boosts, rots = so_basis(x.n)
    k_x = [AlgebraVector(t.m @ r.a @ ti.m) for r in rots]
    p_x = [AlgebraVector(t.m @ b.a @ ti.m) for b in boosts]
    return k_x, p_x


def tangent_frame(x: HPoint) -> np.ndarray:
    """Orthonormal frame of T_x H^n as the columns of an (n+1) x n matrix.

    Built by Gram-Schmidt on the tangent projections of the first n
    coordinate vectors; deterministic, and positively oriented against the
    ambient orientation (frame columns followed by x have det > 0).
    """
    n = x.n
    cols = []
    for i in range(n):
        e = np.zeros(n + 1)
        e[i] = 1.0
        v = e + lorentz_inner(x.x, e) * x.x
        for c in cols:
            v = v - lorentz_inner(v, c) * c
        nrm = np.sqrt(lorentz_inner(v, v))
        cols.append(v / nrm)
    return np.column_stack(cols)


def frame_coords(frame: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Coordinates of a tangent vector w in an orthonormal frame."""
    n = frame.shape[1]
    j = np.ones(n + 1)
    j[-1] = -1.0
    return frame.T @ (j * w)


def frame_vector(frame: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Tangent vector with coordinates c in an orthonormal frame."""
    return frame @ c


def exp_map(x: HPoint, v: TangentVector) -> HPoint:
    """Riemannian exponential: follow the geodesic from x with velocity v."""
    t = v.norm()
    if t < 1e-300:
        return HPoint(x.x.copy())
    return HPoint(np.cosh(t) * x.x + np.sinh(t) * (v.v / t))


def log_map(x: HPoint, y: HPoint) -> TangentVector:
    """Riemannian logarithm: the velocity at x of the geodesic reaching y."""
    d = dist(x, y)
    if d < 1e-15:
        return TangentVector(x, np.zeros_like(x.x))
    w = (y.x - np.cosh(d) * x.x) * (d / np.sinh(d))
    return TangentVector(x, w)


def geodesic_point(x: HPoint, y: HPoint, t: float) -> HPoint:
    """The point a fraction t of the way along the geodesic from x to y."""
    v = log_map(x, y)
    return exp_map(x, TangentVector(x, v.v * t))


def random_algebra(n: int, rng: np.random.Generator, scale: float = 1.0) -> AlgebraVector:
    """Random algebra element with basis coefficients uniform in [-scale, scale]."""
    boosts, rots = so_basis(n)
    a = np.zeros((n + 1, n + 1))
    for b in boosts + rots:
        a += rng.uniform(-scale, scale) * b.a
    return AlgebraVector(a)


def random_isometry(n: int, rng: np.random.Generator, scale: float = 1.0) -> Isometry:
    """exp of a random algebra element; covers a neighborhood of the identity."""
    return group_exp(random_algebra(n, rng, scale))


def random_point(n: int, rng: np.random.Generator, radius: float = 1.0) -> HPoint:
    """Random point at distance <= radius from the base point."""
    direction = rng.standard_normal(n)
    direction /= np.linalg.norm(direction)
    r = radius * rng.uniform() ** (1.0 / n)
    x = np.zeros(n + 1)
    x[:n] = np.sinh(r) * direction
    x[n] = np.cosh(r)
    return HPoint(x)
