"""The additive Fukaya category FK^0 of the symplectic torus E^tau = R^2 / Z^2.

Objects are graded Lagrangian lines of rational slope carrying a local system
in logarithmic form M' = -2 pi i b + N. The local system is realised as the
trivial bundle S^1 x V with connection M' dt, so every stalk is V and parallel
transport over a signed parameter length s (in units of the primitive period
vector) is exp(s M').

Degree shifts only move the grading alpha, so Hom(X, Y[1]) is Hom(X, Y') with
Y' the shifted object and all Hom spaces come from one case table:

* transversal lines, alpha_Y - alpha_X in [0, 1): one Hom(V_X, V_Y) per point,
* same line, alpha_Y = alpha_X: flat maps (H^0),
* same line, alpha_Y = alpha_X + 1: cokernel classes (H^1),
* everything else: zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import numerics as nm


class CaseError(ValueError):
    pass


class CompositionError(ValueError):
    pass


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _frac2(p):
    return (nm.frac_part(p[0]), nm.frac_part(p[1]))


def _bezout(q: int, p: int):
    """Integer vector mu with cross((q, p), mu) = 1."""
    # q * m1 - p * m0 = 1
    g, s, t = _egcd(q, -p)
    if abs(g) != 1:
        raise ValueError("direction must be primitive")
    return (t * g, s * g)


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0)
    g, s, t = _egcd(b, a % b)
    return (g, t, s - (a // b) * t)


@dataclass(frozen=True)
class LagrangianLine:
    """Line base + t * direction in R^2 / Z^2 with primitive integer direction."""

    direction: tuple
    base: tuple

    def __post_init__(self):
        q, p = (int(v) for v in self.direction)
        if math.gcd(q, p) != 1:
            raise ValueError(f"direction {(q, p)} is not primitive")
        if q < 0 or (q == 0 and p < 0):
            q, p = -q, -p
        object.__setattr__(self, "direction", (q, p))
        object.__setattr__(self, "base", _frac2(tuple(nm.to_fraction(v) for v in self.base)))

    @property
    def beta(self) -> float:
        """Logarithm of the slope, in (-1/2, 1/2]."""
        q, p = self.direction
        if q == 0:
            return 0.5
        return math.atan2(p, q) / math.pi

    @property
    def offset(self) -> Fraction:
        """cross(base, direction) mod 1; classifies the subset among parallel lines."""
        return nm.frac_part(_cross(self.base, self.direction))

    def same_subset(self, other: "LagrangianLine") -> bool:
        return self.direction == other.direction and self.offset == other.offset

    def parameter(self, point) -> Fraction:
        """Parameter t in [0, 1) of a point of the line."""
        mu = _bezout(*self.direction)
        diff = (point[0] - self.base[0], point[1] - self.base[1])
        return nm.frac_part(_cross(diff, mu))

    def point(self, t):
        q, p = self.direction
        return (self.base[0] + t * q, self.base[1] + t * p)


def intersection_points(L1: LagrangianLine, L2: LagrangianLine):
    """Points of L1 ∩ L2 sorted lexicographically, with their parameters on both lines.

    Returns a list of (point mod 1, t1, t2).
    """
    det = _cross(L1.direction, L2.direction)
    if det == 0:
        if L1.same_subset(L2):
            raise CaseError("identical Lagrangians have no transversal intersection")
        return []
    c = _cross((L2.base[0] - L1.base[0], L2.base[1] - L1.base[1]), L2.direction)
    pts = []
    for k in range(abs(det)):
        t1 = nm.frac_part((c + k) / det)
        P = _frac2(L1.point(t1))
        pts.append((P, t1, L2.parameter(P)))
    pts.sort(key=lambda e: e[0])
    return pts


@dataclass(frozen=True)
class GradedLocalSystem:
    """Grading shift over the principal logarithm, and monodromy exp(-2 pi i b + N)."""

    shift: int = 0
    b: Fraction = Fraction(0)
    unipotent: nm.NilpotentDatum = field(default_factory=lambda: nm.NilpotentDatum.zero(1))

    def __post_init__(self):
        u = self.unipotent
        if not isinstance(u, nm.NilpotentDatum):
            u = nm.NilpotentDatum(np.asarray(u, dtype=complex))
        object.__setattr__(self, "unipotent", u)
        object.__setattr__(self, "b", nm.frac_part(nm.to_fraction(self.b)))


@dataclass(frozen=True)
class FukayaObject:
    """Indecomposable object (line, alpha, M)."""

    line: LagrangianLine
    local: GradedLocalSystem = field(default_factory=GradedLocalSystem)

    @classmethod
    def make(cls, direction, base, shift=0, b=0, N=None):
        N = nm.NilpotentDatum.zero(1) if N is None else N
        return cls(LagrangianLine(tuple(direction), tuple(base)), GradedLocalSystem(shift, nm.to_fraction(b), N))

    @property
    def alpha(self) -> float:
        return self.line.beta + self.local.shift

    @property
    def shift(self) -> int:
        return self.local.shift

    @property
    def b(self) -> Fraction:
        return self.local.b

    @property
    def N(self) -> np.ndarray:
        return self.local.unipotent.N

    @property
    def dim(self) -> int:
        return self.local.unipotent.dim

    @property
    def log_monodromy(self) -> np.ndarray:
        return -2j * np.pi * float(self.b) * np.eye(self.dim) + self.N

    @property
    def monodromy(self) -> np.ndarray:
        return np.exp(-2j * np.pi * float(self.b)) * nm.nilpotent_poly_exp(self.N)

    def transport(self, s) -> np.ndarray:
        return nm.nilpotent_exp(float(s), float(self.b), self.N)

    def shifted(self, k: int) -> "FukayaObject":
        loc = self.local
        return FukayaObject(self.line, GradedLocalSystem(loc.shift + k, loc.b, loc.unipotent))


@dataclass(frozen=True)
class FKObject:
    summands: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))

    @classmethod
    def of(cls, *objs) -> "FKObject":
        return cls(tuple(objs))

    def __add__(self, other):
        return FKObject(self.summands + other.summands)

    def __len__(self):
        return len(self.summands)


def shift_symp(X, k: int):
    if isinstance(X, FukayaObject):
        return X.shifted(k)
    return FKObject(tuple(s.shifted(k) for s in X.summands))


# -- Hom spaces ---------------------------------------------------------------


def _grading_gap(X: FukayaObject, Y: FukayaObject):
    """alpha_Y - alpha_X; exact integer when the directions agree."""
    if X.line.direction == Y.line.direction:
        return Y.shift - X.shift
    return Y.alpha - X.alpha


def _monodromy_operator(X: FukayaObject, Y: FukayaObject) -> np.ndarray:
    """Matrix of f -> M_Y f M_X^{-1} - f on row-major vec(f)."""
    MY = Y.monodromy
    MXi = np.linalg.inv(X.monodromy)
    return np.kron(MY, MXi.T) - np.eye(X.dim * Y.dim)


class SympHom:
    """Hom(X, Y) between indecomposable FK objects.

    kind: 'transversal' (coefficients per intersection point), 'h0', 'h1', 'zero'.
    """

    def __init__(self, X: FukayaObject, Y: FukayaObject):
        self.X, self.Y = X, Y
        self.block = X.dim * Y.dim
        self.points = []
        gap = _grading_gap(X, Y)
        if X.line.same_subset(Y.line):
            op = _monodromy_operator(X, Y)
            if gap == 0:
                self.kind = "h0"
                self.basis = nm.kernel_basis(op)
            elif gap == 1:
                self.kind = "h1"
                self.basis = nm.cokernel_representatives(op)
            else:
                self.kind, self.basis = "zero", None
            self.dim = 0 if self.basis is None else self.basis.shape[1]
            if self.dim == 0:
                self.kind = "zero"
            return
        if X.line.direction == Y.line.direction or not (0 <= gap < 1):
            self.kind, self.dim = "zero", 0
            return
        self.kind = "transversal"
        self.points = intersection_points(X.line, Y.line)
        self.index = {p[0]: i for i, p in enumerate(self.points)}
        self.dim = len(self.points) * self.block

    def zero(self):
        return np.zeros(self.dim, dtype=complex)

    def matrices(self, vec):
        """Per-point matrices (transversal) or the representative matrix (h0/h1)."""
        vec = np.asarray(vec, dtype=complex)
        if self.kind == "transversal":
            return vec.reshape(len(self.points), self.Y.dim, self.X.dim)
        if self.kind in ("h0", "h1"):
            return (self.basis @ vec).reshape(self.Y.dim, self.X.dim)
        raise CaseError("zero Hom space has no matrices")

    def vector(self, mats):
        if self.kind == "transversal":
            return np.asarray(mats, dtype=complex).reshape(-1)
        if self.kind in ("h0", "h1"):
            return self.basis.conj().T @ np.asarray(mats, dtype=complex).reshape(-1)
        return self.zero()

    def labels(self):
        if self.kind == "transversal":
            return [(tuple(str(c) for c in p[0]), i, j) for p in self.points
                    for i in range(self.Y.dim) for j in range(self.X.dim)]
        return [(self.kind, i) for i in range(self.dim)]


@lru_cache(maxsize=8192)
def hom_space_symp(X: FukayaObject, Y: FukayaObject, degree: int = 0) -> SympHom:
    return SympHom(X, Y.shifted(degree) if degree else Y)


def identity_symp(X: FukayaObject) -> np.ndarray:
    H = hom_space_symp(X, X)
    return H.vector(np.eye(X.dim))


# -- composition ---------------------------------------------------------------

_TAIL = 40.0


def triangle_sum(X1, X2, X3, u, v, tau, cutoff=None):
    """Case (i): sum over lifted triangles with vertices x3, x1, x2.

    u, v are per-point matrix stacks for Hom(X1, X2) and Hom(X2, X3); the
    result is the per-point stack for Hom(X1, X3). ``cutoff`` bounds the lift
    index |k| around the degenerate position; by default it is chosen so that
    dropped weights are below exp(-40).
    """
    tau = nm.as_tau(tau)
    H12, H23, H13 = hom_space_symp(X1, X2), hom_space_symp(X2, X3), hom_space_symp(X1, X3)
    for H in (H12, H23, H13):
        if H.kind != "transversal":
            raise CaseError("triangle sums need three transversal Hom spaces")
    if not (X1.alpha < X2.alpha < X3.alpha < X1.alpha + 1):
        raise CaseError("grading condition of case (i) violated")
    u = np.asarray(u, dtype=complex).reshape(len(H12.points), X2.dim, X1.dim)
    v = np.asarray(v, dtype=complex).reshape(len(H23.points), X3.dim, X2.dim)
    out = np.zeros((len(H13.points), X3.dim, X1.dim), dtype=complex)
    l1, l2, l3 = X1.line.direction, X2.line.direction, X3.line.direction
    c23 = _cross(l2, l3)
    base1 = X1.line.base
    # area of the triangle as a function of the lift offset s along line 1: C s^2
    s_unit = (Fraction(l1[0]), Fraction(l1[1]))
    sp = _cross((-s_unit[0], -s_unit[1]), l3) / c23
    x2u = (s_unit[0] + sp * l2[0], s_unit[1] + sp * l2[1])
    C = abs(_cross(s_unit, x2u)) / 2
    A = tau.imag
    if cutoff is None:
        cutoff = nm._WINDOW["fixed"]
    if cutoff is None:
        cutoff = nm._WINDOW["scale"] * (int(math.ceil(math.sqrt(_TAIL / (2 * math.pi * A * float(C))))) + 2)
    # along the lift index k everything moves linearly; the middle vertex
    # is looked up exactly, and its residue class is periodic in k
    n = 2 * cutoff + 2
    j = np.arange(n)
    ds = Fraction(_cross((-l1[0], -l1[1]), l3), c23)
    step2 = (l1[0] + ds * l2[0], l1[1] + ds * l2[1])
    period = math.lcm(step2[0].denominator, step2[1].denominator)
    l3f = np.array([float(l3[0]), float(l3[1])])
    for i3, (_, t13, _) in enumerate(H13.points):
        x3 = X1.line.point(t13)
        for i1, (_, t11, _) in enumerate(H12.points):
            if not np.any(u[i1]):
                continue
            k = math.floor(t13 - t11) - cutoff
            x1 = (base1[0] + (t11 + k) * l1[0], base1[1] + (t11 + k) * l1[1])
            s0 = _cross((x3[0] - x1[0], x3[1] - x1[1]), l3) / c23
            x2 = (x1[0] + s0 * l2[0], x1[1] + s0 * l2[1])
            hits = [H23.index.get(_frac2((x2[0] + q * step2[0], x2[1] + q * step2[1])))
                    for q in range(min(period, n))]
            i2 = np.array([-1 if h is None else h for h in hits])[j % len(hits)]
            keep = i2 >= 0
            keep[keep] = np.array([np.any(v[q]) for q in i2[keep]])
            if not np.any(keep):
                continue
            jj = j[keep].astype(float)
            d1 = float(t11 + k - t13) + jj
            s = float(s0) + float(ds) * jj
            x1f = np.array([float(x1[0]), float(x1[1])])[None, :] + np.outer(jj, [float(l1[0]), float(l1[1])])
            x2f = np.array([float(x2[0]), float(x2[1])])[None, :] + np.outer(jj, [float(step2[0]), float(step2[1])])
            dx = x2f - np.array([float(x3[0]), float(x3[1])])
            r1 = x1f - np.array([float(x3[0]), float(x3[1])])
            back = -(dx @ l3f) / (l3f @ l3f)
            area = np.abs(r1[:, 0] * dx[:, 1] - r1[:, 1] * dx[:, 0]) / 2
            w = np.exp(2j * np.pi * tau * area)
            P1 = nm.nilpotent_exp_many(d1, X1.b, X1.N)
            P2 = nm.nilpotent_exp_many(s, X2.b, X2.N)
            P3 = nm.nilpotent_exp_many(back, X3.b, X3.N)
            terms = P3 @ v[i2[keep]] @ P2 @ u[i1] @ P1
            out[i3] += np.tensordot(w, terms, axes=1)
    return out


def composition_case(X1, X2, X3) -> str:
    """Label "i".."v" of the composition rule used for Hom(X1, X2) x Hom(X2, X3)."""
    kinds = [hom_space_symp(A, B).kind for A, B in ((X1, X2), (X2, X3), (X1, X3))]
    if "zero" in kinds[:2]:
        return "-"
    if kinds[2] == "zero":
        return "ii"
    if "h1" in kinds:
        return "v"
    if kinds == ["transversal"] * 3:
        return "i"
    if "transversal" in kinds:
        return "iii"
    return "iv"


def compose_symp_blocks(X1, X2, X3, u, v, tau, cutoff=None) -> np.ndarray:
    """v o u for u in Hom(X1, X2), v in Hom(X2, X3) (coefficient vectors)."""
    H12, H23, H13 = hom_space_symp(X1, X2), hom_space_symp(X2, X3), hom_space_symp(X1, X3)
    if H13.dim == 0 or H12.dim == 0 or H23.dim == 0:
        return np.zeros(H13.dim, dtype=complex)
    k12, k23, k13 = H12.kind, H23.kind, H13.kind
    if k12 == "transversal" and k23 == "transversal":
        if k13 == "transversal":
            return triangle_sum(X1, X2, X3, H12.matrices(u), H23.matrices(v), tau, cutoff).reshape(-1)
        if k13 == "h1":
            # case (v): <v o u, h> = <v, u o h> gives the class of sum_x v_x u_x
            U = H12.matrices(u)
            V = H23.matrices(v)
            total = np.zeros((X3.dim, X1.dim), dtype=complex)
            for i1, (P, _, _) in enumerate(H12.points):
                total += V[H23.index[P]] @ U[i1]
            return H13.vector(total)
        raise CompositionError(f"unexpected target kind {k13}")
    if k12 == "transversal":
        # flat map after a transversal one: stalkwise
        F = H23.matrices(v)
        return H13.vector(np.einsum("ij,njk->nik", F, H12.matrices(u)))
    if k23 == "transversal":
        F = H12.matrices(u)
        return H13.vector(np.einsum("nij,jk->nik", H23.matrices(v), F))
    # same-line linear algebra (h0.h0, h0.h1, h1.h0)
    return H13.vector(H23.matrices(v) @ H12.matrices(u))


def serre_pairing(X, Y, f, g) -> complex:
    """<f, g> = sum_x tr(g_x f_x) for f in Hom(X, Y[1]) and g in Hom(Y, X)."""
    Hf = hom_space_symp(X, Y, 1)
    Hg = hom_space_symp(Y, X)
    if Hf.dim == 0:
        return 0j
    F, G = Hf.matrices(f), Hg.matrices(g)
    if Hf.kind == "transversal":
        total = 0j
        for i, (P, _, _) in enumerate(Hf.points):
            total += np.trace(G[Hg.index[P]] @ F[i])
        return total
    return complex(np.trace(G @ F))


def serre_dual_symp(X, Y) -> np.ndarray:
    """Pairing matrix P[i, j] = <e_i, g_j> between bases of Hom(X, Y[1]) and Hom(Y, X)."""
    Hf = hom_space_symp(X, Y, 1)
    Hg = hom_space_symp(Y, X)
    if Hf.dim != Hg.dim:
        raise AssertionError("Serre duality dimension mismatch")
    if Hf.dim == 0:
        return np.zeros((0, 0), dtype=complex)
    F = np.stack([np.asarray(Hf.matrices(e)) for e in np.eye(Hf.dim)])
    G = np.stack([np.asarray(Hg.matrices(e)) for e in np.eye(Hg.dim)])
    if Hf.kind == "transversal":
        G = G[:, [Hg.index[p[0]] for p in Hf.points]]
        return np.einsum("inab,jnba->ij", F, G)
    return np.einsum("iab,jba->ij", F, G)


# -- morphisms between FK objects -------------------------------------------


@dataclass
class SympMorphism:
    """Block morphism; ``blocks[(i, j)]`` lives in Hom(X_i, Y_j)."""

    source: FKObject
    target: FKObject
    blocks: dict
    tau: complex

    def max_abs(self) -> float:
        vals = [np.max(np.abs(v)) for v in self.blocks.values() if np.size(v)]
        return float(max(vals)) if vals else 0.0

    def __sub__(self, other):
        keys = set(self.blocks) | set(other.blocks)
        out = {}
        for k in keys:
            a, b = self.blocks.get(k), other.blocks.get(k)
            if a is None:
                a = np.zeros_like(b)
            if b is None:
                b = np.zeros_like(a)
            out[k] = a - b
        return SympMorphism(self.source, self.target, out, self.tau)


def zero_symp(source: FKObject, target: FKObject, tau) -> SympMorphism:
    blocks = {}
    for i, X in enumerate(source.summands):
        for j, Y in enumerate(target.summands):
            d = hom_space_symp(X, Y).dim
            if d:
                blocks[(i, j)] = np.zeros(d, dtype=complex)
    return SympMorphism(source, target, blocks, nm.as_tau(tau))


def compose_symp(u: SympMorphism, v: SympMorphism, cutoff=None) -> SympMorphism:
    """v o u."""
    if u.target != v.source:
        raise CompositionError("target of u differs from source of v")
    out = zero_symp(u.source, v.target, u.tau)
    for (i, k) in list(out.blocks):
        X1, X3 = u.source.summands[i], v.target.summands[k]
        acc = out.blocks[(i, k)]
        for j, X2 in enumerate(u.target.summands):
            a, b = u.blocks.get((i, j)), v.blocks.get((j, k))
            if a is None or b is None or not np.any(a) or not np.any(b):
                continue
            acc = acc + compose_symp_blocks(X1, X2, X3, a, b, u.tau, cutoff)
        out.blocks[(i, k)] = acc
    return out


# -- functors -----------------------------------------------------------------


def _same_interval_shift(X: FukayaObject) -> int:
    return X.shift


def companion_monodromy(M: np.ndarray, d: int) -> np.ndarray:
    """Monodromy of the direct image over a degree-d cover: (v1..vd) -> (v2, ..., vd, M v1)."""
    M = np.asarray(M, dtype=complex)
    k = M.shape[0]
    C = np.zeros((d * k, d * k), dtype=complex)
    for i in range(d - 1):
        C[i * k:(i + 1) * k, (i + 1) * k:(i + 2) * k] = np.eye(k)
    C[(d - 1) * k:, :k] = M
    return C


def p_pushforward(r: int, X) -> FKObject:
    """Direct image under p_r(x, y) = (r x, y) from E^{r tau} to E^tau."""
    if isinstance(X, FKObject):
        return FKObject(tuple(s for Y in X.summands for s in p_pushforward(r, Y).summands))
    q, p = X.line.direction
    Q, P = r * q, p
    g = math.gcd(Q, P)
    base = (r * X.line.base[0], X.line.base[1])
    line = LagrangianLine((Q // g, P // g), base)
    # cyclic direct image splits into g eigen-summands
    out = []
    for s in range(g):
        loc = GradedLocalSystem(X.shift, (X.b + s) / g, nm.NilpotentDatum(X.N / g))
        out.append(FukayaObject(line, loc))
    return FKObject(tuple(out))


def p_pullback(r: int, X) -> FKObject:
    """Preimage under p_r, one summand per connected component."""
    if isinstance(X, FKObject):
        return FKObject(tuple(s for Y in X.summands for s in p_pullback(r, Y).summands))
    q, p = X.line.direction
    g = math.gcd(q, r)
    cover = r // g
    direction = (q // g, r * p // g)
    out = []
    for j in range(g):
        base = ((X.line.base[0] + j) / r, X.line.base[1])
        loc = GradedLocalSystem(X.shift, cover * X.b, nm.NilpotentDatum(cover * X.N))
        out.append(FukayaObject(LagrangianLine(direction, base), loc))
    return FKObject(tuple(out))


def translate_symp(vector, X):
    """Image of X under the translation by ``vector``."""
    if isinstance(X, FKObject):
        return FKObject(tuple(translate_symp(vector, Y) for Y in X.summands))
    v = tuple(nm.to_fraction(c) for c in vector)
    base = (X.line.base[0] + v[0], X.line.base[1] + v[1])
    return FukayaObject(LagrangianLine(X.line.direction, base), X.local)


# -- JSON ----------------------------------------------------------------------


def _fs(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def object_to_json(X) -> list:
    if isinstance(X, FukayaObject):
        X = FKObject.of(X)
    out = []
    for Y in X.summands:
        N = Y.N
        out.append({"line": {"dir": list(Y.line.direction), "base": [_fs(c) for c in Y.line.base]},
                    "alpha": Y.alpha, "b": _fs(Y.b),
                    "N": [[[float(z.real), float(z.imag)] if z.imag else float(z.real) for z in row] for row in N]})
    return out


def object_from_json(data) -> FKObject:
    if isinstance(data, dict):
        data = [data]
    objs = []
    for d in data:
        line = LagrangianLine(tuple(d["line"]["dir"]), tuple(Fraction(str(c)) for c in d["line"]["base"]))
        shift = round(float(d.get("alpha", line.beta)) - line.beta)
        if abs(float(d.get("alpha", line.beta)) - line.beta - shift) > 1e-9:
            raise ValueError("alpha is not a logarithm of the slope")
        rows = d.get("N", [[0]])
        N = np.array([[complex(*z) if isinstance(z, list) else complex(z) for z in row] for row in rows])
        objs.append(FukayaObject(line, GradedLocalSystem(shift, Fraction(str(d.get("b", "0"))), nm.NilpotentDatum(N))))
    return FKObject(tuple(objs))


def morphism_to_json(f: SympMorphism) -> dict:
    blocks = []
    for (i, j), vec in sorted(f.blocks.items()):
        H = hom_space_symp(f.source.summands[i], f.target.summands[j])
        blocks.append({"source": i, "target": j, "kind": H.kind,
                       "points": [[_fs(c) for c in p[0]] for p in H.points],
                       "coefficients": [[float(z.real), float(z.imag)] for z in vec]})
    return {"source": object_to_json(f.source), "target": object_to_json(f.target),
            "tau": [f.tau.real, f.tau.imag], "blocks": blocks}
