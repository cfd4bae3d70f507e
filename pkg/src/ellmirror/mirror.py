"""The mirror functor Phi_tau from the holomorphic model to FK^0(E^tau)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fukaya as fk
from . import holo as ho
from . import numerics as nm


class UnsupportedInput(ValueError):
    pass


# -- objects -------------------------------------------------------------------


def mirror_sheaf(s, shift: int = 0) -> fk.FukayaObject:
    if isinstance(s, ho.TorsionDatum):
        line = fk.LagrangianLine((0, 1), (-s.a, Fraction(0)))
        return fk.FukayaObject(line, fk.GradedLocalSystem(shift, -s.b, s.module))
    line = fk.LagrangianLine((s.r, s.n), (s.r * s.a, (s.n - 1) * s.a))
    return fk.FukayaObject(line, fk.GradedLocalSystem(shift, s.b, s.unipotent))


def mirror_object(A) -> fk.FKObject:
    if not isinstance(A, ho.DbObject):
        A = ho.DbObject.of(A)
    return fk.FKObject(tuple(mirror_sheaf(s, k) for s, k in A.summands))


def mirror_inverse(X) -> ho.DbObject:
    """Normal-form sheaf (with shift) whose mirror is isomorphic to X."""
    if isinstance(X, fk.FKObject):
        if len(X.summands) != 1:
            raise fk.CaseError("mirror_inverse expects an indecomposable object")
        X = X.summands[0]
    if not X.local.unipotent.cyclic:
        raise fk.CaseError("local system is decomposable")
    q, p = X.line.direction
    for c in X.line.base + (X.b,):
        if not isinstance(c, Fraction):
            raise UnsupportedInput("irrational data")
    if q == 0:
        # vertical line x = -a
        a = nm.frac_part(-X.line.base[0])
        return ho.DbObject.of(ho.TorsionDatum(a, -X.b, X.local.unipotent), X.shift)
    r, n = q, p
    # x-intercept of y = (n / r) x - a ... is r a
    c = nm.frac_part(fk._cross(X.line.base, (r, n)))  # = n x0 - r y0 mod 1
    # line: n x - r y = c ; base (r a, (n - 1) a) gives n r a - r (n - 1) a = r a
    a = c / r
    return ho.DbObject.of(ho.BundleDatum(r, a, X.b, n, X.local.unipotent), X.shift)


def _jordan_signature(N: np.ndarray):
    """Ranks of powers; determines the nilpotent conjugacy class."""
    return tuple(nm.matrix_rank(np.linalg.matrix_power(N, k)) for k in range(1, N.shape[0] + 1))


def _summand_key(X: fk.FukayaObject):
    return (X.line.direction, X.line.offset, X.shift, X.b, X.dim, _jordan_signature(X.N))


def is_isomorphic_fk(X, Y) -> bool:
    if isinstance(X, fk.FukayaObject):
        X = fk.FKObject.of(X)
    if isinstance(Y, fk.FukayaObject):
        Y = fk.FKObject.of(Y)
    kx = sorted(map(repr, (_summand_key(s) for s in X.summands)))
    ky = sorted(map(repr, (_summand_key(s) for s in Y.summands)))
    return kx == ky


def _sheaf_key(s, k):
    if isinstance(s, ho.TorsionDatum):
        return ("T", s.a, s.b, s.dim, _jordan_signature(s.N), k)
    return ("B", s.r, s.a, s.b, s.n, s.dim, _jordan_signature(s.N), k)


def is_isomorphic_db(A, B) -> bool:
    if not isinstance(A, ho.DbObject):
        A = ho.DbObject.of(A)
    if not isinstance(B, ho.DbObject):
        B = ho.DbObject.of(B)
    ka = sorted(map(repr, (_sheaf_key(s, k) for s, k in A.summands)))
    kb = sorted(map(repr, (_sheaf_key(s, k) for s, k in B.summands)))
    return ka == kb


# -- morphisms -------------------------------------------------------------------


def _bundle_block(A, B, tau) -> np.ndarray:
    """Matrix of Phi from Hom(A, B) coefficients to Hom(Phi A, Phi B) coefficients."""
    H = ho.hom_space(A, B, tau)
    X, Y = mirror_sheaf(A), mirror_sheaf(B)
    S = fk.hom_space_symp(X, Y)
    if H.dim != S.dim:
        raise AssertionError(f"dimension mismatch {H.dim} vs {S.dim}")
    M = np.zeros((S.dim, H.dim), dtype=complex)
    if H.dim == 0:
        return M
    r = H.r
    blk = A.dim * B.dim
    col = 0
    for nu, c in enumerate(H.components):
        if c.dim == 0:
            continue
        if c.D == 0:
            # flat maps on a common line: identity on matrices
            for i in range(c.dim):
                E = c.kernel[:, i]
                M[:, col + i] = S.vector(E.reshape(B.dim, A.dim))
            col += c.dim
            continue
        P1, P2 = c.P1, c.P2
        D = c.D
        da = P2.alpha - P1.alpha
        # the scalar normalisation lives in the holomorphic basis (component_log_scale)
        G = nm.nilpotent_poly_exp(float(da) / D * c.Nh)
        if nu:
            # component nu pulls the source back along a shifted isogeny
            G = G @ nm.right_mult(nm.nilpotent_poly_exp(nu / A.r * A.N), B.dim)
        for k in range(D):
            xc = (da + k) / D
            yc = (P1.n * P2.alpha - P2.n * P1.alpha + P1.n * k) / D
            pt = (nm.frac_part(r * xc), nm.frac_part(yc))
            ip = S.index[pt]
            for e in range(blk):
                M[ip * blk:(ip + 1) * blk, col + k * blk + e] = G[:, e]
        col += c.dim
    return M


def _torsion_factor(n, a1, a2, N1, N2):
    """Unipotent part of Phi on Hom(L (x) F(V1, N1), S(a2 tau + b2, V2, N2)).

    The scalar part is absorbed into the holomorphic basis (see holo.torsion_scales).
    """
    d1, d2 = N1.shape[0], N2.shape[0]
    left = nm.left_mult(nm.nilpotent_poly_exp(-(a1 + n * a2) * N2), d1)
    right = nm.right_mult(nm.nilpotent_poly_exp(a2 * N1), d2)
    return left @ right


def _bundle_torsion_block(A, B, tau) -> np.ndarray:
    H = ho.hom_space(A, B, tau)
    X, Y = mirror_sheaf(A), mirror_sheaf(B)
    S = fk.hom_space_symp(X, Y)
    r = A.r
    blk = H.block
    M = np.zeros((S.dim, H.dim), dtype=complex)
    for u, off in enumerate(ho.torsion_offsets(r, B.a)):
        a2 = (B.a + off) / r
        G = _torsion_factor(A.n, float(A.a), float(a2), A.N, B.N)
        # cover point (-a2, -n a2 - a1) pushed by (x, y) -> (r x, y)
        pt = (nm.frac_part(-r * a2), nm.frac_part(-A.n * a2 - A.a))
        ip = S.index[pt]
        # stored b on the vertical line is frac(-b2); the integer offset acts as a gauge
        m = Y.b + B.b
        G = G * np.exp(-2j * np.pi * float(m * Y.line.parameter(pt)))
        M[ip * blk:(ip + 1) * blk, u * blk:(u + 1) * blk] = G
    return M


def _torsion_block(A, B, tau) -> np.ndarray:
    H = ho.hom_space(A, B, tau)
    S = fk.hom_space_symp(mirror_sheaf(A), mirror_sheaf(B))
    M = np.zeros((S.dim, H.dim), dtype=complex)
    for i in range(H.dim):
        M[:, i] = S.vector(H.kernel[:, i].reshape(B.dim, A.dim))
    return M


_CACHE: dict = {}


def phi_matrix(A, B, tau) -> np.ndarray:
    """Matrix of Phi on degree-0 Hom(A, B) between indecomposable sheaves."""
    tau = nm.as_tau(tau)
    key = (A, B, tau)
    if key in _CACHE:
        return _CACHE[key]
    H = ho.hom_space(A, B, tau)
    if H.kind == "bundle":
        M = _bundle_block(A, B, tau)
    elif H.kind == "bundle_torsion":
        M = _bundle_torsion_block(A, B, tau)
    elif H.kind == "torsion":
        M = _torsion_block(A, B, tau)
    else:
        M = np.zeros((0, 0), dtype=complex)
    _CACHE[key] = M
    return M


def phi_matrix_degree1(A, B, tau) -> np.ndarray:
    """Matrix of Phi on Hom(A, B[1]) = Hom(B, A)^* (dual transport).

    A functional c is sent to the element x of Hom(Phi A, Phi B[1]) with
    <x, Phi g> = c(g) for every g in Hom(B, A).
    """
    tau = nm.as_tau(tau)
    key = ("deg1", A, B, tau)
    if key in _CACHE:
        return _CACHE[key]
    Pg = phi_matrix(B, A, tau)  # coefficients of Phi g
    X, Y = mirror_sheaf(A), mirror_sheaf(B)
    P = fk.serre_dual_symp(X, Y)  # <e_i, g_j>
    n = Pg.shape[1]
    if n == 0:
        M = np.zeros((0, 0), dtype=complex)
    else:
        # want x with x^T P Pg = c^T  ->  x = (P Pg)^{-T} c
        M = np.linalg.inv(P @ Pg).T
    _CACHE[key] = M
    return M


@dataclass
class MirrorMap:
    """Phi_tau with its per-pair matrices cached."""

    tau: complex
    cache: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau = nm.as_tau(self.tau)

    def object(self, A):
        return mirror_object(A)

    def block(self, A, B, degree: int):
        return phi_matrix(A, B, self.tau) if degree == 0 else phi_matrix_degree1(A, B, self.tau)

    def morphism(self, f: ho.HoloMorphism) -> fk.SympMorphism:
        return mirror_morphism(f)


def mirror_morphism(f: ho.HoloMorphism) -> fk.SympMorphism:
    src, tgt = mirror_object(f.source), mirror_object(f.target)
    out = fk.zero_symp(src, tgt, f.tau)
    for (i, j), vec in f.blocks.items():
        A, sa = f.source.summands[i]
        B, sb = f.target.summands[j]
        d = sb - sa
        M = phi_matrix(A, B, f.tau) if d == 0 else phi_matrix_degree1(A, B, f.tau)
        if M.size == 0:
            continue
        out.blocks[(i, j)] = M @ np.asarray(vec, dtype=complex)
    return out
