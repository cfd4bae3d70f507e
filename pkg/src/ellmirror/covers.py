"""Covers p = t o p_r of the symplectic torus, their functors on morphisms,
the adjunction isomorphisms and the base-change isomorphism.

Every object produced here by pulling back or pushing forward is described by
stalk matrices. At a point P, the stalks of the summands of F(O) through P are
scalar combinations of stalks of the original object O at the fibre points
over (or under) P:

    F(O)_k(P) = sum_a M(P)[k, a] O_{i(a)}(Q(a)),

where a = (i, Q) runs over summand/point pairs of O. M(P) is square and
invertible, and all identifications are phases (or 1/g averages), so a
morphism phi: O -> O' induces F(phi)(P) = M'(P) diag(phi) M(P)^{-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import fukaya as fk
from . import numerics as nm


def _pt(p):
    return (nm.frac_part(nm.to_fraction(p[0])), nm.frac_part(nm.to_fraction(p[1])))


def on_line(line: fk.LagrangianLine, P) -> bool:
    diff = (P[0] - line.base[0], P[1] - line.base[1])
    return nm.frac_part(fk._cross(diff, line.direction)) == 0


def _as_fk(X) -> fk.FKObject:
    return X if isinstance(X, fk.FKObject) else fk.FKObject.of(X)


@dataclass(frozen=True)
class Cover:
    """p(x, y) = (r x + c, y) from E^{r tau} to E^tau."""

    r: int
    c: Fraction = Fraction(0)

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("cover degree must be positive")
        object.__setattr__(self, "c", nm.to_fraction(self.c))

    def image(self, y):
        return _pt((self.r * y[0] + self.c, y[1]))

    def fibre(self, x):
        return [_pt(((x[0] - self.c + k) / self.r, x[1])) for k in range(self.r)]

    def pullback(self, W):
        return fk.p_pullback(self.r, fk.translate_symp((-self.c, 0), W))

    def pushforward(self, U):
        return fk.translate_symp((self.c, 0), fk.p_pushforward(self.r, U))


# -- images of objects with stalk matrices -----------------------------------


class Image:
    """F(O) for a composite of pullbacks and pushforwards applied to O."""

    summands: list

    def stalk(self, P):
        """(rows, cols, M): summand indices through P, pairs (i, Q) of O, scalar matrix."""
        raise NotImplementedError

    @property
    def obj(self) -> fk.FKObject:
        return fk.FKObject(tuple(self.summands))


class Base(Image):
    def __init__(self, O):
        self.source = _as_fk(O)
        self.summands = list(self.source.summands)

    def stalk(self, P):
        rows = [i for i, X in enumerate(self.summands) if on_line(X.line, P)]
        cols = [(i, P) for i in rows]
        return rows, cols, np.eye(len(rows), dtype=complex)


class Pulled(Image):
    def __init__(self, cover: Cover, inner: Image):
        self.cover, self.inner = cover, inner
        self.summands, self.owner, self.gauge = [], [], []
        for i, X in enumerate(inner.summands):
            comps = cover.pullback(X).summands
            degree = cover.r // math.gcd(X.line.direction[0], cover.r)
            for C in comps:
                self.owner.append(i)
                # stored vector = exp(2 pi i m t) * pulled-back vector, b_true = b_stored + m
                self.gauge.append(degree * X.b - C.b)
                self.summands.append(C)

    def phase(self, k, y) -> complex:
        t = self.summands[k].line.parameter(y)
        return np.exp(2j * np.pi * float(self.gauge[k] * t))

    def stalk(self, y):
        y = _pt(y)
        rows_in, cols, M = self.inner.stalk(self.cover.image(y))
        rows, out = [], []
        for idx, i in enumerate(rows_in):
            k = next(k for k, o in enumerate(self.owner) if o == i and on_line(self.summands[k].line, y))
            rows.append(k)
            out.append(self.phase(k, y) * M[idx])
        order = np.argsort(rows)
        return [rows[o] for o in order], cols, np.array([out[o] for o in order]).reshape(len(rows), len(cols))


class Pushed(Image):
    def __init__(self, cover: Cover, inner: Image):
        self.cover, self.inner = cover, inner
        self.summands, self.owner, self.sector, self.degree = [], [], [], []
        for i, X in enumerate(inner.summands):
            Z = cover.pushforward(X).summands
            for s, S in enumerate(Z):
                self.summands.append(S)
                self.owner.append(i)
                self.sector.append(s)
                self.degree.append(len(Z))

    def stalk(self, x):
        x = _pt(x)
        pieces = [(y,) + tuple(self.inner.stalk(y)) for y in self.cover.fibre(x)]
        cols = []
        for _, _, c, _ in pieces:
            cols += [a for a in c if a not in cols]
        where = {a: n for n, a in enumerate(cols)}
        rows = [k for k, i in enumerate(self.owner)
                if any(i in rin for _, rin, _, _ in pieces)]
        M = np.zeros((len(rows), len(cols)), dtype=complex)
        for n, k in enumerate(rows):
            i, s, g = self.owner[k], self.sector[k], self.degree[k]
            line = self.inner.summands[i].line
            for y, rin, c, Min in pieces:
                if i not in rin:
                    continue
                theta = float(line.parameter(y))
                row = Min[rin.index(i)]
                for m, a in enumerate(c):
                    M[n, where[a]] += np.exp(-2j * np.pi * s * theta) / g * row[m]
        return rows, cols, M


class Summed(Image):
    def __init__(self, parts):
        self.parts = list(parts)
        self.summands, self.offsets = [], []
        for part in self.parts:
            self.offsets.append(len(self.summands))
            self.summands += part.summands

    def stalk(self, P):
        got = [part.stalk(P) for part in self.parts]
        cols = []
        for _, c, _ in got:
            cols += [a for a in c if a not in cols]
        where = {a: n for n, a in enumerate(cols)}
        rows = [off + k for off, (r, _, _) in zip(self.offsets, got) for k in r]
        M = np.zeros((len(rows), len(cols)), dtype=complex)
        n = 0
        for r, c, Min in got:
            for idx in range(len(r)):
                for m, a in enumerate(c):
                    M[n, where[a]] += Min[idx, m]
                n += 1
        return rows, cols, M


def pullback_image(cover: Cover, O) -> Pulled:
    return Pulled(cover, O if isinstance(O, Image) else Base(O))


def pushforward_image(cover: Cover, O) -> Pushed:
    return Pushed(cover, O if isinstance(O, Image) else Base(O))


# -- morphism blocks -------------------------------------------------------------


def block_value(X, Y, vec, P, degree: int = 0):
    """Matrix of the Hom(X, Y) element ``vec`` at the point P (constant on a common line)."""
    H = fk.hom_space_symp(X, Y, degree)
    if H.dim == 0 or vec is None:
        return None
    if H.kind == "transversal":
        i = H.index.get(P)
        return None if i is None else H.matrices(vec)[i]
    return H.matrices(vec)


def reference_point(X: fk.FukayaObject):
    return _pt(X.line.base)


def _block_points(H):
    return [p[0] for p in H.points] if H.kind == "transversal" else None


def _fill(X, Y, at) -> np.ndarray:
    """Coefficient vector of Hom(X, Y) from a callback P -> matrix (None for zero)."""
    H = fk.hom_space_symp(X, Y)
    if H.dim == 0:
        return np.zeros(0, dtype=complex)
    if H.kind == "transversal":
        mats = np.zeros((len(H.points), Y.dim, X.dim), dtype=complex)
        for n, (P, _, _) in enumerate(H.points):
            m = at(P)
            if m is not None:
                mats[n] = m
        return H.vector(mats)
    m = at(reference_point(X))
    if m is None:
        return H.zero()
    return H.vector(m)


def image_morphism(FA: Image, FB: Image, phi: fk.SympMorphism, tau) -> fk.SympMorphism:
    """F(phi): F(A) -> F(B) for phi: A -> B, where FA, FB apply the same functor."""
    A, B = phi.source, phi.target
    out = fk.zero_symp(FA.obj, FB.obj, tau)

    def at_point(k, kp):
        def at(P):
            ra, ca, Ma = FA.stalk(P)
            rb, cb, Mb = FB.stalk(P)
            if k not in ra or kp not in rb:
                return None
            Minv = np.linalg.inv(Ma)
            row = Mb[rb.index(kp)]
            col = Minv[:, ra.index(k)]
            acc = np.zeros((FB.summands[kp].dim, FA.summands[k].dim), dtype=complex)
            for m, (j, Q) in enumerate(cb):
                if row[m] == 0:
                    continue
                for n, (i, Qs) in enumerate(ca):
                    if Qs != Q or col[n] == 0:
                        continue
                    val = block_value(A.summands[i], B.summands[j], phi.blocks.get((i, j)), Q)
                    if val is not None:
                        acc += row[m] * col[n] * val
            return acc
        return at

    for (k, kp) in list(out.blocks):
        out.blocks[(k, kp)] = _fill(FA.summands[k], FB.summands[kp], at_point(k, kp))
    return out


# -- flattening ------------------------------------------------------------------------


def hom_layout(source, target):
    """Block keys and dimensions of Hom(source, target) in flattening order."""
    source, target = _as_fk(source), _as_fk(target)
    out = []
    for i, X in enumerate(source.summands):
        for j, Y in enumerate(target.summands):
            d = fk.hom_space_symp(X, Y).dim
            if d:
                out.append(((i, j), d))
    return out


def flatten(f: fk.SympMorphism) -> np.ndarray:
    parts = [np.asarray(f.blocks[key]) for key, _ in hom_layout(f.source, f.target)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def unflatten(vec, source, target, tau) -> fk.SympMorphism:
    source, target = _as_fk(source), _as_fk(target)
    out = fk.zero_symp(source, target, tau)
    pos = 0
    for key, d in hom_layout(source, target):
        out.blocks[key] = np.asarray(vec[pos: pos + d], dtype=complex)
        pos += d
    return out


def _matrix_of(fn, source, target, tau) -> np.ndarray:
    n = sum(d for _, d in hom_layout(source, target))
    cols = []
    for i in range(n):
        e = np.zeros(n, dtype=complex)
        e[i] = 1
        cols.append(flatten(fn(unflatten(e, source, target, tau))))
    if not cols:
        return np.zeros((0, 0), dtype=complex)
    return np.stack(cols, axis=1)


# -- adjunction ----------------------------------------------------------------------


@dataclass
class AdjunctionIso:
    """Both adjunctions for p = t o p_r between W on E^tau and U on E^{r tau}.

    ``forward`` maps Hom(p^* W, U) to Hom(W, p_* U); ``backward`` maps
    Hom(p_* U, W) to Hom(U, p^* W). Both are matrices on flattened coefficients.
    """

    cover: Cover
    W: fk.FKObject
    U: fk.FKObject
    pulled: Pulled
    pushed: Pushed
    forward: np.ndarray
    backward: np.ndarray

    def forward_map(self, h: fk.SympMorphism, tau) -> fk.SympMorphism:
        return adjoint_forward(self.cover, self.pulled, self.pushed, h, tau)

    def backward_map(self, g: fk.SympMorphism, tau_cover) -> fk.SympMorphism:
        return adjoint_backward(self.cover, self.pulled, self.pushed, g, tau_cover)


def adjoint_forward(cover, pulled: Pulled, pushed: Pushed, h: fk.SympMorphism, tau) -> fk.SympMorphism:
    """h: p^* W -> U  gives  W -> p_* U (tau is the modulus downstairs)."""
    W, U = pulled.inner.source, pushed.inner.source
    out = fk.zero_symp(W, pushed.obj, tau)

    def at_point(i, k):
        def at(x):
            rz, cz, Mz = pushed.stalk(x)
            if k not in rz:
                return None
            row = Mz[rz.index(k)]
            acc = np.zeros((pushed.summands[k].dim, W.summands[i].dim), dtype=complex)
            for m, (l, y) in enumerate(cz):
                if row[m] == 0:
                    continue
                rp, cp, Mp = pulled.stalk(y)
                if (i, x) not in cp:
                    continue
                col = Mp[:, cp.index((i, x))]
                for n, j in enumerate(rp):
                    if col[n] == 0:
                        continue
                    val = block_value(pulled.summands[j], U.summands[l], h.blocks.get((j, l)), y)
                    if val is not None:
                        acc += row[m] * col[n] * val
            return acc
        return at

    for (i, k) in list(out.blocks):
        out.blocks[(i, k)] = _fill(W.summands[i], pushed.summands[k], at_point(i, k))
    return out


def adjoint_backward(cover, pulled: Pulled, pushed: Pushed, g: fk.SympMorphism, tau_cover) -> fk.SympMorphism:
    """g: p_* U -> W  gives  U -> p^* W (tau_cover is the modulus upstairs)."""
    W, U = pulled.inner.source, pushed.inner.source
    out = fk.zero_symp(U, pulled.obj, tau_cover)

    def at_point(l, j):
        def at(y):
            rp, cp, Mp = pulled.stalk(y)
            if j not in rp:
                return None
            row = Mp[rp.index(j)]
            acc = np.zeros((pulled.summands[j].dim, U.summands[l].dim), dtype=complex)
            for m, (i, x) in enumerate(cp):
                if row[m] == 0:
                    continue
                rz, cz, Mz = pushed.stalk(x)
                if (l, y) not in cz:
                    continue
                col = Mz[:, cz.index((l, y))]
                for n, k in enumerate(rz):
                    if col[n] == 0:
                        continue
                    val = block_value(pushed.summands[k], W.summands[i], g.blocks.get((k, i)), x)
                    if val is not None:
                        acc += row[m] * col[n] * val
            return acc
        return at

    for (l, j) in list(out.blocks):
        out.blocks[(l, j)] = _fill(U.summands[l], pulled.summands[j], at_point(l, j))
    return out


def adjunction_iso(cover: Cover, W, U, tau) -> AdjunctionIso:
    """Explicit matrices of both adjunction isomorphisms (tau: modulus of the base)."""
    tau = nm.as_tau(tau)
    W, U = _as_fk(W), _as_fk(U)
    pulled = pullback_image(cover, W)
    pushed = pushforward_image(cover, U)
    tau_cover = cover.r * tau
    fwd = _matrix_of(lambda h: adjoint_forward(cover, pulled, pushed, h, tau), pulled.obj, U, tau_cover)
    bwd = _matrix_of(lambda g: adjoint_backward(cover, pulled, pushed, g, tau_cover), pushed.obj, W, tau)
    return AdjunctionIso(cover, W, U, pulled, pushed, fwd, bwd)


# -- base change ------------------------------------------------------------------------


@dataclass
class BaseChangeIso:
    """p_{r2}^* p_{r1*} X  ~=  sum_nu q1_{nu*} q2_nu^* X on E^{r2 tau}.

    The fibre product of the two covers is E^{r tau} x Z/d with d = gcd(r1, r2)
    and r = r1 r2 / d; component nu maps to E^{r1 tau} by z -> ((r2/d) z0 + nu/r1, z1)
    and to E^{r2 tau} by z -> ((r1/d) z0, z1).
    """

    r1: int
    r2: int
    d: int
    left: Image
    right: Summed
    iso: fk.SympMorphism
    inverse: fk.SympMorphism
    blocks: list  # right summand indices belonging to each nu


def fibre_covers(r1: int, r2: int, nu: int):
    d = math.gcd(r1, r2)
    return Cover(r2 // d, Fraction(nu, r1)), Cover(r1 // d)


def base_change_images(r1: int, r2: int, X):
    d = math.gcd(r1, r2)
    left = pullback_image(Cover(r2), pushforward_image(Cover(r1), X))
    parts = []
    for nu in range(d):
        to1, to2 = fibre_covers(r1, r2, nu)
        parts.append(pushforward_image(to2, pullback_image(to1, X)))
    return left, Summed(parts)


def _stalk_iso(src: Image, dst: Image, P):
    """Matrix of the canonical identification src(P) -> dst(P) on summand rows."""
    rs, cs, Ms = src.stalk(P)
    rd, cd, Md = dst.stalk(P)
    if set(cs) != set(cd):
        raise AssertionError("the two sides see different fibre points")
    perm = [cs.index(a) for a in cd]
    return rs, rd, Md @ np.linalg.inv(Ms)[perm, :]


def _iso_morphism(src: Image, dst: Image, tau) -> fk.SympMorphism:
    out = fk.zero_symp(src.obj, dst.obj, tau)
    for (k, l) in list(out.blocks):
        X, Y = src.summands[k], dst.summands[l]

        def at(P, k=k, l=l, X=X, Y=Y):
            rs, rd, M = _stalk_iso(src, dst, P)
            if k not in rs or l not in rd:
                return None
            return M[rd.index(l), rs.index(k)] * np.eye(Y.dim, X.dim)
        out.blocks[(k, l)] = _fill(X, Y, at)
    return out


def base_change_iso(r1: int, r2: int, X, tau) -> BaseChangeIso:
    """X lives on E^{r1 tau}; the isomorphism lives on E^{r2 tau} (tau: base modulus)."""
    tau = nm.as_tau(tau)
    d = math.gcd(r1, r2)
    left, right = base_change_images(r1, r2, X)
    t2 = r2 * tau
    iso = _iso_morphism(left, right, t2)
    inv = _iso_morphism(right, left, t2)
    blocks = [list(range(off, off + len(p.summands))) for off, p in zip(right.offsets, right.parts)]
    return BaseChangeIso(r1, r2, d, left, right, iso, inv, blocks)


def base_change_hom_dims(r1: int, r2: int, X, Y):
    """dim Hom(p_{r1*} X, p_{r2*} Y) and the per-nu dims of Hom(q2_nu^* X, q1^* Y)."""
    d = math.gcd(r1, r2)
    lhs = sum(dim for _, dim in hom_layout(Cover(r1).pushforward(X), Cover(r2).pushforward(Y)))
    per = []
    for nu in range(d):
        to1, to2 = fibre_covers(r1, r2, nu)
        per.append(sum(dim for _, dim in hom_layout(to1.pullback(X), to2.pullback(Y))))
    return lhs, per
