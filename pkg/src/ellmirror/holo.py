"""A desk-scale model of the bounded derived category of an elliptic curve E_tau.

Objects are finite direct sums of shifted indecomposable sheaves:

* ``BundleDatum``: pi_{r*}(L_{r tau}(phi) (x) F(V, exp N)) with
  phi = t*_{a r tau + b} phi_0 . phi_0^{n-1},
* ``TorsionDatum``: S(a tau + b, V, N).

Degree-0 morphisms between bundles are matrix-valued kernels built from theta
functions on the base-change cover E_{r tau}; degree-1 morphisms are stored as
functionals on the reverse Hom space (Serre duality).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from . import numerics as nm
from ._lineunip import HomLU, LineUnip, combine


class CompositionError(ValueError):
    pass


def _norm_frac(x, modulus=Fraction(1)) -> Fraction:
    x = nm.to_fraction(x)
    return x - modulus * math.floor(x / modulus)


def _as_nilpotent(N) -> nm.NilpotentDatum:
    if isinstance(N, nm.NilpotentDatum):
        return N
    return nm.NilpotentDatum(np.asarray(N, dtype=complex))


@dataclass(frozen=True)
class BundleDatum:
    """Indecomposable bundle pi_{r*}(L(phi) (x) F(V, exp N)), x = a (r tau) + b."""

    r: int
    a: Fraction
    b: Fraction
    n: int
    unipotent: nm.NilpotentDatum = field(default_factory=lambda: nm.NilpotentDatum.zero(1))

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("isogeny degree must be positive")
        if self.r > 1 and math.gcd(self.n, self.r) != 1:
            raise ValueError("pushforward normal form needs gcd(n, r) = 1")
        object.__setattr__(self, "unipotent", _as_nilpotent(self.unipotent))
        if not self.unipotent.cyclic:
            raise ValueError("unipotent part must be cyclic")
        object.__setattr__(self, "a", _norm_frac(self.a, Fraction(1, self.r)))
        object.__setattr__(self, "b", _norm_frac(self.b))

    @property
    def dim(self) -> int:
        return self.unipotent.dim

    @property
    def N(self) -> np.ndarray:
        return self.unipotent.N

    @property
    def rank(self) -> int:
        return self.r * self.dim

    @property
    def degree(self) -> int:
        return self.n * self.dim

    def line_unip(self, tau: complex) -> LineUnip:
        return LineUnip(self.r * tau, self.n, self.a, self.b, self.N)


@dataclass(frozen=True)
class TorsionDatum:
    """S(a tau + b, V, N) with 0 <= a, b < 1."""

    a: Fraction
    b: Fraction
    module: nm.NilpotentDatum = field(default_factory=lambda: nm.NilpotentDatum.zero(1))

    def __post_init__(self):
        object.__setattr__(self, "module", _as_nilpotent(self.module))
        if not self.module.cyclic:
            raise ValueError("torsion module must be cyclic")
        object.__setattr__(self, "a", _norm_frac(self.a))
        object.__setattr__(self, "b", _norm_frac(self.b))

    @property
    def dim(self) -> int:
        return self.module.dim

    @property
    def N(self) -> np.ndarray:
        return self.module.N

    def lift(self, tau: complex) -> complex:
        return float(self.a) * tau + float(self.b)


Sheaf = Union[BundleDatum, TorsionDatum]


@dataclass(frozen=True)
class DbObject:
    summands: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple((s, int(k)) for s, k in self.summands))

    @classmethod
    def of(cls, sheaf: Sheaf, shift: int = 0) -> "DbObject":
        return cls(((sheaf, shift),))

    def shift(self, k: int) -> "DbObject":
        return DbObject(tuple((s, sh + k) for s, sh in self.summands))

    def __add__(self, other: "DbObject") -> "DbObject":
        return DbObject(self.summands + other.summands)

    def __len__(self):
        return len(self.summands)

    @property
    def is_zero(self) -> bool:
        return not self.summands


def structure_sheaf() -> BundleDatum:
    return BundleDatum(1, Fraction(0), Fraction(0), 0)


def line_bundle(n: int, a=0, b=0, N=None) -> BundleDatum:
    """L(t*_{a tau + b} phi_0 . phi_0^{n-1}) (x) F(V, exp N)."""
    N = nm.NilpotentDatum.zero(1) if N is None else N
    return BundleDatum(1, nm.to_fraction(a), nm.to_fraction(b), n, N)


# -- sections of line bundles ------------------------------------------------


def section_basis(a, b, n: int, tau):
    """Theta basis of H^0(L(t*_x phi_0 . phi_0^{n-1})), x = a tau + b.

    Element k is z -> theta[k/n, 0](n tau, n (z + x/n)).
    """
    tau = nm.as_tau(tau)
    if n <= 0:
        return []
    x = float(a) * tau + float(b)

    def make(k):
        def section(z):
            return nm.theta(n * tau, n * (np.asarray(z, dtype=complex) + x / n), Fraction(k, n), 0.0)

        return section

    return [make(k) for k in range(n)]


# -- functors on objects ---------------------------------------------------


def _decompose_pushforward(R: int, alpha: Fraction, beta: Fraction, n: int, N) -> list:
    """pi_{R*}(L(n, x) (x) F(V, exp N)) as a list of indecomposable bundle data."""
    N = np.asarray(N, dtype=complex)
    g = math.gcd(n, R) if R > 1 else 1
    if n == 0:
        g = R
    if g == 1:
        return [BundleDatum(R, alpha, beta, n, nm.NilpotentDatum(N))]
    Rp = R // g
    return [
        BundleDatum(Rp, alpha, (beta + s) / g, n // g, nm.NilpotentDatum(N / g))
        for s in range(g)
    ]


def isogeny_pushforward(r: int, obj) -> DbObject:
    """pi_{r*} from E_{r tau} to E_tau, summandwise."""
    if not isinstance(obj, DbObject):
        obj = DbObject.of(obj)
    out = []
    for s, k in obj.summands:
        if isinstance(s, TorsionDatum):
            out.append((TorsionDatum(s.a * r, s.b, s.module), k))
        else:
            for piece in _decompose_pushforward(s.r * r, s.a, s.b, s.n, s.N):
                out.append((piece, k))
    return DbObject(tuple(out))


def _pullback_pieces(r: int, s: BundleDatum) -> list:
    """pi_r^* of pi_{R*}E as bundle data on E_{r tau} (base change)."""
    R = s.r
    d = math.gcd(r, R)
    L = r * R // d
    m = L // R
    pieces = []
    for nu in range(d):
        alpha = s.a + Fraction(s.n * nu, R)
        beta = m * s.b
        pieces.extend(_decompose_pushforward(L // r, alpha, beta, s.n * m, m * s.N))
    return pieces


def isogeny_pullback(r: int, obj) -> DbObject:
    """pi_r^* from E_tau to E_{r tau}, summandwise."""
    if not isinstance(obj, DbObject):
        obj = DbObject.of(obj)
    out = []
    for s, k in obj.summands:
        if isinstance(s, TorsionDatum):
            for u in range(r):
                out.append((TorsionDatum((s.a + u) / r, s.b, s.module), k))
        else:
            for piece in _pullback_pieces(r, s):
                out.append((piece, k))
    return DbObject(tuple(out))


def translate(m: int, n_den: int, obj) -> DbObject:
    """Pull back along the translation z -> z + (m / n_den) tau."""
    if not isinstance(obj, DbObject):
        obj = DbObject.of(obj)
    c = Fraction(m, n_den)
    out = []
    for s, k in obj.summands:
        if isinstance(s, TorsionDatum):
            out.append((TorsionDatum(s.a - c, s.b, s.module), k))
        else:
            out.append((BundleDatum(s.r, s.a + s.n * c / s.r, s.b, s.n, s.unipotent), k))
    return DbObject(tuple(out))


# -- Hom spaces between indecomposables ------------------------------------


def _vec(M) -> np.ndarray:
    return np.asarray(M, dtype=complex).reshape(-1)


class _BundleHom:
    """Hom(pi_{r1*}E1, pi_{r2*}E2) through the base change to E_{r tau}.

    A morphism is a kernel H(w, j): sections transform as
    (T f)(w) = sum_{j mod r1} H(w, j) f(w + j tau). The components
    h_nu = H(., nu), 0 <= nu < gcd(r1, r2), carry the theta coefficients.
    """

    kind = "bundle"

    def __init__(self, A: BundleDatum, B: BundleDatum, tau: complex):
        self.A, self.B, self.tau = A, B, tau
        r1, r2 = A.r, B.r
        self.d = math.gcd(r1, r2)
        self.r = r1 * r2 // self.d
        self.m1, self.m2 = self.r // r1, self.r // r2
        self.T = self.r * tau
        self.P2 = LineUnip(self.T, B.n * self.m2, B.a, self.m2 * B.b, self.m2 * B.N)
        self._spaces = {}
        self.components = [self.space(nu) for nu in range(self.d)]
        self.offsets = np.cumsum([0] + [c.dim for c in self.components])
        self.dim = int(self.offsets[-1])
        self.log_scales = [self.component_log_scale(nu) for nu in range(self.d)]
        self.exp_mN1 = nm.right_mult(nm.nilpotent_poly_exp(-A.N), B.dim)
        self.exp_mN2 = nm.left_mult(nm.nilpotent_poly_exp(-B.N), A.dim)

    def P1(self, j: int) -> LineUnip:
        A = self.A
        return LineUnip(self.T, A.n * self.m1, A.a + Fraction(A.n * j, A.r), self.m1 * A.b, self.m1 * A.N)

    def space(self, j: int) -> HomLU:
        if j not in self._spaces:
            self._spaces[j] = HomLU(self.P1(j), self.P2)
        return self._spaces[j]

    def component_log_scale(self, nu: int) -> complex:
        """Public basis of component nu = theta basis divided by exp(this).

        It is the size of the theta functions of the component at the natural
        base point, which keeps coefficients (and the mirror map) well scaled.
        """
        c = self.components[nu]
        if c.D <= 0:
            return 0j
        A, tau, D = self.A, self.tau, c.D
        da = float(c.P2.alpha - c.P1.alpha)
        db = float(c.P2.beta - c.P1.beta)
        expo = -1j * np.pi * self.T * da**2 / D - 2j * np.pi * da * db / D
        expo += -1j * np.pi * nu * (A.n * nu * tau + 2 * float(A.r * A.a) * tau + 2 * float(A.b)) / A.r
        return complex(expo)

    def split(self, vec):
        return [c.from_vector(vec[..., self.offsets[i]: self.offsets[i + 1]]).shifted(-self.log_scales[i])
                for i, c in enumerate(self.components)]

    def join(self, coefs):
        batch = max((k.mant.shape[1:-1] for k in coefs), key=len, default=())
        if self.dim == 0:
            return np.zeros(batch + (0,), dtype=complex)
        parts = [c.to_vector(k.shifted(self.log_scales[i])) if c.dim else np.zeros(batch + (0,), dtype=complex)
                 for i, (c, k) in enumerate(zip(self.components, coefs))]
        return np.concatenate(parts, axis=-1)

    # relation (1): H(w, j + r1) = H(w, j) e1(w + j tau)^{-1}
    def _step1(self, j, coef, forward=True):
        A, tau = self.A, self.tau
        T1 = A.r * tau
        x1 = float(A.a) * T1 + float(A.b)
        if forward:
            logC = A.n * np.pi * 1j * T1 + 2j * np.pi * A.n * j * tau + 2j * np.pi * x1
            return j + A.r, self.space(j).transform(coef, self.space(j + A.r), Fraction(0), A.n, logC, self.exp_mN1)
        jn = j - A.r
        logC = A.n * np.pi * 1j * T1 + 2j * np.pi * A.n * jn * tau + 2j * np.pi * x1
        inv = np.linalg.inv(self.exp_mN1)
        return jn, self.space(j).transform(coef, self.space(jn), Fraction(0), -A.n, -logC, inv)

    # relation (2): H(w, j) = e2(w)^{-1} H(w + r2 tau, j - r2)
    def _step2(self, j, coef, forward=True):
        B, tau = self.B, self.tau
        T2 = B.r * tau
        x2 = float(B.a) * T2 + float(B.b)
        logC = B.n * np.pi * 1j * T2 + 2j * np.pi * x2
        sigma = Fraction(1, self.m2)
        if forward:
            return j + B.r, self.space(j).transform(coef, self.space(j + B.r), sigma, B.n, logC, self.exp_mN2)
        inv = np.linalg.inv(self.exp_mN2)
        logCinv = 2j * np.pi * B.n * float(sigma) * self.T - logC
        return j - B.r, self.space(j).transform(coef, self.space(j - B.r), -sigma, -B.n, logCinv, inv)

    def kernel_coef(self, coefs, j: int):
        """Coefficients of H(., j) in the theta basis of Hom(P1(j), P2)."""
        r1, r2 = self.A.r, self.B.r
        nu = j % self.d
        c2 = None
        for k in sorted(range(-r1, r1 + 1), key=abs):
            if (j - nu - k * r2) % r1 == 0:
                c2 = k
                break
        c1 = (j - nu - c2 * r2) // r1
        cur, coef = nu, coefs[nu]
        # interleave the two kinds of steps so the index stays close to the
        # segment [nu, j]; far indices give coefficients near the underflow range
        while c1 or c2:
            moves = []
            if c1:
                moves.append((abs(cur + r1 * np.sign(c1) - j), 1))
            if c2:
                moves.append((abs(cur + r2 * np.sign(c2) - j), 2))
            _, kind = min(moves)
            if kind == 1:
                cur, coef = self._step1(cur, coef, forward=c1 > 0)
                c1 -= int(np.sign(c1))
            else:
                cur, coef = self._step2(cur, coef, forward=c2 > 0)
                c2 -= int(np.sign(c2))
        assert cur == j
        return coef

    def kernel(self, coefs, j: int):
        coef = self.kernel_coef(coefs, j)
        sp = self.space(j)
        return lambda w: sp.evaluate(coef, w)


class _BundleTorsionHom:
    """Hom(pi_{r*}E, S(x, V, N)): jets at the r lifts x~ + u tau."""

    kind = "bundle_torsion"

    def __init__(self, A: BundleDatum, B: TorsionDatum, tau: complex):
        self.A, self.B, self.tau = A, B, tau
        self.block = A.dim * B.dim
        self.dim = A.r * self.block

    def offsets(self):
        return torsion_offsets(self.A.r, self.B.a)

    def scales(self) -> np.ndarray:
        """Basis element u is the jet functional at lift u divided by scales()[u].

        The factor is the size of the theta sections near that lift, so the
        coefficients of compositions stay of comparable magnitude.
        """
        return np.exp(self.log_scales())

    def log_scales(self) -> np.ndarray:
        return torsion_log_scales(self.A, self.B, self.tau)

    def points(self):
        return [self.B.lift(self.tau) + u * self.tau for u in self.offsets()]


class _TorsionHom:
    kind = "torsion"

    def __init__(self, A: TorsionDatum, B: TorsionDatum):
        self.A, self.B = A, B
        if A.a == B.a and A.b == B.b:
            self.kernel = nm.kernel_basis(nm.sylvester_operator(B.N, A.N))
        else:
            self.kernel = np.zeros((A.dim * B.dim, 0), dtype=complex)
        self.dim = self.kernel.shape[1]

    def matrix(self, vec):
        return (self.kernel @ vec).reshape(self.B.dim, self.A.dim)

    def vector(self, M):
        return self.kernel.conj().T @ _vec(M)


class _ZeroHom:
    kind = "zero"
    dim = 0


@lru_cache(maxsize=4096)
def _hom_cached(A, B, tau: complex):
    if isinstance(A, BundleDatum) and isinstance(B, BundleDatum):
        return _BundleHom(A, B, tau)
    if isinstance(A, BundleDatum) and isinstance(B, TorsionDatum):
        return _BundleTorsionHom(A, B, tau)
    if isinstance(A, TorsionDatum) and isinstance(B, TorsionDatum):
        return _TorsionHom(A, B)
    return _ZeroHom()


def hom_space(A: Sheaf, B: Sheaf, tau):
    """Degree-0 Hom(A, B) between indecomposable sheaves; has ``.dim``."""
    return _hom_cached(A, B, nm.as_tau(tau))


def hom_dim(A: Sheaf, B: Sheaf, tau, degree: int = 0) -> int:
    if degree == 0:
        return hom_space(A, B, tau).dim
    if degree == 1:
        return hom_space(B, A, tau).dim
    return 0


def hom_labels(A: Sheaf, B: Sheaf, tau) -> list:
    """Basis descriptors in coefficient order."""
    H = hom_space(A, B, tau)
    if H.kind == "bundle":
        out = []
        for nu, c in enumerate(H.components):
            if c.D > 0:
                out += [("theta", nu, k, e) for k in range(c.D) for e in range(c.block)]
            else:
                out += [("flat", nu, i) for i in range(c.dim)]
        return out
    if H.kind == "bundle_torsion":
        return [("jet", u, e) for u in range(A.r) for e in range(H.block)]
    if H.kind == "torsion":
        return [("sylvester", i) for i in range(H.dim)]
    return []


# -- composition of degree-0 morphisms ---------------------------------------


def torsion_offsets(r: int, a) -> list:
    """Lattice offsets u of the r lifts a + u, one per class mod r, with a + u in (-r/2, r/2].

    Keeping the lifts near the real axis keeps the jet functionals well scaled.
    """
    return [u - r if a + u > Fraction(r, 2) else u for u in range(r)]


def torsion_scales(A: BundleDatum, S: TorsionDatum, tau: complex) -> np.ndarray:
    return np.exp(torsion_log_scales(A, S, tau))


def torsion_log_scales(A: BundleDatum, S: TorsionDatum, tau: complex) -> np.ndarray:
    T = A.r * tau
    n, a1, b1, b2 = A.n, float(A.a), float(A.b), float(S.b)
    out = []
    for off in torsion_offsets(A.r, S.a):
        a2 = float((S.a + off) / A.r)
        out.append(-1j * np.pi * T * (n * a2**2 + 2 * a1 * a2)
                   - 2j * np.pi * (a2 * b1 + a1 * b2 + n * a2 * b2))
    return np.array(out)


def _centred(r: int):
    return [j - r if j > r // 2 else j for j in range(r)]


def _compose_bbb(H12: _BundleHom, H23: _BundleHom, H13: _BundleHom, v12, v23):
    c12, c23 = H12.split(v12), H23.split(v23)
    tau = H12.tau
    r2 = H12.B.r
    js = _centred(r2)
    out = []
    for nu, target in enumerate(H13.components):
        if target.dim == 0:
            out.append(target.zero())
            continue
        k23 = {j2: H23.kernel(c23, j2) for j2 in js}
        k12 = {j2: H12.kernel(c12, nu - j2) for j2 in js}

        def composite(w, k23=k23, k12=k12):
            w = np.asarray(w, dtype=complex)
            parts = []
            for j2 in js:
                v2, l2 = k23[j2](w)
                v1, l1 = k12[j2](w + j2 * tau)
                if v2.ndim != v1.ndim:  # one side carries a batch axis
                    v2, v1 = (v[:, None] if v.ndim == 3 else v for v in (v2, v1))
                parts.append((v2 @ v1, l2 + l1))
            return combine(parts)

        out.append(target.expand(composite))
    return H13.join(out)


def _compose_bbt(H12: _BundleHom, H2T: _BundleTorsionHom, H1T: _BundleTorsionHom, v12, v2t):
    """psi o G for G: pi_{r1*}E1 -> pi_{r2*}E2, psi: pi_{r2*}E2 -> S."""
    c12 = H12.split(v12)
    S = H2T.B
    N2 = S.N
    dS = S.dim
    d1, d2 = H12.A.dim, H12.B.dim
    r1, r2 = H12.A.r, H12.B.r
    tau = H12.tau
    psi = np.asarray(v2t, dtype=complex).reshape(r2, dS, d2)
    ls1, ls2 = H1T.log_scales(), H2T.log_scales()
    # z - x acts on the module as N / (2 pi i)
    Npow = [np.linalg.matrix_power(N2 / (2j * np.pi), k) for k in range(dS)]
    out = np.zeros((r1, dS, d1), dtype=complex)
    base = S.lift(tau)
    off1, off2 = torsion_offsets(r1, S.a), torsion_offsets(r2, S.a)
    for u in range(r2):
        if not np.any(psi[u]):
            continue
        p = base + off2[u] * tau
        for up in range(r1):
            jj = off1[up] - off2[u]
            coeffs, lg = H12.space(jj).jets(H12.kernel_coef(c12, jj), p, dS - 1)
            if not np.isfinite(lg):
                continue
            fac = np.exp(lg + ls1[up] - ls2[u])
            for k in range(dS):
                out[up] += fac * (Npow[k] @ psi[u] @ coeffs[k])
    return out.reshape(-1)


def compose0(A: Sheaf, B: Sheaf, C: Sheaf, vAB, vBC, tau):
    """Coefficients of g o f in Hom(A, C) for f in Hom(A, B), g in Hom(B, C)."""
    tau = nm.as_tau(tau)
    HAB, HBC, HAC = hom_space(A, B, tau), hom_space(B, C, tau), hom_space(A, C, tau)
    if HAC.dim == 0 or HAB.dim == 0 or HBC.dim == 0:
        batch = max(np.shape(vAB)[:-1], np.shape(vBC)[:-1], key=len)
        return np.zeros(batch + (HAC.dim,), dtype=complex)
    vAB = np.asarray(vAB, dtype=complex)
    vBC = np.asarray(vBC, dtype=complex)
    kinds = (HAB.kind, HBC.kind)
    if vAB.ndim + vBC.ndim > 2:
        # a batch of first or second arguments (rows); only the theta path is vectorised
        if kinds == ("bundle", "bundle"):
            return _compose_bbb(HAB, HBC, HAC, vAB, vBC)
        if vAB.ndim == 2:
            return np.stack([compose0(A, B, C, v, vBC, tau) for v in vAB]).reshape(len(vAB), HAC.dim)
        return np.stack([compose0(A, B, C, vAB, v, tau) for v in vBC]).reshape(len(vBC), HAC.dim)
    if kinds == ("bundle", "bundle"):
        return _compose_bbb(HAB, HBC, HAC, vAB, vBC)
    if kinds == ("bundle", "bundle_torsion"):
        return _compose_bbt(HAB, HBC, HAC, vAB, vBC)
    if kinds == ("bundle_torsion", "torsion"):
        g = HBC.matrix(vBC)
        psi = vAB.reshape(A.r, B.dim, A.dim)
        return np.einsum("ij,ujk->uik", g, psi).reshape(-1)
    if kinds == ("torsion", "torsion"):
        return HAC.vector(HBC.matrix(vBC) @ HAB.matrix(vAB))
    raise CompositionError(f"unexpected composition kinds {kinds}")


def composition_matrix_left(A, B, C, vAB, tau):
    """Matrix of g -> g o f from Hom(B, C) to Hom(A, C)."""
    nB, nC = hom_dim(B, C, tau), hom_dim(A, C, tau)
    if nB == 0 or nC == 0:
        return np.zeros((nC, nB), dtype=complex)
    return compose0(A, B, C, vAB, np.eye(nB), tau).T


def composition_matrix_right(A, B, C, vBC, tau):
    """Matrix of f -> g o f from Hom(A, B) to Hom(A, C)."""
    nA, nC = hom_dim(A, B, tau), hom_dim(A, C, tau)
    if nA == 0 or nC == 0:
        return np.zeros((nC, nA), dtype=complex)
    return compose0(A, B, C, np.eye(nA), vBC, tau).T


# -- morphisms between objects ---------------------------------------------


def serre_dual_basis(A: Sheaf, B: Sheaf, tau):
    """Ext^1(A, B) = Hom(A, B[1]) identified with Hom(B, A)^*.

    Returns the basis labels of Hom(B, A); a degree-1 morphism A -> B[1] is a
    coefficient vector c with <c, e_i> = c_i (the pairing matrix is the identity).
    """
    return [("dual",) + lab for lab in hom_labels(B, A, tau)]


@dataclass
class HoloMorphism:
    """Block morphism between DbObjects.

    ``blocks[(i, j)]`` is the coefficient vector of the component from source
    summand i to target summand j; its degree is shift_j - shift_i.
    Degree 0: coefficients in Hom(A_i, B_j). Degree 1: functional on Hom(B_j, A_i).
    """

    source: DbObject
    target: DbObject
    blocks: dict
    tau: complex

    def degree(self, i, j) -> int:
        return self.target.summands[j][1] - self.source.summands[i][1]

    def block_dim(self, i, j) -> int:
        A, sa = self.source.summands[i]
        B, sb = self.target.summands[j]
        return hom_dim(A, B, self.tau, sb - sa)

    def max_abs(self) -> float:
        vals = [np.max(np.abs(v)) for v in self.blocks.values() if np.size(v)]
        return float(max(vals)) if vals else 0.0

    def __sub__(self, other):
        keys = set(self.blocks) | set(other.blocks)
        out = {}
        for k in keys:
            a = self.blocks.get(k)
            b = other.blocks.get(k)
            if a is None:
                a = np.zeros_like(b)
            if b is None:
                b = np.zeros_like(a)
            out[k] = a - b
        return HoloMorphism(self.source, self.target, out, self.tau)

    def __add__(self, other):
        keys = set(self.blocks) | set(other.blocks)
        out = {}
        for k in keys:
            a = self.blocks.get(k)
            b = other.blocks.get(k)
            out[k] = (a if a is not None else 0) + (b if b is not None else 0)
        return HoloMorphism(self.source, self.target, out, self.tau)

    def scale(self, c):
        return HoloMorphism(self.source, self.target, {k: c * v for k, v in self.blocks.items()}, self.tau)


def zero_morphism(source: DbObject, target: DbObject, tau) -> HoloMorphism:
    tau = nm.as_tau(tau)
    blocks = {}
    for i, (A, sa) in enumerate(source.summands):
        for j, (B, sb) in enumerate(target.summands):
            d = sb - sa
            if d in (0, 1):
                blocks[(i, j)] = np.zeros(hom_dim(A, B, tau, d), dtype=complex)
    return HoloMorphism(source, target, blocks, tau)


def identity(obj: DbObject, tau) -> HoloMorphism:
    tau = nm.as_tau(tau)
    m = zero_morphism(obj, obj, tau)
    for i, (A, _) in enumerate(obj.summands):
        m.blocks[(i, i)] = identity_vector(A, tau)
    return m


def identity_vector(A: Sheaf, tau) -> np.ndarray:
    H = hom_space(A, A, tau)
    if H.kind == "torsion":
        return H.vector(np.eye(A.dim))
    comp = H.components[0]
    vec = np.zeros(H.dim, dtype=complex)
    vec[: comp.dim] = comp.to_vector(comp.wrap(_vec(np.eye(A.dim))))
    return vec


def compose_blocks(A, sA, B, sB, C, sC, f, g, tau):
    """Component composition Hom(A[sA], B[sB]) x Hom(B[sB], C[sC]) -> Hom(A[sA], C[sC])."""
    d1, d2 = sB - sA, sC - sB
    if d1 + d2 >= 2 or d1 < 0 or d2 < 0:
        return np.zeros(hom_dim(A, C, tau, d1 + d2), dtype=complex)
    if d1 == 0 and d2 == 0:
        return compose0(A, B, C, f, g, tau)
    if d1 == 0 and d2 == 1:
        # (f, psi) -> psi(f o .) on Hom(C, A)
        nCA = hom_dim(C, A, tau)
        if nCA == 0:
            return np.zeros(0, dtype=complex)
        return compose0(C, A, B, np.eye(nCA), f, tau) @ np.asarray(g, dtype=complex)
    # d1 == 1, d2 == 0: (phi, g) -> phi(. o g) on Hom(C, A)
    nCA = hom_dim(C, A, tau)
    if nCA == 0:
        return np.zeros(0, dtype=complex)
    return compose0(B, C, A, g, np.eye(nCA), tau) @ np.asarray(f, dtype=complex)


def compose(f: HoloMorphism, g: HoloMorphism) -> HoloMorphism:
    """g o f."""
    if f.target != g.source:
        raise CompositionError("target of f differs from source of g")
    tau = f.tau
    out = zero_morphism(f.source, g.target, tau)
    for (i, k), vec in list(out.blocks.items()):
        A, sA = f.source.summands[i]
        C, sC = g.target.summands[k]
        acc = np.zeros_like(vec)
        for j, (B, sB) in enumerate(f.target.summands):
            a = f.blocks.get((i, j))
            b = g.blocks.get((j, k))
            if a is None or b is None or not np.any(a) or not np.any(b):
                continue
            acc = acc + compose_blocks(A, sA, B, sB, C, sC, a, b, tau)
        out.blocks[(i, k)] = acc
    return out


# -- JSON ----------------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _matrix_json(M):
    M = np.asarray(M, dtype=complex)
    if np.all(M.imag == 0):
        return [[float(v.real) for v in row] for row in M]
    return [[[float(v.real), float(v.imag)] for v in row] for row in M]


def _matrix_from_json(rows):
    out = []
    for row in rows:
        out.append([complex(*v) if isinstance(v, list) else complex(v) for v in row])
    return np.array(out, dtype=complex)


def sheaf_to_json(s: Sheaf, shift: int = 0) -> dict:
    if isinstance(s, BundleDatum):
        return {"type": "bundle", "r": s.r, "a": _frac_str(s.a), "b": _frac_str(s.b), "n": s.n,
                "dim": s.dim, "N": _matrix_json(s.N), "shift": shift}
    return {"type": "torsion", "a": _frac_str(s.a), "b": _frac_str(s.b), "dim": s.dim,
            "N": _matrix_json(s.N), "shift": shift}


def sheaf_from_json(d: dict):
    dim = int(d.get("dim", 1))
    N = _matrix_from_json(d["N"]) if "N" in d else np.zeros((dim, dim))
    if d["type"] == "bundle":
        s = BundleDatum(int(d.get("r", 1)), Fraction(str(d.get("a", "0"))), Fraction(str(d.get("b", "0"))),
                        int(d["n"]), nm.NilpotentDatum(N))
    elif d["type"] == "torsion":
        s = TorsionDatum(Fraction(str(d.get("a", "0"))), Fraction(str(d.get("b", "0"))), nm.NilpotentDatum(N))
    else:
        raise ValueError(f"unknown sheaf type {d['type']!r}")
    return s, int(d.get("shift", 0))


def object_to_json(obj: DbObject) -> list:
    return [sheaf_to_json(s, k) for s, k in obj.summands]


def object_from_json(data) -> DbObject:
    if isinstance(data, dict):
        data = [data]
    return DbObject(tuple(sheaf_from_json(d) for d in data))


def morphism_to_json(f: HoloMorphism) -> dict:
    blocks = []
    for (i, j), vec in sorted(f.blocks.items()):
        A, sa = f.source.summands[i]
        B, sb = f.target.summands[j]
        d = sb - sa
        labels = hom_labels(A, B, f.tau) if d == 0 else serre_dual_basis(A, B, f.tau)
        blocks.append({"source": i, "target": j, "degree": d,
                       "basis": [list(map(str, lab)) for lab in labels],
                       "coefficients": [[float(v.real), float(v.imag)] for v in vec]})
    return {"source": object_to_json(f.source), "target": object_to_json(f.target),
            "tau": [f.tau.real, f.tau.imag], "blocks": blocks}


def morphism_from_json(d: dict, tau=None) -> HoloMorphism:
    src = object_from_json(d["source"])
    tgt = object_from_json(d["target"])
    tau = nm.as_tau(complex(*d["tau"]) if tau is None else tau)
    f = zero_morphism(src, tgt, tau)
    for blk in d.get("blocks", []):
        vec = np.array([complex(*c) for c in blk["coefficients"]], dtype=complex)
        key = (int(blk["source"]), int(blk["target"]))
        if key not in f.blocks or f.blocks[key].size != vec.size:
            raise ValueError(f"block {key} does not match the Hom space dimension")
        f.blocks[key] = vec
    return f
