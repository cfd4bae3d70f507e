"""Seeded random instances and the acceptance checks, with JSON-ready reports."""

from __future__ import annotations

import math
import time
import zlib
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import covers as cv
from . import fukaya as fk
from . import holo as ho
from . import mirror as mr
from . import numerics as nm

DEFAULT_TAUS = (0.2 + 0.9j, -0.5 + 1.3j, 0.5j)


@dataclass
class GeneratorConfig:
    seed: int = 0
    taus: tuple = DEFAULT_TAUS
    max_denominator: int = 5
    max_rank: int = 3
    max_degree: int = 6
    weights: dict = field(default_factory=lambda: {"generic": 0.5, "same_slope": 0.25, "torsion": 0.25})
    count: int | None = None
    tolerance: float | None = None
    cutoff: int | None = None

    def __post_init__(self):
        self.taus = tuple(nm.as_tau(t) for t in self.taus)
        for name in ("max_denominator", "max_rank", "max_degree"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_denominator > 12:
            raise ValueError("denominators are limited to 12")
        if not self.taus:
            raise ValueError("at least one tau is needed")

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


@dataclass
class CheckReport:
    check: str
    instance: str
    deviation: float
    tolerance: float
    passed: bool
    seconds: float
    detail: dict = field(default_factory=dict)

    def to_json(self, timings: bool = False) -> dict:
        """JSON-ready dict; wall time is left out by default so reports are reproducible."""
        out = asdict(self)
        out["deviation"] = float(self.deviation)
        if not timings:
            del out["seconds"]
        return out


# -- random data ---------------------------------------------------------------


def _frac(rng, den_max: int) -> Fraction:
    den = int(rng.integers(1, den_max + 1))
    return Fraction(int(rng.integers(0, den)), den)


def _nilpotent(rng, cfg: GeneratorConfig, dim: int | None = None) -> nm.NilpotentDatum:
    dim = int(rng.integers(1, cfg.max_rank + 1)) if dim is None else dim
    return nm.NilpotentDatum.jordan(dim)


def gen_bundle(cfg: GeneratorConfig, rng, r: int | None = None, n: int | None = None) -> ho.BundleDatum:
    if r is None:
        r = int(rng.integers(1, cfg.max_denominator + 1))
    while n is None or (r > 1 and math.gcd(n, r) != 1):
        n = int(rng.integers(-cfg.max_degree, cfg.max_degree + 1))
    a = _frac(rng, cfg.max_denominator) / r
    return ho.BundleDatum(r, a, _frac(rng, cfg.max_denominator), n, _nilpotent(rng, cfg))


def gen_torsion(cfg: GeneratorConfig, rng) -> ho.TorsionDatum:
    return ho.TorsionDatum(_frac(rng, cfg.max_denominator), _frac(rng, cfg.max_denominator), _nilpotent(rng, cfg))


def gen_sheaf(cfg: GeneratorConfig, rng, family: str | None = None):
    if family is None:
        family = _family(cfg, rng)
    if family == "torsion":
        return gen_torsion(cfg, rng)
    return gen_bundle(cfg, rng)


def _family(cfg: GeneratorConfig, rng) -> str:
    names = sorted(cfg.weights)
    w = np.array([cfg.weights[k] for k in names], dtype=float)
    return names[int(rng.choice(len(names), p=w / w.sum()))]


def gen_object(cfg: GeneratorConfig, rng=None, summands: int = 1) -> ho.DbObject:
    """Direct sum of random indecomposables, shifts in {0, 1}."""
    rng = cfg.rng() if rng is None else rng
    return ho.DbObject(tuple((gen_sheaf(cfg, rng), int(rng.integers(0, 2))) for _ in range(summands)))


def _cvec(rng, n: int) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def gen_morphism(cfg: GeneratorConfig, A: ho.DbObject, B: ho.DbObject, tau, rng=None) -> ho.HoloMorphism:
    rng = cfg.rng() if rng is None else rng
    f = ho.zero_morphism(A, B, tau)
    for key, vec in f.blocks.items():
        f.blocks[key] = _cvec(rng, vec.size)
    return f


def _slope(s):
    return math.inf if isinstance(s, ho.TorsionDatum) else Fraction(s.n, s.r)


def _sibling(cfg, rng, s, keep: bool = False):
    """A sheaf of the same slope; with ``keep`` (or by chance) also the same support data."""
    keep = keep or rng.random() < 0.5
    if isinstance(s, ho.TorsionDatum):
        if keep:
            return ho.TorsionDatum(s.a, s.b, _nilpotent(rng, cfg))
        return gen_torsion(cfg, rng)
    if keep:
        return ho.BundleDatum(s.r, s.a, s.b, s.n, _nilpotent(rng, cfg))
    return gen_bundle(cfg, rng, s.r, s.n)


def composable_pair(cfg: GeneratorConfig, rng, tau, tries: int = 200, family: str | None = None):
    """(f, g) with g o f of total degree <= 1 and f, g living in nonzero Hom spaces."""
    forced = family
    for _ in range(tries):
        family = forced or _family(cfg, rng)
        S = [gen_sheaf(cfg, rng, "torsion" if family == "torsion" and rng.random() < 0.5 else "generic")
             for _ in range(3)]
        if family == "one_line":
            S[1] = _sibling(cfg, rng, S[0], keep=True)
            S[2] = _sibling(cfg, rng, S[0], keep=True)
        if family == "same_slope":
            k = int(rng.integers(0, 3))
            if k == 2:  # all three on one slope
                S[1], S[2] = _sibling(cfg, rng, S[0]), _sibling(cfg, rng, S[0])
            else:
                S[k + 1] = _sibling(cfg, rng, S[k])
        S.sort(key=_slope)
        mode = int(rng.integers(0, 3))
        if mode == 0:
            (A, B, C), sh = S, (0, 0, 0)
        elif mode == 1:
            (C, A, B), sh = S, (0, 0, 1)
        else:
            (B, C, A), sh = S, (0, 1, 1)
        if min(ho.hom_dim(A, B, tau, sh[1] - sh[0]), ho.hom_dim(B, C, tau, sh[2] - sh[1])) == 0:
            continue
        if ho.hom_dim(A, C, tau, sh[2] - sh[0]) == 0 and rng.random() < 0.7:
            continue  # keep some forced-zero composites, mostly nonzero ones
        OA, OB, OC = (ho.DbObject.of(X, k) for X, k in zip((A, B, C), sh))
        return gen_morphism(cfg, OA, OB, tau, rng), gen_morphism(cfg, OB, OC, tau, rng)
    raise RuntimeError("no composable pair found")


def _rel(diff, ref) -> float:
    diff = np.asarray(diff)
    if diff.size == 0:
        return 0.0
    return float(np.max(np.abs(diff)) / max(1.0, float(np.max(np.abs(ref))) if np.size(ref) else 1.0))


def _flat_symp(f: fk.SympMorphism) -> np.ndarray:
    keys = sorted(f.blocks)
    parts = [np.asarray(f.blocks[k]) for k in keys]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def _describe(*items) -> str:
    out = []
    for s in items:
        if isinstance(s, ho.DbObject):
            out.append("+".join(_describe(x) + (f"[{k}]" if k else "") for x, k in s.summands))
        elif isinstance(s, ho.BundleDatum):
            out.append(f"B(r={s.r},n={s.n},a={s.a},b={s.b},dim={s.dim})")
        elif isinstance(s, ho.TorsionDatum):
            out.append(f"S(a={s.a},b={s.b},dim={s.dim})")
        elif isinstance(s, fk.FukayaObject):
            out.append(f"L(dir={s.line.direction},base=({s.line.base[0]},{s.line.base[1]}),"
                       f"shift={s.shift},b={s.b},dim={s.dim})")
        else:
            out.append(str(s))
    return " ; ".join(out)


# -- checks ----------------------------------------------------------------------


def _tol(cfg, default: float) -> float:
    return default if cfg.tolerance is None else cfg.tolerance


def _instance_loop(name, cfg, count, tol, body):
    """Run body(rng, tau, i) -> (deviation, descriptor[, tags]); keep the worst instance.

    Tags (strings) are tallied into ``detail["coverage"]``.
    """
    rng = cfg.rng(zlib.crc32(name.encode()))
    worst, desc = 0.0, ""
    tally = Counter()
    t0 = time.perf_counter()
    for i in range(count):
        tau = cfg.taus[i % len(cfg.taus)]
        dev, d, *tags = body(rng, tau, i)
        for t in (tags[0] if tags else ()):
            tally[t] += 1
        if np.isnan(dev) or (not np.isnan(worst) and dev >= worst):
            worst, desc = dev, d
    secs = time.perf_counter() - t0
    detail = {"instances": count}
    if tally:
        detail["coverage"] = dict(sorted(tally.items()))
    return CheckReport(name, desc, float(worst), tol, bool(worst < tol), secs, detail)


def check_addition_formula(cfg: GeneratorConfig) -> CheckReport:
    """theta(tau, z)^2 in the basis theta[k/2, 0](2 tau, 2 z) three ways."""
    tol = _tol(cfg, 1e-9)
    O = ho.BundleDatum(1, Fraction(0), Fraction(0), 0)
    L1 = ho.BundleDatum(1, Fraction(0), Fraction(0), 1)
    L2 = ho.BundleDatum(1, Fraction(0), Fraction(0), 2)
    worst, desc, t0 = 0.0, "", time.perf_counter()
    for tau in cfg.taus:
        exact = np.array([nm.theta(2 * tau, 0, Fraction(k, 2), 0) for k in range(2)])
        holo = ho.compose0(O, L1, L2, np.ones(1), np.ones(1), tau)
        X, Y, Z = (mr.mirror_sheaf(s) for s in (O, L1, L2))
        u, v = mr.phi_matrix(O, L1, tau) @ np.ones(1), mr.phi_matrix(L1, L2, tau) @ np.ones(1)
        w = fk.compose_symp_blocks(X, Y, Z, u, v, tau)
        symp = np.linalg.solve(mr.phi_matrix(O, L2, tau), w)
        c = nm.fourier_coefficients(lambda z: nm.theta(tau, z) ** 2, 64, 0.0, 2)
        fourier = np.array([c[0], c[1] * np.exp(-0.5j * np.pi * tau)])
        dev = max(_rel(exact - holo, exact), _rel(exact - symp, exact), _rel(exact - fourier, exact))
        if dev >= worst:
            worst, desc = dev, f"tau={tau}"
    secs = time.perf_counter() - t0
    return CheckReport("addition-formula", desc, worst, tol, bool(worst < tol), secs,
                       {"instances": len(cfg.taus)})


def check_functoriality(cfg: GeneratorConfig) -> CheckReport:
    tol = _tol(cfg, 1e-8)
    count = cfg.count or 200

    def body(rng, tau, i):
        # every eighth pair lies on a single mirror line (linear-algebra cases)
        f, g = composable_pair(cfg, rng, tau, family="one_line" if i % 8 == 7 else None)
        gf = ho.compose(f, g)
        lhs = mr.mirror_morphism(gf)
        rhs = fk.compose_symp(mr.mirror_morphism(f), mr.mirror_morphism(g), cfg.cutoff)
        a, b = _flat_symp(lhs), _flat_symp(rhs)
        return _rel(a - b, a), f"tau={tau} " + _describe(f.source, f.target, g.target), _tags(f, g)

    return _instance_loop("functoriality", cfg, count, tol, body)


def _tags(f, g):
    """Composition case and morphism features of a holomorphic pair."""
    (A, sa), (B, sb), (C, sc) = f.source.summands[0], f.target.summands[0], g.target.summands[0]
    X1, X2, X3 = (mr.mirror_sheaf(S, k) for S, k in ((A, sa), (B, sb), (C, sc)))
    tags = ["case " + fk.composition_case(X1, X2, X3)]
    if sc - sa == 1:
        tags.append("degree-1 result")
    if any(isinstance(S, ho.TorsionDatum) for S in (A, C)):
        tags.append("torsion end")
    return tags


def _random_pair(cfg, rng):
    fam = _family(cfg, rng)
    if fam == "torsion":
        A = gen_sheaf(cfg, rng, "torsion" if rng.random() < 0.5 else "generic")
        B = gen_torsion(cfg, rng) if rng.random() < 0.5 else gen_bundle(cfg, rng)
        if isinstance(A, ho.TorsionDatum) and isinstance(B, ho.TorsionDatum) and rng.random() < 0.5:
            B = ho.TorsionDatum(A.a, A.b, _nilpotent(rng, cfg))
    elif fam == "same_slope":
        A = gen_sheaf(cfg, rng, "generic")
        B = _sibling(cfg, rng, A)
    else:
        A, B = gen_sheaf(cfg, rng, "generic"), gen_sheaf(cfg, rng, "generic")
    if rng.random() < 0.5:
        A, B = B, A
    return A, B


def _cell(A, B) -> str:
    """Row of the Hom case table a pair falls in."""
    ta, tb = isinstance(A, ho.TorsionDatum), isinstance(B, ho.TorsionDatum)
    if ta or tb:
        return {(True, True): "T->T", (False, True): "B->T", (True, False): "T->B"}[(ta, tb)]
    sa, sb = _slope(A), _slope(B)
    return "B<B" if sa < sb else ("B=B" if sa == sb else "B>B")


def check_dimension(cfg: GeneratorConfig) -> CheckReport:
    count = cfg.count or 150

    def body(rng, tau, i):
        A, B = _random_pair(cfg, rng)
        sa, sb = int(rng.integers(-1, 2)), int(rng.integers(-1, 2))
        X, Y = mr.mirror_sheaf(A, sa), mr.mirror_sheaf(B, sb)
        bad, tags = 0, []
        for k in (0, 1):
            dh = ho.hom_dim(A, B, tau, k + sb - sa) if k + sb - sa in (0, 1) else 0
            ds = fk.hom_space_symp(X, Y, k).dim
            bad += int(dh != ds)
            if k + sb - sa in (0, 1):
                tags.append(f"{_cell(A, B)} deg {k + sb - sa} {'zero' if dh == 0 else 'nonzero'}")
        return float(bad), f"tau={tau} " + _describe(A, B) + f" shifts=({sa},{sb})", tags

    return _instance_loop("dimension", cfg, count, 0.5, body)


def check_serre(cfg: GeneratorConfig) -> CheckReport:
    tol = _tol(cfg, 1e-10)
    count = cfg.count or 50

    def body(rng, tau, i):
        for _ in range(200):
            A, B = _random_pair(cfg, rng)
            n = ho.hom_dim(B, A, tau)
            if n:
                break
        X, Y = mr.mirror_sheaf(A), mr.mirror_sheaf(B)
        c, g = _cvec(rng, n), _cvec(rng, n)
        holo = complex(np.dot(c, g))  # the Serre pairing is the identity in these bases
        symp = fk.serre_pairing(X, Y, mr.phi_matrix_degree1(A, B, tau) @ c, mr.phi_matrix(B, A, tau) @ g)
        return abs(holo - symp) / max(1.0, abs(holo)), f"tau={tau} " + _describe(A, B)

    return _instance_loop("serre", cfg, count, tol, body)


def gen_fk(cfg: GeneratorConfig, rng, shift: int | None = None, max_dir: int = 4) -> fk.FukayaObject:
    while True:
        q, p = int(rng.integers(0, max_dir)), int(rng.integers(-max_dir, max_dir + 1))
        if math.gcd(q, p) == 1 and (q > 0 or p == 1):
            break
    base = (_frac(rng, cfg.max_denominator), _frac(rng, cfg.max_denominator))
    shift = int(rng.integers(-1, 2)) if shift is None else shift
    return fk.FukayaObject.make((q, p), base, shift, _frac(rng, cfg.max_denominator), _nilpotent(rng, cfg))


def _rand_symp(rng, S, T, tau) -> fk.SympMorphism:
    f = fk.zero_symp(cv._as_fk(S), cv._as_fk(T), tau)
    for key, vec in f.blocks.items():
        f.blocks[key] = _cvec(rng, vec.size)
    return f


def _hdim(S, T) -> int:
    return sum(d for _, d in cv.hom_layout(S, T))


def _adjunction_instance(cfg, rng, tau, r_max=4):
    """One naturality square of one of the two adjunctions."""
    for _ in range(400):
        r = int(rng.integers(1, r_max + 1))
        den = int(rng.integers(1, cfg.max_denominator + 1))
        cover = cv.Cover(r, Fraction(int(rng.integers(0, den)), den))
        tc = r * tau
        W, U, Z = gen_fk(cfg, rng, 0), gen_fk(cfg, rng, 0), gen_fk(cfg, rng)
        pW, pU = cv.pullback_image(cover, W), cv.pushforward_image(cover, U)
        kind = int(rng.integers(0, 4))
        if kind < 2 and _hdim(pW.obj, U) == 0 or kind >= 2 and _hdim(pU.obj, W) == 0:
            continue
        if kind == 0 and _hdim(U, Z):
            pZ = cv.pushforward_image(cover, Z)
            h, psi = _rand_symp(rng, pW.obj, U, tc), _rand_symp(rng, U, Z, tc)
            lhs = cv.adjoint_forward(cover, pW, pZ, fk.compose_symp(h, psi), tau)
            rhs = fk.compose_symp(cv.adjoint_forward(cover, pW, pU, h, tau), cv.image_morphism(pU, pZ, psi, tau))
        elif kind == 1 and _hdim(Z, W):
            pZ = cv.pullback_image(cover, Z)
            h, phi = _rand_symp(rng, pW.obj, U, tc), _rand_symp(rng, Z, W, tau)
            lhs = cv.adjoint_forward(cover, pZ, pU, fk.compose_symp(cv.image_morphism(pZ, pW, phi, tc), h), tau)
            rhs = fk.compose_symp(phi, cv.adjoint_forward(cover, pW, pU, h, tau))
        elif kind == 2 and _hdim(Z, U):
            pZ = cv.pushforward_image(cover, Z)
            g, psi = _rand_symp(rng, pU.obj, W, tau), _rand_symp(rng, Z, U, tc)
            lhs = cv.adjoint_backward(cover, pW, pZ, fk.compose_symp(cv.image_morphism(pZ, pU, psi, tau), g), tc)
            rhs = fk.compose_symp(psi, cv.adjoint_backward(cover, pW, pU, g, tc))
        elif kind == 3 and _hdim(W, Z):
            pZ = cv.pullback_image(cover, Z)
            g, phi = _rand_symp(rng, pU.obj, W, tau), _rand_symp(rng, W, Z, tau)
            lhs = cv.adjoint_backward(cover, pZ, pU, fk.compose_symp(g, phi), tc)
            rhs = fk.compose_symp(cv.adjoint_backward(cover, pW, pU, g, tc), cv.image_morphism(pW, pZ, phi, tc))
        else:
            continue
        a, b = cv.flatten(lhs), cv.flatten(rhs)
        if a.size == 0 or np.max(np.abs(a)) < 1e-6:
            continue
        adj = cv.adjunction_iso(cover, W, U, tau)
        dev = _rel(a - b, a)
        for M in (adj.forward, adj.backward):
            if M.shape[0] != M.shape[1] or (M.size and np.linalg.cond(M) > 1e8):
                dev = math.inf
        return dev, f"tau={tau} adjunction r={r} c={cover.c} square={kind} " + _describe(W, U, Z)
    raise RuntimeError("no adjunction instance found")


def _base_change_instance(cfg, rng, tau, r_max=4):
    for _ in range(400):
        r1, r2 = int(rng.integers(1, r_max + 1)), int(rng.integers(1, r_max + 1))
        X, Z = gen_fk(cfg, rng, 0), gen_fk(cfg, rng)
        if _hdim(X, Z) == 0:
            continue
        bc = cv.base_change_iso(r1, r2, X, tau)
        bz = cv.base_change_iso(r1, r2, Z, tau)
        t2 = r2 * tau
        L = bc.left.obj
        ident = fk.zero_symp(L, L, t2)
        for i, S in enumerate(L.summands):
            ident.blocks[(i, i)] = fk.identity_symp(S)
        dev = _rel(cv.flatten(fk.compose_symp(bc.iso, bc.inverse)) - cv.flatten(ident), 1.0)
        phi = _rand_symp(rng, X, Z, r1 * tau)
        a = cv.flatten(fk.compose_symp(cv.image_morphism(bc.left, bz.left, phi, t2), bz.iso))
        b = cv.flatten(fk.compose_symp(bc.iso, cv.image_morphism(bc.right, bz.right, phi, t2)))
        if a.size == 0 or np.max(np.abs(a)) < 1e-6:
            continue
        dev = max(dev, _rel(a - b, a))
        Y = gen_fk(cfg, rng)
        lhs, per = cv.base_change_hom_dims(r1, r2, X, Y)
        if lhs != sum(per) or len(L.summands) != len(bc.right.summands):
            dev = math.inf
        return dev, f"tau={tau} base-change r1={r1} r2={r2} " + _describe(X, Z)
    raise RuntimeError("no base-change instance found")


def check_adjunction(cfg: GeneratorConfig) -> CheckReport:
    tol = _tol(cfg, 1e-9)
    count = cfg.count or 60

    def body(rng, tau, i):
        if i % 3 == 2:
            return _base_change_instance(cfg, rng, tau)
        return _adjunction_instance(cfg, rng, tau)

    return _instance_loop("adjunction", cfg, count, tol, body)


def check_essential_surjectivity(cfg: GeneratorConfig) -> CheckReport:
    count = cfg.count or 60

    def body(rng, tau, i):
        X = gen_fk(cfg, rng, max_dir=cfg.max_denominator + 1)
        dim = X.dim
        S = rng.normal(size=(dim, dim)) + np.eye(dim) * 3
        N = nm.NilpotentDatum(S @ X.N @ np.linalg.inv(S))  # conjugated Jordan block
        X = fk.FukayaObject(X.line, fk.GradedLocalSystem(X.shift, X.b, N))
        back = mr.mirror_object(mr.mirror_inverse(X))
        return (0.0 if mr.is_isomorphic_fk(back, X) else 1.0), _describe(X)

    return _instance_loop("essential-surjectivity", cfg, count, 0.5, body)


def composable_triple_symp(cfg, rng, tau, tries: int = 400):
    """Objects X1..X4 with nonzero Homs, drawn from mixed case families."""
    for _ in range(tries):
        objs = [gen_fk(cfg, rng) for _ in range(4)]
        for k in range(1, 4):
            if rng.random() < 0.3:
                P = objs[k - 1]
                objs[k] = fk.FukayaObject(P.line, fk.GradedLocalSystem(
                    P.shift + int(rng.integers(0, 2)), P.b if rng.random() < 0.7 else _frac(rng, 3),
                    _nilpotent(rng, cfg)))
        if any(fk.hom_space_symp(objs[k], objs[k + 1]).dim == 0 for k in range(3)):
            continue
        u, v, w = (_rand_symp(rng, objs[k], objs[k + 1], tau) for k in range(3))
        return objs, u, v, w
    raise RuntimeError("no composable triple found")


def check_associativity(cfg: GeneratorConfig) -> CheckReport:
    tol = _tol(cfg, 1e-8)
    count = cfg.count or 120

    def body(rng, tau, i):
        objs, u, v, w = composable_triple_symp(cfg, rng, tau)
        left = fk.compose_symp(fk.compose_symp(u, v, cfg.cutoff), w, cfg.cutoff)
        right = fk.compose_symp(u, fk.compose_symp(v, w, cfg.cutoff), cfg.cutoff)
        a, b = _flat_symp(left), _flat_symp(right)
        kinds = [fk.hom_space_symp(objs[j], objs[k]).kind for j, k in ((0, 1), (1, 2), (2, 3), (0, 3))]
        cases = {"case " + fk.composition_case(*objs[j:j + 3]) for j in (0, 1)}
        cases |= {"case " + fk.composition_case(objs[0], objs[j], objs[3]) for j in (1, 2)}
        return _rel(a - b, a), f"tau={tau} kinds={kinds} " + _describe(*objs), sorted(cases)

    return _instance_loop("associativity", cfg, count, tol, body)


def check_convergence(cfg: GeneratorConfig) -> CheckReport:
    """Doubling every theta window and triangle cutoff changes nothing above 1e-12."""
    tol = _tol(cfg, 1e-12)
    count = cfg.count or 30

    def body(rng, tau, i):
        kind = i % 3
        if kind == 0:
            f, g = composable_pair(cfg, rng, tau)

            def run():
                return _flat_symp(fk.compose_symp(mr.mirror_morphism(f), mr.mirror_morphism(g))), \
                    _flat_symp(mr.mirror_morphism(ho.compose(f, g)))
            desc = _describe(f.source, f.target, g.target)
        elif kind == 1:
            objs, u, v, w = composable_triple_symp(cfg, rng, tau)

            def run():
                return _flat_symp(fk.compose_symp(fk.compose_symp(u, v), w)), np.zeros(0)
            desc = _describe(*objs)
        else:
            z = _cvec(rng, 8)
            a, b = float(rng.random()), float(rng.random())

            def run():
                return nm.theta_derivatives(tau, z, a, b, 2).reshape(-1), np.zeros(0)
            desc = f"theta a={a:.3f} b={b:.3f}"
        base = np.concatenate(run())
        with nm.summation_window(scale=2):
            wide = np.concatenate(run())
        return _rel(base - wide, base), f"tau={tau} " + desc

    return _instance_loop("convergence", cfg, count, tol, body)


CHECKS = {
    "addition-formula": check_addition_formula,
    "functoriality": check_functoriality,
    "dimension": check_dimension,
    "serre": check_serre,
    "adjunction": check_adjunction,
    "essential-surjectivity": check_essential_surjectivity,
    "associativity": check_associativity,
    "convergence": check_convergence,
}


def run_check(name: str, cfg: GeneratorConfig | None = None) -> CheckReport:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    cfg = GeneratorConfig() if cfg is None else cfg
    if cfg.cutoff is not None:
        with nm.summation_window(fixed=cfg.cutoff):
            return CHECKS[name](cfg)
    return CHECKS[name](cfg)


def run_all(cfg: GeneratorConfig | None = None) -> list:
    return [run_check(name, cfg) for name in CHECKS]
