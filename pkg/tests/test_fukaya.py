import math
from fractions import Fraction

import numpy as np
import pytest

from ellmirror import fukaya as fk
from ellmirror import holo as ho
from ellmirror import mirror as mr
from ellmirror import numerics as nm
from ellmirror import verify as vf

F = Fraction


def line(d, base=(0, 0)):
    return fk.LagrangianLine(tuple(d), (F(base[0]), F(base[1])))


def obj(d, base=(0, 0), shift=0, b=0, dim=1):
    return fk.FukayaObject.make(d, (F(base[0]), F(base[1])), shift, F(b), nm.NilpotentDatum.jordan(dim))


def on(L, P):
    # brute-force membership: (P - base) x direction is an integer combination
    c = (P[0] - L.base[0]) * L.direction[1] - (P[1] - L.base[1]) * L.direction[0]
    return c.denominator == 1


def test_intersection_examples():
    pts = fk.intersection_points(line((1, 0)), line((1, 1)))
    assert [p[0] for p in pts] == [(F(0), F(0))]
    L1, L2 = line((2, 1), (F(1, 3), 0)), line((1, 3), (0, F(1, 7)))
    pts = fk.intersection_points(L1, L2)
    assert len(pts) == 5
    assert len({p[0] for p in pts}) == 5
    assert all(on(L1, p[0]) and on(L2, p[0]) for p in pts)
    assert all(0 <= c < 1 for p in pts for c in p[0])


@pytest.mark.parametrize("n", [1, 2, 5])
def test_mirror_lines_of_sections_meet_n_times(n):
    X, Y = mr.mirror_sheaf(ho.line_bundle(0)), mr.mirror_sheaf(ho.line_bundle(n))
    assert len(fk.intersection_points(X.line, Y.line)) == n


def test_same_line_intersection_is_an_error():
    with pytest.raises(fk.CaseError):
        fk.intersection_points(line((1, 1)), line((1, 1), (F(1, 2), F(1, 2))))


def test_hom_table_examples():
    X = obj((1, 0))
    Y = obj((0, 1), shift=1)  # alpha gap 1.5
    assert fk.hom_space_symp(X, Y).dim == 0
    S = obj((1, 1))
    assert fk.hom_space_symp(S, S, 0).dim == 1
    assert fk.hom_space_symp(S, S, 1).dim == 1
    assert fk.hom_space_symp(S, obj((1, 1), b=F(1, 3)), 0).dim == 0
    assert fk.hom_space_symp(S, obj((1, 1), b=F(1, 3)), 1).dim == 0
    J = obj((1, 1), dim=2)
    assert fk.hom_space_symp(J, J).dim == 2


def test_shift_symp():
    X = obj((2, 1), (F(1, 5), 0))
    assert fk.shift_symp(X, 0) == X
    assert fk.shift_symp(fk.shift_symp(X, 1), 1) == fk.shift_symp(X, 2)
    Y = obj((1, -1))
    for k in (0, 1):
        assert fk.hom_space_symp(X, fk.shift_symp(Y, 1), k).dim == fk.hom_space_symp(X, Y, k + 1).dim


def test_triangle_addition_formula(tau):
    X, Y, Z = (mr.mirror_sheaf(ho.line_bundle(n)) for n in (0, 1, 2))
    got = fk.compose_symp_blocks(X, Y, Z, np.ones(1), np.ones(1), tau)
    oracle = [sum(np.exp(2j * np.pi * tau * (n + k / 2) ** 2) for n in range(-40, 41)) for k in range(2)]
    assert np.max(np.abs(got - oracle)) < 1e-9
    assert np.all(fk.compose_symp_blocks(X, Y, Z, np.zeros(1), np.ones(1), tau) == 0)


def test_triangle_cutoff_doubling(tau, rng):
    for _ in range(5):
        objs, u, v, w = vf.composable_triple_symp(vf.GeneratorConfig(), rng, tau)
        a = fk.compose_symp(u, v)
        with nm.summation_window(scale=2):
            b = fk.compose_symp(u, v)
        for k in a.blocks:
            assert np.max(np.abs(a.blocks[k] - b.blocks[k]), initial=0) < 1e-12 * max(1, np.max(np.abs(a.blocks[k]), initial=0))


def test_grading_overflow_gives_zero():
    X1, X2, X3 = obj((1, 0)), obj((1, 2)), obj((1, 1), shift=1)
    assert X3.alpha > X1.alpha + 1
    assert fk.hom_space_symp(X1, X2).dim and fk.hom_space_symp(X2, X3).dim
    assert fk.compose_symp_blocks(X1, X2, X3, np.ones(1), np.ones(fk.hom_space_symp(X2, X3).dim), 0.5j).size == 0
    assert fk.composition_case(X1, X2, X3) == "ii"


def test_same_line_identity(tau, rng):
    J = obj((1, 1), dim=2)
    H = fk.hom_space_symp(J, J)
    f = rng.normal(size=H.dim)
    one = fk.identity_symp(J)
    assert np.allclose(fk.compose_symp_blocks(J, J, J, one, f, tau), f)
    assert np.allclose(fk.compose_symp_blocks(J, J, J, f, one, tau), f)
    assert fk.composition_case(J, J, J) == "iv"


def test_identity_section_acts_stalkwise(tau, rng):
    X, Y = obj((1, 0), dim=2), obj((1, 3), (0, F(1, 4)))
    u = rng.normal(size=fk.hom_space_symp(X, Y).dim) + 0j
    assert np.allclose(fk.compose_symp_blocks(X, X, Y, fk.identity_symp(X), u, tau), u)
    assert np.allclose(fk.compose_symp_blocks(X, Y, Y, u, fk.identity_symp(Y), tau), u)
    assert fk.composition_case(X, X, Y) == "iii"


def test_serre_pairing():
    S = obj((1, 1))
    P = fk.serre_dual_symp(S, S)
    assert P.shape == (1, 1) and abs(P[0, 0] - 1) < 1e-14
    J = obj((1, 1), dim=2)
    assert abs(np.linalg.det(fk.serre_dual_symp(J, J))) > 1e-6
    for X, Y in [(obj((1, 0)), obj((1, 2), shift=-1)), (obj((2, 1), dim=2), obj((1, -1), dim=3))]:
        assert fk.hom_space_symp(X, Y, 1).dim == fk.hom_space_symp(Y, X).dim
        assert abs(np.linalg.det(fk.serre_dual_symp(X, Y))) > 1e-8


def test_associativity_random(tau, rng):
    cfg = vf.GeneratorConfig()
    for _ in range(10):
        objs, u, v, w = vf.composable_triple_symp(cfg, rng, tau)
        left = fk.compose_symp(fk.compose_symp(u, v), w)
        right = fk.compose_symp(u, fk.compose_symp(v, w))
        a, b = vf._flat_symp(left), vf._flat_symp(right)
        assert np.max(np.abs(a - b), initial=0) < 1e-8 * max(1, np.max(np.abs(a), initial=0))


def test_pushforward_monodromy():
    X = obj((1, 0), b=F(1, 5))
    assert fk.p_pushforward(1, X) == fk.FKObject.of(X)
    push = fk.p_pushforward(3, X)
    eig = np.concatenate([np.linalg.eigvals(Y.monodromy) for Y in push.summands])
    assert np.allclose(np.abs(eig), 1, atol=1e-12)
    assert np.allclose(np.sort_complex(eig**3), np.exp(-2j * np.pi / 5) * np.ones(3))
    C = fk.companion_monodromy(np.array([[np.exp(0.3j)]]), 3)
    assert np.allclose(np.sort_complex(np.linalg.eigvals(C) ** 3), np.exp(0.3j) * np.ones(3))


def test_pullback_components():
    X = obj((2, 1), (F(1, 3), 0), b=F(1, 4))
    assert fk.p_pullback(1, X) == fk.FKObject.of(X)
    pulled = fk.p_pullback(4, X)
    assert len(pulled.summands) == math.gcd(2, 4)


def test_translate_symp():
    X = obj((1, 2))
    Y = fk.translate_symp((F(1, 3), 0), X)
    assert Y.line.base == (F(1, 3), F(0))
    assert fk.translate_symp((1, 1), X).line.same_subset(X.line)


def test_json_round_trip():
    X = fk.FKObject.of(obj((2, 3), (F(1, 5), 0), 1, F(1, 4), 2), obj((0, 1)))
    assert mr.is_isomorphic_fk(fk.object_from_json(fk.object_to_json(X)), X)
