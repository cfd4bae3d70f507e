from fractions import Fraction

import numpy as np
import pytest

from ellmirror import fukaya as fk
from ellmirror import holo as ho
from ellmirror import mirror as mr
from ellmirror import numerics as nm
from ellmirror import verify as vf

F = Fraction


def test_mirror_object_examples():
    X = mr.mirror_sheaf(ho.line_bundle(1))
    assert X.line.direction == (1, 1) and X.alpha == pytest.approx(0.25)
    O = mr.mirror_sheaf(ho.structure_sheaf())
    assert O.line.direction == (1, 0) and O.alpha == 0
    T = mr.mirror_sheaf(ho.TorsionDatum(F(0), F(0)))
    assert T.line.direction == (0, 1) and T.alpha == pytest.approx(0.5)
    assert mr.mirror_sheaf(ho.structure_sheaf(), 1).alpha == 1


def test_mirror_inverse_examples():
    X = fk.FukayaObject.make((1, 1), (F(0), F(0)), 0, F(0), nm.NilpotentDatum.jordan(1))
    A = mr.mirror_inverse(X)
    (s, k), = A.summands
    assert isinstance(s, ho.BundleDatum) and (s.r, s.n, k) == (1, 1, 0)
    V = fk.FukayaObject.make((0, 1), (F(1, 3), F(0)), 1, F(1, 4), nm.NilpotentDatum.jordan(2))
    (t, k), = mr.mirror_inverse(V).summands
    assert isinstance(t, ho.TorsionDatum) and k == 1 and t.dim == 2
    assert mr.is_isomorphic_fk(mr.mirror_object(mr.mirror_inverse(V)), V)


def test_round_trip_random(rng):
    cfg = vf.GeneratorConfig()
    for _ in range(30):
        A = vf.gen_object(cfg, rng)
        assert mr.is_isomorphic_db(mr.mirror_inverse(mr.mirror_object(A)), A)


def test_isomorphism_test_sees_through_presentation(rng):
    X = fk.FukayaObject.make((2, 1), (F(1, 5), F(0)), 0, F(1, 3), nm.NilpotentDatum.jordan(3))
    moved = fk.FukayaObject.make((2, 1), (F(1, 5) + 2, F(1)), 0, F(1, 3), nm.NilpotentDatum.jordan(3))
    assert mr.is_isomorphic_fk(moved, X)
    S = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    conj = fk.FukayaObject(X.line, fk.GradedLocalSystem(0, X.b, nm.NilpotentDatum(S @ X.N @ np.linalg.inv(S))))
    assert mr.is_isomorphic_fk(conj, X)
    assert not mr.is_isomorphic_fk(fk.shift_symp(X, 1), X)


def test_torsion_identity_maps_to_identity(tau):
    T = ho.TorsionDatum(F(1, 3), F(1, 2), nm.NilpotentDatum.jordan(2))
    A = ho.DbObject.of(T)
    got = mr.mirror_morphism(ho.identity(A, tau))
    X = mr.mirror_sheaf(T)
    assert np.allclose(got.blocks[(0, 0)], fk.identity_symp(X))


def test_theta_basis_maps_to_points(tau):
    O, L = ho.structure_sheaf(), ho.line_bundle(2)
    M = mr.phi_matrix(O, L, tau)
    assert M.shape == (2, 2)
    # each theta basis section lands on a single intersection point
    assert np.count_nonzero(np.abs(M) > 1e-12, axis=0).tolist() == [1, 1]


def test_shift_compatibility(rng):
    cfg = vf.GeneratorConfig()
    for _ in range(10):
        A = vf.gen_object(cfg, rng)
        assert mr.is_isomorphic_fk(mr.mirror_object(A.shift(1)),
                                   fk.FKObject(tuple(fk.shift_symp(S, 1) for S in mr.mirror_object(A).summands)))


def test_translation_compatibility(rng):
    cfg = vf.GeneratorConfig()
    for _ in range(10):
        A = vf.gen_object(cfg, rng)
        m, n = int(rng.integers(0, 5)), int(rng.integers(1, 6))
        moved = fk.translate_symp((F(m, n), 0), mr.mirror_object(A))
        assert mr.is_isomorphic_fk(mr.mirror_object(ho.translate(m, n, A)), moved)


@pytest.mark.parametrize("r", [2, 3])
def test_isogeny_compatibility(r, rng):
    cfg = vf.GeneratorConfig()
    for _ in range(8):
        A = vf.gen_object(cfg, rng)
        assert mr.is_isomorphic_fk(mr.mirror_object(ho.isogeny_pushforward(r, A)),
                                   fk.p_pushforward(r, mr.mirror_object(A)))


def test_functoriality_samples(tau, rng):
    cfg = vf.GeneratorConfig()
    for family in ("generic", "same_slope", "torsion", "one_line"):
        f, g = vf.composable_pair(cfg, rng, tau, family=family)
        lhs = mr.mirror_morphism(ho.compose(f, g))
        rhs = fk.compose_symp(mr.mirror_morphism(f), mr.mirror_morphism(g))
        a, b = vf._flat_symp(lhs), vf._flat_symp(rhs)
        assert vf._rel(a - b, a) < 1e-9
