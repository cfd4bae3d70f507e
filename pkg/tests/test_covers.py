from fractions import Fraction

import numpy as np
import pytest

from ellmirror import covers as cv
from ellmirror import fukaya as fk
from ellmirror import numerics as nm
from ellmirror import verify as vf

F = Fraction


def obj(d, base=(0, 0), shift=0, b=0, dim=1):
    return fk.FukayaObject.make(d, (F(base[0]), F(base[1])), shift, F(b), nm.NilpotentDatum.jordan(dim))


def test_cover_fibre_and_image():
    c = cv.Cover(3, F(1, 5))
    x = (F(2, 7), F(1, 2))
    assert all(c.image(y) == x for y in c.fibre(x))
    assert len(set(c.fibre(x))) == 3
    with pytest.raises(ValueError):
        cv.Cover(0)


def test_on_line():
    L = fk.LagrangianLine((2, 1), (F(1, 3), F(0)))
    assert cv.on_line(L, (F(1, 3), F(0)))
    assert cv.on_line(L, (F(1, 3) + F(2, 5), F(1, 5)))
    assert not cv.on_line(L, (F(0), F(0)))


@pytest.mark.parametrize("r", [1, 2, 3])
def test_adjunction_matrices_square_and_invertible(r, tau):
    W, U = obj((1, 1), dim=2), obj((1, 3), (0, F(1, 4)))
    adj = cv.adjunction_iso(cv.Cover(r, F(1, 3)), W, U, tau)
    for M in (adj.forward, adj.backward):
        assert M.shape[0] == M.shape[1]
        if M.size:
            assert np.linalg.cond(M) < 1e8


def test_degree_one_cover_is_identity(tau):
    W, U = obj((1, 0)), obj((1, 2), (F(1, 5), 0))
    adj = cv.adjunction_iso(cv.Cover(1), W, U, tau)
    assert np.allclose(adj.forward, np.eye(adj.forward.shape[0]))


def test_coprime_base_change_single_block(tau):
    X = obj((1, 1), b=F(1, 3))
    bc = cv.base_change_iso(2, 3, X, tau)
    assert bc.d == 1 and len(bc.blocks) == 1
    lhs, per = cv.base_change_hom_dims(2, 3, X, obj((0, 1)))
    assert lhs == sum(per) and len(per) == 1


def test_base_change_iso_inverse(tau):
    X = obj((1, 2), (F(1, 3), 0))
    bc = cv.base_change_iso(2, 4, X, tau)
    assert bc.d == 2 and len(bc.blocks) == 2
    L = bc.left.obj
    ident = fk.zero_symp(L, L, 4 * tau)
    for i, S in enumerate(L.summands):
        ident.blocks[(i, i)] = fk.identity_symp(S)
    got = cv.flatten(fk.compose_symp(bc.iso, bc.inverse))
    assert np.max(np.abs(got - cv.flatten(ident))) < 1e-10


def test_flatten_round_trip(rng):
    X, Y = fk.FKObject((obj((1, 0)), obj((1, 1), dim=2))), fk.FKObject.of(obj((2, 1)))
    f = vf._rand_symp(rng, X, Y, 0.5j)
    g = cv.unflatten(cv.flatten(f), X, Y, 0.5j)
    assert np.array_equal(cv.flatten(g), cv.flatten(f))


def test_naturality_samples(rng):
    cfg = vf.GeneratorConfig()
    for tau in (0.5j, 0.2 + 0.9j):
        for _ in range(4):
            dev, _ = vf._adjunction_instance(cfg, rng, tau)[:2]
            assert dev < 1e-9
        dev, _ = vf._base_change_instance(cfg, rng, tau)[:2]
        assert dev < 1e-9
