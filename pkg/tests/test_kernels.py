import numpy as np
import pytest

from nestline import _kernels_py, kernels
from nestline.model import build_problem
from nestline.seeding import generate_start

from conftest import load, random_vector

compiled_only = pytest.mark.skipif("compiled" not in kernels.available(),
                                   reason="extension not built")


@compiled_only
@pytest.mark.parametrize("name", ["poly1a", "jakobs1"])
def test_backends_agree_on_evaluations(name, rng):
    from nestline import _kernels as ck

    inst = load(name)
    P = build_problem(inst.pieces, inst.strip_width)
    args = P._args()
    for _ in range(5):
        v = random_vector(P, rng)
        w = rng.standard_normal(P.n_constraints)
        lam = rng.uniform(0, 1, P.n_constraints)
        np.testing.assert_allclose(ck.constraints(v, *args), _kernels_py.constraints(v, *args),
                                   rtol=1e-13, atol=1e-12)
        np.testing.assert_allclose(ck.jt_vec(v, w, *args), _kernels_py.jt_vec(v, w, *args),
                                   rtol=1e-12, atol=1e-10)
        g1, g2 = np.empty(P.n_constraints), np.empty(P.n_constraints)
        f1, d1 = ck.al_value_grad(v, lam, 7.0, *args, g1)
        f2, d2 = _kernels_py.al_value_grad(v, lam, 7.0, *args, g2)
        assert f1 == pytest.approx(f2, rel=1e-12)
        np.testing.assert_allclose(d1, d2, rtol=1e-11, atol=1e-9)


@compiled_only
def test_backends_give_identical_seeds():
    inst = load("poly1a")
    with kernels.use_backend("compiled"):
        a = generate_start(inst.pieces, inst.strip_width, 30, 8)
    with kernels.use_backend("python"):
        b = generate_start(inst.pieces, inst.strip_width, 30, 8)
    assert a.placements == b.placements


def test_use_backend_restores():
    before = kernels.BACKEND
    with kernels.use_backend("python"):
        assert kernels.BACKEND == "python"
        assert kernels.constraints is _kernels_py.constraints
    assert kernels.BACKEND == before


def test_unknown_backend():
    with pytest.raises(ValueError):
        with kernels.use_backend("fortran"):
            pass
