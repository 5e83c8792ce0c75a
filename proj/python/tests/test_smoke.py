import pytest

import loveres


def barrier(V0=4.0, h=0.0):
    return loveres.make_potential(1.0, 64, lambda x: V0, h)


def test_free_robin_jost_function():
    js = loveres.JostSolver(barrier(0.0, 1.0))
    for k in (0.5, 3 - 1j, -2 + 4j):
        assert abs(js.fh(k) - (1j * k + 1)) < 1e-12
    (ev,) = js.eigenvalues()
    assert abs(ev - 1j) < 1e-12


def test_barrier_zeros_are_symmetric():
    js = loveres.JostSolver(barrier())
    out = loveres.find_zeros(js, [-15, 15, -5, 0.5], workers=2)
    assert out["complete"]
    zs = out["zeros"]
    assert len(zs) == out["region_count"] > 0
    for z in zs:
        assert min(abs(w + z.conjugate()) for w in zs) < 1e-9
        assert abs(js.fh(z)) < 1e-8


def test_scattering_is_unimodular():
    data = loveres.forward_scattering_data(loveres.JostSolver(barrier(-3.0, 0.5)))
    assert data.N == 1
    for k in (0.1, 2.0, 40.0):
        assert abs(abs(data.S(k)) - 1) < 1e-10


def test_free_robin_inversion():
    r = loveres.invert([1j], 1.0)
    assert max(abs(v) for v in r.V.values) < 1e-4
    assert r.V.h == pytest.approx(1.0, rel=1e-6)


def test_shear_round_trip():
    n = 512
    depth = [i / n for i in range(n + 50)]
    mu = [2.0 * (1 + 0.1 * (4 * x * (1 - x)) ** 8) ** 2 if x < 1 else 2.0 for x in depth]
    p = loveres.ShearProfile(depth, mu, 2.0, 1.0)
    V1, V2 = loveres.calibrate(p, 1.0, 512), loveres.calibrate(p, 2.0, 512)
    back = loveres.recover_shear(V1, V2, 1.0, 2.0, 2.0)
    for x, m in zip(back.depth_grid, back.mu):
        want = 2.0 * (1 + 0.1 * (4 * x * (1 - x)) ** 8) ** 2 if x < 1 else 2.0
        assert m == pytest.approx(want, rel=1e-9)


def test_errors_map_to_python_exceptions():
    with pytest.raises(loveres.SymmetryError):
        loveres.invert([1j, 2 - 1j], 1.0)
    with pytest.raises(loveres.LoveresError):
        loveres.calibrate(loveres.ShearProfile([0, 0.5, 1], [1, 1, 1], 1.0, 1.0), -1.0)
    assert issubclass(loveres.DomainError, loveres.LoveresError)
