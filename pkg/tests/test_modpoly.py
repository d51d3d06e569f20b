import mpmath
import pytest

from jschanuel.modpoly import (
    build_modular_polynomial, build_modular_polynomial_slow, chain_factors, cosets, derived_relation, psi,
    verify_series_identity,
)
from jschanuel.moebius import RatMatrix2


def kj(tau):
    return 1728 * mpmath.kleinj(tau)


def test_psi_values():
    assert [psi(n) for n in range(1, 8)] == [1, 3, 4, 6, 6, 12, 8]
    for n in range(1, 11):
        assert len(cosets(n)) == psi(n)


def test_first_polynomial():
    phi = build_modular_polynomial(1)
    assert phi.poly.coeffs == {(1, 0): 1, (0, 1): -1}


def test_phi2_known_coefficients():
    c = build_modular_polynomial(2).poly.coeffs
    assert c[(3, 0)] == 1 and c[(2, 2)] == -1
    assert c[(2, 1)] == 1488
    assert c[(0, 0)] == -157464000000000
    assert c[(1, 1)] == 40773375


@pytest.mark.parametrize("n", [2, 3, 5])
def test_symmetric_with_degree_psi(n):
    phi = build_modular_polynomial(n)
    assert phi.poly.is_symmetric()
    assert phi.poly.degree_x() == psi(n) == phi.degree
    assert verify_series_identity(phi, n, phi.precision).is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_fast_and_slow_constructions_agree(n):
    assert build_modular_polynomial_slow(n).coeffs == build_modular_polynomial(n).poly.coeffs


@pytest.mark.parametrize("n", [2, 3, 4])
def test_vanishes_numerically(n):
    phi = build_modular_polynomial(n)
    with mpmath.workdps(40):
        for tau in (mpmath.mpc(0.13, 0.91), mpmath.mpc(-0.4, 1.2)):
            x, y = kj(tau), kj(n * tau)
            assert abs(phi(x, y)) < 1e-20 * phi.poly.abs_evaluate(complex(x), complex(y))
            # the other coset representative of the level-n relation
            y2 = kj(tau / n)
            assert abs(phi(x, y2)) < 1e-20 * phi.poly.abs_evaluate(complex(x), complex(y2))


def _jets(f, z):
    return [mpmath.diff(f, z, k) for k in range(4)]


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derived_relations_on_a_fake_pair(order):
    # Phi_1(f(z), f(gz)) = 0 when f(gz) = f(z), i.e. for a g-invariant f; here
    # g = translation by 1 and f has period 1.
    g = RatMatrix2.of([[1, 1], [0, 1]])
    f = lambda z: mpmath.exp(2j * mpmath.pi * z) + 3 * mpmath.exp(4j * mpmath.pi * z)
    with mpmath.workdps(40):
        z = mpmath.mpc(0.17, 0.4)
        ja, jb = _jets(f, z), _jets(f, z + 1)
        val, scale = derived_relation(1, order).evaluate(ja, jb, chain_factors(g, z))
        assert abs(val) < 1e-25 * max(scale, 1)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derived_relations_on_j(order):
    g = RatMatrix2.of([[2, 0], [0, 1]])
    with mpmath.workdps(40):
        z = mpmath.mpc(0.21, 0.83)
        ja = _jets(kj, z)
        jb = _jets(kj, 2 * z)
        val, scale = derived_relation(2, order).evaluate(ja, jb, chain_factors(g, z))
        assert abs(val) < 1e-15 * scale
