import math

import pytest

from cases import one_per_case
from zpgd import oracle as orc
from zpgd import viscous as vs
from zpgd.errors import DomainError
from zpgd.viscous import DeltaRiemannData as D


def test_heat_flow_preserves_constant():
    data = D(0, 0.5, 1, 2, 0.0, 0.0, 1, 2)
    for x, t in [(-3.0, 0.1), (0.7, 1.0), (5.0, 4.0)]:
        assert orc.oracle_V(data, 0.2, x, t).value() == pytest.approx(1.0, abs=1e-12)
        assert abs(orc.oracle_u(data, 0.2, x, t)) < 1e-12


def test_zero_density_gives_zero_S():
    data = D(0, 0.5, 1, 2, -1, 1, 0.0, 0.0)
    assert orc.oracle_S(data, 0.5, 0.25, 1.0).value() == 0.0
    assert orc.oracle_R(data, 0.5, 0.25, 1.0) == 0.0


def test_matches_closed_form_V_S():
    data = D(0, 0.5, 1, 2, -1, 1, 1, 2)
    V, S = vs.viscous_V_S(data, 0.5, 0.25, 1.0)
    assert orc.oracle_V(data, 0.5, 0.25, 1.0).value() == pytest.approx(V.value(), rel=1e-8)
    assert orc.oracle_S(data, 0.5, 0.25, 1.0).value() == pytest.approx(S.value(), rel=1e-8)


def test_symmetric_datum_has_zero_velocity_at_midpoint():
    u = 1.3
    data = D(0, 0.25, 1, 1.75, -u, u, 1, 1)
    assert abs(orc.oracle_u(data, 0.3, 0.5, 0.7)) < 1e-12


@pytest.mark.parametrize("name", list(one_per_case()))
@pytest.mark.parametrize("eps", [0.5, 0.1])
def test_agrees_with_closed_form(name, eps):
    data = one_per_case()[name]
    for x in (-1.0, 0.3, 1.2, 2.5, 3.5, 6.0):
        for t in (0.2, 1.0):
            u, R = vs.viscous_u_R(data, eps, x, t)
            ou, oR = orc.oracle_u(data, eps, x, t), orc.oracle_R(data, eps, x, t)
            assert abs(u - ou) <= 1e-6 * (1 + abs(ou))
            assert abs(R - oR) <= 1e-6 * (1 + abs(oR))


def test_derivative_kernel_matches_finite_difference():
    data = D(0, 0.5, 1, 2, 1.5, -0.5, 1, 2)
    h = 1e-5
    fd = (orc.oracle_V(data, 0.3, 0.8 + h, 1.0).value() - orc.oracle_V(data, 0.3, 0.8 - h, 1.0).value()) / (2 * h)
    assert orc.oracle_Vx(data, 0.3, 0.8, 1.0).value() == pytest.approx(fd, rel=1e-6)


def test_spec_validation():
    with pytest.raises(DomainError):
        orc.QuadratureSpec(relative_tolerance=0.0)
    with pytest.raises(DomainError):
        orc.QuadratureSpec(window_halfwidth_sigmas=4.0)
    with pytest.raises(DomainError):
        orc.oracle_u(D(0, 0.5, 1, 2, 1, 1, 1, 1), 0.0, 0.3, 1.0)


def test_huge_exponents_do_not_overflow():
    data = D(0, 0.5, 1, 2, -300.0, 280.0, 1, 2)
    assert math.isfinite(orc.oracle_u(data, 0.5, 0.3, 1.0))
