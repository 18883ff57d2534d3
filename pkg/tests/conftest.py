import pytest

from app.core.constants import ev_to_angular_frequency
from app.schemas.material import DielectricModel
from app.schemas.quadrature import QuadratureSpec

GOLD_OMEGA_P_EV = 9.0
GOLD_GAMMA_EV = 0.035


@pytest.fixture
def gold_plasma() -> DielectricModel:
    return DielectricModel.plasma(ev_to_angular_frequency(GOLD_OMEGA_P_EV), label="gold-plasma")


@pytest.fixture
def gold_drude() -> DielectricModel:
    return DielectricModel.drude(
        ev_to_angular_frequency(GOLD_OMEGA_P_EV),
        ev_to_angular_frequency(GOLD_GAMMA_EV),
        label="gold-drude",
    )


@pytest.fixture
def pc() -> DielectricModel:
    return DielectricModel.perfect_conductor()


@pytest.fixture
def vacuum() -> DielectricModel:
    return DielectricModel.vacuum()


@pytest.fixture
def small_quad() -> QuadratureSpec:
    """Cheap grid; exact for perfect conductors, whose integrands are polynomial in u."""
    return QuadratureSpec(phi_nodes=32, t_nodes=16, w_nodes=24, v_nodes=24, u_nodes=16)


@pytest.fixture
def material_quad() -> QuadratureSpec:
    return QuadratureSpec(phi_nodes=48, t_nodes=40, refine=False)
