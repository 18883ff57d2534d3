import numpy as np
import pytest

from app.core.constants import CONSTANTS, dimensionless_groups
from app.core.errors import DataError, DomainError
from app.schemas.material import DielectricModel, MaterialSpec
from app.services.dielectric import (
    has_damping_scale,
    is_perfect_conductor,
    load_permittivity_table,
    permittivity,
    permittivity_limit,
    permittivity_reduced,
    reduced_groups,
)


def test_vacuum_is_one():
    assert permittivity(DielectricModel.vacuum(), 3.0e15) == 1.0


def test_plasma_and_drude_examples():
    xi = 2.0e15
    assert permittivity(DielectricModel.plasma(xi), xi) == pytest.approx(2.0)
    assert permittivity(DielectricModel.drude(xi, xi), xi) == pytest.approx(1.5)


def test_perfect_conductor_is_a_marker():
    eps = permittivity(DielectricModel.perfect_conductor(), 1.0e15)
    assert is_perfect_conductor(eps)
    assert is_perfect_conductor(permittivity_limit(DielectricModel.perfect_conductor()))


def test_pole_at_zero_needs_the_limit_flag(gold_plasma):
    with pytest.raises(DomainError):
        permittivity(gold_plasma, 0.0)
    assert permittivity(gold_plasma, 0.0, allow_limit=True) == np.inf
    assert permittivity_limit(gold_plasma) == np.inf


def test_drude_never_exceeds_plasma(gold_plasma, gold_drude):
    xi = np.geomspace(1e11, 1e18, 200)
    drude = permittivity(gold_drude, xi)
    plasma = permittivity(gold_plasma, xi)
    assert np.all(drude <= plasma)
    assert np.all(drude >= 1.0)
    assert np.all(np.diff(plasma) < 0)
    assert np.all(np.diff(drude) < 0)


def test_reduced_form_examples():
    model = DielectricModel.plasma(1.0)
    groups = dimensionless_groups(1.0, 1.0, omega_p=(2.0 * CONSTANTS.c,))
    assert permittivity_reduced(model, 1.0, 0.6, groups) == pytest.approx(7.25)
    groups = dimensionless_groups(1.0, 1.0, omega_p=(CONSTANTS.c,))
    assert permittivity_reduced(model, 1.0, 1e-8, groups) == pytest.approx(2.0)


def test_drude_without_damping_matches_plasma():
    omega_p = 1.3e16
    plasma = DielectricModel.plasma(omega_p)
    drude = DielectricModel.drude(omega_p, 0.0)
    groups = reduced_groups(plasma, drude, 1e-3, 1e-6)
    t = np.linspace(0.01, 5.0, 40)[:, None]
    tau = np.linspace(0.05, 0.95, 30)[None, :]
    np.testing.assert_allclose(
        permittivity_reduced(plasma, t, tau, groups, medium=0),
        permittivity_reduced(drude, t, tau, groups, medium=1),
        rtol=1e-14,
    )


def test_reduced_form_matches_physical_frequency(gold_drude):
    rng = np.random.default_rng(7)
    R, d = 1e-3, 2e-7
    groups = reduced_groups(gold_drude, gold_drude, R, d)
    t = rng.uniform(0.01, 20.0, 1000)
    tau = rng.uniform(0.01, 0.99, 1000)
    xi = CONSTANTS.c * t * np.sqrt(1.0 - tau ** 2) / d
    np.testing.assert_allclose(
        permittivity_reduced(gold_drude, t, tau, groups),
        permittivity(gold_drude, xi),
        rtol=1e-12,
    )


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.2, 1.5])
def test_reduced_form_rejects_tau_outside_unit_interval(gold_plasma, tau):
    groups = reduced_groups(gold_plasma, gold_plasma, 1e-3, 1e-6)
    with pytest.raises(DomainError):
        permittivity_reduced(gold_plasma, 1.0, tau, groups)


def test_custom_table_interpolates_log_log(tmp_path):
    table = tmp_path / "metal.txt"
    table.write_text("# xi eps\n1e14 1e4\n1e16 1e0\n")
    model = load_permittivity_table(table)
    assert model.label == "metal"
    assert permittivity(model, 1e15) == pytest.approx(1e2)
    with pytest.raises(DomainError):
        permittivity(model, 1e17)


def test_custom_table_must_increase(tmp_path):
    table = tmp_path / "bad.txt"
    table.write_text("1e16 2.0\n1e14 3.0\n")
    with pytest.raises(DataError):
        load_permittivity_table(table)


def test_missing_table_is_a_data_error(tmp_path):
    with pytest.raises(DataError):
        load_permittivity_table(tmp_path / "missing.txt")


def test_material_spec_in_electron_volts():
    model = MaterialSpec(kind="drude", omega_p_ev=9.0, gamma_ev=0.035).to_model()
    assert model.omega_p == pytest.approx(1.367e16, rel=1e-3)
    assert model.gamma == pytest.approx(5.32e13, rel=1e-3)
    assert "drude" in model.describe()


def test_material_spec_needs_plasma_frequency():
    with pytest.raises(ValueError):
        MaterialSpec(kind="plasma")


def test_negative_parameters_are_rejected():
    with pytest.raises(DomainError):
        DielectricModel.plasma(-1.0)
    with pytest.raises(DomainError):
        DielectricModel.drude(1.0, -1.0)


def test_damping_scale_is_a_drude_property(gold_plasma, gold_drude, pc, vacuum):
    assert has_damping_scale(gold_drude)
    assert has_damping_scale(gold_plasma, gold_drude)
    assert not has_damping_scale(gold_plasma, pc, vacuum)
    assert not has_damping_scale(DielectricModel.drude(1e16, 0.0))


def test_reduced_form_accepts_cos_tau_at_grazing_angles():
    model = DielectricModel.plasma(1.0)
    groups = dimensionless_groups(1.0, 1.0, omega_p=(2.0 * CONSTANTS.c,))
    assert permittivity_reduced(model, 1.0, 0.6, groups, cos_tau=0.8) == pytest.approx(7.25, rel=1e-14)
    # tau has rounded to 1; cos_tau still carries the angle
    eps = permittivity_reduced(model, 1.0, 1.0, groups, cos_tau=1e-10)
    assert eps == pytest.approx(1.0 + 4.0e20, rel=1e-12)
    with pytest.raises(DomainError):
        permittivity_reduced(model, 1.0, 1.0, groups)
    with pytest.raises(DomainError):
        permittivity_reduced(model, 1.0, 1.0, groups, cos_tau=0.0)
