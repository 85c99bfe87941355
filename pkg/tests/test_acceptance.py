"""Every acceptance criterion at its pinned tolerance; one line per criterion is printed.

The lines are collected and shown in an "acceptance criteria" section at the
end of the pytest run.
"""

import pytest

from qflux import acceptance


@pytest.mark.parametrize("name", list(acceptance.CRITERIA))
def test_criterion(name, acceptance_report):
    res = acceptance.run_one(name)
    acceptance_report(res.line())
    assert res.tolerance == acceptance.TOLERANCES[name]
    assert res.passed, res.line()


def test_tolerances_are_pinned():
    assert acceptance.TOLERANCES == {
        "gaussian_flux_identity": 1e-8,
        "gaussian_longtime_diffusivity": 0.0013,
        "stationary_energy": 1e-6,
        "osmotic_identity": 1e-10,
        "soliton_preservation": 1e-3,
        "force_diffusion_opposition": 0.0,
        "box_evolution_crosscheck": 1e-8,
        "farfield_leakage": 0.05,
        "asymptotic_density": 0.10,
        "edge_flux_divergence": 0.1,
        "specfun_accuracy": 1e-11,
        "propagator_health": 1e-6,
    }


def test_tolerance_validation():
    with pytest.raises(ValueError):
        acceptance.validate_tolerances({"nope": "1"})
    with pytest.raises(ValueError):
        acceptance.validate_tolerances({"stationary_energy": "nan"})
    assert acceptance.validate_tolerances({"stationary_energy": "2e-6"})["stationary_energy"] == 2e-6
