import pytest

from trustprop.experiments import preset, run_experiment


@pytest.fixture(scope="session")
def table2_cyclic_result():
    return run_experiment(preset("table2-cyclic"))


@pytest.fixture(scope="session")
def table2_er_result():
    return run_experiment(preset("table2-er"))
