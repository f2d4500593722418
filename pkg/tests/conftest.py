import pathlib

import pytest

from sqznb import InterferometerConfig

ROOT = pathlib.Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def configs_dir() -> pathlib.Path:
    return ROOT / "configs"


@pytest.fixture(scope="session")
def schema_dir() -> pathlib.Path:
    return ROOT / "docs" / "schema"


@pytest.fixture()
def aligo_like() -> InterferometerConfig:
    # illustrative Advanced-LIGO-scale parameters, as shipped in configs/aligo.json
    return InterferometerConfig(
        arm_length=3995.0,
        mirror_mass=40.0,
        arm_power=800e3,
        cavity_pole=390.0,
        wavelength=1.064e-6,
        label="aLIGO-class",
    )


@pytest.fixture()
def h1_like() -> InterferometerConfig:
    return InterferometerConfig.from_finesse(
        arm_length=4000.0,
        mirror_mass=10.7,
        arm_power=40e3,
        finesse=204.0,
        wavelength=1.064e-6,
        label="H1",
    )
