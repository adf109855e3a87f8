"""Shared fixtures and independent oracles used across the test modules."""
import numpy as np
import pytest

from axlesim.road import RoadProfile, RoadSpec, generate_profile
from axlesim.sim import SimConfig
from axlesim.vehicle import VehicleParams, default_vehicle


def oracle_stiffness(params: VehicleParams) -> np.ndarray:
    """Stiffness matrix built independently, by rank-one assembly.

    Each suspension spring contributes k * a a^T with a the deflection
    direction d_i = z_s - l_i*theta - z_us_i; each tire spring contributes
    k_t on its own coordinate. This never touches the element-wise formulas
    used by the implementation.
    """
    n = params.axle_count
    size = n + 2
    mat = np.zeros((size, size))
    for i in range(n):
        a = np.zeros(size)
        a[0] = 1.0
        a[1] = -params.axle_offsets[i]
        a[2 + i] = -1.0
        mat += params.spring_coeffs[i] * np.outer(a, a)
        e = np.zeros(size)
        e[2 + i] = 1.0
        mat += params.tire_stiffnesses[i] * np.outer(e, e)
    return mat


def oracle_damping(params: VehicleParams) -> np.ndarray:
    """Damping matrix by the same rank-one assembly over deflection rates."""
    n = params.axle_count
    size = n + 2
    mat = np.zeros((size, size))
    for i in range(n):
        a = np.zeros(size)
        a[0] = 1.0
        a[1] = -params.axle_offsets[i]
        a[2 + i] = -1.0
        mat += params.damping_coeffs[i] * np.outer(a, a)
    return mat


def random_params(rng: np.random.Generator, n_axles=None) -> VehicleParams:
    """A random valid vehicle with 1..6 axles."""
    n = int(n_axles if n_axles is not None else rng.integers(1, 7))
    offsets = np.sort(rng.uniform(-4.0, 4.0, size=n))[::-1]
    while n > 1 and np.any(np.diff(offsets) == 0.0):
        offsets = np.sort(rng.uniform(-4.0, 4.0, size=n))[::-1]
    return VehicleParams(
        axle_count=n,
        sprung_mass=float(rng.uniform(500.0, 50000.0)),
        pitch_inertia=float(rng.uniform(1e3, 1e6)),
        unsprung_masses=tuple(rng.uniform(20.0, 800.0, size=n)),
        spring_coeffs=tuple(rng.uniform(1e4, 5e5, size=n)),
        damping_coeffs=tuple(rng.uniform(0.0, 5e4, size=n)),
        tire_stiffnesses=tuple(rng.uniform(1e5, 2e6, size=n)),
        axle_offsets=tuple(offsets),
    )


def bump_profile(length: float, spatial_step: float, start: float, width: float,
                 height: float) -> RoadProfile:
    """Half-sine bump on an otherwise flat road."""
    n_samples = int(np.floor(length / spatial_step)) + 1
    x = np.arange(n_samples) * spatial_step
    elev = np.zeros(n_samples)
    inside = (x >= start) & (x <= start + width)
    elev[inside] = height * np.sin(np.pi * (x[inside] - start) / width)
    return RoadProfile(elevations=elev, spatial_step=spatial_step, length=length,
                       iso_class="A", seed=0)


@pytest.fixture(scope="session")
def table_vehicle() -> VehicleParams:
    return default_vehicle()


@pytest.fixture(scope="session")
def rough_road() -> "RoadProfile":
    return generate_profile(RoadSpec(iso_class="C", length=250.0,
                                     spatial_step=0.05, seed=42))


@pytest.fixture(scope="session")
def default_cfg() -> SimConfig:
    return SimConfig()


@pytest.fixture(scope="session")
def quick_cfg() -> SimConfig:
    """Short traversal for tests that need many simulations."""
    return SimConfig(speed=10.0, duration=6.0, time_step=1e-3, warmup=1.0)


@pytest.fixture(scope="session")
def quick_road() -> "RoadProfile":
    return generate_profile(RoadSpec(iso_class="C", length=70.0,
                                     spatial_step=0.05, seed=7))
