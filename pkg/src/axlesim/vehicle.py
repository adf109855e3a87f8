"""Vehicle parameterization and equation-of-motion matrices for an n-axle half car.

The model has n+2 degrees of freedom ordered [z_s, theta, z_us(1) .. z_us(n)]:
vertical bounce and pitch of the sprung mass plus vertical motion of each
unsprung mass. Suspension deflection at axle i is d_i = z_s - l_i*theta - z_us_i
with l_i the signed axle offset, positive forward of the center of gravity.
Coordinates are measured from static equilibrium, so gravity never enters the
dynamic force vector; static loads are a separate computation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ParameterError

DEFAULT_GRAVITY = 9.81  # m/s^2

# Reference four-axle combat vehicle (equidistant axles, CG at midspan).
DEFAULT_VEHICLE_TABLE = {
    "m_s": 20337.8,    # sprung mass, kg
    "I_y": 562239.6,   # pitch inertia, kg m^2
    "m_us": 458.4,     # unsprung mass per axle, kg
    "k_s": 128710.0,   # suspension spring rate per axle, N/m
    "c_s": 11522.5,    # suspension damping per axle, N s/m
    "k_t": 840857.0,   # tire stiffness per axle, N/m
    "wb": 4.85,        # first-to-last axle span, m
    "n_axles": 4,
}


def evenly_spaced_offsets(wheelbase: float, n_axles: int) -> tuple[float, ...]:
    """Axle offsets for equidistant axles with the CG at the geometric center.

    `wheelbase` is the total first-to-last axle span. Offsets are positive
    forward and strictly decreasing front to rear. A single axle sits at the CG.
    """
    if n_axles < 1:
        raise ParameterError(f"axle_count must be >= 1, got {n_axles}")
    if n_axles == 1:
        return (0.0,)
    pitch = wheelbase / (n_axles - 1)
    return tuple(wheelbase / 2.0 - i * pitch for i in range(n_axles))


@dataclass(frozen=True)
class VehicleParams:
    """Full physical description of an n-axle half vehicle.

    Per-axle lists are ordered front to rear. All masses, inertias and
    stiffnesses must be strictly positive; damping must be non-negative;
    axle offsets must be strictly decreasing (distinct axles).
    """

    axle_count: int
    sprung_mass: float                     # kg
    pitch_inertia: float                   # kg m^2
    unsprung_masses: tuple[float, ...]     # kg
    spring_coeffs: tuple[float, ...]       # N/m
    damping_coeffs: tuple[float, ...]      # N s/m
    tire_stiffnesses: tuple[float, ...]    # N/m
    axle_offsets: tuple[float, ...]        # m, positive forward of CG

    def __post_init__(self):
        for name in ("unsprung_masses", "spring_coeffs", "damping_coeffs",
                     "tire_stiffnesses", "axle_offsets"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        n = self.axle_count
        if n < 1:
            raise ParameterError(f"axle_count must be >= 1, got {n}")
        for name in ("unsprung_masses", "spring_coeffs", "damping_coeffs",
                     "tire_stiffnesses", "axle_offsets"):
            got = len(getattr(self, name))
            if got != n:
                raise ParameterError(f"{name} has length {got}, expected axle_count={n}")
        if self.sprung_mass <= 0:
            raise ParameterError(f"sprung_mass must be positive, got {self.sprung_mass}")
        if self.pitch_inertia <= 0:
            raise ParameterError(f"pitch_inertia must be positive, got {self.pitch_inertia}")
        for name in ("unsprung_masses", "spring_coeffs", "tire_stiffnesses"):
            for i, v in enumerate(getattr(self, name)):
                if v <= 0:
                    raise ParameterError(f"{name}[{i}] must be positive, got {v}")
        for i, v in enumerate(self.damping_coeffs):
            if v < 0:
                raise ParameterError(f"damping_coeffs[{i}] must be non-negative, got {v}")
        for i in range(n - 1):
            if self.axle_offsets[i] <= self.axle_offsets[i + 1]:
                raise ParameterError(
                    "axle_offsets must be strictly decreasing front to rear, got "
                    f"{self.axle_offsets}"
                )

    @property
    def wheelbase(self) -> float:
        """First-to-last axle span, m (0 for a single axle)."""
        return self.axle_offsets[0] - self.axle_offsets[-1]

    @property
    def total_mass(self) -> float:
        return self.sprung_mass + sum(self.unsprung_masses)

    def scaled(self, *, m_s: float = 1.0, I_y: float = 1.0, k_s: float = 1.0,
               c_s: float = 1.0, k_t: float = 1.0, wb: float = 1.0) -> "VehicleParams":
        """Return a copy with multiplicative factors applied.

        k_s/c_s/k_t scale all axles together; wb rescales every axle offset
        proportionally; unsprung masses and axle count are kept.
        """
        return VehicleParams(
            axle_count=self.axle_count,
            sprung_mass=self.sprung_mass * m_s,
            pitch_inertia=self.pitch_inertia * I_y,
            unsprung_masses=self.unsprung_masses,
            spring_coeffs=tuple(v * k_s for v in self.spring_coeffs),
            damping_coeffs=tuple(v * c_s for v in self.damping_coeffs),
            tire_stiffnesses=tuple(v * k_t for v in self.tire_stiffnesses),
            axle_offsets=tuple(v * wb for v in self.axle_offsets),
        )


def default_vehicle() -> VehicleParams:
    """The reference four-axle combat vehicle."""
    t = DEFAULT_VEHICLE_TABLE
    n = t["n_axles"]
    return VehicleParams(
        axle_count=n,
        sprung_mass=t["m_s"],
        pitch_inertia=t["I_y"],
        unsprung_masses=(t["m_us"],) * n,
        spring_coeffs=(t["k_s"],) * n,
        damping_coeffs=(t["c_s"],) * n,
        tire_stiffnesses=(t["k_t"],) * n,
        axle_offsets=evenly_spaced_offsets(t["wb"], n),
    )


@dataclass(frozen=True)
class SystemMatrices:
    """Mass, damping and stiffness matrices, each (n+2) x (n+2).

    State ordering [z_s, theta, z_us(1) .. z_us(n)]. M is diagonal; C and K
    are symmetric. Arrays are read-only.
    """

    mass_matrix: np.ndarray
    damping_matrix: np.ndarray
    stiffness_matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.mass_matrix.shape[0]


def _coupling_matrix(coeffs: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Symmetric suspension coupling block common to the C and K matrices."""
    n = coeffs.size
    mat = np.zeros((n + 2, n + 2))
    mat[0, 0] = coeffs.sum()
    mat[0, 1] = mat[1, 0] = -(offsets * coeffs).sum()
    mat[1, 1] = (offsets ** 2 * coeffs).sum()
    mat[0, 2:] = -coeffs
    mat[2:, 0] = -coeffs
    mat[1, 2:] = offsets * coeffs
    mat[2:, 1] = offsets * coeffs
    mat[2:, 2:][np.diag_indices(n)] = coeffs
    return mat


def assemble_matrices(params: VehicleParams) -> SystemMatrices:
    """Assemble M, C, K for the n+2 DOF half-car equations of motion."""
    c_s = np.asarray(params.damping_coeffs)
    k_s = np.asarray(params.spring_coeffs)
    k_t = np.asarray(params.tire_stiffnesses)
    offs = np.asarray(params.axle_offsets)

    mass = np.diag(np.concatenate(
        ([params.sprung_mass, params.pitch_inertia], params.unsprung_masses)))
    damping = _coupling_matrix(c_s, offs)
    stiffness = _coupling_matrix(k_s, offs)
    # Tire springs act only on the unsprung masses.
    n = params.axle_count
    stiffness[2:, 2:][np.diag_indices(n)] += k_t

    for m in (mass, damping, stiffness):
        m.flags.writeable = False
    return SystemMatrices(mass_matrix=mass, damping_matrix=damping,
                          stiffness_matrix=stiffness)


def force_vector(params: VehicleParams, road_heights) -> np.ndarray:
    """External force vector from per-axle road elevations.

    Entry 2+i equals road_heights[i] * k_t(i); the body rows are zero
    (the road acts only through the tire springs).
    """
    heights = np.asarray(road_heights, dtype=float)
    if heights.shape != (params.axle_count,):
        raise ParameterError(
            f"road_heights has shape {heights.shape}, expected ({params.axle_count},)")
    out = np.zeros(params.axle_count + 2)
    out[2:] = heights * np.asarray(params.tire_stiffnesses)
    return out


def static_axle_loads(params: VehicleParams, gravity: float = DEFAULT_GRAVITY) -> np.ndarray:
    """Per-axle static tire normal loads, N.

    Solves the static deflection of the full spring system under gravity and
    reads the tire compression forces. Loads always sum to total weight.
    """
    if params.axle_count == 1:
        # One support: equilibrium exists only with the axle under the CG.
        if params.axle_offsets[0] != 0.0:
            raise GeometryError(
                "single axle offset from the CG cannot balance pitch moment")
        return np.array([params.total_mass * gravity])

    mats = assemble_matrices(params)
    weight = np.zeros(params.axle_count + 2)
    weight[0] = -params.sprung_mass * gravity
    weight[2:] = -np.asarray(params.unsprung_masses) * gravity
    try:
        deflection = np.linalg.solve(mats.stiffness_matrix, weight)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"singular axle geometry: {exc}") from exc
    return -np.asarray(params.tire_stiffnesses) * deflection[2:]
