"""Time-domain integration of the half-car model over a road traversal.

Fixed-step classical Runge-Kutta on the first-order form of the equations of
motion. Each axle reads the road at its own longitudinal position, so rear
axles replay the front axle's input delayed by (l_1 - l_i) / v. Lookups ahead
of the profile start (rear axles during the lead-in) return zero height,
consistent with the all-zero initial state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, DivergenceError
from .road import RoadProfile
from .sdpi import MetricVector
from .vehicle import DEFAULT_GRAVITY, VehicleParams, assemble_matrices

STATE_LIMIT = 1.0e6  # m (and m/s); beyond this the run is declared divergent


@dataclass(frozen=True)
class SimConfig:
    """Traversal settings shared by every simulation in a study."""

    speed: float = 10.0        # m/s
    duration: float = 20.0     # s
    time_step: float = 1.0e-3  # s
    warmup: float = 2.0        # s, discarded from metrics
    gravity: float = DEFAULT_GRAVITY  # m/s^2, used by static-load reporting

    def __post_init__(self):
        if self.time_step <= 0:
            raise ConfigError(f"time_step must be positive, got {self.time_step}")
        if self.speed <= 0:
            raise ConfigError(f"speed must be positive, got {self.speed}")
        if self.warmup < 0 or self.duration <= self.warmup:
            raise ConfigError(
                f"need duration > warmup >= 0, got duration={self.duration}, "
                f"warmup={self.warmup}")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.time_step))


@dataclass(frozen=True)
class SimResponse:
    """Time series of all degrees of freedom plus derived per-axle channels.

    `displacements`, `velocities`, `accelerations` are (T, n+2) in the state
    ordering [z_s, theta, z_us(1) .. z_us(n)]; per-axle channels are (T, n).
    """

    time: np.ndarray
    displacements: np.ndarray
    velocities: np.ndarray
    accelerations: np.ndarray
    road_input: np.ndarray     # z_r per axle, m
    deflection: np.ndarray     # d_i = z_s - l_i*theta - z_us_i, m
    tire_load: np.ndarray      # k_t * (z_us - z_r), N

    @property
    def z_s(self) -> np.ndarray:
        return self.displacements[:, 0]

    @property
    def theta(self) -> np.ndarray:
        return self.displacements[:, 1]

    @property
    def z_us(self) -> np.ndarray:
        return self.displacements[:, 2:]

    @property
    def zdd_s(self) -> np.ndarray:
        return self.accelerations[:, 0]

    @property
    def theta_ddot(self) -> np.ndarray:
        return self.accelerations[:, 1]

    @property
    def axle_count(self) -> int:
        return self.road_input.shape[1]


@njit(cache=True, nogil=True)
def _road_height(elev, dx, pos):
    # Flat lead-in before the profile start; clamp at the far end.
    if pos <= 0.0:
        return 0.0
    idx = pos / dx
    j = int(idx)
    last = elev.shape[0] - 1
    if j >= last:
        return elev[last]
    frac = idx - j
    return elev[j] + frac * (elev[j + 1] - elev[j])


@njit(cache=True, nogil=True)
def _road_heights(elev, dx, positions):
    out = np.empty(positions.shape)
    flat_pos = positions.ravel()
    flat_out = out.ravel()
    for i in range(flat_pos.shape[0]):
        flat_out[i] = _road_height(elev, dx, flat_pos[i])
    return out


@njit(cache=True, nogil=True)
def _accel(z, w, t, minv, cmat, kmat, kt, xoff, elev, dx, speed, out):
    size = z.shape[0]
    n = kt.shape[0]
    for r in range(size):
        s = 0.0
        for c in range(size):
            s += cmat[r, c] * w[c] + kmat[r, c] * z[c]
        out[r] = -s
    for i in range(n):
        zr = _road_height(elev, dx, speed * t + xoff[i])
        out[2 + i] += kt[i] * zr
    for r in range(size):
        out[r] *= minv[r]


@njit(cache=True, nogil=True)
def _integrate(minv, cmat, kmat, kt, xoff, elev, dx, speed, dt, n_steps, limit):
    """Classical 4th-order Runge-Kutta from an all-zero initial state.

    Returns displacement and velocity histories of shape (n_steps+1, n+2)
    plus the index of the first divergent step (-1 when stable).
    """
    size = minv.shape[0]
    disp = np.zeros((n_steps + 1, size))
    velo = np.zeros((n_steps + 1, size))
    z = np.zeros(size)
    w = np.zeros(size)
    zt = np.empty(size)
    wt = np.empty(size)
    a1 = np.empty(size)
    a2 = np.empty(size)
    a3 = np.empty(size)
    a4 = np.empty(size)
    k2z = np.empty(size)
    k3z = np.empty(size)
    k4z = np.empty(size)
    half = 0.5 * dt

    for step in range(n_steps):
        t = step * dt
        # k1
        _accel(z, w, t, minv, cmat, kmat, kt, xoff, elev, dx, speed, a1)
        # k2
        for r in range(size):
            zt[r] = z[r] + half * w[r]
            k2z[r] = w[r] + half * a1[r]
            wt[r] = k2z[r]
        _accel(zt, wt, t + half, minv, cmat, kmat, kt, xoff, elev, dx, speed, a2)
        # k3
        for r in range(size):
            zt[r] = z[r] + half * k2z[r]
            k3z[r] = w[r] + half * a2[r]
            wt[r] = k3z[r]
        _accel(zt, wt, t + half, minv, cmat, kmat, kt, xoff, elev, dx, speed, a3)
        # k4
        for r in range(size):
            zt[r] = z[r] + dt * k3z[r]
            k4z[r] = w[r] + dt * a3[r]
            wt[r] = k4z[r]
        _accel(zt, wt, t + dt, minv, cmat, kmat, kt, xoff, elev, dx, speed, a4)

        diverged = False
        for r in range(size):
            z[r] += dt / 6.0 * (w[r] + 2.0 * k2z[r] + 2.0 * k3z[r] + k4z[r])
            w[r] += dt / 6.0 * (a1[r] + 2.0 * a2[r] + 2.0 * a3[r] + a4[r])
            disp[step + 1, r] = z[r]
            velo[step + 1, r] = w[r]
            if abs(z[r]) > limit or abs(w[r]) > limit:
                diverged = True
        if diverged:
            return disp, velo, step + 1
    return disp, velo, -1


def simulate(params: VehicleParams, profile: RoadProfile, cfg: SimConfig) -> SimResponse:
    """Integrate the vehicle over the profile; all channels on the time grid.

    The profile must cover speed*duration plus the axle span. Accelerations
    are recovered algebraically from the equations of motion at each saved
    step, not by differencing.
    """
    required = cfg.speed * cfg.duration + params.wheelbase
    if profile.length < required:
        raise ConfigError(
            f"profile length {profile.length} m too short: need >= {required} m "
            f"(speed*duration + axle span)")

    mats = assemble_matrices(params)
    minv = 1.0 / np.diag(mats.mass_matrix)
    kt = np.asarray(params.tire_stiffnesses)
    offs = np.asarray(params.axle_offsets)
    xoff = offs - offs[0]  # axle i trails the front axle by (l_1 - l_i)

    disp, velo, div_step = _integrate(
        minv, mats.damping_matrix, mats.stiffness_matrix, kt, xoff,
        profile.elevations, profile.spatial_step, cfg.speed, cfg.time_step,
        cfg.n_steps, STATE_LIMIT)
    if div_step >= 0:
        raise DivergenceError(step=div_step, time=div_step * cfg.time_step)

    time = np.arange(cfg.n_steps + 1) * cfg.time_step
    road_in = _road_heights(profile.elevations, profile.spatial_step,
                            cfg.speed * time[:, None] + xoff[None, :])
    force = np.zeros_like(disp)
    force[:, 2:] = road_in * kt
    accel = (force - velo @ mats.damping_matrix.T
             - disp @ mats.stiffness_matrix.T) * minv
    deflection = disp[:, [0]] - disp[:, [1]] * offs[None, :] - disp[:, 2:]
    tire_load = kt * (disp[:, 2:] - road_in)

    return SimResponse(time=time, displacements=disp, velocities=velo,
                       accelerations=accel, road_input=road_in,
                       deflection=deflection, tire_load=tire_load)


def response_metrics(resp: SimResponse, cfg: SimConfig) -> MetricVector:
    """Aggregate the response into the five performance quantities.

    Statistics run over t > warmup only, so start-up transients from the
    flat lead-in are excluded.
    """
    keep = resp.time > cfg.warmup
    if not np.any(keep):
        raise ConfigError(
            f"no samples after warmup={cfg.warmup} s (duration {resp.time[-1]} s)")
    sws = np.abs(resp.deflection[keep]).max(axis=0)
    dtl = np.sqrt(np.mean(resp.tire_load[keep] ** 2, axis=0))
    return MetricVector(
        a_rms=float(np.sqrt(np.mean(resp.zdd_s[keep] ** 2))),
        theta_ddot_rms=float(np.sqrt(np.mean(resp.theta_ddot[keep] ** 2))),
        theta_rms=float(np.sqrt(np.mean(resp.theta[keep] ** 2))),
        sws_max_sum=float(sws.sum()),
        dtl_rms_sum=float(dtl.sum()),
        sws_max=tuple(float(v) for v in sws),
        dtl_rms=tuple(float(v) for v in dtl),
    )


def response_channel_names(n_axles: int) -> list[str]:
    """CSV column names (with units) for a response export."""
    cols = ["time_s", "z_s_m", "theta_rad"]
    cols += [f"z_us{i + 1}_m" for i in range(n_axles)]
    cols += ["zdd_s_mps2", "theta_ddot_radps2"]
    cols += [f"defl{i + 1}_m" for i in range(n_axles)]
    cols += [f"dtl{i + 1}_N" for i in range(n_axles)]
    cols += [f"z_r{i + 1}_m" for i in range(n_axles)]
    return cols


def response_to_csv(resp: SimResponse, path) -> None:
    """One column per channel, header row naming channel and unit."""
    n = resp.axle_count
    table = np.column_stack([
        resp.time, resp.z_s, resp.theta, resp.z_us,
        resp.zdd_s, resp.theta_ddot, resp.deflection, resp.tire_load,
        resp.road_input,
    ])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(response_channel_names(n)) + "\n")
        for row in table:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
