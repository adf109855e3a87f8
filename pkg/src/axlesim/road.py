"""Random rough-road elevation profiles from a displacement PSD.

Profiles are built as a superposition of cosines whose amplitudes follow the
single-slope displacement PSD G_d(n) = G_d(n0) * (n/n0)^-2 with reference
spatial frequency n0 = 0.1 cycles/m. The per-class G_d(n0) constants are the
published ISO 8608 geometric means, so the elevation amplitude doubles from
each roughness class to the next.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import PositionError, RoadSpecError

REF_SPATIAL_FREQ = 0.1  # n0, cycles/m
PSD_EXPONENT = 2.0      # waviness w in G_d(n) = G_d(n0) * (n/n0)^-w

# Displacement PSD at n0 per roughness class, m^3 (ISO 8608 geometric means).
ISO_CLASS_GD = {
    "A": 16e-6,
    "B": 64e-6,
    "C": 256e-6,
    "D": 1024e-6,
    "E": 4096e-6,
    "F": 16384e-6,
    "G": 65536e-6,
    "H": 262144e-6,
}

_COS_CHUNK = 8192  # x-samples per synthesis block, bounds peak memory


@dataclass(frozen=True)
class RoadSpec:
    """Generation recipe for a random road profile.

    The spatial frequency band [n_min, n_max] is covered by `components`
    log-spaced cosines. `gd_n0` overrides the class PSD constant when set.
    """

    iso_class: str = "C"
    length: float = 250.0          # m
    spatial_step: float = 0.05     # m
    seed: int = 0
    n_min: float = 0.011           # cycles/m
    n_max: float = 2.83            # cycles/m
    components: int = 256
    gd_n0: float | None = None     # m^3, defaults to the class constant

    def __post_init__(self):
        if self.iso_class not in ISO_CLASS_GD:
            raise RoadSpecError(f"unknown roughness class {self.iso_class!r}")
        if self.length <= 0:
            raise RoadSpecError(f"length must be positive, got {self.length}")
        if self.spatial_step <= 0:
            raise RoadSpecError(f"spatial_step must be positive, got {self.spatial_step}")
        if self.n_min <= 0:
            raise RoadSpecError(f"n_min must be positive, got {self.n_min}")
        # n_min == n_max is the degenerate zero-bandwidth band (zero profile).
        if self.n_max < self.n_min:
            raise RoadSpecError(f"n_max must be >= n_min, got [{self.n_min}, {self.n_max}]")
        if self.components < 1:
            raise RoadSpecError(f"components must be >= 1, got {self.components}")
        if self.spatial_step > 1.0 / (2.0 * self.n_max):
            raise RoadSpecError(
                f"spatial_step {self.spatial_step} violates Nyquist limit "
                f"{1.0 / (2.0 * self.n_max):.6g} for n_max {self.n_max}")

    @property
    def psd_at_ref(self) -> float:
        """G_d(n0) in effect, m^3."""
        return ISO_CLASS_GD[self.iso_class] if self.gd_n0 is None else self.gd_n0


@dataclass(frozen=True)
class RoadProfile:
    """A sampled elevation trace with its generation metadata."""

    elevations: np.ndarray   # m, read-only
    spatial_step: float      # m
    length: float            # m
    iso_class: str
    seed: int

    def __post_init__(self):
        elev = np.ascontiguousarray(self.elevations, dtype=float)
        elev.flags.writeable = False
        object.__setattr__(self, "elevations", elev)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.elevations.size) * self.spatial_step

    @property
    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.elevations ** 2)))


def psd_model(spec: RoadSpec, n) -> np.ndarray:
    """Model displacement PSD G_d(n), m^3, for spatial frequencies n."""
    n = np.asarray(n, dtype=float)
    return spec.psd_at_ref * (n / REF_SPATIAL_FREQ) ** (-PSD_EXPONENT)


def generate_profile(spec: RoadSpec) -> RoadProfile:
    """Generate a zero-mean random profile; deterministic for a fixed seed."""
    rng = np.random.default_rng(spec.seed)
    edges = np.geomspace(spec.n_min, spec.n_max, spec.components + 1)
    freqs = np.sqrt(edges[:-1] * edges[1:])    # geometric band centers
    dn = np.diff(edges)
    amps = np.sqrt(2.0 * psd_model(spec, freqs) * dn)
    phases = rng.uniform(0.0, 2.0 * np.pi, spec.components)

    n_samples = int(np.floor(spec.length / spec.spatial_step)) + 1
    elev = np.empty(n_samples)
    omega = 2.0 * np.pi * freqs
    for start in range(0, n_samples, _COS_CHUNK):
        x = np.arange(start, min(start + _COS_CHUNK, n_samples)) * spec.spatial_step
        elev[start:start + x.size] = np.cos(
            x[:, None] * omega[None, :] + phases[None, :]) @ amps
    return RoadProfile(elevations=elev, spatial_step=spec.spatial_step,
                       length=spec.length, iso_class=spec.iso_class, seed=spec.seed)


def flat_profile(length: float, spatial_step: float = 0.05) -> RoadProfile:
    """All-zero profile (smooth road baseline / lead-in)."""
    n_samples = int(np.floor(length / spatial_step)) + 1
    return RoadProfile(elevations=np.zeros(n_samples), spatial_step=spatial_step,
                       length=length, iso_class="A", seed=0)


def height_at(profile: RoadProfile, position: float) -> float:
    """Linearly interpolated elevation at a longitudinal position, m."""
    if position < 0.0 or position > profile.length:
        raise PositionError(
            f"position {position} outside profile extent [0, {profile.length}]")
    elev = profile.elevations
    idx = position / profile.spatial_step
    j = int(idx)
    if j >= elev.size - 1:
        return float(elev[-1])
    frac = idx - j
    return float(elev[j] + frac * (elev[j + 1] - elev[j]))


def save_profile_csv(profile: RoadProfile, path) -> None:
    """Write `position_m,height_m` rows; values round-trip bit-exactly."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# iso_class={profile.iso_class} seed={profile.seed} "
                 f"spatial_step={profile.spatial_step:.17g} "
                 f"length={profile.length:.17g}\n")
        fh.write("position_m,height_m\n")
        for pos, h in zip(profile.positions, profile.elevations):
            fh.write(f"{pos:.17g},{h:.17g}\n")


def load_profile_csv(path) -> RoadProfile:
    with open(path, "r") as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise RoadSpecError(f"{path}: missing '#' metadata header line")
        meta = dict(item.split("=", 1) for item in header[1:].split())
        body = fh.read()
    heights = np.loadtxt(io.StringIO(body), delimiter=",", skiprows=1,
                         usecols=1, ndmin=1)
    return RoadProfile(
        elevations=heights,
        spatial_step=float(meta["spatial_step"]),
        length=float(meta["length"]),
        iso_class=meta["iso_class"],
        seed=int(meta["seed"]),
    )
