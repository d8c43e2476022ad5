"""Angle conventions, direction vectors, and UPA steering vectors.

Conventions used throughout:
  - zenith theta in [0, pi], azimuth phi in [-pi, pi)
  - unit direction u = (sin(theta)cos(phi), sin(theta)sin(phi), cos(theta))
  - UPA elements lie in the local y-z plane at positions (0, m*d, n*d),
    flat index m*Mz + n, so the steering vector factors as a Kronecker
    product over the y and z axes in the same ordering as the codebook.
  - array boresight is local +x; an orientation matrix R maps local
    coordinates to world coordinates (world = R @ local).
"""

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def _wrap_azimuth(phi):
    """Wrap an azimuth angle into [-pi, pi)."""
    phi = math.fmod(phi + math.pi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    return phi - math.pi


@dataclass(frozen=True)
class AnglePair:
    """Zenith/azimuth angle pair in radians.

    Out-of-range inputs are canonicalized: azimuth wraps into [-pi, pi),
    zenith reflects into [0, pi] (with the matching azimuth flip). At the
    poles (theta in {0, pi}) azimuth collapses to 0.
    """

    zenith: float
    azimuth: float

    def __post_init__(self):
        th = math.fmod(self.zenith, TWO_PI)
        if th < 0.0:
            th += TWO_PI
        ph = self.azimuth
        if th > math.pi:
            th = TWO_PI - th
            ph = ph + math.pi
        if th == 0.0 or th == math.pi:
            ph = 0.0
        else:
            ph = _wrap_azimuth(ph)
        object.__setattr__(self, "zenith", th)
        object.__setattr__(self, "azimuth", ph)


def _identity3():
    return np.eye(3)


@dataclass(frozen=True)
class UpaConfig:
    """Uniform planar array: rows along local z, cols along local y.

    spacing is the element separation as a fraction of the wavelength
    (default half wavelength). orientation maps local to world coordinates.
    """

    rows: int  # Mz
    cols: int  # My
    spacing: float = 0.5
    orientation: np.ndarray = field(default_factory=_identity3)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("UPA grid must have at least one element")
        if self.spacing <= 0.0:
            raise ValueError("element spacing must be positive")
        R = np.asarray(self.orientation, dtype=float)
        if R.shape != (3, 3):
            raise ValueError("orientation must be a 3x3 rotation matrix")
        object.__setattr__(self, "orientation", R)

    @property
    def size(self):
        return self.rows * self.cols

    def to_local(self, u_world):
        """Rotate a world-frame direction into the local array frame."""
        return self.orientation.T @ np.asarray(u_world, dtype=float)

    def to_world(self, u_local):
        return self.orientation @ np.asarray(u_local, dtype=float)


def rotation_about_z(angle):
    """Rotation matrix about the world z axis (right-handed)."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def direction_from_angles(a: AnglePair) -> np.ndarray:
    """Unit direction vector for a zenith/azimuth pair."""
    st = math.sin(a.zenith)
    return np.array([st * math.cos(a.azimuth), st * math.sin(a.azimuth), math.cos(a.zenith)])


def angles_from_direction(u) -> AnglePair:
    """Inverse of direction_from_angles; input must be (near) unit norm."""
    u = np.asarray(u, dtype=float)
    n = float(np.linalg.norm(u))
    if n < 1e-12:
        raise ValueError("zero direction vector has no angles")
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"direction vector norm {n} is not 1")
    z = min(1.0, max(-1.0, u[2] / n))
    theta = math.acos(z)
    if theta == 0.0 or theta == math.pi:
        return AnglePair(theta, 0.0)
    return AnglePair(theta, math.atan2(u[1], u[0]))


def steering_vector(cfg: UpaConfig, a: AnglePair) -> np.ndarray:
    """UPA array response for a plane wave from direction a (local frame).

    Entry at flat index m*Mz + n is
        (1/sqrt(M)) * exp(j*2*pi*spacing*(m*sin(theta)*sin(phi) + n*cos(theta)))
    i.e. the per-element phase k . (element position) for elements at
    (0, m*d, n*d). Unit norm, constant per-entry modulus 1/sqrt(M).
    """
    omega_y = math.sin(a.zenith) * math.sin(a.azimuth)
    omega_z = math.cos(a.zenith)
    k = TWO_PI * cfg.spacing
    py = np.exp(1j * k * omega_y * np.arange(cfg.cols))
    pz = np.exp(1j * k * omega_z * np.arange(cfg.rows))
    return np.kron(py, pz) / math.sqrt(cfg.size)
