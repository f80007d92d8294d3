"""Rigid-body + added-mass equations of motion for a torpedo-shaped AUV.

Builds the standard marine-craft terms -- system inertia, Coriolis/centripetal,
diagonal linear+quadratic damping and hydrostatic restoring -- and solves for
the body-frame acceleration given the total actuation wrench and an ambient
(constant, irrotational, world-frame) current.

Conventions: world frame is NED (z down, depth = z >= 0 underwater); body
frame is x forward, y starboard, z down with the origin at the center of
mass, so the rigid-body inertia matrix is block diagonal and only the center
of buoyancy is offset (r_b, in body coordinates).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import quaternions as quat
from .errors import ParameterError


@dataclass
class VehicleState:
    """Pose and body-frame velocity.

    position: world NED (m); attitude: unit quaternion [w,x,y,z] body->world;
    nu: [u, v, w, p, q, r] body-frame linear (m/s) and angular (rad/s) rates.
    """

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: np.array([1.0, 0, 0, 0]))
    nu: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def __post_init__(self):
        self.position = np.asarray(self.position, float).copy()
        self.attitude = quat.normalize(self.attitude)
        self.nu = np.asarray(self.nu, float).copy()
        if self.position.shape != (3,) or self.nu.shape != (6,):
            raise ParameterError("state position must be length 3 and nu length 6")

    @classmethod
    def from_euler(cls, position=(0, 0, 0), euler=(0, 0, 0), nu=(0, 0, 0, 0, 0, 0)):
        return cls(np.asarray(position, float), quat.from_euler(*euler), np.asarray(nu, float))

    @property
    def roll(self):
        return quat.to_euler(self.attitude)[0]

    @property
    def pitch(self):
        return quat.to_euler(self.attitude)[1]

    @property
    def yaw(self):
        return quat.to_euler(self.attitude)[2]

    @property
    def euler(self):
        return np.array(quat.to_euler(self.attitude))

    @property
    def depth(self):
        return float(self.position[2])

    def copy(self):
        return VehicleState(self.position.copy(), self.attitude.copy(), self.nu.copy())


@dataclass
class Environment:
    """Water properties and ambient current (world frame, constant, irrotational)."""

    rho: float = 1025.0          # water density (kg/m^3)
    gravity: float = 9.81        # (m/s^2)
    current: np.ndarray = field(default_factory=lambda: np.zeros(3))  # world NED (m/s)

    def __post_init__(self):
        self.current = np.asarray(self.current, float).copy()
        if self.rho <= 0:
            raise ParameterError(f"water density must be > 0 (got {self.rho})")
        if self.gravity <= 0:
            raise ParameterError(f"gravity must be > 0 (got {self.gravity})")
        if self.current.shape != (3,):
            raise ParameterError("current must be a 3-vector")


@dataclass
class Wrench:
    """Force (N) and torque about the COM (N*m), both body frame."""

    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.force = np.asarray(self.force, float).copy()
        self.torque = np.asarray(self.torque, float).copy()

    def __add__(self, other):
        return Wrench(self.force + other.force, self.torque + other.torque)

    def as_vector(self):
        return np.concatenate([self.force, self.torque])

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, float)
        return cls(v[:3], v[3:])


@dataclass
class HydroParams:
    """Mass, geometry, added mass, damping and hydrostatics.

    added_mass holds the six positive diagonal coefficients added to the
    rigid-body inertia (surge/sway/heave in kg, roll/pitch/yaw in kg*m^2);
    pass None to derive them from the hull geometry at configuration time
    (see prolate_spheroid_added_mass).  weight/buoyancy are in N; r_b is the
    center-of-buoyancy offset from the COM in body coordinates (m).
    """

    mass: float = 31.0
    inertia: np.ndarray = field(default_factory=lambda: np.diag([0.16, 4.0, 4.0]))
    length: float = 1.6
    diameter: float = 0.19
    added_mass: np.ndarray = field(default_factory=lambda: np.zeros(6))
    linear_damping: np.ndarray = field(default_factory=lambda: np.zeros(6))
    quadratic_damping: np.ndarray = field(default_factory=lambda: np.zeros(6))
    weight: float = 304.11
    buoyancy: float = 304.11
    r_b: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.inertia = np.asarray(self.inertia, float).copy()
        if self.inertia.shape == (3,):
            self.inertia = np.diag(self.inertia)
        self.added_mass = np.asarray(self.added_mass, float).copy()
        self.linear_damping = np.asarray(self.linear_damping, float).copy()
        self.quadratic_damping = np.asarray(self.quadratic_damping, float).copy()
        self.r_b = np.asarray(self.r_b, float).copy()

        problems = []
        if self.mass <= 0:
            problems.append(f"mass must be > 0 (got {self.mass})")
        if self.length <= 0 or self.diameter <= 0:
            problems.append("length and diameter must be > 0")
        if self.inertia.shape != (3, 3):
            problems.append("inertia must be a 3x3 matrix")
        else:
            if not np.allclose(self.inertia, self.inertia.T, atol=1e-12):
                problems.append("inertia must be symmetric")
            elif np.any(np.linalg.eigvalsh(self.inertia) <= 0):
                problems.append("inertia must be positive definite")
        for name, arr in (
            ("added_mass", self.added_mass),
            ("linear_damping", self.linear_damping),
            ("quadratic_damping", self.quadratic_damping),
        ):
            if arr.shape != (6,):
                problems.append(f"{name} must have 6 entries")
            elif np.any(arr < 0):
                problems.append(f"{name} coefficients must be >= 0")
        if problems:
            raise ParameterError("; ".join(problems))


def prolate_spheroid_added_mass(length, diameter, rho):
    """Diagonal added-mass coefficients for a prolate spheroid hull.

    Lamb k-factor approximation: surge k1*m_f, sway/heave k2*m_f, zero in
    roll (body of revolution) and k'*I_yf in pitch/yaw, where m_f and I_yf
    are the mass and transverse moment of inertia of the displaced fluid.
    """
    a = length / 2.0
    b = diameter / 2.0
    if not a > b:
        raise ParameterError("prolate spheroid needs length > diameter")
    e = math.sqrt(1.0 - (b / a) ** 2)
    log_term = math.log((1.0 + e) / (1.0 - e))
    alpha_0 = (2.0 * (1.0 - e**2) / e**3) * (0.5 * log_term - e)
    beta_0 = 1.0 / e**2 - (1.0 - e**2) / (2.0 * e**3) * log_term
    k1 = alpha_0 / (2.0 - alpha_0)
    k2 = beta_0 / (2.0 - beta_0)
    k_prime = e**4 * (beta_0 - alpha_0) / (
        (2.0 - e**2) * (2.0 * e**2 - (2.0 - e**2) * (beta_0 - alpha_0))
    )
    m_f = rho * (4.0 / 3.0) * math.pi * a * b**2
    iy_f = rho * (4.0 / 15.0) * math.pi * a * b**2 * (a**2 + b**2)
    return np.array([k1 * m_f, k2 * m_f, k2 * m_f, 0.0, k_prime * iy_f, k_prime * iy_f])


def build_system_inertia(params):
    """M = M_RB + M_A.  Block diagonal because the body origin is the COM."""
    m_rb = np.zeros((6, 6))
    m_rb[:3, :3] = params.mass * np.eye(3)
    m_rb[3:, 3:] = params.inertia
    m = m_rb + np.diag(params.added_mass)
    if np.any(np.linalg.eigvalsh(m) <= 0):
        raise ParameterError("assembled system inertia is not positive definite")
    return m


def _skew(a):
    return np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])


def coriolis(m, nu_r):
    """Coriolis/centripetal matrix C(nu_r) built from the momentum M @ nu_r.

    Skew-symmetric by construction, so nu^T C nu = 0 for every nu.
    """
    nu_r = np.asarray(nu_r, float)
    h1 = m[:3, :3] @ nu_r[:3] + m[:3, 3:] @ nu_r[3:]
    h2 = m[3:, :3] @ nu_r[:3] + m[3:, 3:] @ nu_r[3:]
    c = np.zeros((6, 6))
    c[:3, 3:] = -_skew(h1)
    c[3:, :3] = -_skew(h1)
    c[3:, 3:] = -_skew(h2)
    return c


# Index pairs of the added-mass Coriolis matrix that form the Munk moment
# (pitch coupling to u/w, yaw coupling to u/v) together with their mirrored
# force entries.  Zeroing the pairs keeps the matrix exactly skew-symmetric.
_MUNK_PAIRS = ((4, 0), (0, 4), (4, 2), (2, 4), (5, 0), (0, 5), (5, 1), (1, 5))


def added_mass_coriolis(added_mass, nu_r):
    """Added-mass Coriolis with the destabilizing Munk couplings removed.

    A slender hull's anisotropic added mass makes the standard C_A produce
    the Munk moment, which in reality is balanced by bare-hull lift; neither
    is modeled here, so the coupling pairs are dropped together (the usual
    torpedo-model simplification).  The result is still skew-symmetric.
    """
    c = coriolis(np.diag(added_mass), nu_r)
    for i, j in _MUNK_PAIRS:
        c[i, j] = 0.0
    return c


def effective_coriolis(params, nu_r):
    """The Coriolis matrix the vehicle dynamics actually use.

    Full rigid-body part (origin at the COM) plus the Munk-suppressed
    added-mass part; skew-symmetric, so it is passive.
    """
    m_rb = np.zeros((6, 6))
    m_rb[:3, :3] = params.mass * np.eye(3)
    m_rb[3:, 3:] = params.inertia
    return coriolis(m_rb, nu_r) + added_mass_coriolis(params.added_mass, nu_r)


def damping_wrench(params, nu_r):
    """D(nu_r) @ nu_r with D = diag(linear) + diag(quadratic * |nu_r|).

    Left-hand-side term: it opposes motion once moved to the forcing side,
    and nu_r^T D(nu_r) nu_r >= 0 always.
    """
    nu_r = np.asarray(nu_r, float)
    return (params.linear_damping + params.quadratic_damping * np.abs(nu_r)) * nu_r


def restoring_wrench(params, attitude):
    """Hydrostatic vector g(eta) for weight at the COM and buoyancy at r_b.

    Returned on the left-hand side of the equations of motion: positive
    buoyancy (B > W) shows up as a negative-z (upward) force after the sign
    move, and a CB above the COM rights the vehicle in roll and pitch.
    """
    z_body = quat.to_matrix(attitude)[2, :]  # world down axis in body coords
    force = -(params.weight - params.buoyancy) * z_body
    moment = params.buoyancy * np.cross(params.r_b, z_body)
    return np.concatenate([force, moment])


def relative_velocity(state, env):
    """nu_r = nu - [R^T current; 0]: velocity relative to the surrounding flow."""
    nu_r = state.nu.copy()
    nu_r[:3] -= quat.rotate_inverse(state.attitude, env.current)
    return nu_r


def acceleration(state, tau, params, env):
    """Body-frame acceleration nu_dot from the equations of motion.

    Solves M nu_dot = tau - C(nu_r) nu_r - D(nu_r) nu_r - g(eta) with the
    effective (Munk-suppressed) Coriolis matrix; with a constant current
    nu_dot equals the relative acceleration.
    """
    m = build_system_inertia(params)
    nu_r = relative_velocity(state, env)
    rhs = (
        tau.as_vector()
        - effective_coriolis(params, nu_r) @ nu_r
        - damping_wrench(params, nu_r)
        - restoring_wrench(params, state.attitude)
    )
    return np.linalg.solve(m, rhs)
