"""Unit-quaternion helpers for attitude bookkeeping.

Quaternions are stored as [w, x, y, z] (scalar first) and map body to world
(NED) coordinates.  Euler angles use the ZYX (yaw-pitch-roll) convention
throughout: R = Rz(psi) @ Ry(theta) @ Rx(phi).
"""

import math

import numpy as np


def normalize(q):
    """Return q scaled to unit norm."""
    q = np.asarray(q, float)
    n = math.sqrt(float(q @ q))
    if n == 0.0 or not math.isfinite(n):
        raise ValueError("cannot normalize a zero or non-finite quaternion")
    return q / n


def multiply(a, b):
    """Hamilton product a ⊗ b."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def conjugate(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def from_euler(phi, theta, psi):
    """Quaternion for roll phi, pitch theta, yaw psi (rad, ZYX order)."""
    cph, sph = math.cos(phi / 2), math.sin(phi / 2)
    cth, sth = math.cos(theta / 2), math.sin(theta / 2)
    cps, sps = math.cos(psi / 2), math.sin(psi / 2)
    return np.array(
        [
            cps * cth * cph + sps * sth * sph,
            cps * cth * sph - sps * sth * cph,
            cps * sth * cph + sps * cth * sph,
            sps * cth * cph - cps * sth * sph,
        ]
    )


def to_euler(q):
    """(phi, theta, psi) in rad; theta is taken from asin and lives in [-pi/2, pi/2]."""
    w, x, y, z = q
    r11 = 1.0 - 2.0 * (y * y + z * z)
    r21 = 2.0 * (x * y + w * z)
    r31 = 2.0 * (x * z - w * y)
    r32 = 2.0 * (y * z + w * x)
    r33 = 1.0 - 2.0 * (x * x + y * y)
    phi = math.atan2(r32, r33)
    theta = -math.asin(max(-1.0, min(1.0, r31)))
    psi = math.atan2(r21, r11)
    return phi, theta, psi


def to_matrix(q):
    """3x3 rotation matrix (body -> world).  Exact for non-unit q as well."""
    w, x, y, z = q
    s = 2.0 / (w * w + x * x + y * y + z * z)
    return np.array(
        [
            [1.0 - s * (y * y + z * z), s * (x * y - w * z), s * (x * z + w * y)],
            [s * (x * y + w * z), 1.0 - s * (x * x + z * z), s * (y * z - w * x)],
            [s * (x * z - w * y), s * (y * z + w * x), 1.0 - s * (x * x + y * y)],
        ]
    )


def rotate(q, v):
    """Rotate body-frame vector v into the world frame."""
    return to_matrix(q) @ np.asarray(v, float)


def rotate_inverse(q, v):
    """Rotate world-frame vector v into the body frame."""
    return to_matrix(q).T @ np.asarray(v, float)


def rate(q, omega):
    """Quaternion time derivative 0.5 * q ⊗ (0, omega) for body rates omega."""
    w, x, y, z = q
    p, qq, r = omega
    return 0.5 * np.array(
        [
            -(x * p + y * qq + z * r),
            w * p + y * r - z * qq,
            w * qq + z * p - x * r,
            w * r + x * qq - y * p,
        ]
    )


def wrap_angle(a):
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(a, math.tau)
    return math.pi if w == -math.pi else w
