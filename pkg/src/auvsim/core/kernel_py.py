"""Pure-Python tick kernel.

Fallback twin of the compiled kernel in _kernel.pyx.  Every arithmetic
expression here is written in the exact order the compiled kernel uses, so
the two backends produce bit-identical trajectories; keep them in lockstep
when editing either one.
"""

from math import sqrt

from .packing import MODE_WRENCH

BACKEND_NAME = "python"


def _make_deriv(model, mode, delta_cmds, n_cmd, wrench):
    """Bind model constants once and return the combined-ODE derivative."""
    m11x, m11y, m11z = model.m11
    i11x, i11y, i11z = model.minv11
    a00, a01, a02, a10, a11, a12, a20, a21, a22 = model.m22
    b00, b01, b02, b10, b11, b12, b20, b21, b22 = model.minv22
    dl0, dl1, dl2, dl3, dl4, dl5 = model.dl
    dq0, dq1, dq2, dq3, dq4, dq5 = model.dq
    mass = model.mass
    wmb = model.wmb
    buoy = model.buoy
    rbx, rby, rbz = model.rb
    curx, cury, curz = model.current
    fins = model.fins
    kt = model.kt
    kroll = model.kroll
    inv_tau_n = model.inv_tau_n
    nf = model.n_fins
    wrench_mode = mode == MODE_WRENCH

    def deriv(s):
        q0 = s[3]
        q1 = s[4]
        q2 = s[5]
        q3 = s[6]
        u = s[7]
        v = s[8]
        w = s[9]
        p = s[10]
        q = s[11]
        r = s[12]

        # rotation matrix body->world; the 2/|q|^2 factor keeps it exact for
        # the slightly non-unit quaternions RK4 produces mid-step
        k = 2.0 / (q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3)
        r00 = 1.0 - k * (q2 * q2 + q3 * q3)
        r01 = k * (q1 * q2 - q0 * q3)
        r02 = k * (q1 * q3 + q0 * q2)
        r10 = k * (q1 * q2 + q0 * q3)
        r11 = 1.0 - k * (q1 * q1 + q3 * q3)
        r12 = k * (q2 * q3 - q0 * q1)
        r20 = k * (q1 * q3 - q0 * q2)
        r21 = k * (q2 * q3 + q0 * q1)
        r22 = 1.0 - k * (q1 * q1 + q2 * q2)

        # velocity relative to the (world-frame) current
        vrx = u - (r00 * curx + r10 * cury + r20 * curz)
        vry = v - (r01 * curx + r11 * cury + r21 * curz)
        vrz = w - (r02 * curx + r12 * cury + r22 * curz)

        # Coriolis terms from the momentum (left-hand side); the added-mass
        # Munk couplings are suppressed, so pitch/yaw moments keep only the
        # rotational momentum part while the roll row stays complete
        h1y = m11y * vry
        h1z = m11z * vrz
        hrx = mass * vrx
        hry = mass * vry
        hrz = mass * vrz
        h2x = a00 * p + a01 * q + a02 * r
        h2y = a10 * p + a11 * q + a12 * r
        h2z = a20 * p + a21 * q + a22 * r
        cfx = -(hry * r - hrz * q)
        cfy = -(h1z * p - hrx * r)
        cfz = -(hrx * q - h1y * p)
        cmx = -(h1y * vrz - h1z * vry) - (h2y * r - h2z * q)
        cmy = -(h2z * p - h2x * r)
        cmz = -(h2x * q - h2y * p)

        # diagonal linear + quadratic damping (left-hand side)
        d0 = (dl0 + dq0 * abs(vrx)) * vrx
        d1 = (dl1 + dq1 * abs(vry)) * vry
        d2 = (dl2 + dq2 * abs(vrz)) * vrz
        d3 = (dl3 + dq3 * abs(p)) * p
        d4 = (dl4 + dq4 * abs(q)) * q
        d5 = (dl5 + dq5 * abs(r)) * r

        # restoring: world down axis in body coords is the third row of R
        g0 = -wmb * r20
        g1 = -wmb * r21
        g2 = -wmb * r22
        g3 = buoy * (rby * r22 - rbz * r21)
        g4 = buoy * (rbz * r20 - rbx * r22)
        g5 = buoy * (rbx * r21 - rby * r20)

        # actuation wrench
        if wrench_mode:
            t0 = wrench[0]
            t1 = wrench[1]
            t2 = wrench[2]
            t3 = wrench[3]
            t4 = wrench[4]
            t5 = wrench[5]
        else:
            n = s[13 + nf]
            tn = kt * abs(n) * n
            t0 = tn
            t1 = 0.0
            t2 = 0.0
            t3 = -kroll * abs(n) * n
            t4 = 0.0
            t5 = 0.0
            for i in range(nf):
                x_off, rad, sin_t, cos_t, coef, _inv_tau, _dmax = fins[i]
                sy = vry * sin_t
                cz = vrz * cos_t
                f = coef * (vrx * vrx + sy * sy + cz * cz) * s[13 + i]
                t1 = t1 + f * sin_t
                t2 = t2 - f * cos_t
                t3 = t3 - f * rad
                t4 = t4 + x_off * f * cos_t
                t5 = t5 + x_off * f * sin_t

        # nu_dot = M^-1 (tau - C nu_r - D nu_r - g)
        f0 = t0 - cfx - d0 - g0
        f1 = t1 - cfy - d1 - g1
        f2 = t2 - cfz - d2 - g2
        f3 = t3 - cmx - d3 - g3
        f4 = t4 - cmy - d4 - g4
        f5 = t5 - cmz - d5 - g5

        out = [
            r00 * u + r01 * v + r02 * w,
            r10 * u + r11 * v + r12 * w,
            r20 * u + r21 * v + r22 * w,
            -0.5 * (q1 * p + q2 * q + q3 * r),
            0.5 * (q0 * p + q2 * r - q3 * q),
            0.5 * (q0 * q + q3 * p - q1 * r),
            0.5 * (q0 * r + q1 * q - q2 * p),
            i11x * f0,
            i11y * f1,
            i11z * f2,
            b00 * f3 + b01 * f4 + b02 * f5,
            b10 * f3 + b11 * f4 + b12 * f5,
            b20 * f3 + b21 * f4 + b22 * f5,
        ]
        if wrench_mode:
            # servos hold position while an external wrench drives the body
            out.extend([0.0] * (nf + 1))
        else:
            for i in range(nf):
                out.append((delta_cmds[i] - s[13 + i]) * fins[i][5])
            out.append((n_cmd - s[13 + nf]) * inv_tau_n)
        return out

    return deriv


def derivative(y, model, mode, delta_cmds, n_cmd, wrench):
    """Combined-ODE derivative at state y (exposed for cross-checks)."""
    return _make_deriv(model, mode, delta_cmds, n_cmd, wrench)(y)


def rk4_tick(y, model, mode, delta_cmds, n_cmd, wrench, dt):
    """One classical RK4 step; renormalizes the quaternion and clamps actuators."""
    deriv = _make_deriv(model, mode, delta_cmds, n_cmd, wrench)
    n = 14 + model.n_fins
    half = 0.5 * dt

    k1 = deriv(y)
    y2 = [y[i] + half * k1[i] for i in range(n)]
    k2 = deriv(y2)
    y3 = [y[i] + half * k2[i] for i in range(n)]
    k3 = deriv(y3)
    y4 = [y[i] + dt * k3[i] for i in range(n)]
    k4 = deriv(y4)

    sixth = dt / 6.0
    out = [y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(n)]

    q0 = out[3]
    q1 = out[4]
    q2 = out[5]
    q3 = out[6]
    inv_norm = 1.0 / sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3)
    out[3] = q0 * inv_norm
    out[4] = q1 * inv_norm
    out[5] = q2 * inv_norm
    out[6] = q3 * inv_norm

    fins = model.fins
    for i in range(model.n_fins):
        dmax = fins[i][6]
        d = out[13 + i]
        if d > dmax:
            out[13 + i] = dmax
        elif d < -dmax:
            out[13 + i] = -dmax
    nmax = model.nmax
    nn = out[13 + model.n_fins]
    if nn > nmax:
        out[13 + model.n_fins] = nmax
    elif nn < -nmax:
        out[13 + model.n_fins] = -nmax
    return out
