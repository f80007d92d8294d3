# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tick kernel.

Twin of kernel_py.py: every arithmetic expression appears here in the exact
order the pure-Python kernel uses, so both backends produce bit-identical
trajectories; keep them in lockstep when editing either one.
"""

from libc.math cimport fabs, sqrt

from .packing import MODE_WRENCH

BACKEND_NAME = "cython"

DEF MAXFINS = 16
DEF MAXSTATE = 32   # 14 + MAXFINS + slack


cdef struct Model:
    double mass
    double m11[3]
    double i11[3]
    double a[9]
    double b[9]
    double dl[6]
    double dq[6]
    double wmb
    double buoy
    double rb[3]
    double cur[3]
    double kt
    double kroll
    double inv_tau_n
    double nmax
    double fins[MAXFINS][7]
    int nf


cdef class CModel:
    cdef Model m


def _build(model):
    """Cache the CoreModel constants in a C struct (built once per model)."""
    cdef CModel cm = CModel()
    cdef int i, j
    for i in range(3):
        cm.m.m11[i] = model.m11[i]
        cm.m.i11[i] = model.minv11[i]
        cm.m.rb[i] = model.rb[i]
        cm.m.cur[i] = model.current[i]
    for i in range(9):
        cm.m.a[i] = model.m22[i]
        cm.m.b[i] = model.minv22[i]
    for i in range(6):
        cm.m.dl[i] = model.dl[i]
        cm.m.dq[i] = model.dq[i]
    cm.m.wmb = model.wmb
    cm.m.buoy = model.buoy
    cm.m.kt = model.kt
    cm.m.kroll = model.kroll
    cm.m.inv_tau_n = model.inv_tau_n
    cm.m.nmax = model.nmax
    cm.m.nf = model.n_fins
    for i in range(model.n_fins):
        for j in range(7):
            cm.m.fins[i][j] = model.fins[i][j]
    return cm


cdef void _deriv(
    double* s,
    Model* m,
    double* dcmd,
    double n_cmd,
    double* wr,
    bint wrench_mode,
    double* out,
) noexcept nogil:
    cdef double q0 = s[3]
    cdef double q1 = s[4]
    cdef double q2 = s[5]
    cdef double q3 = s[6]
    cdef double u = s[7]
    cdef double v = s[8]
    cdef double w = s[9]
    cdef double p = s[10]
    cdef double q = s[11]
    cdef double r = s[12]

    cdef double k = 2.0 / (q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3)
    cdef double r00 = 1.0 - k * (q2 * q2 + q3 * q3)
    cdef double r01 = k * (q1 * q2 - q0 * q3)
    cdef double r02 = k * (q1 * q3 + q0 * q2)
    cdef double r10 = k * (q1 * q2 + q0 * q3)
    cdef double r11 = 1.0 - k * (q1 * q1 + q3 * q3)
    cdef double r12 = k * (q2 * q3 - q0 * q1)
    cdef double r20 = k * (q1 * q3 - q0 * q2)
    cdef double r21 = k * (q2 * q3 + q0 * q1)
    cdef double r22 = 1.0 - k * (q1 * q1 + q2 * q2)

    cdef double vrx = u - (r00 * m.cur[0] + r10 * m.cur[1] + r20 * m.cur[2])
    cdef double vry = v - (r01 * m.cur[0] + r11 * m.cur[1] + r21 * m.cur[2])
    cdef double vrz = w - (r02 * m.cur[0] + r12 * m.cur[1] + r22 * m.cur[2])

    cdef double h1x = m.m11[0] * vrx
    cdef double h1y = m.m11[1] * vry
    cdef double h1z = m.m11[2] * vrz
    cdef double h2x = m.a[0] * p + m.a[1] * q + m.a[2] * r
    cdef double h2y = m.a[3] * p + m.a[4] * q + m.a[5] * r
    cdef double h2z = m.a[6] * p + m.a[7] * q + m.a[8] * r
    cdef double cfx = -(h1y * r - h1z * q)
    cdef double cfy = -(h1z * p - h1x * r)
    cdef double cfz = -(h1x * q - h1y * p)
    cdef double cmx = -(h1y * vrz - h1z * vry) - (h2y * r - h2z * q)
    cdef double cmy = -(h1z * vrx - h1x * vrz) - (h2z * p - h2x * r)
    cdef double cmz = -(h1x * vry - h1y * vrx) - (h2x * q - h2y * p)

    cdef double d0 = (m.dl[0] + m.dq[0] * fabs(vrx)) * vrx
    cdef double d1 = (m.dl[1] + m.dq[1] * fabs(vry)) * vry
    cdef double d2 = (m.dl[2] + m.dq[2] * fabs(vrz)) * vrz
    cdef double d3 = (m.dl[3] + m.dq[3] * fabs(p)) * p
    cdef double d4 = (m.dl[4] + m.dq[4] * fabs(q)) * q
    cdef double d5 = (m.dl[5] + m.dq[5] * fabs(r)) * r

    cdef double g0 = -m.wmb * r20
    cdef double g1 = -m.wmb * r21
    cdef double g2 = -m.wmb * r22
    cdef double g3 = m.buoy * (m.rb[1] * r22 - m.rb[2] * r21)
    cdef double g4 = m.buoy * (m.rb[2] * r20 - m.rb[0] * r22)
    cdef double g5 = m.buoy * (m.rb[0] * r21 - m.rb[1] * r20)

    cdef double t0, t1, t2, t3, t4, t5, n, tn, sy, cz, f
    cdef double x_off, rad, sin_t, cos_t, coef
    cdef int i
    if wrench_mode:
        t0 = wr[0]
        t1 = wr[1]
        t2 = wr[2]
        t3 = wr[3]
        t4 = wr[4]
        t5 = wr[5]
    else:
        n = s[13 + m.nf]
        tn = m.kt * fabs(n) * n
        t0 = tn
        t1 = 0.0
        t2 = 0.0
        t3 = -m.kroll * fabs(n) * n
        t4 = 0.0
        t5 = 0.0
        for i in range(m.nf):
            x_off = m.fins[i][0]
            rad = m.fins[i][1]
            sin_t = m.fins[i][2]
            cos_t = m.fins[i][3]
            coef = m.fins[i][4]
            sy = vry * sin_t
            cz = vrz * cos_t
            f = coef * (vrx * vrx + sy * sy + cz * cz) * s[13 + i]
            t1 = t1 + f * sin_t
            t2 = t2 - f * cos_t
            t3 = t3 - f * rad
            t4 = t4 + x_off * f * cos_t
            t5 = t5 + x_off * f * sin_t

    cdef double f0 = t0 - cfx - d0 - g0
    cdef double f1 = t1 - cfy - d1 - g1
    cdef double f2 = t2 - cfz - d2 - g2
    cdef double f3 = t3 - cmx - d3 - g3
    cdef double f4 = t4 - cmy - d4 - g4
    cdef double f5 = t5 - cmz - d5 - g5

    out[0] = r00 * u + r01 * v + r02 * w
    out[1] = r10 * u + r11 * v + r12 * w
    out[2] = r20 * u + r21 * v + r22 * w
    out[3] = -0.5 * (q1 * p + q2 * q + q3 * r)
    out[4] = 0.5 * (q0 * p + q2 * r - q3 * q)
    out[5] = 0.5 * (q0 * q + q3 * p - q1 * r)
    out[6] = 0.5 * (q0 * r + q1 * q - q2 * p)
    out[7] = m.i11[0] * f0
    out[8] = m.i11[1] * f1
    out[9] = m.i11[2] * f2
    out[10] = m.b[0] * f3 + m.b[1] * f4 + m.b[2] * f5
    out[11] = m.b[3] * f3 + m.b[4] * f4 + m.b[5] * f5
    out[12] = m.b[6] * f3 + m.b[7] * f4 + m.b[8] * f5
    if wrench_mode:
        for i in range(m.nf + 1):
            out[13 + i] = 0.0
    else:
        for i in range(m.nf):
            out[13 + i] = (dcmd[i] - s[13 + i]) * m.fins[i][5]
        out[13 + m.nf] = (n_cmd - s[13 + m.nf]) * m.inv_tau_n


def derivative(y, model, mode, delta_cmds, n_cmd, wrench):
    """Combined-ODE derivative at state y (exposed for cross-checks)."""
    cm = _get_cmodel(model)
    cdef Model* m = &(<CModel>cm).m
    cdef double ys[MAXSTATE]
    cdef double dcmd[MAXFINS]
    cdef double wr[6]
    cdef double out[MAXSTATE]
    cdef int n = 14 + m.nf
    cdef int i
    for i in range(n):
        ys[i] = y[i]
    cdef bint wrench_mode = mode == MODE_WRENCH
    if wrench_mode:
        for i in range(6):
            wr[i] = wrench[i]
    else:
        for i in range(m.nf):
            dcmd[i] = delta_cmds[i]
    _deriv(ys, m, dcmd, n_cmd, wr, wrench_mode, out)
    return [out[i] for i in range(n)]


def _get_cmodel(model):
    cm = getattr(model, "_cmodel_cache", None)
    if cm is None:
        cm = _build(model)
        model._cmodel_cache = cm
    return cm


def rk4_tick(y, model, mode, delta_cmds, n_cmd, wrench, dt_in):
    """One classical RK4 step; renormalizes the quaternion and clamps actuators."""
    cm = _get_cmodel(model)
    cdef Model* m = &(<CModel>cm).m
    cdef double ys[MAXSTATE]
    cdef double y2[MAXSTATE]
    cdef double y3[MAXSTATE]
    cdef double y4[MAXSTATE]
    cdef double k1[MAXSTATE]
    cdef double k2[MAXSTATE]
    cdef double k3[MAXSTATE]
    cdef double k4[MAXSTATE]
    cdef double out[MAXSTATE]
    cdef double dcmd[MAXFINS]
    cdef double wr[6]
    cdef double dt = dt_in
    cdef int n = 14 + m.nf
    cdef int i
    for i in range(n):
        ys[i] = y[i]
    cdef bint wrench_mode = mode == MODE_WRENCH
    if wrench_mode:
        for i in range(6):
            wr[i] = wrench[i]
    else:
        for i in range(m.nf):
            dcmd[i] = delta_cmds[i]
    cdef double n_c = n_cmd
    cdef double sixth, q0, q1, q2, q3, inv_norm, dmax, d, nn

    cdef double half = 0.5 * dt
    with nogil:
        _deriv(ys, m, dcmd, n_c, wr, wrench_mode, k1)
        for i in range(n):
            y2[i] = ys[i] + half * k1[i]
        _deriv(y2, m, dcmd, n_c, wr, wrench_mode, k2)
        for i in range(n):
            y3[i] = ys[i] + half * k2[i]
        _deriv(y3, m, dcmd, n_c, wr, wrench_mode, k3)
        for i in range(n):
            y4[i] = ys[i] + dt * k3[i]
        _deriv(y4, m, dcmd, n_c, wr, wrench_mode, k4)

        sixth = dt / 6.0
        for i in range(n):
            out[i] = ys[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])

        q0 = out[3]
        q1 = out[4]
        q2 = out[5]
        q3 = out[6]
        inv_norm = 1.0 / sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3)
        out[3] = q0 * inv_norm
        out[4] = q1 * inv_norm
        out[5] = q2 * inv_norm
        out[6] = q3 * inv_norm

        for i in range(m.nf):
            dmax = m.fins[i][6]
            d = out[13 + i]
            if d > dmax:
                out[13 + i] = dmax
            elif d < -dmax:
                out[13 + i] = -dmax
        nn = out[13 + m.nf]
        if nn > m.nmax:
            out[13 + m.nf] = m.nmax
        elif nn < -m.nmax:
            out[13 + m.nf] = -m.nmax

    return [out[i] for i in range(n)]
