# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels for the transcribed optimal control problems.

Mirrors sepnav._kernels._reference function-for-function with identical
operation ordering; see that module for the layout documentation.
"""

from libc.math cimport cos, sin, fmod, pow, fabs, copysign, sqrt, cbrt, M_PI

import numpy as np


cdef inline double _wrap(double theta) noexcept nogil:
    if -M_PI < theta <= M_PI:
        return theta
    cdef double m = fmod(theta + M_PI, 2.0 * M_PI)
    if m <= 0.0:
        m += 2.0 * M_PI
    return m - M_PI


cdef void _margin_partials(double a1, double a2, double c1k, double c2k,
                           double thk, double sv1, double sv2, double q,
                           double m11, double m12, double m21, double m22,
                           double ce1, double ce2, double weight,
                           double* ga1, double* ga2, double* lam_c1,
                           double* lam_c2, double* lam_th) noexcept nogil:
    cdef double ct = cos(thk)
    cdef double stt = sin(thk)
    cdef double bv1 = sv1 * (ct * a1 + stt * a2)
    cdef double bv2 = sv2 * (-stt * a1 + ct * a2)
    cdef double nv = pow(pow(fabs(bv1), q) + pow(fabs(bv2), q), 1.0 / q)
    cdef double gv1 = 0.0
    cdef double gv2 = 0.0
    cdef double nvq
    if nv > 0.0:
        nvq = pow(nv, q - 1.0)
        gv1 = copysign(pow(fabs(bv1), q - 1.0), bv1) / nvq
        gv2 = copysign(pow(fabs(bv2), q - 1.0), bv2) / nvq
    cdef double be1 = m11 * a1 + m12 * a2
    cdef double be2 = m21 * a1 + m22 * a2
    cdef double ne = pow(pow(fabs(be1), q) + pow(fabs(be2), q), 1.0 / q)
    cdef double ge1 = 0.0
    cdef double ge2 = 0.0
    cdef double neq
    if ne > 0.0:
        neq = pow(ne, q - 1.0)
        ge1 = copysign(pow(fabs(be1), q - 1.0), be1) / neq
        ge2 = copysign(pow(fabs(be2), q - 1.0), be2) / neq
    ga1[0] += weight * (ct * sv1 * gv1 - stt * sv2 * gv2
                        + m11 * ge1 + m21 * ge2 + (c1k - ce1))
    ga2[0] += weight * (stt * sv1 * gv1 + ct * sv2 * gv2
                        + m12 * ge1 + m22 * ge2 + (c2k - ce2))
    lam_c1[0] += weight * a1
    lam_c2[0] += weight * a2
    lam_th[0] += weight * (gv1 * sv1 * (-stt * a1 + ct * a2)
                           + gv2 * sv2 * (-ct * a1 - stt * a2))


def hc_eval(double[::1] x, double[::1] z0, double[::1] u_prev,
            double[::1] c_ref, double theta_ref, double[::1] w,
            double alpha, double beta, double v_max, double T, int H, int tau,
            double sv1, double sv2, double p, double[:, ::1] obs,
            double[::1] tighten, double[::1] y, double rho, bint want_grad):
    """Compiled counterpart of _reference.hc_eval."""
    cdef double qc = w[0], qth = w[1], qr = w[2], qrd = w[3]
    cdef double qs = w[4], qsd = w[5], qch = w[6], qthh = w[7]
    cdef double cr1 = c_ref[0], cr2 = c_ref[1]
    cdef int n_obs = obs.shape[0]
    cdef int m = n_obs * (H + 1)
    cdef double q = p / (p - 1.0)
    cdef int nsub = H * tau
    cdef int n = x.shape[0]

    st = np.empty((nsub + 1, 4))
    G1_arr = np.zeros(m if m > 0 else 1)
    pw_arr = np.zeros(m if m > 0 else 1)
    me_arr = np.empty((n_obs if n_obs > 0 else 1, 4))
    grad_arr = np.zeros(n)

    cdef double[:, ::1] st_v = st
    cdef double[::1] G1 = G1_arr
    cdef double[::1] pw = pw_arr
    cdef double[:, ::1] me = me_arr
    cdef double[::1] grad = grad_arr

    cdef double g = 0.0, psi
    cdef double c1, c2, th, v, nc1, nc2, nth, nv_
    cdef double r, s, rp, sp, dc1, dc2, dth
    cdef double ce, se_, s1, s2, a1, a2, ct, stt
    cdef double bv1, bv2, nv, be1, be2, ne, u, wj
    cdef double lam_c1, lam_c2, lam_th, lam_v, new_th, new_v, thk, vk
    cdef int t, k, j, idx, i, ai, ax_base = 2 * H

    with nogil:
        # forward rollout
        c1 = z0[0]; c2 = z0[1]; th = z0[2]; v = z0[3]
        st_v[0, 0] = c1; st_v[0, 1] = c2; st_v[0, 2] = th; st_v[0, 3] = v
        idx = 0
        for t in range(H):
            r = x[2 * t]
            s = x[2 * t + 1]
            for k in range(tau):
                nc1 = c1 + T * (v * cos(th))
                nc2 = c2 + T * (v * sin(th))
                nth = _wrap(th + T * (alpha * s))
                nv_ = v + T * (beta * (r * v_max - v))
                c1 = nc1; c2 = nc2; th = nth; v = nv_
                idx += 1
                st_v[idx, 0] = c1; st_v[idx, 1] = c2
                st_v[idx, 2] = th; st_v[idx, 3] = v

        # smooth tracking cost
        for t in range(0, H, 2):
            k = t * tau
            r = x[2 * t]
            s = x[2 * t + 1]
            if t == 0:
                rp = u_prev[0]; sp = u_prev[1]
            else:
                rp = x[2 * t - 2]; sp = x[2 * t - 1]
            dc1 = st_v[k, 0] - cr1
            dc2 = st_v[k, 1] - cr2
            dth = _wrap(st_v[k, 2] - theta_ref)
            g += (qc * (dc1 * dc1 + dc2 * dc2) + qth * dth * dth
                  + qr * r * r + qrd * (r - rp) * (r - rp)
                  + qs * s * s + qsd * (s - sp) * (s - sp))
        dc1 = st_v[nsub, 0] - cr1
        dc2 = st_v[nsub, 1] - cr2
        dth = _wrap(st_v[nsub, 2] - theta_ref)
        g += qch * (dc1 * dc1 + dc2 * dc2) + qthh * dth * dth

        # separation margins
        for j in range(n_obs):
            ce = cos(obs[j, 2]); se_ = sin(obs[j, 2])
            s1 = obs[j, 3]; s2 = obs[j, 4]
            me[j, 0] = s1 * ce; me[j, 1] = s1 * se_
            me[j, 2] = -s2 * se_; me[j, 3] = s2 * ce
        for j in range(n_obs):
            for t in range(H + 1):
                k = t * tau
                a1 = x[ax_base + j * 2 * (H + 1) + 2 * t]
                a2 = x[ax_base + j * 2 * (H + 1) + 2 * t + 1]
                ct = cos(st_v[k, 2]); stt = sin(st_v[k, 2])
                bv1 = sv1 * (ct * a1 + stt * a2)
                bv2 = sv2 * (-stt * a1 + ct * a2)
                nv = pow(pow(fabs(bv1), q) + pow(fabs(bv2), q), 1.0 / q)
                be1 = me[j, 0] * a1 + me[j, 1] * a2
                be2 = me[j, 2] * a1 + me[j, 3] * a2
                ne = pow(pow(fabs(be1), q) + pow(fabs(be2), q), 1.0 / q)
                G1[j * (H + 1) + t] = (nv + ne + a1 * (st_v[k, 0] - obs[j, 0])
                                       + a2 * (st_v[k, 1] - obs[j, 1])
                                       + tighten[t])

        # augmented-Lagrangian penalty
        psi = g
        if rho > 0.0 and m > 0:
            for i in range(m):
                u = G1[i] + y[i] / rho
                if u > 0.0:
                    psi += 0.5 * rho * u * u
                    pw[i] = rho * u

        if want_grad:
            lam_c1 = 2.0 * qch * dc1
            lam_c2 = 2.0 * qch * dc2
            lam_th = 2.0 * qthh * dth
            lam_v = 0.0
            for j in range(n_obs):
                wj = pw[j * (H + 1) + H]
                if wj != 0.0:
                    ai = ax_base + j * 2 * (H + 1) + 2 * H
                    k = H * tau
                    _margin_partials(x[ai], x[ai + 1], st_v[k, 0], st_v[k, 1],
                                     st_v[k, 2], sv1, sv2, q,
                                     me[j, 0], me[j, 1], me[j, 2], me[j, 3],
                                     obs[j, 0], obs[j, 1], wj,
                                     &grad[ai], &grad[ai + 1],
                                     &lam_c1, &lam_c2, &lam_th)
            for t in range(H - 1, -1, -1):
                for k in range(tau - 1, -1, -1):
                    i = t * tau + k
                    thk = st_v[i, 2]
                    vk = st_v[i, 3]
                    grad[2 * t] += T * beta * v_max * lam_v
                    grad[2 * t + 1] += T * alpha * lam_th
                    new_th = lam_th + T * vk * (-sin(thk) * lam_c1
                                                + cos(thk) * lam_c2)
                    new_v = lam_v + T * (cos(thk) * lam_c1
                                         + sin(thk) * lam_c2 - beta * lam_v)
                    lam_th = new_th
                    lam_v = new_v
                if t % 2 == 0:
                    k = t * tau
                    lam_c1 += 2.0 * qc * (st_v[k, 0] - cr1)
                    lam_c2 += 2.0 * qc * (st_v[k, 1] - cr2)
                    lam_th += 2.0 * qth * _wrap(st_v[k, 2] - theta_ref)
                    r = x[2 * t]
                    s = x[2 * t + 1]
                    if t == 0:
                        rp = u_prev[0]; sp = u_prev[1]
                    else:
                        rp = x[2 * t - 2]; sp = x[2 * t - 1]
                    grad[2 * t] += 2.0 * qr * r + 2.0 * qrd * (r - rp)
                    grad[2 * t + 1] += 2.0 * qs * s + 2.0 * qsd * (s - sp)
                    if t > 0:
                        grad[2 * t - 2] -= 2.0 * qrd * (r - rp)
                        grad[2 * t - 1] -= 2.0 * qsd * (s - sp)
                for j in range(n_obs):
                    wj = pw[j * (H + 1) + t]
                    if wj != 0.0:
                        ai = ax_base + j * 2 * (H + 1) + 2 * t
                        k = t * tau
                        _margin_partials(x[ai], x[ai + 1], st_v[k, 0],
                                         st_v[k, 1], st_v[k, 2], sv1, sv2, q,
                                         me[j, 0], me[j, 1], me[j, 2], me[j, 3],
                                         obs[j, 0], obs[j, 1], wj,
                                         &grad[ai], &grad[ai + 1],
                                         &lam_c1, &lam_c2, &lam_th)

    return g, psi, G1_arr[:m], (grad_arr if want_grad else None)


# Resolving a margin row's separating axis: coarse scan over fixed unit
# directions, then a bracketed 1-D refinement on the angle.
cdef int _SCAN_K = 16
cdef double _SCAN_STEP = 2.0 * M_PI / 16
cdef double _REFINE_TOL = 1e-10
cdef int _REFINE_MAX = 80
cdef double _RUNNER_UP_GATE = 0.25
cdef double[16] _SCAN_COS
cdef double[16] _SCAN_SIN

cdef int _scan_i
for _scan_i in range(16):
    _SCAN_COS[_scan_i] = cos(-M_PI + _SCAN_STEP * _scan_i)
    _SCAN_SIN[_scan_i] = sin(-M_PI + _SCAN_STEP * _scan_i)


cdef inline double _axis_value(double a1, double a2, double ct, double stt,
                               double sv1, double sv2, double q, double m11,
                               double m12, double m21, double m22, double d1,
                               double d2) noexcept nogil:
    cdef double bv1 = sv1 * (ct * a1 + stt * a2)
    cdef double bv2 = sv2 * (-stt * a1 + ct * a2)
    cdef double be1 = m11 * a1 + m12 * a2
    cdef double be2 = m21 * a1 + m22 * a2
    cdef double nv, ne, ab1, ab2, r
    if q == 1.5:
        # |b|^1.5 = |b|*sqrt(|b|) and s^(2/3) = cbrt(s)^2: sqrt/cbrt are far
        # cheaper than pow, and this routine dominates the axis search
        ab1 = fabs(bv1)
        ab2 = fabs(bv2)
        r = cbrt(ab1 * sqrt(ab1) + ab2 * sqrt(ab2))
        nv = r * r
        ab1 = fabs(be1)
        ab2 = fabs(be2)
        r = cbrt(ab1 * sqrt(ab1) + ab2 * sqrt(ab2))
        ne = r * r
    else:
        nv = pow(pow(fabs(bv1), q) + pow(fabs(bv2), q), 1.0 / q)
        ne = pow(pow(fabs(be1), q) + pow(fabs(be2), q), 1.0 / q)
    return nv + ne + a1 * d1 + a2 * d2


cdef double _axis_slope(double phi, double ct, double stt, double sv1,
                        double sv2, double q, double m11, double m12,
                        double m21, double m22, double d1,
                        double d2) noexcept nogil:
    cdef double a1 = cos(phi)
    cdef double a2 = sin(phi)
    cdef double bv1 = sv1 * (ct * a1 + stt * a2)
    cdef double bv2 = sv2 * (-stt * a1 + ct * a2)
    cdef double be1 = m11 * a1 + m12 * a2
    cdef double be2 = m21 * a1 + m22 * a2
    cdef double gv1 = 0.0
    cdef double gv2 = 0.0
    cdef double ge1 = 0.0
    cdef double ge2 = 0.0
    cdef double nv, ne, nvq, neq, ab1, ab2, r
    if q == 1.5:
        # q-1 = 0.5 and nv^(q-1) = cbrt(sum), so the normal reduces to
        # sqrt and cbrt calls
        ab1 = fabs(bv1)
        ab2 = fabs(bv2)
        r = cbrt(ab1 * sqrt(ab1) + ab2 * sqrt(ab2))
        if r > 0.0:
            gv1 = copysign(sqrt(ab1), bv1) / r
            gv2 = copysign(sqrt(ab2), bv2) / r
        ab1 = fabs(be1)
        ab2 = fabs(be2)
        r = cbrt(ab1 * sqrt(ab1) + ab2 * sqrt(ab2))
        if r > 0.0:
            ge1 = copysign(sqrt(ab1), be1) / r
            ge2 = copysign(sqrt(ab2), be2) / r
    else:
        nv = pow(pow(fabs(bv1), q) + pow(fabs(bv2), q), 1.0 / q)
        if nv > 0.0:
            nvq = pow(nv, q - 1.0)
            gv1 = copysign(pow(fabs(bv1), q - 1.0), bv1) / nvq
            gv2 = copysign(pow(fabs(bv2), q - 1.0), bv2) / nvq
        ne = pow(pow(fabs(be1), q) + pow(fabs(be2), q), 1.0 / q)
        if ne > 0.0:
            neq = pow(ne, q - 1.0)
            ge1 = copysign(pow(fabs(be1), q - 1.0), be1) / neq
            ge2 = copysign(pow(fabs(be2), q - 1.0), be2) / neq
    cdef double g1 = ct * sv1 * gv1 - stt * sv2 * gv2 + m11 * ge1 + m21 * ge2 + d1
    cdef double g2 = stt * sv1 * gv1 + ct * sv2 * gv2 + m12 * ge1 + m22 * ge2 + d2
    return a1 * g2 - a2 * g1


cdef double _refine_axis(int best_i, double ct, double stt, double sv1,
                         double sv2, double q, double m11, double m12,
                         double m21, double m22, double d1,
                         double d2) noexcept nogil:
    cdef double center = -M_PI + _SCAN_STEP * best_i
    cdef double lo = center - _SCAN_STEP
    cdef double hi = center + _SCAN_STEP
    cdef double flo = _axis_slope(lo, ct, stt, sv1, sv2, q,
                                  m11, m12, m21, m22, d1, d2)
    cdef double fhi = _axis_slope(hi, ct, stt, sv1, sv2, q,
                                  m11, m12, m21, m22, d1, d2)
    cdef double phi, mid, fm, denom
    cdef int side, it
    if flo < 0.0 and 0.0 < fhi:
        # regula falsi with the Illinois halving safeguard
        side = 0
        for it in range(_REFINE_MAX):
            denom = fhi - flo
            if denom != 0.0:
                mid = (lo * fhi - hi * flo) / denom
            else:
                mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                mid = 0.5 * (lo + hi)
            fm = _axis_slope(mid, ct, stt, sv1, sv2, q,
                             m11, m12, m21, m22, d1, d2)
            if fm > 0.0:
                hi = mid
                fhi = fm
                if side == 1:
                    flo *= 0.5
                side = 1
            elif fm < 0.0:
                lo = mid
                flo = fm
                if side == -1:
                    fhi *= 0.5
                side = -1
            else:
                lo = mid
                hi = mid
                break
            if hi - lo <= _REFINE_TOL:
                break
        phi = 0.5 * (lo + hi)
    else:
        # no slope sign change across the bracket: the basin bottom sits at
        # a scan point or in another bracket, so keep the scanned center
        # (the caller clamps to the scan value anyway)
        phi = center
    return phi


cdef void _best_axis(double ct, double stt, double sv1, double sv2, double q,
                     double m11, double m12, double m21, double m22,
                     double d1, double d2, double* out1,
                     double* out2) noexcept nogil:
    cdef double[16] vals
    cdef int i, best_i, worst_i, second_i, gap, wrap_gap
    cdef double phi, phi2, a1, a2, b1, b2, best_g, g2
    for i in range(_SCAN_K):
        vals[i] = _axis_value(_SCAN_COS[i], _SCAN_SIN[i], ct, stt, sv1, sv2,
                              q, m11, m12, m21, m22, d1, d2)
    best_i = 0
    worst_i = 0
    for i in range(1, _SCAN_K):
        if vals[i] < vals[best_i]:
            best_i = i
        if vals[i] > vals[worst_i]:
            worst_i = i
    second_i = -1
    for i in range(_SCAN_K):
        gap = i - best_i
        if gap < 0:
            gap = -gap
        wrap_gap = _SCAN_K - gap
        if gap > wrap_gap:
            gap = wrap_gap
        if gap >= 2 and (second_i < 0 or vals[i] < vals[second_i]):
            second_i = i
    # refine the runner-up basin only when it is nearly tied with the
    # winner; a clearly higher basin cannot overtake it
    if (second_i >= 0 and vals[second_i] - vals[best_i]
            > _RUNNER_UP_GATE * (vals[worst_i] - vals[best_i])):
        second_i = -1
    phi = _refine_axis(best_i, ct, stt, sv1, sv2, q,
                       m11, m12, m21, m22, d1, d2)
    a1 = cos(phi)
    a2 = sin(phi)
    best_g = _axis_value(a1, a2, ct, stt, sv1, sv2, q,
                         m11, m12, m21, m22, d1, d2)
    if best_g > vals[best_i]:
        a1 = _SCAN_COS[best_i]
        a2 = _SCAN_SIN[best_i]
        best_g = vals[best_i]
    if second_i >= 0:
        phi2 = _refine_axis(second_i, ct, stt, sv1, sv2, q,
                            m11, m12, m21, m22, d1, d2)
        b1 = cos(phi2)
        b2 = sin(phi2)
        g2 = _axis_value(b1, b2, ct, stt, sv1, sv2, q,
                         m11, m12, m21, m22, d1, d2)
        if g2 > vals[second_i]:
            b1 = _SCAN_COS[second_i]
            b2 = _SCAN_SIN[second_i]
            g2 = vals[second_i]
        if g2 < best_g:
            out1[0] = b1
            out2[0] = b2
            return
    out1[0] = a1
    out2[0] = a2


def hc_eval_u(double[::1] u, double[::1] z0, double[::1] u_prev,
              double[::1] c_ref, double theta_ref, double[::1] w,
              double alpha, double beta, double v_max, double T, int H,
              int tau, double sv1, double sv2, double p, double[:, ::1] obs,
              double[::1] tighten, double[::1] y, double rho, bint want_grad):
    """Compiled counterpart of _reference.hc_eval_u."""
    cdef int n_obs = obs.shape[0]
    cdef int m = n_obs * (H + 1)
    cdef double q = p / (p - 1.0)

    sc = np.empty((H + 1, 3))
    axes_arr = np.zeros(2 * m if m > 0 else 1)
    x_arr = np.empty(2 * H + 2 * m)
    cdef double[:, ::1] sc_v = sc
    cdef double[::1] axes = axes_arr
    cdef double[::1] x_v = x_arr

    cdef double c1, c2, th, v, nc1, nc2, nth, nv_
    cdef double r, s, co, so, s1, s2, m11, m12, m21, m22, ce1, ce2
    cdef double ct, stt, a1, a2
    cdef int t, k, j, base

    with nogil:
        c1 = z0[0]; c2 = z0[1]; th = z0[2]; v = z0[3]
        sc_v[0, 0] = c1; sc_v[0, 1] = c2; sc_v[0, 2] = th
        for t in range(H):
            r = u[2 * t]
            s = u[2 * t + 1]
            for k in range(tau):
                nc1 = c1 + T * (v * cos(th))
                nc2 = c2 + T * (v * sin(th))
                nth = _wrap(th + T * (alpha * s))
                nv_ = v + T * (beta * (r * v_max - v))
                c1 = nc1; c2 = nc2; th = nth; v = nv_
            sc_v[t + 1, 0] = c1; sc_v[t + 1, 1] = c2; sc_v[t + 1, 2] = th

        for j in range(n_obs):
            co = cos(obs[j, 2]); so = sin(obs[j, 2])
            s1 = obs[j, 3]; s2 = obs[j, 4]
            m11 = s1 * co; m12 = s1 * so; m21 = -s2 * so; m22 = s2 * co
            ce1 = obs[j, 0]; ce2 = obs[j, 1]
            for t in range(H + 1):
                ct = cos(sc_v[t, 2]); stt = sin(sc_v[t, 2])
                _best_axis(ct, stt, sv1, sv2, q, m11, m12, m21, m22,
                           sc_v[t, 0] - ce1, sc_v[t, 1] - ce2, &a1, &a2)
                base = j * 2 * (H + 1) + 2 * t
                axes[base] = a1
                axes[base + 1] = a2

        for t in range(2 * H):
            x_v[t] = u[t]
        for t in range(2 * m):
            x_v[2 * H + t] = axes[t]

    g, psi, G1, grad = hc_eval(x_arr, z0, u_prev, c_ref, theta_ref, w, alpha,
                               beta, v_max, T, H, tau, sv1, sv2, p, obs,
                               tighten, y, rho, want_grad)
    if want_grad:
        grad = grad[:2 * H].copy()
    return g, psi, G1, axes_arr[:2 * m], grad


def lc_eval(double[::1] x, double[::1] z0, double[::1] u_prev,
            double[:, ::1] ref_c, double[::1] ref_th, double[::1] w,
            double alpha, double beta, double v_max, double T, int L,
            int omega, bint want_grad):
    """Compiled counterpart of _reference.lc_eval."""
    cdef double qc = w[0], qth = w[1], qr = w[2], qrd = w[3]
    cdef double qs = w[4], qsd = w[5], qcw = w[6], qthw = w[7]
    cdef double qcl = w[8], qthl = w[9]

    st = np.empty((L + 1, 4))
    grad_arr = np.zeros(x.shape[0])
    cdef double[:, ::1] st_v = st
    cdef double[::1] grad = grad_arr

    cdef double g = 0.0
    cdef double c1, c2, th, v, nc1, nc2, nth, nv_
    cdef double r, s, rp, sp, dc1, dc2, dth, wc, wth
    cdef double lam_c1, lam_c2, lam_th, lam_v, new_th, new_v, thk, vk
    cdef int k

    with nogil:
        c1 = z0[0]; c2 = z0[1]; th = z0[2]; v = z0[3]
        st_v[0, 0] = c1; st_v[0, 1] = c2; st_v[0, 2] = th; st_v[0, 3] = v
        for k in range(L):
            r = x[2 * k]
            s = x[2 * k + 1]
            nc1 = c1 + T * (v * cos(th))
            nc2 = c2 + T * (v * sin(th))
            nth = _wrap(th + T * (alpha * s))
            nv_ = v + T * (beta * (r * v_max - v))
            c1 = nc1; c2 = nc2; th = nth; v = nv_
            st_v[k + 1, 0] = c1; st_v[k + 1, 1] = c2
            st_v[k + 1, 2] = th; st_v[k + 1, 3] = v

        for k in range(L):
            if k == omega:
                wc = qcw; wth = qthw
            else:
                wc = qc; wth = qth
            dc1 = st_v[k, 0] - ref_c[k, 0]
            dc2 = st_v[k, 1] - ref_c[k, 1]
            dth = _wrap(st_v[k, 2] - ref_th[k])
            r = x[2 * k]
            s = x[2 * k + 1]
            if k == 0:
                rp = u_prev[0]; sp = u_prev[1]
            else:
                rp = x[2 * k - 2]; sp = x[2 * k - 1]
            g += (wc * (dc1 * dc1 + dc2 * dc2) + wth * dth * dth
                  + qr * r * r + qrd * (r - rp) * (r - rp)
                  + qs * s * s + qsd * (s - sp) * (s - sp))
        dc1 = st_v[L, 0] - ref_c[L, 0]
        dc2 = st_v[L, 1] - ref_c[L, 1]
        dth = _wrap(st_v[L, 2] - ref_th[L])
        g += qcl * (dc1 * dc1 + dc2 * dc2) + qthl * dth * dth

        if want_grad:
            lam_c1 = 2.0 * qcl * dc1
            lam_c2 = 2.0 * qcl * dc2
            lam_th = 2.0 * qthl * dth
            lam_v = 0.0
            for k in range(L - 1, -1, -1):
                thk = st_v[k, 2]
                vk = st_v[k, 3]
                grad[2 * k] += T * beta * v_max * lam_v
                grad[2 * k + 1] += T * alpha * lam_th
                new_th = lam_th + T * vk * (-sin(thk) * lam_c1
                                            + cos(thk) * lam_c2)
                new_v = lam_v + T * (cos(thk) * lam_c1
                                     + sin(thk) * lam_c2 - beta * lam_v)
                lam_th = new_th
                lam_v = new_v
                if k == omega:
                    wc = qcw; wth = qthw
                else:
                    wc = qc; wth = qth
                lam_c1 += 2.0 * wc * (st_v[k, 0] - ref_c[k, 0])
                lam_c2 += 2.0 * wc * (st_v[k, 1] - ref_c[k, 1])
                lam_th += 2.0 * wth * _wrap(st_v[k, 2] - ref_th[k])
                r = x[2 * k]
                s = x[2 * k + 1]
                if k == 0:
                    rp = u_prev[0]; sp = u_prev[1]
                else:
                    rp = x[2 * k - 2]; sp = x[2 * k - 1]
                grad[2 * k] += 2.0 * qr * r + 2.0 * qrd * (r - rp)
                grad[2 * k + 1] += 2.0 * qs * s + 2.0 * qsd * (s - sp)
                if k > 0:
                    grad[2 * k - 2] -= 2.0 * qrd * (r - rp)
                    grad[2 * k - 1] -= 2.0 * qsd * (s - sp)

    return g, (grad_arr if want_grad else None)
