"""Pure-Python evaluation kernels for the transcribed optimal control problems.

These are the hot inner loops of the planner: forward Euler rollout of the
vehicle model, stage/terminal cost accumulation, separation-margin rows, and
the exact reverse (adjoint) sweep for the gradient.  The compiled module
sepnav._kernels._core implements the same functions with identical operation
ordering; this module is the readable reference and the import-time fallback.

Decision-vector layout (high-level problem, horizon H, J obstacles):
    x = [r_0, s_0, ..., r_{H-1}, s_{H-1},
         a^0_0, ..., a^0_H,  a^1_0, ..., a^{J-1}_H]        (each a is 2 floats)
Margin rows are stacked obstacle-major: row = j*(H+1) + t.
"""

from __future__ import annotations

import ctypes
import ctypes.util
import math

import numpy as np


def _load_cbrt():
    """Cube root from the system libm.

    The compiled backend calls libm's cbrt directly; going through ctypes
    here (rather than pow(x, 1/3), which rounds differently) keeps the two
    backends bit-identical.
    """
    for name in (ctypes.util.find_library("m"), "libm.so.6", None):
        try:
            lib = ctypes.CDLL(name)
            fn = lib.cbrt
        except (OSError, AttributeError):
            continue
        fn.restype = ctypes.c_double
        fn.argtypes = (ctypes.c_double,)
        return fn
    return lambda x: math.copysign(abs(x) ** (1.0 / 3.0), x)


_cbrt = _load_cbrt()


def _wrap(theta):
    if -math.pi < theta <= math.pi:
        return theta
    m = math.fmod(theta + math.pi, 2.0 * math.pi)
    if m <= 0.0:
        m += 2.0 * math.pi
    return m - math.pi


def hc_eval(x, z0, u_prev, c_ref, theta_ref, w, alpha, beta, v_max, T, H, tau,
            sv1, sv2, p, obs, tighten, y, rho, want_grad):
    """Cost, margins, and gradient of the high-level problem.

    tighten holds the per-stage margin shift (length H + 1); being
    constant in the decision vector it never enters the gradient.
    Returns (g, psi, G1, grad) where g is the smooth tracking cost, psi is
    the augmented-Lagrangian value g + (rho/2) * dist^2(G1 + y/rho, C) for
    the nonpositive orthant C (psi == g when rho == 0), G1 the stacked
    separation margins, and grad the gradient of psi (None unless
    want_grad).
    """
    x = np.asarray(x, dtype=float)
    qc, qth, qr, qrd, qs, qsd, qch, qthh = (float(v) for v in w)
    cr1, cr2 = float(c_ref[0]), float(c_ref[1])
    n_obs = obs.shape[0]
    m = n_obs * (H + 1)
    q = p / (p - 1.0)

    # forward rollout, storing every Euler substep state
    nsub = H * tau
    st_c1 = [0.0] * (nsub + 1)
    st_c2 = [0.0] * (nsub + 1)
    st_th = [0.0] * (nsub + 1)
    st_v = [0.0] * (nsub + 1)
    c1, c2, th, v = float(z0[0]), float(z0[1]), float(z0[2]), float(z0[3])
    idx = 0
    st_c1[0], st_c2[0], st_th[0], st_v[0] = c1, c2, th, v
    for t in range(H):
        r = float(x[2 * t])
        s = float(x[2 * t + 1])
        for _ in range(tau):
            nc1 = c1 + T * (v * math.cos(th))
            nc2 = c2 + T * (v * math.sin(th))
            nth = _wrap(th + T * (alpha * s))
            nv = v + T * (beta * (r * v_max - v))
            c1, c2, th, v = nc1, nc2, nth, nv
            idx += 1
            st_c1[idx], st_c2[idx], st_th[idx], st_v[idx] = c1, c2, th, v

    # smooth tracking cost
    g = 0.0
    for t in range(0, H, 2):
        k = t * tau
        r = float(x[2 * t])
        s = float(x[2 * t + 1])
        if t == 0:
            rp, sp = float(u_prev[0]), float(u_prev[1])
        else:
            rp, sp = float(x[2 * t - 2]), float(x[2 * t - 1])
        dc1 = st_c1[k] - cr1
        dc2 = st_c2[k] - cr2
        dth = _wrap(st_th[k] - theta_ref)
        g += (qc * (dc1 * dc1 + dc2 * dc2) + qth * dth * dth
              + qr * r * r + qrd * (r - rp) * (r - rp)
              + qs * s * s + qsd * (s - sp) * (s - sp))
    dc1 = st_c1[nsub] - cr1
    dc2 = st_c2[nsub] - cr2
    dth = _wrap(st_th[nsub] - theta_ref)
    g += qch * (dc1 * dc1 + dc2 * dc2) + qthh * dth * dth

    # separation margins
    G1 = np.zeros(m)
    me = []  # per-obstacle S^e R^eT entries
    for j in range(n_obs):
        ce, se = math.cos(float(obs[j, 2])), math.sin(float(obs[j, 2]))
        s1, s2 = float(obs[j, 3]), float(obs[j, 4])
        me.append((s1 * ce, s1 * se, -s2 * se, s2 * ce))
    ax_base = 2 * H
    for j in range(n_obs):
        m11, m12, m21, m22 = me[j]
        ce1, ce2 = float(obs[j, 0]), float(obs[j, 1])
        for t in range(H + 1):
            k = t * tau
            a1 = float(x[ax_base + j * 2 * (H + 1) + 2 * t])
            a2 = float(x[ax_base + j * 2 * (H + 1) + 2 * t + 1])
            ct, stt = math.cos(st_th[k]), math.sin(st_th[k])
            bv1 = sv1 * (ct * a1 + stt * a2)
            bv2 = sv2 * (-stt * a1 + ct * a2)
            nv = (abs(bv1) ** q + abs(bv2) ** q) ** (1.0 / q)
            be1 = m11 * a1 + m12 * a2
            be2 = m21 * a1 + m22 * a2
            ne = (abs(be1) ** q + abs(be2) ** q) ** (1.0 / q)
            G1[j * (H + 1) + t] = (nv + ne + a1 * (st_c1[k] - ce1)
                                   + a2 * (st_c2[k] - ce2)
                                   + float(tighten[t]))

    # augmented-Lagrangian penalty and per-row gradient weights
    psi = g
    pw = np.zeros(m)
    if rho > 0.0 and m > 0:
        for i in range(m):
            u = G1[i] + float(y[i]) / rho
            if u > 0.0:
                psi += 0.5 * rho * u * u
                pw[i] = rho * u

    if not want_grad:
        return g, psi, G1, None

    grad = np.zeros(x.shape[0])
    lam_c1 = 2.0 * qch * dc1
    lam_c2 = 2.0 * qch * dc2
    lam_th = 2.0 * qthh * dth
    lam_v = 0.0

    def margin_partials(j, t, weight):
        nonlocal lam_c1, lam_c2, lam_th
        k = t * tau
        ai = ax_base + j * 2 * (H + 1) + 2 * t
        a1, a2 = float(x[ai]), float(x[ai + 1])
        ct, stt = math.cos(st_th[k]), math.sin(st_th[k])
        bv1 = sv1 * (ct * a1 + stt * a2)
        bv2 = sv2 * (-stt * a1 + ct * a2)
        nv = (abs(bv1) ** q + abs(bv2) ** q) ** (1.0 / q)
        if nv > 0.0:
            gv1 = math.copysign(abs(bv1) ** (q - 1.0), bv1) / nv ** (q - 1.0)
            gv2 = math.copysign(abs(bv2) ** (q - 1.0), bv2) / nv ** (q - 1.0)
        else:
            gv1 = gv2 = 0.0
        m11, m12, m21, m22 = me[j]
        be1 = m11 * a1 + m12 * a2
        be2 = m21 * a1 + m22 * a2
        ne = (abs(be1) ** q + abs(be2) ** q) ** (1.0 / q)
        if ne > 0.0:
            ge1 = math.copysign(abs(be1) ** (q - 1.0), be1) / ne ** (q - 1.0)
            ge2 = math.copysign(abs(be2) ** (q - 1.0), be2) / ne ** (q - 1.0)
        else:
            ge1 = ge2 = 0.0
        ce1, ce2 = float(obs[j, 0]), float(obs[j, 1])
        # d margin / d axis: Mv^T gv + Me^T ge + (c^v - c^e)
        grad[ai] += weight * (ct * sv1 * gv1 - stt * sv2 * gv2
                              + m11 * ge1 + m21 * ge2 + (st_c1[k] - ce1))
        grad[ai + 1] += weight * (stt * sv1 * gv1 + ct * sv2 * gv2
                                  + m12 * ge1 + m22 * ge2 + (st_c2[k] - ce2))
        lam_c1 += weight * a1
        lam_c2 += weight * a2
        # d||S^v R(th)^T a||_q / d th
        lam_th += weight * (gv1 * sv1 * (-stt * a1 + ct * a2)
                            + gv2 * sv2 * (-ct * a1 - stt * a2))

    for j in range(n_obs):
        wj = float(pw[j * (H + 1) + H])
        if wj != 0.0:
            margin_partials(j, H, wj)

    for t in range(H - 1, -1, -1):
        for k in range(tau - 1, -1, -1):
            i = t * tau + k
            thk, vk = st_th[i], st_v[i]
            grad[2 * t] += T * beta * v_max * lam_v
            grad[2 * t + 1] += T * alpha * lam_th
            new_th = lam_th + T * vk * (-math.sin(thk) * lam_c1
                                        + math.cos(thk) * lam_c2)
            new_v = lam_v + T * (math.cos(thk) * lam_c1
                                 + math.sin(thk) * lam_c2 - beta * lam_v)
            lam_th, lam_v = new_th, new_v
        if t % 2 == 0:
            k = t * tau
            lam_c1 += 2.0 * qc * (st_c1[k] - cr1)
            lam_c2 += 2.0 * qc * (st_c2[k] - cr2)
            lam_th += 2.0 * qth * _wrap(st_th[k] - theta_ref)
            r = float(x[2 * t])
            s = float(x[2 * t + 1])
            if t == 0:
                rp, sp = float(u_prev[0]), float(u_prev[1])
            else:
                rp, sp = float(x[2 * t - 2]), float(x[2 * t - 1])
            grad[2 * t] += 2.0 * qr * r + 2.0 * qrd * (r - rp)
            grad[2 * t + 1] += 2.0 * qs * s + 2.0 * qsd * (s - sp)
            if t > 0:
                grad[2 * t - 2] -= 2.0 * qrd * (r - rp)
                grad[2 * t - 1] -= 2.0 * qsd * (s - sp)
        for j in range(n_obs):
            wj = float(pw[j * (H + 1) + t])
            if wj != 0.0:
                margin_partials(j, t, wj)

    return g, psi, G1, grad


# Resolving a margin row's separating axis: coarse scan over fixed unit
# directions, then a bracketed 1-D refinement on the angle.
_SCAN_K = 16
_SCAN_STEP = 2.0 * math.pi / _SCAN_K
_SCAN_COS = tuple(math.cos(-math.pi + _SCAN_STEP * i) for i in range(_SCAN_K))
_SCAN_SIN = tuple(math.sin(-math.pi + _SCAN_STEP * i) for i in range(_SCAN_K))
_REFINE_TOL = 1e-10
_REFINE_MAX = 80
_RUNNER_UP_GATE = 0.25


def _axis_value(a1, a2, ct, stt, sv1, sv2, q, m11, m12, m21, m22, d1, d2):
    bv1 = sv1 * (ct * a1 + stt * a2)
    bv2 = sv2 * (-stt * a1 + ct * a2)
    be1 = m11 * a1 + m12 * a2
    be2 = m21 * a1 + m22 * a2
    if q == 1.5:
        # |b|^1.5 = |b|*sqrt(|b|) and s^(2/3) = cbrt(s)^2: sqrt/cbrt are far
        # cheaper than pow, and this routine dominates the axis search
        ab1 = abs(bv1)
        ab2 = abs(bv2)
        r = _cbrt(ab1 * math.sqrt(ab1) + ab2 * math.sqrt(ab2))
        nv = r * r
        ab1 = abs(be1)
        ab2 = abs(be2)
        r = _cbrt(ab1 * math.sqrt(ab1) + ab2 * math.sqrt(ab2))
        ne = r * r
    else:
        nv = (abs(bv1) ** q + abs(bv2) ** q) ** (1.0 / q)
        ne = (abs(be1) ** q + abs(be2) ** q) ** (1.0 / q)
    return nv + ne + a1 * d1 + a2 * d2


def _axis_slope(phi, ct, stt, sv1, sv2, q, m11, m12, m21, m22, d1, d2):
    a1 = math.cos(phi)
    a2 = math.sin(phi)
    bv1 = sv1 * (ct * a1 + stt * a2)
    bv2 = sv2 * (-stt * a1 + ct * a2)
    be1 = m11 * a1 + m12 * a2
    be2 = m21 * a1 + m22 * a2
    if q == 1.5:
        # q-1 = 0.5 and nv^(q-1) = cbrt(sum), so the normal reduces to
        # sqrt and cbrt calls
        ab1 = abs(bv1)
        ab2 = abs(bv2)
        r = _cbrt(ab1 * math.sqrt(ab1) + ab2 * math.sqrt(ab2))
        if r > 0.0:
            gv1 = math.copysign(math.sqrt(ab1), bv1) / r
            gv2 = math.copysign(math.sqrt(ab2), bv2) / r
        else:
            gv1 = gv2 = 0.0
        ab1 = abs(be1)
        ab2 = abs(be2)
        r = _cbrt(ab1 * math.sqrt(ab1) + ab2 * math.sqrt(ab2))
        if r > 0.0:
            ge1 = math.copysign(math.sqrt(ab1), be1) / r
            ge2 = math.copysign(math.sqrt(ab2), be2) / r
        else:
            ge1 = ge2 = 0.0
    else:
        nv = (abs(bv1) ** q + abs(bv2) ** q) ** (1.0 / q)
        if nv > 0.0:
            gv1 = math.copysign(abs(bv1) ** (q - 1.0), bv1) / nv ** (q - 1.0)
            gv2 = math.copysign(abs(bv2) ** (q - 1.0), bv2) / nv ** (q - 1.0)
        else:
            gv1 = gv2 = 0.0
        ne = (abs(be1) ** q + abs(be2) ** q) ** (1.0 / q)
        if ne > 0.0:
            ge1 = math.copysign(abs(be1) ** (q - 1.0), be1) / ne ** (q - 1.0)
            ge2 = math.copysign(abs(be2) ** (q - 1.0), be2) / ne ** (q - 1.0)
        else:
            ge1 = ge2 = 0.0
    g1 = ct * sv1 * gv1 - stt * sv2 * gv2 + m11 * ge1 + m21 * ge2 + d1
    g2 = stt * sv1 * gv1 + ct * sv2 * gv2 + m12 * ge1 + m22 * ge2 + d2
    return a1 * g2 - a2 * g1


def _refine_axis(best_i, ct, stt, sv1, sv2, q, m11, m12, m21, m22, d1, d2):
    """Minimize over the bracket around scan point best_i; returns phi."""
    center = -math.pi + _SCAN_STEP * best_i
    lo = center - _SCAN_STEP
    hi = center + _SCAN_STEP
    flo = _axis_slope(lo, ct, stt, sv1, sv2, q, m11, m12, m21, m22, d1, d2)
    fhi = _axis_slope(hi, ct, stt, sv1, sv2, q, m11, m12, m21, m22, d1, d2)
    if flo < 0.0 and 0.0 < fhi:
        # regula falsi with the Illinois halving safeguard
        side = 0
        for _ in range(_REFINE_MAX):
            denom = fhi - flo
            mid = (lo * fhi - hi * flo) / denom if denom != 0.0 else 0.5 * (lo + hi)
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


def _best_axis(ct, stt, sv1, sv2, q, m11, m12, m21, m22, d1, d2):
    """Unit direction minimizing one margin row over the axis circle.

    Coarse scan over fixed directions, then bracketed refinement around
    the winner and the best non-adjacent runner-up (two near-tied basins
    are both explored); the lower of the refined values wins.
    """
    vals = [_axis_value(_SCAN_COS[i], _SCAN_SIN[i], ct, stt, sv1, sv2, q,
                        m11, m12, m21, m22, d1, d2) for i in range(_SCAN_K)]
    best_i = 0
    worst_i = 0
    for i in range(1, _SCAN_K):
        if vals[i] < vals[best_i]:
            best_i = i
        if vals[i] > vals[worst_i]:
            worst_i = i
    second_i = -1
    for i in range(_SCAN_K):
        gap = abs(i - best_i)
        if min(gap, _SCAN_K - gap) >= 2 and (second_i < 0
                                             or vals[i] < vals[second_i]):
            second_i = i
    # refine the runner-up basin only when it is nearly tied with the
    # winner; a clearly higher basin cannot overtake it
    if (second_i >= 0 and vals[second_i] - vals[best_i]
            > _RUNNER_UP_GATE * (vals[worst_i] - vals[best_i])):
        second_i = -1
    phi = _refine_axis(best_i, ct, stt, sv1, sv2, q,
                       m11, m12, m21, m22, d1, d2)
    a1 = math.cos(phi)
    a2 = math.sin(phi)
    best_g = _axis_value(a1, a2, ct, stt, sv1, sv2, q,
                         m11, m12, m21, m22, d1, d2)
    if best_g > vals[best_i]:
        a1, a2, best_g = _SCAN_COS[best_i], _SCAN_SIN[best_i], vals[best_i]
    if second_i >= 0:
        phi2 = _refine_axis(second_i, ct, stt, sv1, sv2, q,
                            m11, m12, m21, m22, d1, d2)
        b1 = math.cos(phi2)
        b2 = math.sin(phi2)
        g2 = _axis_value(b1, b2, ct, stt, sv1, sv2, q,
                         m11, m12, m21, m22, d1, d2)
        if g2 > vals[second_i]:
            b1, b2, g2 = _SCAN_COS[second_i], _SCAN_SIN[second_i], vals[second_i]
        if g2 < best_g:
            return b1, b2
    return a1, a2


def hc_eval_u(u, z0, u_prev, c_ref, theta_ref, w, alpha, beta, v_max, T, H,
              tau, sv1, sv2, p, obs, tighten, y, rho, want_grad):
    """Inputs-only evaluation of the high-level problem.

    Each margin row's separating axis is resolved internally to the
    direction minimizing that row's margin over the unit circle (the
    envelope over the axis block), so the decision vector is just the 2H
    inputs. Returns (g, psi, G1, axes, grad) where axes holds the
    resolved axis block in the full decision-vector layout and grad is
    d psi / d inputs (None unless want_grad); by the envelope property
    the axis block contributes no first-order term.
    """
    u = np.asarray(u, dtype=float)
    n_obs = obs.shape[0]
    m = n_obs * (H + 1)
    q = p / (p - 1.0)

    # stage-boundary states of the rollout
    sc1 = [0.0] * (H + 1)
    sc2 = [0.0] * (H + 1)
    sth = [0.0] * (H + 1)
    c1, c2, th, v = float(z0[0]), float(z0[1]), float(z0[2]), float(z0[3])
    sc1[0], sc2[0], sth[0] = c1, c2, th
    for t in range(H):
        r = float(u[2 * t])
        s = float(u[2 * t + 1])
        for _ in range(tau):
            nc1 = c1 + T * (v * math.cos(th))
            nc2 = c2 + T * (v * math.sin(th))
            nth = _wrap(th + T * (alpha * s))
            nv = v + T * (beta * (r * v_max - v))
            c1, c2, th, v = nc1, nc2, nth, nv
        sc1[t + 1], sc2[t + 1], sth[t + 1] = c1, c2, th

    axes = np.zeros(2 * m)
    for j in range(n_obs):
        co, so = math.cos(float(obs[j, 2])), math.sin(float(obs[j, 2]))
        s1, s2 = float(obs[j, 3]), float(obs[j, 4])
        m11, m12, m21, m22 = s1 * co, s1 * so, -s2 * so, s2 * co
        ce1, ce2 = float(obs[j, 0]), float(obs[j, 1])
        for t in range(H + 1):
            ct, stt = math.cos(sth[t]), math.sin(sth[t])
            a1, a2 = _best_axis(ct, stt, sv1, sv2, q, m11, m12, m21, m22,
                                sc1[t] - ce1, sc2[t] - ce2)
            base = j * 2 * (H + 1) + 2 * t
            axes[base] = a1
            axes[base + 1] = a2

    x = np.concatenate([u, axes])
    g, psi, G1, grad = hc_eval(x, z0, u_prev, c_ref, theta_ref, w, alpha,
                               beta, v_max, T, H, tau, sv1, sv2, p, obs,
                               tighten, y, rho, want_grad)
    if want_grad:
        grad = grad[:2 * H].copy()
    return g, psi, G1, axes, grad


def lc_eval(x, z0, u_prev, ref_c, ref_th, w, alpha, beta, v_max, T, L, omega,
            want_grad):
    """Cost and gradient of the low-level tracking problem.

    ref_c (L+1, 2) and ref_th (L+1,) hold the per-stage plan references
    already resolved through the carrot indexing.  Stage omega uses the
    high-weighted position/heading weights; input penalties apply at every
    stage.  Returns (g, grad) with grad None unless want_grad.
    """
    x = np.asarray(x, dtype=float)
    qc, qth, qr, qrd, qs, qsd, qcw, qthw, qcl, qthl = (float(v) for v in w)

    st_c1 = [0.0] * (L + 1)
    st_c2 = [0.0] * (L + 1)
    st_th = [0.0] * (L + 1)
    st_v = [0.0] * (L + 1)
    c1, c2, th, v = float(z0[0]), float(z0[1]), float(z0[2]), float(z0[3])
    st_c1[0], st_c2[0], st_th[0], st_v[0] = c1, c2, th, v
    for k in range(L):
        r = float(x[2 * k])
        s = float(x[2 * k + 1])
        nc1 = c1 + T * (v * math.cos(th))
        nc2 = c2 + T * (v * math.sin(th))
        nth = _wrap(th + T * (alpha * s))
        nv = v + T * (beta * (r * v_max - v))
        c1, c2, th, v = nc1, nc2, nth, nv
        st_c1[k + 1], st_c2[k + 1], st_th[k + 1], st_v[k + 1] = c1, c2, th, v

    g = 0.0
    for k in range(L):
        wc, wth = (qcw, qthw) if k == omega else (qc, qth)
        dc1 = st_c1[k] - float(ref_c[k, 0])
        dc2 = st_c2[k] - float(ref_c[k, 1])
        dth = _wrap(st_th[k] - float(ref_th[k]))
        r = float(x[2 * k])
        s = float(x[2 * k + 1])
        if k == 0:
            rp, sp = float(u_prev[0]), float(u_prev[1])
        else:
            rp, sp = float(x[2 * k - 2]), float(x[2 * k - 1])
        g += (wc * (dc1 * dc1 + dc2 * dc2) + wth * dth * dth
              + qr * r * r + qrd * (r - rp) * (r - rp)
              + qs * s * s + qsd * (s - sp) * (s - sp))
    dc1 = st_c1[L] - float(ref_c[L, 0])
    dc2 = st_c2[L] - float(ref_c[L, 1])
    dth = _wrap(st_th[L] - float(ref_th[L]))
    g += qcl * (dc1 * dc1 + dc2 * dc2) + qthl * dth * dth

    if not want_grad:
        return g, None

    grad = np.zeros(x.shape[0])
    lam_c1 = 2.0 * qcl * dc1
    lam_c2 = 2.0 * qcl * dc2
    lam_th = 2.0 * qthl * dth
    lam_v = 0.0
    for k in range(L - 1, -1, -1):
        thk, vk = st_th[k], st_v[k]
        grad[2 * k] += T * beta * v_max * lam_v
        grad[2 * k + 1] += T * alpha * lam_th
        new_th = lam_th + T * vk * (-math.sin(thk) * lam_c1
                                    + math.cos(thk) * lam_c2)
        new_v = lam_v + T * (math.cos(thk) * lam_c1
                             + math.sin(thk) * lam_c2 - beta * lam_v)
        lam_th, lam_v = new_th, new_v
        wc, wth = (qcw, qthw) if k == omega else (qc, qth)
        lam_c1 += 2.0 * wc * (st_c1[k] - float(ref_c[k, 0]))
        lam_c2 += 2.0 * wc * (st_c2[k] - float(ref_c[k, 1]))
        lam_th += 2.0 * wth * _wrap(st_th[k] - float(ref_th[k]))
        r = float(x[2 * k])
        s = float(x[2 * k + 1])
        if k == 0:
            rp, sp = float(u_prev[0]), float(u_prev[1])
        else:
            rp, sp = float(x[2 * k - 2]), float(x[2 * k - 1])
        grad[2 * k] += 2.0 * qr * r + 2.0 * qrd * (r - rp)
        grad[2 * k + 1] += 2.0 * qs * s + 2.0 * qsd * (s - sp)
        if k > 0:
            grad[2 * k - 2] -= 2.0 * qrd * (r - rp)
            grad[2 * k - 1] -= 2.0 * qsd * (s - sp)

    return g, grad
