"""Grid propagation kernel for diagonal (modal) closed loops.

The same function body is compiled with ``numba.njit`` when numba is importable
and ``ETCSIM_DISABLE_NUMBA`` is unset; otherwise the plain Python/numpy version
runs. Both paths perform identical floating-point operations in identical
order, so traces agree to the last bit on IEEE hardware.
"""

from __future__ import annotations

import math
import os

DISABLE_ENV = "ETCSIM_DISABLE_NUMBA"


def _propagate(k0, k1, h, watch, m, J, lam, phi, gam, Bt, kt,
               w_table, adv_dir, adv_mode, s, shat, u, w):
    """Advance grid rows ``k0 .. k1`` in place.

    Per step: ``u_k = -kt . shat_k`` (zero-order hold), disturbance from the
    table or ``adv_mode * sign(z_m) * adv_dir``, exact modal update. With
    ``watch`` set, stops after the first step in which ``|z_m|`` reaches ``J``
    and returns ``(k + 1, tau, sign)`` where ``tau`` is the exact crossing
    offset inside that step. Otherwise returns ``(k1, -1.0, 0)``.
    """
    n = s.shape[1]
    for k in range(k0, k1):
        uk = 0.0
        for i in range(n):
            uk -= kt[i] * shat[k, i]
        u[k] = uk
        z0 = s[k, m] - shat[k, m]
        if adv_mode != 0:
            sg = 1.0 if z0 >= 0.0 else -1.0
            for i in range(n):
                w[k, i] = adv_mode * sg * adv_dir[i]
        else:
            for i in range(n):
                w[k, i] = w_table[k, i]
        for i in range(n):
            s[k + 1, i] = phi[i] * s[k, i] + gam[i] * (Bt[i] * uk + w[k, i])
            shat[k + 1, i] = phi[i] * shat[k, i] + gam[i] * (Bt[i] * uk)
        if watch:
            if abs(z0) >= J:
                return k + 1, 0.0, 1 if z0 >= 0.0 else -1
            z1 = s[k + 1, m] - shat[k + 1, m]
            if abs(z1) >= J:
                target = J if z1 > 0.0 else -J
                # z(tau) = (z0 + c) e^{lam tau} - c between grid points
                c = w[k, m] / lam[m]
                ratio = (target + c) / (z0 + c) if z0 + c != 0.0 else -1.0
                tau = h
                if ratio > 0.0:
                    tau = math.log(ratio) / lam[m]
                if tau < 0.0:
                    tau = 0.0
                elif tau > h:
                    tau = h
                return k + 1, tau, 1 if z1 > 0.0 else -1
    return k1, -1.0, 0


propagate_py = _propagate

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

propagate_jit = numba.njit(cache=True)(_propagate) if numba is not None else None

_disabled = os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")
if propagate_jit is not None and not _disabled:
    propagate = propagate_jit
    BACKEND = "numba"
else:
    propagate = propagate_py
    BACKEND = "numpy"
