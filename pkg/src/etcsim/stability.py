"""Ultimate-bound certificates for the sampled closed loop.

With zero-order-hold control ``u_k = -k shat_k`` the grid samples obey

    s_{k+1} = F s_k + Gu (kt . z_k) + Gd v_k,     F = Phi - Gu k

exactly, where ``z`` is the modal estimation error and ``v`` the held
disturbance. Bounding ``|z_i|`` and ``|v_l|`` componentwise gives

    |s_k| <= |F^k s_0| + (sum_i |F^i|) D

elementwise. ``T0`` is the first time after which the initial-condition
transient stays below the forced part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Certificate:
    kappa: np.ndarray
    T0: float
    forced: np.ndarray
    error_bounds: np.ndarray
    kappa_continuous: float | None = None


def modal_error_bounds(lam, z0, w_bounds, trigger_mode: int, Z_peak: float, T: float) -> np.ndarray:
    """Componentwise sup of ``|z_i(t)|`` over ``[0, T]``.

    The triggered mode never exceeds ``Z_peak``; the others evolve open loop as
    ``dz/dt = lam z + w`` from ``z0``.
    """
    out = np.empty(len(lam))
    for i, (li, zi, mi) in enumerate(zip(lam, np.abs(z0), w_bounds)):
        if i == trigger_mode:
            out[i] = max(Z_peak, zi)
        elif li < 0:
            out[i] = max(zi, mi / -li)
        elif li == 0:
            out[i] = zi + mi * T
        else:
            out[i] = zi * math.exp(li * T) + mi / li * math.expm1(li * T)
    return out


def grid_certificate(F, Gu, kt, Gd, v_bounds, z_bounds, s0, h, settle=1.0, tol=1e-13,
                     max_iter=2_000_000) -> Certificate:
    F = np.atleast_2d(np.asarray(F, dtype=float))
    n = F.shape[0]
    Gu = np.asarray(Gu, dtype=float).reshape(n)
    Gd = np.atleast_2d(np.asarray(Gd, dtype=float))
    s0 = np.asarray(s0, dtype=float).reshape(n)

    D = np.abs(Gu) * float(np.abs(kt) @ z_bounds) + np.abs(Gd) @ np.asarray(v_bounds, dtype=float)

    S = np.zeros((n, n))
    Fi = np.eye(n)
    transient = []
    x = s0.copy()
    for _ in range(max_iter):
        S += np.abs(Fi)
        transient.append(np.abs(x))
        Fi = F @ Fi
        x = F @ x
        if np.max(np.abs(Fi).sum(axis=1)) < tol and np.max(np.abs(x)) < tol:
            break
    else:
        raise RuntimeError("closed loop does not contract; no certificate")
    eps = np.max(np.abs(Fi).sum(axis=1))
    S = S + eps / (1.0 - eps) * np.max(S.sum(axis=1)) * np.ones((n, n))
    forced = S @ D

    transient = np.array(transient)
    # tail_max[k] = max over k' >= k of the transient, componentwise
    tail_max = np.maximum.accumulate(transient[::-1], axis=0)[::-1]
    level = settle * np.max(forced)
    below = np.flatnonzero(np.max(tail_max, axis=1) <= level)
    k0 = int(below[0]) if len(below) else len(tail_max) - 1
    kappa = tail_max[k0] + forced
    return Certificate(kappa=kappa, T0=k0 * h, forced=forced, error_bounds=np.asarray(z_bounds))
