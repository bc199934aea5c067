"""Linearized cart-pendulum and its eigen-decomposition.

State ``s = [y, dy, phi, dphi]``; the open-loop matrix has one unstable mode,
which is the only one driven by the event-triggered loop. The reference
spectra and modal vectors below are used for orientation and cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

PENDULUM_A = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [0.0, -0.1818, 2.6730, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, -0.4545, 31.1800, 0.0],
])
PENDULUM_B = np.array([0.0, 1.8180, 0.0, 4.5450])
PENDULUM_K = np.array([-1.00, -2.04, 20.36, 3.93])

REFERENCE_EIGVALS = np.array([0.0, -5.6041, -0.1428, 5.5651])
REFERENCE_BTIL = np.array([10.0000, -2.3865, 10.0979, 2.2513])
REFERENCE_KTIL = np.array([-1.0000, -0.1295, 0.7422, 7.2624])


def physical_matrices(m1=0.2, m2=0.5, nu=0.1, l=0.3, I=0.006, g0=9.8):
    """Linearization about the upright equilibrium from the physical constants.

    Pendulum mass ``m1``, cart mass ``m2``, cart friction ``nu``, pivot-to-centre
    length ``l``, pendulum inertia ``I``, gravity ``g0``.
    """
    den = I * (m1 + m2) + m1 * m2 * l**2
    A = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [0.0, -(I + m1 * l**2) * nu / den, m1**2 * g0 * l**2 / den, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, -m1 * l * nu / den, m1 * g0 * l * (m1 + m2) / den, 0.0],
    ])
    B = np.array([0.0, (I + m1 * l**2) / den, 0.0, m1 * l / den])
    return A, B


@dataclass(frozen=True)
class PendulumModel:
    A4: np.ndarray
    B4: np.ndarray
    k4: np.ndarray
    eigvals: np.ndarray
    Pmat: np.ndarray
    Pinv: np.ndarray
    Btil: np.ndarray
    ktil: np.ndarray
    unstable: int

    @property
    def Atil(self) -> np.ndarray:
        return np.diag(self.eigvals)

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.A4 @ self.Pmat - self.Pmat @ self.Atil)))

    def to_modal(self, s) -> np.ndarray:
        return self.Pinv @ np.asarray(s, dtype=float)

    def to_physical(self, st) -> np.ndarray:
        return np.asarray(st, dtype=float) @ self.Pmat.T


def diagonalize(A4, B4, k4, order_like=None, orient_like=None) -> PendulumModel:
    """Eigen-decompose ``A4`` into unit-norm real eigenvectors.

    ``order_like`` reorders the modes to the nearest reference eigenvalues.
    Each eigenvector's sign is arbitrary; with ``orient_like`` it is chosen so
    the modal input ``Pinv @ B4`` has the reference signs, otherwise the
    largest-magnitude entry is made positive.
    """
    A4 = np.asarray(A4, dtype=float)
    B4 = np.asarray(B4, dtype=float)
    k4 = np.asarray(k4, dtype=float)
    n = A4.shape[0]
    vals, vecs = np.linalg.eig(A4)
    if np.max(np.abs(vals.imag)) > 1e-9 * max(1.0, np.max(np.abs(vals))):
        raise ConfigError(f"complex eigenvalues are not supported: {vals}")
    vals, vecs = vals.real, vecs.real
    gaps = np.abs(vals[:, None] - vals[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.min(gaps) < 1e-9 * max(1.0, np.max(np.abs(vals))):
        raise ConfigError(f"repeated eigenvalues are not supported: {vals}")

    if order_like is not None:
        order = [int(np.argmin(np.abs(vals - r))) for r in order_like]
        if sorted(order) != list(range(n)):
            raise ConfigError(f"eigenvalues {vals} do not match reference order {order_like}")
        vals, vecs = vals[order], vecs[:, order]

    vecs = vecs / np.linalg.norm(vecs, axis=0)
    if orient_like is None:
        lead = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(n)]
        vecs = vecs * np.sign(lead)
    else:
        modal_b = np.linalg.solve(vecs, B4)
        flip = np.where(np.sign(modal_b) == np.sign(orient_like), 1.0, -1.0)
        vecs = vecs * flip

    Pinv = np.linalg.inv(vecs)
    unstable = np.flatnonzero(vals > 0)
    if len(unstable) != 1:
        raise ConfigError(f"expected exactly one unstable mode, eigenvalues are {vals}")
    return PendulumModel(
        A4=A4, B4=B4, k4=k4, eigvals=vals, Pmat=vecs, Pinv=Pinv,
        Btil=Pinv @ B4, ktil=k4 @ vecs, unstable=int(unstable[0]),
    )


def reference_model() -> PendulumModel:
    return diagonalize(
        PENDULUM_A, PENDULUM_B, PENDULUM_K,
        order_like=REFERENCE_EIGVALS, orient_like=REFERENCE_BTIL,
    )


def transformed_disturbance_bound(Pmat, M_component: float, mode: int | None = None):
    """Tight bound on the modal disturbance ``Pinv @ w`` when every ``|w_i| <= M_component``.

    Returns the bound for ``mode`` (default: the last mode) or, with
    ``mode="all"``, the vector of per-mode bounds.
    """
    Pmat = np.asarray(Pmat, dtype=float)
    if M_component < 0:
        raise ValueError(f"disturbance bound must be >= 0, got {M_component}")
    if abs(np.linalg.det(Pmat)) < 1e-12:
        raise ConfigError("eigenvector matrix is singular")
    rows = M_component * np.abs(np.linalg.inv(Pmat)).sum(axis=1)
    if mode == "all":
        return rows
    return float(rows[-1 if mode is None else mode])
