"""Kinematic quantities derived from the deformation gradient.

Everything downstream works with Eulerian measures: the left Cauchy-Green
tensor ``c = F F^T``, principal stretches (square roots of its eigenvalues)
with their eigenprojections, the isochoric modified tensor
``cbar = J^(-2/3) c``, and strain rates split into parts coaxial and
orthogonal to the current stretch directions. The right stretch tensor and
rotation are never formed; no formula here needs them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nhcomp.tensor3 import I3, SpectralDecomp, coaxial_orthogonal_split, skew, spectral, sym

__all__ = [
    "DeformationState",
    "RateState",
    "kinematics_from_F",
    "finger_strain",
    "modified_tensor",
    "deviatoric_modified",
    "rate_from_motion",
    "hencky",
]


@dataclass(frozen=True)
class DeformationState:
    """Deformation gradient with its derived measures.

    ``stretches`` holds the distinct principal stretches (ascending) and
    ``decomp`` the spectral decomposition of ``c`` whose eigenprojections are
    shared by the left stretch tensor V. ``mod_stretches`` are the
    volume-preserving modified stretches, whose product is 1.
    """

    F: np.ndarray
    J: float
    c: np.ndarray
    decomp: SpectralDecomp
    stretches: tuple
    mod_stretches: tuple

    @property
    def m(self):
        return self.decomp.m

    @property
    def mults(self):
        return self.decomp.mults

    @property
    def projections(self):
        return self.decomp.projections


@dataclass(frozen=True)
class RateState:
    """Velocity-gradient data at a deformation state.

    ``dhat``/``dtilde`` are the parts of the stretching tensor d coaxial and
    orthogonal to the principal directions; ``lamdot`` are the rates of the
    distinct principal stretches, aligned with ``state.stretches``.
    """

    l: np.ndarray
    d: np.ndarray
    w: np.ndarray
    dhat: np.ndarray
    dtilde: np.ndarray
    lamdot: tuple


def kinematics_from_F(F, rel_tol=1e-8):
    """Build a :class:`DeformationState` from a deformation gradient.

    Raises ``ValueError`` if ``det F <= 0`` (inverted or degenerate
    deformation).
    """
    F = np.asarray(F, dtype=float)
    J = float(np.linalg.det(F))
    if not J > 0.0:
        raise ValueError(f"deformation gradient must have positive determinant, got det F = {J}")
    c = F @ F.T
    dec = spectral(c, rel_tol)
    stretches = tuple(float(np.sqrt(max(v, 0.0))) for v in dec.values)
    Jcbrt = J ** (1.0 / 3.0)
    mod = tuple(s / Jcbrt for s in stretches)
    return DeformationState(F=F, J=J, c=c, decomp=dec, stretches=stretches, mod_stretches=mod)


def finger_strain(state):
    """Eulerian finite-strain tensor (c - I)/2."""
    return 0.5 * (state.c - I3)


def modified_tensor(state):
    """Isochoric modified tensor cbar = J^(-2/3) c; det(cbar) = 1."""
    return state.J ** (-2.0 / 3.0) * state.c


def deviatoric_modified(state):
    """Deviator of the modified tensor; traceless by construction."""
    cbar = modified_tensor(state)
    return cbar - (np.trace(cbar) / 3.0) * I3


def rate_from_motion(F, Fdot, rel_tol=1e-8):
    """Velocity gradient data from (F, Fdot) along a motion.

    The spatial velocity gradient is ``l = Fdot F^(-1)``; its symmetric part
    d is split against the eigenbasis of ``c = F F^T``. The stretch rates
    follow from projecting d: ``lamdot_i = lam_i * (d : V_i) / mult_i``,
    which for a coaxial motion reduces to the diagonal rates.
    """
    state = kinematics_from_F(F, rel_tol)
    l = np.asarray(Fdot, dtype=float) @ np.linalg.inv(state.F)
    d = sym(l)
    w = skew(l)
    dhat, dtilde = coaxial_orthogonal_split(state.decomp, d)
    lamdot = tuple(
        lam * float(np.tensordot(d, P, axes=2)) / mult
        for lam, mult, P in zip(state.stretches, state.mults, state.projections)
    )
    return state, RateState(l=l, d=d, w=w, dhat=dhat, dtilde=dtilde, lamdot=lamdot)


def hencky(state):
    """Logarithmic (Hencky) tensor log V = (1/2) log c, for diagnostics."""
    out = np.zeros((3, 3))
    for lam, P in zip(state.stretches, state.projections):
        out += np.log(lam) * P
    return out
