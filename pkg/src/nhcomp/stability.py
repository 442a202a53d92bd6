"""Objective stress rates, stability contractions, and tangent tensors.

Two pointwise material-stability checks are evaluated as quadratic forms in
the stretching d:

* the Hill-type contraction, the Zaremba-Jaumann rate of Kirchhoff stress
  contracted with d;
* the corotational contraction (CSP), the same construction on the Cauchy
  stress: ``(1/J) ZJ[tau]:d - (sigma:d) tr d``.

Each contraction is computed two independent ways -- a basis-free tensor
contraction and a recomposition from spectral quadratic forms (the letters
P, R, B, C, ... below) -- and the report carries both so that callers can
verify they agree.

Letter glossary (state with eigenprojections V_a of c, stretches lam_a,
rate d):

    P = 2 sum_a lam_a^2 |V_a d V_a|^2      coaxial part of A
    R = 2 sum_{a<b} (lam_a^2 + lam_b^2) |V_a d V_b|^2   off-diagonal part
    A = P + R = (dc + cd):d = 2 |F^T d|^2
    B = (c:d) tr d
    C = tr(c) (tr d)^2
    F = (tr d)^2
    E = P - (4/3) B + (2/9) C              coaxial modified-deviatoric form
    D = E + R
    G = P + F - B

All letters are nonnegative except B and hence E, D, G, which is what makes
the sign analysis of the contractions nontrivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nhcomp.kinematics import DeformationState, RateState, kinematics_from_F, rate_from_motion
from nhcomp.materials import ModelSpec, cauchy_stress, params_from_mu_nu
from nhcomp.tensor3 import I3, SuperSymTensor4, apply4, ddot, dev, outer, sym_outer
from nhcomp.volfun import catalog, evaluate, evaluate_grid, parse_volfun

__all__ = [
    "ContractionReport",
    "TangentPair",
    "Witness",
    "zj_rate",
    "oldroyd_rate",
    "bh_rate",
    "hill_contraction",
    "csp_contraction",
    "quad_form_E",
    "detA_identity",
    "tangents",
    "stretch_grid",
    "coaxial_matrices",
    "min_coaxial_eig",
    "find_hill_violation",
    "find_csp_violation",
    "tangent_fd_error",
]


# --------------------------------------------------------------------------
# objective rates


def zj_rate(model, state, rate, pdot=None):
    """Zaremba-Jaumann rate of the stress response, in closed form.

    Returns the ZJ rate of the Kirchhoff stress for the compressible kinds.
    For the incompressible kind it returns the ZJ rate of the Cauchy stress,
    ``-pdot I + mu (dc + cd)``, and ``pdot`` is required; the formula is
    meaningful on isochoric rates (tr d = 0).
    """
    c, d, J = state.c, rate.d, state.J
    mu = model.params.mu
    dc_cd = d @ c + c @ d
    if model.kind == "inc":
        if pdot is None:
            raise ValueError("the incompressible kind requires pdot")
        return -pdot * I3 + mu * dc_cd
    trd = float(np.trace(d))
    ev = evaluate(model.volfun, J)
    if model.kind == "mixed":
        return mu * dc_cd + model.params.lam * ev.chi * J * trd * I3
    iso = dc_cd - (2.0 / 3.0) * (dev(c) * trd + ddot(c, d) * I3)
    return model.params.K * ev.chi * J * trd * I3 + mu * J ** (-2.0 / 3.0) * iso


def oldroyd_rate(model, state, rate):
    """Oldroyd rate of the Kirchhoff stress: the ZJ rate minus d tau + tau d.

    Compressible kinds only (the incompressible stress needs a multiplier
    that a rate identity cannot supply on its own).
    """
    if model.kind == "inc":
        raise ValueError("oldroyd_rate is defined here for compressible kinds")
    zj = zj_rate(model, state, rate)
    tau = cauchy_stress(model, state.F).kirchhoff
    return zj - rate.d @ tau - tau @ rate.d


def bh_rate(model, state, rate):
    """Rate pairing sigma-dot + (tr d) sigma; equals ZJ[tau]/J identically."""
    if model.kind == "inc":
        raise ValueError("bh_rate is defined here for compressible kinds")
    return zj_rate(model, state, rate) / state.J


# --------------------------------------------------------------------------
# spectral letters


def _letters(state, d):
    lam2 = np.asarray(state.stretches) ** 2
    projections = state.projections
    trd = float(np.trace(d))
    P = 0.0
    R = 0.0
    n = len(projections)
    for a in range(n):
        Pa = projections[a]
        block = Pa @ d @ Pa
        P += 2.0 * lam2[a] * float(np.tensordot(block, block, axes=2))
        for b in range(a + 1, n):
            cross = projections[a] @ d @ projections[b]
            R += 2.0 * (lam2[a] + lam2[b]) * float(np.tensordot(cross, cross, axes=2))
    cd = sum(lam2[a] * float(np.tensordot(projections[a], d, axes=2)) for a in range(n))
    trc = float(np.dot(state.mults, lam2))
    B = cd * trd
    C = trc * trd * trd
    F = trd * trd
    return P, R, B, C, F


@dataclass(frozen=True)
class ContractionReport:
    """One stability contraction at one (state, rate) point.

    ``value`` is the basis-free contraction; ``recomposed`` rebuilds it from
    the spectral breakdown. They agree to 1e-10 relative by construction
    (this is checked in the test suite, not enforced here).
    """

    kind: str  # "hill" or "csp"
    value: float
    breakdown: dict
    recomposed: float
    verdict: str


def _verdict(value, scale):
    tol = 1e-12 * max(scale, 1.0e-300)
    if value > tol:
        return "positive"
    if value < -tol:
        return "negative"
    return "zero"


def classify_value(value, scale):
    """Sign verdict ("positive" / "zero" / "negative") at tolerance 1e-12*scale."""
    return _verdict(float(value), float(scale))


def _crosscheck_A(state, d, P, R):
    # Remark-style identity: the full quadratic form A equals 2 |F^T d|^2
    Ftd = state.F.T @ d
    free = 2.0 * float(np.tensordot(Ftd, Ftd, axes=2))
    scale = max(abs(free), abs(P) + abs(R), 1e-300)
    if abs(P + R - free) > 1e-8 * scale:
        raise AssertionError(
            f"spectral split P + R = {P + R!r} disagrees with 2|F^T d|^2 = {free!r}"
        )
    return free


def hill_contraction(model, state, rate):
    """Hill-type contraction ZJ[tau]:d with spectral breakdown.

    For the incompressible kind the rate is first projected onto traceless
    tensors and the contraction reduces to ``mu A``.
    """
    d = rate.d
    if model.kind == "inc":
        dt = d - (np.trace(d) / 3.0) * I3
        P, R, B, C, F = _letters(state, dt)
        A = _crosscheck_A(state, dt, P, R)
        mu = model.params.mu
        value = mu * A
        reco = mu * (P + R)
        return ContractionReport(
            "hill", value, {"A": P + R, "P": P, "R": R}, reco, _verdict(value, abs(value))
        )
    P, R, B, C, F = _letters(state, d)
    _crosscheck_A(state, d, P, R)
    value = ddot(zj_rate(model, state, rate), d)
    J = state.J
    ev = evaluate(model.volfun, J)
    mu = model.params.mu
    if model.kind == "mixed":
        lam = model.params.lam
        reco = mu * (P + R) + lam * ev.chi * J * F
        scale = mu * (P + R) + abs(lam * ev.chi * J) * F
        breakdown = {"A": P + R, "P": P, "R": R, "F": F}
    else:
        K = model.params.K
        E = P - (4.0 / 3.0) * B + (2.0 / 9.0) * C
        D = E + R
        w = mu * J ** (-2.0 / 3.0)
        reco = K * ev.chi * J * F + w * D
        scale = abs(K * ev.chi * J) * F + w * (P + R + abs(B) + C)
        breakdown = {"P": P, "R": R, "B": B, "C": C, "E": E, "D": D, "F": F}
    return ContractionReport("hill", value, breakdown, reco, _verdict(value, scale))


def csp_contraction(model, state, rate):
    """Corotational contraction ZJ[sigma]:d = (1/J) ZJ[tau]:d - (sigma:d) tr d."""
    if model.kind == "inc":
        raise ValueError("the corotational contraction is defined here for compressible kinds")
    d = rate.d
    J = state.J
    sigma = cauchy_stress(model, state.F).cauchy
    value = ddot(zj_rate(model, state, rate), d) / J - ddot(sigma, d) * float(np.trace(d))
    P, R, B, C, F = _letters(state, d)
    _crosscheck_A(state, d, P, R)
    ev = evaluate(model.volfun, J)
    mu = model.params.mu
    if model.kind == "mixed":
        lam = model.params.lam
        G = P + F - B
        reco = lam * J * ev.hpp * F + (mu / J) * (G + R)
        scale = abs(lam * J * ev.hpp) * F + (mu / J) * (P + R + F + abs(B))
        breakdown = {"P": P, "R": R, "B": B, "F": F, "G": G}
    else:
        K = model.params.K
        w = mu * J ** (-5.0 / 3.0)
        reco = K * J * ev.hpp * F + w * (P + R - (7.0 / 3.0) * B + (5.0 / 9.0) * C)
        scale = abs(K * J * ev.hpp) * F + w * (P + R + (7.0 / 3.0) * abs(B) + (5.0 / 9.0) * C)
        breakdown = {"P": P, "R": R, "B": B, "C": C, "F": F}
    return ContractionReport("csp", value, breakdown, reco, _verdict(value, scale))


# --------------------------------------------------------------------------
# standalone quadratic-form identities


def quad_form_E(lams, lamdots):
    """The coaxial form E as a sum of three squares, for distinct-axis input.

    Also evaluates the expanded polynomial form and insists the two agree;
    they are algebraically identical for any positive stretches.
    """
    l1, l2, l3 = (float(x) for x in lams)
    x1, x2, x3 = (float(x) for x in lamdots)
    if min(l1, l2, l3) <= 0.0:
        raise ValueError("stretches must be positive")
    a, b, c = l1 / l2, l1 / l3, l2 / l3
    squares = (
        (2.0 * x1 - a * x2 - b * x3) ** 2
        + (2.0 * x2 - x1 / a - c * x3) ** 2
        + (2.0 * x3 - x1 / b - x2 / c) ** 2
    )
    sx2 = x1 * x1 + x2 * x2 + x3 * x3
    sxl = x1 * l1 + x2 * l2 + x3 * l3
    sxol = x1 / l1 + x2 / l2 + x3 / l3
    sl2 = l1 * l1 + l2 * l2 + l3 * l3
    expanded = 9.0 * sx2 - 6.0 * sxl * sxol + sl2 * sxol * sxol
    scale = max(abs(squares), abs(expanded), 9.0 * sx2, 1e-300)
    if abs(squares - expanded) > 1e-10 * scale:
        raise AssertionError(
            f"sum-of-squares form {squares!r} disagrees with expanded form {expanded!r}"
        )
    return squares


def detA_identity(a, b, c):
    """Determinant of the cleared coefficient matrix of the proportional-rate
    system, together with its closed form (b - a c)^2.

    The system asks when the coaxial form E vanishes nontrivially; clearing
    denominators from the stationarity equations gives the matrix below,
    whose determinant is exactly (b - a c)^2 -- zero precisely when the
    ratios satisfy b = a c, which holds identically for ratios built from
    three stretches.
    """
    if min(a, b, c) <= 0.0:
        raise ValueError("ratios must be positive")
    M = np.array(
        [
            [-2.0, a, b],
            [-1.0, 2.0 * a, -a * c],
            [-c, -b, 2.0 * b * c],
        ]
    )
    return float(np.linalg.det(M)), float((b - a * c) ** 2)


# --------------------------------------------------------------------------
# tangent tensors


@dataclass(frozen=True)
class TangentPair:
    """Spatial tangent stiffness tensors for the two rate pairings."""

    c_tr: SuperSymTensor4
    c_bh: SuperSymTensor4


def tangents(model, state):
    """Spatial tangents: c_tr : d = Oldroyd[tau]/J, c_bh = c_tr + stress terms.

    Not available for the incompressible kind.
    """
    if model.kind == "inc":
        raise ValueError("tangent tensors are unsupported for the incompressible kind")
    J = state.J
    mu = model.params.mu
    ev = evaluate(model.volfun, J)
    II = outer(I3, I3)
    IsI = sym_outer(I3, I3)
    if model.kind == "mixed":
        lam = model.params.lam
        c_tr = lam * ev.chi * II + (2.0 / J) * (mu - lam * J * ev.hp) * IsI
    else:
        K = model.params.K
        c = state.c
        trc = float(np.trace(c))
        w = mu * J ** (-5.0 / 3.0)
        c_tr = (
            K * ev.chi * II
            - 2.0 * K * ev.hp * IsI
            + (2.0 / 3.0) * w * trc * IsI
            - (2.0 / 9.0) * w * trc * II
            - (4.0 / 3.0) * w * outer(dev(c), I3)  # symmetrized dyad: (dev c (x) I + I (x) dev c)/2
        )
    sigma = cauchy_stress(model, state.F).cauchy
    c_bh = c_tr + sym_outer(I3, sigma) + sym_outer(sigma, I3)
    return TangentPair(c_tr=c_tr, c_bh=c_bh)


def tangent_fd_error(model, n_motions=10, h=1e-5, seed=913):
    """Max relative error of c_tr : d against a finite-difference Oldroyd rate.

    Deterministic motions F(t) = F0 + t Fdot0; the Oldroyd rate is formed as
    tau-dot - l tau - tau l^T by central differences of the Kirchhoff stress.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_motions):
        while True:
            F0 = I3 + 0.3 * rng.standard_normal((3, 3))
            if np.linalg.det(F0) > 0.4:
                break
        Fdot = 0.5 * rng.standard_normal((3, 3))
        state, rate = rate_from_motion(F0, Fdot)
        tau_p = cauchy_stress(model, F0 + h * Fdot).kirchhoff
        tau_m = cauchy_stress(model, F0 - h * Fdot).kirchhoff
        tau_dot = (tau_p - tau_m) / (2.0 * h)
        tau = cauchy_stress(model, F0).kirchhoff
        old_fd = tau_dot - rate.l @ tau - tau @ rate.l.T
        pair = tangents(model, state)
        pred = apply4(pair.c_tr, rate.d) * state.J
        scale = max(float(np.abs(old_fd).max()), 1e-12)
        worst = max(worst, float(np.abs(pred - old_fd).max()) / scale)
    return worst


# --------------------------------------------------------------------------
# grid searches for violations


@dataclass(frozen=True)
class Witness:
    """A (state, coaxial rate) pair with the contraction value found there."""

    contraction: str
    kind: str
    volfun_label: str
    nu: float
    lams: tuple
    J: float
    direction: tuple  # diagonal rate components in the stretch frame
    value: float


def stretch_grid(n, lo=-0.75, hi=0.75):
    """Deterministic log-spaced grid of n^3 diagonal stretch triples."""
    axis = np.logspace(lo, hi, n)
    g = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)
    return g.reshape(-1, 3)


def _coaxial_split(kind, volfun, params, lams, contraction):
    """The coaxial form as M = S + c * ones(3, 3), returned as (S, c).

    Only ``c`` carries the volumetric factors (chi, h'') that explode at the
    grid corners; the entries of ``S`` stay at the shear-modulus scale. The
    split lets the minimum eigenvalue be computed without ever forming the
    ill-conditioned sum.
    """
    lams = np.asarray(lams, dtype=float)
    n = lams.shape[0]
    lam2 = lams**2
    J = np.prod(lams, axis=1)
    tab = evaluate_grid(volfun, J)
    hpp, chi = tab[:, 2], tab[:, 4]
    mu = params.mu
    MP = np.zeros((n, 3, 3))  # matrix of P
    idx = np.arange(3)
    MP[:, idx, idx] = 2.0 * lam2
    MB = 0.5 * (lam2[:, :, None] + lam2[:, None, :])  # matrix of B
    trc = lam2.sum(axis=1)
    if contraction == "hill":
        if kind == "mixed":
            S = mu * MP
            c = params.lam * chi * J
        elif kind == "voliso":
            w = mu * J ** (-2.0 / 3.0)
            S = w[:, None, None] * (MP - (4.0 / 3.0) * MB)
            c = params.K * chi * J + (2.0 / 9.0) * w * trc
        else:
            raise ValueError(f"unsupported kind {kind!r}")
    elif contraction == "csp":
        if kind == "mixed":
            w = mu / J
            S = w[:, None, None] * (MP - MB)
            c = params.lam * J * hpp + w
        elif kind == "voliso":
            w = mu * J ** (-5.0 / 3.0)
            S = w[:, None, None] * (MP - (7.0 / 3.0) * MB)
            c = params.K * J * hpp + (5.0 / 9.0) * w * trc
        else:
            raise ValueError(f"unsupported kind {kind!r}")
    else:
        raise ValueError(f"unknown contraction {contraction!r}")
    return S, c


def coaxial_matrices(kind, volfun, params, lams, contraction="hill"):
    """Batched 3x3 matrices of the contraction restricted to coaxial rates.

    ``lams`` is (N, 3); row i describes the diagonal state F = diag(lams[i]).
    The quadratic form in the diagonal rate components delta is
    delta^T M delta. Off-diagonal (non-coaxial) rate components contribute
    the separately nonnegative R term and never drive a violation, so the
    minimum eigenvalue of M over the grid decides positivity.
    """
    S, c = _coaxial_split(kind, volfun, params, lams, contraction)
    return S + c[:, None, None]


# Orthonormal columns: the spherical direction, then two vectors whose dot
# product with (1, 1, 1) is exactly zero in floating point (a - a and
# 2b - 2b cancel with no rounding). Rotating by Q confines the c * ones
# part of the coaxial form to the single (0, 0) entry with no leakage.
_TRACE_ROT = np.array(
    [
        [3.0**-0.5, 2.0**-0.5, 6.0**-0.5],
        [3.0**-0.5, -(2.0**-0.5), 6.0**-0.5],
        [3.0**-0.5, 0.0, -2.0 * 6.0**-0.5],
    ]
)


def _eig2_min(p, r, q):
    """Batched smallest eigenvalue of the symmetric 2x2 [[p, r], [r, q]]."""
    return 0.5 * (p + q) - np.hypot(0.5 * (p - q), r)


def min_coaxial_eig(kind, volfun, params, lams, contraction="hill"):
    """Minimum coaxial-form eigenvalue over the grid, with its argmin data.

    Returns (min_value, index, direction) where direction is the minimizing
    diagonal rate (unit vector).

    States where the volumetric coefficient dwarfs the shear-scale block are
    handled by deflating the spherical direction analytically; a plain
    eigendecomposition there would bury the true minimum (which lives in the
    nearly-traceless subspace) under eps * |c| rounding noise.
    """
    S, c = _coaxial_split(kind, volfun, params, lams, contraction)
    Q = _TRACE_ROT
    qu = Q.T @ np.ones(3)  # (sqrt(3)-ish, exactly 0, exactly 0)
    Sp = np.einsum("ji,njk,kl->nil", Q, S, Q)
    alpha = Sp[:, 0, 0] + c * qu[0] * qu[0]
    b1, b2 = Sp[:, 1, 0], Sp[:, 2, 0]
    p, r, q = Sp[:, 1, 1], Sp[:, 2, 1], Sp[:, 2, 2]

    s_scale = np.max(
        np.abs(np.stack([Sp[:, 0, 0], b1, b2, p, r, q], axis=-1)), axis=-1
    )
    graded = np.abs(alpha) > 1e3 * (s_scale + 1e-300)

    with np.errstate(divide="ignore", invalid="ignore"):
        den = np.where(alpha == 0.0, 1.0, alpha)
        x = _eig2_min(p - b1 * b1 / den, r - b1 * b2 / den, q - b2 * b2 / den)
        for _ in range(2):
            den = np.where(alpha == x, 1.0, alpha - x)
            x = _eig2_min(p - b1 * b1 / den, r - b1 * b2 / den, q - b2 * b2 / den)
        big = alpha + (b1 * b1 + b2 * b2) / np.where(alpha == x, 1.0, alpha - x)
        deflated = np.minimum(x, big)

    Mp = Sp.copy()
    Mp[:, 0, 0] = alpha
    vals, vecs = np.linalg.eigh(Mp)
    mins = np.where(graded, deflated, vals[:, 0])

    i = int(np.argmin(mins))
    value = float(mins[i])
    if graded[i] and value == x[i]:
        d = value - alpha[i]
        pp = p[i] - b1[i] * b1[i] / -d
        qq = q[i] - b2[i] * b2[i] / -d
        rr = r[i] - b1[i] * b2[i] / -d
        cand1 = np.array([rr, value - pp])
        cand2 = np.array([value - qq, rr])
        v2 = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
        if np.linalg.norm(v2) == 0.0:  # isotropic small block
            v2 = np.array([1.0, 0.0])
        v1 = (b1[i] * v2[0] + b2[i] * v2[1]) / d
        vp = np.array([v1, v2[0], v2[1]])
    elif graded[i]:  # the spherical branch itself is the minimum (c < 0)
        vp = np.array([1.0, 0.0, 0.0])
    else:
        vp = vecs[i, :, 0]
    direction = Q @ vp
    return value, i, direction / np.linalg.norm(direction)


_NUS_DESC = (0.4999, 0.499, 0.45, 0.4, 0.25, 0.0)
_NUS_ASC = tuple(reversed(_NUS_DESC))


def _search(contraction, kind, volfun, label, nus, grid):
    for nu in nus:
        if kind == "mixed" and nu < 0.0:
            continue
        params = params_from_mu_nu(1.0, nu)
        value, i, direction = min_coaxial_eig(kind, volfun, params, grid, contraction)
        if value < 0.0:
            lams = tuple(float(x) for x in grid[i])
            return Witness(
                contraction=contraction,
                kind=kind,
                volfun_label=label,
                nu=nu,
                lams=lams,
                J=float(np.prod(grid[i])),
                direction=tuple(float(x) for x in direction),
                value=value,
            )
    return None


def find_hill_violation(kind, volfun, label="", n=16):
    """Search a deterministic grid for a Hill-contraction violation.

    Poisson ratios are tried from the near-incompressible end downward,
    where the volumetric term dominates.
    """
    return _search("hill", kind, volfun, label, _NUS_DESC, stretch_grid(n))


def find_csp_violation(kind, volfun, label="", n=16):
    """Search a deterministic grid for a corotational-contraction violation.

    Poisson ratios are tried from nu = 0 upward, where the isochoric term
    dominates (nu = 0 is skipped for kinds that reject it).
    """
    return _search("csp", kind, volfun, label, _NUS_ASC, stretch_grid(n))


def witness_report(witness, mu=1.0):
    """Re-evaluate a grid witness through the full contraction machinery."""
    params = params_from_mu_nu(mu, witness.nu)
    vf = None
    for vid, cand in catalog().items():
        if cand.label == witness.volfun_label:
            vf = cand
            break
    if vf is None:
        vf = parse_volfun(witness.volfun_label)
    model = ModelSpec(witness.kind, vf, params)
    F = np.diag(witness.lams)
    d = np.diag(witness.direction)
    state, rate = rate_from_motion(F, d @ F)
    if witness.contraction == "hill":
        return hill_contraction(model, state, rate)
    return csp_contraction(model, state, rate)
