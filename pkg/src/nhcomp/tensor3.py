"""Small fixed-size tensor algebra in three dimensions.

Second-order tensors are plain ``(3, 3)`` float ndarrays. Symmetric tensors
are ndarrays that happen to be symmetric; nothing here stores packed 6-vectors
except the Voigt mapping layer at the bottom of the module. Fourth-order
tensors with full (major plus both minor) symmetry get a thin wrapper class,
:class:`SuperSymTensor4`, that symmetrizes on construction so downstream code
never has to reason about index ordering.

The one genuinely delicate operation is :func:`spectral`: eigenvalues of a
symmetric tensor must be *clustered* before eigenprojections are formed,
because the projection formulas change discontinuously with the number of
distinct eigenvalues. Clustering is controlled by an explicit relative
tolerance rather than whatever ``numpy.linalg.eigh`` happens to return.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

I3 = np.eye(3)

__all__ = [
    "I3",
    "SpectralDecomp",
    "SuperSymTensor4",
    "sym",
    "skew",
    "ddot",
    "fnorm",
    "dev",
    "spectral",
    "coaxial_orthogonal_split",
    "sym_outer",
    "outer",
    "apply4",
    "quad_form",
    "voigt_strain_vec",
    "voigt_stress_vec",
    "voigt_mat",
    "voigt_roundtrip",
]


def sym(A):
    """Symmetric part ``(A + A.T)/2``."""
    return 0.5 * (A + A.T)


def skew(A):
    """Skew-symmetric part ``(A - A.T)/2``."""
    return 0.5 * (A - A.T)


def ddot(A, B):
    """Double contraction A : B = A_ij B_ij."""
    return float(np.tensordot(A, B, axes=2))


def fnorm(A):
    """Frobenius norm sqrt(A : A)."""
    return float(np.linalg.norm(A))


def dev(A):
    """Deviatoric part ``A - (tr A / 3) I``."""
    return A - (np.trace(A) / 3.0) * I3


@dataclass(frozen=True)
class SpectralDecomp:
    """Spectral decomposition of a symmetric 3x3 tensor.

    Attributes
    ----------
    m : int
        Number of distinct eigenvalues after clustering (1, 2 or 3).
    values : tuple of float
        The ``m`` distinct eigenvalues, ascending.
    mults : tuple of int
        Multiplicities, summing to 3.
    projections : tuple of ndarray
        Orthogonal eigenprojections; ``sum(projections) = I`` and
        ``sum(values[i] * projections[i])`` reconstructs the input.
    """

    m: int
    values: tuple
    mults: tuple
    projections: tuple

    def reconstruct(self):
        out = np.zeros((3, 3))
        for s, P in zip(self.values, self.projections):
            out += s * P
        return out


def _cluster(vals, rel_tol):
    """Group ascending eigenvalues whose gaps fall below the tolerance.

    Two eigenvalues belong to one cluster when
    ``|s_a - s_b| <= rel_tol * max(1, |s_a|, |s_b|)``. Returns a list of
    index lists.
    """
    groups = [[0]]
    for k in (1, 2):
        prev = vals[groups[-1][0]]
        cur = vals[k]
        if abs(cur - prev) <= rel_tol * max(1.0, abs(cur), abs(prev)):
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def spectral(S, rel_tol=1e-8):
    """Eigenvalues and eigenprojections of a symmetric tensor.

    Parameters
    ----------
    S : (3, 3) ndarray
        Symmetric input.
    rel_tol : float
        Relative clustering tolerance for deciding eigenvalue multiplicity.

    Notes
    -----
    For a repeated pair the second projection is built as the complement
    ``I - P_isolated`` instead of summing the two near-degenerate eigenvector
    dyads, whose mutual orthogonality is numerically unreliable. For a fully
    clustered spectrum the single projection is ``I``.
    """
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    Ssym = sym(np.asarray(S, dtype=float))
    vals, vecs = np.linalg.eigh(Ssym)
    groups = _cluster(vals, rel_tol)
    m = len(groups)

    if m == 1:
        values = (float(np.mean(vals)),)
        return SpectralDecomp(1, values, (3,), (I3.copy(),))

    if m == 3:
        projs = tuple(np.outer(vecs[:, k], vecs[:, k]) for k in range(3))
        return SpectralDecomp(3, tuple(float(v) for v in vals), (1, 1, 1), projs)

    # m == 2: one isolated eigenvalue, one repeated pair. Build the isolated
    # dyad directly and take the complement for the pair.
    if len(groups[0]) == 1:
        iso_group, pair_group = groups[0], groups[1]
    else:
        iso_group, pair_group = groups[1], groups[0]
    k_iso = iso_group[0]
    P_iso = np.outer(vecs[:, k_iso], vecs[:, k_iso])
    P_pair = I3 - P_iso
    s_iso = float(vals[k_iso])
    s_pair = float(np.mean([vals[k] for k in pair_group]))
    if s_iso < s_pair:
        return SpectralDecomp(2, (s_iso, s_pair), (1, 2), (P_iso, P_pair))
    return SpectralDecomp(2, (s_pair, s_iso), (2, 1), (P_pair, P_iso))


def coaxial_orthogonal_split(S, H, rel_tol=1e-8):
    """Split H into parts coaxial and orthogonal to the eigenbasis of S.

    Returns ``(Hhat, Htilde)`` with ``Hhat = sum_i S_i H S_i`` and
    ``Htilde = sum_{i != j} S_i H S_j``; the parts satisfy
    ``Hhat + Htilde = H`` and ``Hhat : Htilde = 0``.

    ``S`` may be a symmetric tensor or an already-computed
    :class:`SpectralDecomp` (useful when the same basis splits many tensors).
    """
    dec = S if isinstance(S, SpectralDecomp) else spectral(S, rel_tol)
    Hs = sym(np.asarray(H, dtype=float))
    Hhat = np.zeros((3, 3))
    for P in dec.projections:
        Hhat += P @ Hs @ P
    return Hhat, Hs - Hhat


class SuperSymTensor4:
    """Dense fourth-order tensor with major and both minor symmetries.

    The 81 components are stored as a ``(3, 3, 3, 3)`` ndarray and the full
    symmetry group is enforced by averaging at construction time, so any
    arithmetic that produces an asymmetric intermediate is repaired here.
    """

    __slots__ = ("a",)

    def __init__(self, a):
        a = np.asarray(a, dtype=float).reshape(3, 3, 3, 3)
        a = 0.5 * (a + a.transpose(1, 0, 2, 3))
        a = 0.5 * (a + a.transpose(0, 1, 3, 2))
        a = 0.5 * (a + a.transpose(2, 3, 0, 1))
        self.a = a

    def __add__(self, other):
        return SuperSymTensor4(self.a + other.a)

    def __sub__(self, other):
        return SuperSymTensor4(self.a - other.a)

    def __mul__(self, scalar):
        return SuperSymTensor4(self.a * scalar)

    __rmul__ = __mul__

    def symmetry_error(self):
        """Max deviation from each of the three defining symmetries (is 0)."""
        a = self.a
        return max(
            float(np.max(np.abs(a - a.transpose(1, 0, 2, 3)))),
            float(np.max(np.abs(a - a.transpose(0, 1, 3, 2)))),
            float(np.max(np.abs(a - a.transpose(2, 3, 0, 1)))),
        )


def sym_outer(A, B):
    """Symmetrized tensor product with action (A o B) : X = A sym(X) B^T.

    Componentwise ``(A o B)_ijkl = (A_ik B_jl + A_il B_jk) / 2`` before the
    constructor's full symmetrization. For symmetric A, B the quadratic form
    ``H : (A o B) : H`` equals ``H : (A sym(H) B)``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    core = 0.5 * (np.einsum("ik,jl->ijkl", A, B) + np.einsum("il,jk->ijkl", A, B))
    return SuperSymTensor4(core)


def outer(A, B):
    """Plain dyadic product (A x B)_ijkl = A_ij B_kl, supersymmetrized.

    Note the constructor averages in the major transpose, so for A != B this
    returns ``(A x B + B x A) / 2``; callers building tangent tensors pass the
    symmetric combinations they actually mean (for example ``outer(c, I3)``
    already yields the (c x I + I x c)/2 pairing).
    """
    return SuperSymTensor4(np.einsum("ij,kl->ijkl", np.asarray(A, float), np.asarray(B, float)))


def apply4(X4, H):
    """Contraction (X : H)_ij = X_ijkl H_kl."""
    return np.einsum("ijkl,kl->ij", X4.a, np.asarray(H, dtype=float))


def quad_form(X4, H):
    """Quadratic form H : X : H."""
    H = np.asarray(H, dtype=float)
    return float(np.einsum("ij,ijkl,kl->", H, X4.a, H))


# --- Voigt mapping -----------------------------------------------------------
#
# Index pair order (11, 22, 33, 23, 13, 12). Strain-kind vectors double the
# shear entries, stress-kind vectors do not, and the 6x6 matrix of a
# supersymmetric fourth-order tensor carries no extra factors; the identity
#     vec_strain(H)^T  mat(X)  vec_strain(H)  ==  H : X : H
# then holds exactly.

_VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


def voigt_strain_vec(H):
    """6-vector of a symmetric tensor with doubled shear components."""
    H = sym(np.asarray(H, dtype=float))
    return np.array([H[0, 0], H[1, 1], H[2, 2], 2 * H[1, 2], 2 * H[0, 2], 2 * H[0, 1]])


def voigt_stress_vec(H):
    """6-vector of a symmetric tensor with shear components as stored."""
    H = sym(np.asarray(H, dtype=float))
    return np.array([H[0, 0], H[1, 1], H[2, 2], H[1, 2], H[0, 2], H[0, 1]])


def voigt_mat(X4):
    """6x6 matrix of a supersymmetric fourth-order tensor."""
    M = np.empty((6, 6))
    for I, (i, j) in enumerate(_VOIGT_PAIRS):
        for J, (k, l) in enumerate(_VOIGT_PAIRS):
            M[I, J] = X4.a[i, j, k, l]
    return M


def voigt_roundtrip(X4, H):
    """Evaluate H : X : H along the tensor path and the matrix-vector path.

    Returns the pair ``(tensor_value, matrix_value)``; the two agree to
    rounding for any supersymmetric X.
    """
    t = quad_form(X4, H)
    v = voigt_strain_vec(H)
    m = float(v @ voigt_mat(X4) @ v)
    return t, m
