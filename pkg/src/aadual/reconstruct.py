"""Group-level realization of the constraint surface.

From an admissible triple we rebuild a representative g = k b of
SL(2n, C) satisfying both momentum constraints, transport arbitrary
constraint-surface elements into the quasi-diagonal slice, read off the
positions lambda from the spectrum of b b^dagger, and extract the dual
action variables hat_lambda from the eigenphases of k^dagger I k I.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import algebra
from .errors import (
    DegenerateSingularValues,
    DomainError,
    NotQuasiDiagonal,
    ReconstructionFailure,
    SpectrumOffCircle,
)
from .model import Params, lambda_blocks
from .triples import AdmissibleTriple, triple_from_zeta


def I_matrix(n: int) -> np.ndarray:
    return np.diag([1.0] * n + [-1.0] * n).astype(complex)


@dataclass(frozen=True)
class MomentumData:
    """Momentum constants: sigma upper triangular with sigma sigma^dagger =
    alpha^2 + vhat vhat^dagger, and the extended vector what = (vhat, 0)."""

    sigma: np.ndarray
    vhat: np.ndarray
    what: np.ndarray


def momentum_sigma(params: Params) -> MomentumData:
    """Deterministic momentum data with vhat concentrated on the last slot.

    With vhat = r e_n the Gram matrix alpha^2 1 + vhat vhat^dagger is
    diagonal, so its upper Cholesky factor is the explicit diagonal
    sigma = diag(alpha, ..., alpha, alpha^{1-n}).
    """
    n = params.n
    a = params.alpha
    r = a * math.sqrt(a ** (-2 * n) - 1.0)
    vhat = np.zeros(n, dtype=complex)
    vhat[n - 1] = r
    sigma = np.diag([a] * (n - 1) + [a ** (1 - n)]).astype(complex)
    what = np.concatenate([vhat, np.zeros(n, dtype=complex)])
    return MomentumData(sigma=sigma, vhat=vhat, what=what)


@dataclass(frozen=True)
class GroupPoint:
    """Element of SL(2n,C) with both triangular factorizations cached."""

    g: np.ndarray
    k: np.ndarray
    b: np.ndarray
    b_L: np.ndarray
    k_R: np.ndarray

    @classmethod
    def from_matrix(cls, g: np.ndarray) -> "GroupPoint":
        g = np.asarray(g, dtype=complex)
        k, b = algebra.iwasawa_decompose(g)
        b_l, k_r = algebra.iwasawa_right(g)
        return cls(g=g, k=k, b=b, b_L=b_l, k_R=k_r)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def to_json(self) -> str:
        return json.dumps(
            [[[float(z.real), float(z.imag)] for z in row] for row in self.g]
        )

    @classmethod
    def from_json(cls, text: str, params: Params | None = None,
                  claims_m0: bool = False, tol: float = 1e-9) -> "GroupPoint":
        g = np.array([[complex(re, im) for re, im in row] for row in json.loads(text)])
        gp = cls.from_matrix(g)
        if claims_m0:
            if params is None:
                raise ValueError("params required to check constraint membership")
            report = check_constraints(gp, params)
            if not report.in_M0:
                raise DomainError(
                    f"loaded point fails constraints: max residual {report.max_residual:.3e}"
                )
        return gp


def reconstruct_g(triple: AdmissibleTriple, params: Params) -> GroupPoint:
    """Rebuild a constraint-surface representative from an admissible triple.

    The reflection rho Q rho is split into its +1/-1 eigenspaces with a
    deterministic phase gauge, and the residual left unitary is fixed by a
    Householder map sending the rotated vector onto the momentum vector.
    The result is unique up to the isotropy of that vector, which acts
    trivially on everything the library computes downstream.
    """
    n = params.n
    blocks = lambda_blocks(triple.lam, params)
    rho = blocks.rho.astype(complex)
    mirror = rho @ triple.Q @ rho
    vals, vecs = algebra.hermitian_eigensystem(0.5 * (mirror + mirror.conj().T))
    if vals[n - 1] < 1e-8 or vals[n] > -1e-8:
        raise ReconstructionFailure(
            f"ambiguous eigenvalue split of the reflection: {vals}"
        )
    kappa = vecs.conj().T
    kappa = kappa * np.linalg.det(kappa) ** (-1.0 / (2 * n))
    rotated = kappa @ rho @ triple.wtilde
    if np.linalg.norm(rotated[n:]) > 1e-8 * max(1.0, np.linalg.norm(rotated)):
        raise ReconstructionFailure("rotated vector leaks out of the +1 eigenspace")
    target = momentum_sigma(params)
    upper = rotated[:n]
    # complex Householder sending `upper` to r e_n, then a diagonal phase fix
    phase = upper[-1] / abs(upper[-1]) if abs(upper[-1]) > 1e-14 else 1.0 + 0.0j
    reflector = upper + phase * np.linalg.norm(upper) * np.eye(n, dtype=complex)[:, -1]
    if np.linalg.norm(reflector) < 1e-14:
        house = np.eye(n, dtype=complex)
    else:
        house = np.eye(n, dtype=complex) - 2.0 * np.outer(
            reflector, reflector.conj()
        ) / float(np.real(reflector.conj() @ reflector))
    fix = np.eye(n, dtype=complex)
    fix[-1, -1] = -np.conj(phase)
    a_block = fix @ house
    b_block = np.eye(n, dtype=complex)
    b_block[-1, -1] = 1.0 / np.linalg.det(a_block)
    k_plus = np.zeros((2 * n, 2 * n), dtype=complex)
    k_plus[:n, :n] = a_block
    k_plus[n:, n:] = b_block
    k = k_plus @ kappa
    g = k @ blocks.b
    return GroupPoint.from_matrix(g)


@dataclass(frozen=True)
class ConstraintReport:
    left_block: float  # b_L deviation from its prescribed block form
    right_block: float  # b deviation from its prescribed block form
    quadratic: float  # momentum identity residual (relative)
    tol: float = 1e-9

    @property
    def max_residual(self) -> float:
        return max(self.left_block, self.right_block, self.quadratic)

    @property
    def in_M0(self) -> bool:
        return self.max_residual <= self.tol

    def as_dict(self) -> dict:
        return {
            "left_block": self.left_block,
            "right_block": self.right_block,
            "quadratic": self.quadratic,
            "in_M0": self.in_M0,
        }


def check_constraints(gp: GroupPoint, params: Params) -> ConstraintReport:
    """Residuals of both momentum constraints for a group element."""
    n = params.n
    y = params.y
    x = params.x
    mom = momentum_sigma(params)
    b_l = gp.b_L
    left = math.hypot(
        float(np.linalg.norm(b_l[:n, :n] - mom.sigma / y)),
        float(np.linalg.norm(b_l[n:, n:] - y * np.eye(n))),
    ) / max(1.0, float(np.linalg.norm(b_l)))
    b = gp.b
    right = math.hypot(
        float(np.linalg.norm(b[:n, :n] - x * np.eye(n))),
        float(np.linalg.norm(b[n:, n:] - np.eye(n) / x)),
    ) / max(1.0, float(np.linalg.norm(b)))
    gg = gp.g @ gp.g.conj().T
    imat = I_matrix(n)
    lhs = y**2 * gg - 0.5 * gg @ (np.eye(2 * n) - imat) @ gg
    rhs = 0.5 * params.alpha**2 * (np.eye(2 * n) + imat) + np.outer(
        mom.what, mom.what.conj()
    )
    quad = float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(lhs)))
    return ConstraintReport(left_block=left, right_block=right, quadratic=quad)


def gauge_to_M1(gp: GroupPoint, params: Params) -> tuple[GroupPoint, np.ndarray]:
    """Right-gauge a constraint-surface element into the quasi-diagonal slice.

    The SVD of the off-diagonal block of b supplies the unique rotation;
    a scalar phase puts the gauge element into the determinant-one group.
    Degenerate or vanishing singular values cannot occur on the implemented
    parameter branch and are reported as inconsistent input.
    """
    n = params.n
    chi = gp.b[:n, n:]
    w, beta, vh = np.linalg.svd(chi)
    gaps = np.diff(-beta)
    if beta[-1] < 1e-10 or (n > 1 and float(np.min(np.abs(gaps))) < 1e-10):
        raise DegenerateSingularValues(f"singular values too close or zero: {beta}")
    det_product = np.linalg.det(w) * np.linalg.det(vh.conj().T)
    phi = np.angle(det_product) / (2 * n)
    eta = np.zeros((2 * n, 2 * n), dtype=complex)
    eta[:n, :n] = np.exp(1j * phi) * w.conj().T
    eta[n:, n:] = np.exp(1j * phi) * vh
    g1 = gp.g @ eta.conj().T  # eta^{-1} = eta^dagger
    return GroupPoint.from_matrix(g1), eta


def eigen_lambda(gp: GroupPoint, params: Params) -> np.ndarray:
    """Positions from the spectrum {e^{+-2 lambda_i}} of b b^dagger."""
    bb = gp.b @ gp.b.conj().T
    vals = np.linalg.eigvalsh(0.5 * (bb + bb.conj().T))
    vals = np.sort(vals)[::-1]
    n = params.n
    return 0.5 * np.log(vals[:n])


def triple_from_g(gp: GroupPoint, params: Params) -> AdmissibleTriple:
    """Triple data of a quasi-diagonal representative."""
    n = params.n
    b = gp.b
    chi = b[:n, n:]
    off = np.linalg.norm(chi - np.diag(np.diag(chi))) + np.linalg.norm(
        np.diag(chi).imag
    )
    if off > 1e-8 * max(1.0, float(np.linalg.norm(chi))):
        raise NotQuasiDiagonal("off-diagonal block of b is not real diagonal")
    beta = np.diag(chi).real
    lam = 0.5 * np.arccosh(np.maximum(np.cosh(2.0 * params.v) + beta**2 / 2.0, 1.0))
    blocks = lambda_blocks(lam, params)
    rho = blocks.rho.astype(complex)
    imat = I_matrix(n)
    mom = momentum_sigma(params)
    q = rho @ gp.k.conj().T @ imat @ gp.k @ rho
    wt = rho @ gp.k.conj().T @ mom.what
    return AdmissibleTriple(wtilde=wt, Q=q, lam=lam)


def hat_actions(source, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """Dual actions: eigenphase data (q, hat_lambda) of k^dagger I k I.

    Accepts a GroupPoint on the constraint surface or a zeta vector, which
    is routed through the explicit triple and the reconstruction.
    """
    if isinstance(source, GroupPoint):
        gp = source
    else:
        gp = reconstruct_g(triple_from_zeta(np.asarray(source, dtype=complex), params), params)
    n = params.n
    imat = I_matrix(n)
    w = gp.k.conj().T @ imat @ gp.k @ imat
    eigvals = np.linalg.eigvals(w)
    off = float(np.max(np.abs(np.abs(eigvals) - 1.0)))
    if off > 1e-9:
        raise SpectrumOffCircle(f"eigenvalue modulus deviates from 1 by {off:.3e}")
    phases = np.sort(np.abs(np.angle(eigvals)))[::-1]
    q = phases[::2] / 2.0
    q = np.sort(q)[::-1]
    hat_lam = np.log(np.sin(q))
    return q, np.sort(hat_lam)[::-1]


def trace_family_b(gp: GroupPoint, j: int) -> float:
    """Half trace of (b b^dagger)^j."""
    bb = gp.b @ gp.b.conj().T
    return 0.5 * float(np.real(np.trace(np.linalg.matrix_power(bb, j))))


def trace_family_k(gp: GroupPoint, j: int) -> float:
    """Half trace of (k^dagger I k I)^j."""
    n = gp.dim // 2
    imat = I_matrix(n)
    w = gp.k.conj().T @ imat @ gp.k @ imat
    return 0.5 * float(np.real(np.trace(np.linalg.matrix_power(w, j))))
