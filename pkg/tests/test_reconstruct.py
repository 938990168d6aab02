import math

import numpy as np
import pytest

from aadual.errors import DomainError, NotQuasiDiagonal
from aadual.model import Params, lambda_blocks
from aadual.reconstruct import (
    GroupPoint,
    I_matrix,
    check_constraints,
    eigen_lambda,
    gauge_to_M1,
    hat_actions,
    momentum_sigma,
    reconstruct_g,
    trace_family_k,
    triple_from_g,
)
from aadual.rng import SplitMix64
from aadual.triples import BuildSpec, build_triple, normal_form, triple_from_zeta
from conftest import interior_lambda, make_params


def random_triple(rng, params):
    lam = interior_lambda(rng, params)
    xi = np.array([rng.uniform(0, 2 * math.pi) for _ in range(2 * params.n)])
    return build_triple(BuildSpec(lam=lam, xi=xi), params)


def random_block_unitary(rng, n, fix_vector=False):
    """Element of the block-diagonal unitary gauge group, det 1."""
    blocks = []
    for which in range(2):
        m = np.array([[rng.complex_normal() for _ in range(n)] for _ in range(n)])
        q, r = np.linalg.qr(m)
        q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
        if fix_vector and which == 0 and n > 1:
            # stabilize e_n: only act on the first n-1 slots
            q2 = np.eye(n, dtype=complex)
            sub = np.array([[rng.complex_normal() for _ in range(n - 1)] for _ in range(n - 1)])
            qq, rr = np.linalg.qr(sub)
            q2[: n - 1, : n - 1] = qq @ np.diag(np.diag(rr) / np.abs(np.diag(rr)))
            q = q2
        if fix_vector and which == 0 and n == 1:
            q = np.eye(1, dtype=complex)
        blocks.append(q)
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = blocks[0]
    out[n:, n:] = blocks[1]
    det = np.linalg.det(out)
    out[n:, n:] = out[n:, n:] / det ** (1.0 / n)
    return out


class TestMomentum:
    def test_n1_log2(self):
        p = Params(n=1, mu=math.log(2.0), u=-1.0, v=0.3)
        mom = momentum_sigma(p)
        assert abs(np.linalg.norm(mom.vhat) ** 2 - 0.75) < 1e-14
        assert np.allclose(mom.sigma, np.eye(1), atol=1e-14)

    def test_n2_diagonal(self):
        p = make_params(2)
        mom = momentum_sigma(p)
        a = p.alpha
        r2 = a**2 * (a**-4 - 1)
        assert np.allclose(np.diag(mom.sigma).real, [a, math.sqrt(a**2 + r2)])

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_gram_identity(self, n):
        p = make_params(n)
        mom = momentum_sigma(p)
        gram = mom.sigma @ mom.sigma.conj().T
        target = p.alpha**2 * np.eye(n) + np.outer(mom.vhat, mom.vhat.conj())
        assert np.linalg.norm(gram - target) < 1e-12
        assert abs(np.linalg.norm(mom.vhat) ** 2 - p.alpha**2 * (p.alpha ** (-2 * n) - 1)) < 1e-12


class TestReconstruction:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_constraints_hold(self, n):
        rng = SplitMix64(40 + n)
        p = make_params(n)
        t = random_triple(rng, p)
        gp = reconstruct_g(t, p)
        assert abs(np.linalg.det(gp.g) - 1) < 1e-10
        report = check_constraints(gp, p)
        assert report.in_M0, report.as_dict()

    def test_vertex_spectrum(self):
        p = make_params(2)
        gp = reconstruct_g(triple_from_zeta(np.zeros(2, dtype=complex), p), p)
        lam = eigen_lambda(gp, p)
        assert np.allclose(lam, [abs(p.u) + p.mu, abs(p.u)], atol=1e-10)

    def test_triple_round_trip(self, rng):
        p = make_params(3)
        t = random_triple(rng, p)
        gp = reconstruct_g(t, p)
        t2 = triple_from_g(gp, p)
        assert np.allclose(t2.wtilde, t.wtilde, atol=1e-8)
        assert np.allclose(t2.Q, t.Q, atol=1e-8)
        assert np.allclose(t2.lam, t.lam, atol=1e-10)

    def test_left_isotropy_ambiguity(self, rng):
        # alternative reconstructions differ by a momentum-fixing left factor
        p = make_params(2)
        t = random_triple(rng, p)
        gp = reconstruct_g(t, p)
        eta = random_block_unitary(rng, 2, fix_vector=True)
        mom = momentum_sigma(p)
        assert np.allclose(eta @ mom.what, mom.what, atol=1e-12)
        gp2 = GroupPoint.from_matrix(eta @ gp.g)
        t2 = triple_from_g(gp2, p)
        assert np.allclose(t2.wtilde, t.wtilde, atol=1e-9)
        assert np.allclose(t2.Q, t.Q, atol=1e-9)

    def test_identity_fails_block_check(self):
        p = make_params(2)
        gp = GroupPoint.from_matrix(np.eye(4, dtype=complex))
        report = check_constraints(gp, p)
        assert not report.in_M0
        assert report.right_block > 1e-2

    def test_gauge_transformed_still_passes(self, rng):
        p = make_params(2)
        gp = reconstruct_g(random_triple(rng, p), p)
        # left factor must commute with the momentum Gram data
        eta_l = random_block_unitary(rng, 2, fix_vector=True)
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        t1 = np.diag([phase, phase, 1 / phase, 1 / phase])
        eta_r = random_block_unitary(rng, 2)
        g2 = t1 @ eta_l @ gp.g @ eta_r.conj().T
        report = check_constraints(GroupPoint.from_matrix(g2), p)
        assert report.in_M0, report.as_dict()


class TestGaugeTransport:
    def test_already_quasi_diagonal(self, rng):
        p = make_params(2)
        gp = reconstruct_g(random_triple(rng, p), p)
        gp1, eta = gauge_to_M1(gp, p)
        chi0 = gp.b[:2, 2:]
        chi1 = gp1.b[:2, 2:]
        assert np.allclose(np.diag(chi1).real, np.diag(chi0).real, atol=1e-10)
        assert abs(np.linalg.det(eta) - 1) < 1e-10

    def test_recovers_quasi_diagonal_from_gauged(self, rng):
        p = make_params(3)
        gp = reconstruct_g(random_triple(rng, p), p)
        beta0 = np.diag(gp.b[:3, 3:]).real
        eta_r = random_block_unitary(rng, 3)
        gauged = GroupPoint.from_matrix(gp.g @ eta_r.conj().T)
        gp1, _ = gauge_to_M1(gauged, p)
        beta1 = np.diag(gp1.b[:3, 3:]).real
        assert np.allclose(np.sort(beta1), np.sort(beta0), atol=1e-9)
        assert check_constraints(gp1, p).in_M0

    def test_beta_matches_blocks(self, rng):
        p = make_params(2)
        gp = reconstruct_g(random_triple(rng, p), p)
        gp1, _ = gauge_to_M1(gp, p)
        lam = eigen_lambda(gp1, p)
        expected = lambda_blocks(lam, p).beta
        assert np.allclose(np.diag(gp1.b[:2, 2:]).real, expected, atol=1e-9)

    def test_not_quasi_diagonal_detected(self, rng):
        p = make_params(2)
        gp = reconstruct_g(random_triple(rng, p), p)
        eta_r = random_block_unitary(rng, 2)
        gauged = GroupPoint.from_matrix(gp.g @ eta_r.conj().T)
        with pytest.raises(NotQuasiDiagonal):
            triple_from_g(gauged, p)


class TestEigenLambda:
    def test_recovers_positions(self, rng):
        p = make_params(3)
        t = random_triple(rng, p)
        gp = reconstruct_g(t, p)
        assert np.allclose(eigen_lambda(gp, p), t.lam, atol=1e-10)

    def test_gauge_invariance(self, rng):
        p = make_params(2)
        gp = reconstruct_g(random_triple(rng, p), p)
        eta_l = random_block_unitary(rng, 2, fix_vector=True)
        eta_r = random_block_unitary(rng, 2)
        g2 = eta_l @ gp.g @ eta_r.conj().T
        assert np.allclose(eigen_lambda(GroupPoint.from_matrix(g2), p),
                           eigen_lambda(gp, p), atol=1e-10)


class TestResidualGauge:
    def test_torus_right_action_transforms_triple(self, rng):
        # delta in the stabilizer torus conjugates the triple data
        p = make_params(2)
        gp = reconstruct_g(random_triple(rng, p), p)
        d = np.exp(1j * np.array([0.7, -0.7]))  # product of squares = 1
        delta = np.diag(np.concatenate([d, d]))
        gp2 = GroupPoint.from_matrix(gp.g @ delta.conj().T)
        t1 = triple_from_g(gp, p)
        t2 = triple_from_g(gp2, p)
        tau = np.concatenate([d, d])  # right action by delta = torus action on the triple
        assert np.allclose(t2.wtilde, tau * t1.wtilde, atol=1e-9)
        f1, _ = normal_form(t1, p)
        f2, _ = normal_form(t2, p)
        assert np.allclose(f1.wtilde, f2.wtilde, atol=1e-9)


class TestHatActions:
    def test_delta_form_recovers_q(self):
        # k built from the explicit double-block rotation at given angles
        n = 2
        p = make_params(n)
        q = np.array([1.1, 0.6])
        gamma = np.diag(np.cos(q))
        sigma = np.diag(np.sin(q))
        delta = np.block([[gamma, 1j * sigma], [1j * sigma, gamma]])
        rng = SplitMix64(11)
        kappa1 = random_block_unitary(rng, n)
        kappa2 = random_block_unitary(rng, n)
        k = kappa1 @ delta @ kappa2
        w = k.conj().T @ I_matrix(n) @ k @ I_matrix(n)
        ev = np.linalg.eigvals(w)
        phases = np.sort(np.abs(np.angle(ev)))[::-1][::2] / 2
        assert np.allclose(np.sort(phases)[::-1], np.sort(q)[::-1], atol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_trace_identity_and_domain(self, n):
        rng = SplitMix64(60 + n)
        p = make_params(n)
        z = np.array([0.7 * rng.complex_normal() for _ in range(n)])
        gp = reconstruct_g(triple_from_zeta(z, p), p)
        q, hat_lam = hat_actions(gp, p)
        for j in range(1, n + 1):
            tk = trace_family_k(gp, j)
            assert tk == pytest.approx(float(np.sum(np.cos(2 * j * q))), abs=1e-10)
        # hat positions live in the closed hat domain
        assert p.s - hat_lam[0] >= -1e-10
        if n > 1:
            assert np.all(hat_lam[:-1] - hat_lam[1:] - p.mu >= -1e-10)

    def test_zeta_input_routing(self):
        p = make_params(2)
        z = np.array([0.5 + 0.1j, -0.3 + 0.2j])
        q1, h1 = hat_actions(z, p)
        q2, h2 = hat_actions(reconstruct_g(triple_from_zeta(z, p), p), p)
        assert np.allclose(q1, q2, atol=1e-12)
        assert np.allclose(h1, h2, atol=1e-12)


class TestGroupPointSerialization:
    def test_round_trip_with_membership(self, rng):
        p = make_params(2)
        gp = reconstruct_g(random_triple(rng, p), p)
        gp2 = GroupPoint.from_json(gp.to_json(), params=p, claims_m0=True)
        assert np.allclose(gp2.g, gp.g, atol=1e-15)

    def test_loader_rejects_non_member(self):
        p = make_params(2)
        gp = GroupPoint.from_matrix(np.eye(4, dtype=complex))
        with pytest.raises(DomainError):
            GroupPoint.from_json(gp.to_json(), params=p, claims_m0=True)
