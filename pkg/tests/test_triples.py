import math

import numpy as np
import pytest

from aadual import triples
from aadual.errors import BoundaryPoint, DomainError, SectionUnavailable
from aadual.model import Lambda_vector, Params, angles_close
from aadual.rng import SplitMix64
from aadual.triples import (
    AdmissibleTriple,
    BuildSpec,
    build_triple,
    calF,
    F_functions,
    modW_factored,
    normal_form,
    theta_from_triple,
    torus_act,
    triple_from_zeta,
    verify_admissible,
    zeta_from_triple,
)
from conftest import interior_lambda, make_params


def random_spec(rng, params, boundary=False):
    if boundary:
        lam = [params.floor]
        for _ in range(params.n - 1):
            lam.append(lam[-1] + params.mu)
        lam = np.array(lam[::-1])
    else:
        lam = interior_lambda(rng, params)
    xi = np.array([rng.uniform(0, 2 * math.pi) for _ in range(2 * params.n)])
    return BuildSpec(lam=lam, xi=xi)


class TestScalarFunctions:
    def test_empty_products_at_n1(self):
        p = make_params(1)
        assert np.allclose(F_functions(np.array([1.7]), p), [1.0, 1.0])

    def test_positive_on_interior(self, rng):
        p = make_params(2)
        lam = interior_lambda(rng, p)
        assert np.all(F_functions(lam, p) > 0)
        assert np.all(calF(lam, p) > 0)

    def test_extended_precision_value(self):
        # n=1, mu = ln 2, u = -1, v = 0, lambda = 1.5
        import mpmath as mp

        mp.mp.dps = 50
        p = Params(n=1, mu=math.log(2.0), u=-1.0, v=0.0)
        got = calF(np.array([1.5]), p)[0]
        expect = mp.e ** (-mp.log(2)) * (mp.e**3 - mp.e**2) * mp.sinh(mp.log(2)) / mp.sinh(3)
        assert got == pytest.approx(float(expect), rel=1e-14)

    def test_high_precision_f_functions(self):
        import mpmath as mp

        mp.mp.dps = 50
        p = make_params(2)
        lam = [mp.mpf("1.8"), mp.mpf("1.1")]
        mu = mp.mpf("0.5")
        exp_f1 = (mp.sinh(lam[0] + lam[1] + mu) * mp.sinh(lam[0] - lam[1] + mu)
                  / (mp.sinh(lam[0] - lam[1]) * mp.sinh(lam[0] + lam[1])))
        got = F_functions(np.array([1.8, 1.1]), p)
        assert got[0] == pytest.approx(float(exp_f1), rel=1e-14)

    def test_gap_zeros(self):
        p = make_params(3)
        lam = np.array([2.8, 1.9 + p.mu, 1.9])  # gap_2 exactly mu
        vals = calF(lam, p)
        assert vals[2] == pytest.approx(0.0, abs=1e-14)  # index j+1 = 3
        assert vals[3 + 1] == pytest.approx(0.0, abs=1e-14)  # index n+j = 5
        assert vals[0] > 0

    def test_floor_zero(self):
        p = make_params(2)
        lam = np.array([2.0, 1.0])  # lambda_n = |u|, u < 0
        vals = calF(lam, p)
        assert vals[1] == pytest.approx(0.0, abs=1e-13)

    def test_domain_error_on_coincidence(self):
        p = make_params(2)
        with pytest.raises(DomainError):
            F_functions(np.array([1.5, 1.5]), p)


class TestFactoredModuli:
    def test_interior_matches_sqrt(self, rng):
        for n in (1, 2, 3):
            p = make_params(n)
            lam = interior_lambda(rng, p)
            got = modW_factored(lam, p)
            assert np.allclose(got.moduli, np.sqrt(calF(lam, p)), atol=1e-12)
            assert np.all(got.smooth > 0)

    def test_boundary_zero_pattern_gap(self):
        p = make_params(3)
        lam = np.array([3.0, 1.6 + p.mu, 1.6])  # facet: gap_2 = mu only
        got = modW_factored(lam, p)
        zero = np.abs(got.moduli) < 1e-14
        # components 3 (=j+1) and n+j=5 vanish, 1-based
        assert list(np.nonzero(zero)[0]) == [2, 4]
        assert np.all(got.smooth > 0)

    def test_boundary_zero_pattern_floor(self):
        p = make_params(2)
        lam = np.array([2.2, 1.0])  # lambda_n = |u|
        got = modW_factored(lam, p)
        zero = np.abs(got.moduli) < 1e-14
        assert list(np.nonzero(zero)[0]) == [1]  # only the n-th component

    def test_section_gate(self):
        p = Params(n=2, mu=0.5, u=1.0, v=0.3)  # u > 0 branch not implemented
        with pytest.raises(SectionUnavailable):
            modW_factored(np.array([2.0, 1.4]), p)


class TestBuildAndVerify:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_random_specs_admissible(self, n):
        rng = SplitMix64(100 + n)
        p = make_params(n)
        for i in range(50):
            spec = random_spec(rng, p, boundary=(i % 7 == 6))
            rep = verify_admissible(build_triple(spec, p), p)
            assert rep.passed, rep.as_dict()

    def test_vertex_support(self):
        for n in (2, 3):
            p = make_params(n)
            spec = random_spec(SplitMix64(5), p, boundary=True)
            t = build_triple(spec, p)
            support = np.nonzero(np.abs(t.wtilde) > 1e-12)[0]
            assert list(support) == [0, 2 * n - 1]
            assert verify_admissible(t, p).max_residual < 1e-10

    def test_vertex_support_n1(self):
        p = make_params(1)
        t = build_triple(BuildSpec(lam=np.array([1.0]), xi=np.zeros(2)), p)
        support = np.nonzero(np.abs(t.wtilde) > 1e-12)[0]
        assert list(support) == [1]

    def test_zero_phases_real(self, rng):
        p = make_params(3)
        t = build_triple(BuildSpec(lam=interior_lambda(rng, p), xi=np.zeros(6)), p)
        assert np.allclose(t.wtilde.imag, 0.0, atol=1e-14)
        assert np.all(t.wtilde.real >= 0)
        assert np.allclose(t.Q.imag, 0.0, atol=1e-13)
        assert np.allclose(t.Q, t.Q.T, atol=1e-13)

    def test_forced_norm_value(self):
        p = Params(n=1, mu=math.log(2.0), u=-1.0, v=0.3)
        assert triples.wnorm_target(p) == pytest.approx(0.75)

    def test_scaled_vector_norm_residual(self, rng):
        p = make_params(2)
        t = build_triple(random_spec(rng, p), p)
        bad = AdmissibleTriple(wtilde=1.01 * t.wtilde, Q=t.Q, lam=t.lam)
        rep = verify_admissible(bad, p)
        assert rep.norm == pytest.approx(0.0201 * triples.wnorm_target(p), rel=1e-10)

    def test_simple_inverse_formula(self):
        # matrix-inverse form of the moduli agrees with the explicit one
        p = make_params(3)
        lam = np.array([3.2, 2.1, 1.3])
        L = Lambda_vector(lam)
        a2 = p.alpha**2
        y2 = p.y**2
        c = 1.0 / (np.outer(L, L) - a2)
        d = (L**2 + a2 - 2 * y2 * L) / (L**2 - a2)
        simple = 0.5 * np.linalg.solve(c, 1.0 - d)
        assert np.allclose(simple, calF(lam, p), rtol=1e-9)


class TestGaugeAction:
    def test_identity_torus(self, rng):
        p = make_params(2)
        t = build_triple(random_spec(rng, p), p)
        t2 = torus_act(np.ones(2, dtype=complex), t)
        assert np.array_equal(t2.wtilde, t.wtilde)
        assert np.array_equal(t2.Q, t.Q)

    def test_moduli_invariant(self, rng):
        p = make_params(3)
        t = build_triple(random_spec(rng, p), p)
        tau = np.exp(1j * np.array([rng.uniform(0, 2 * math.pi) for _ in range(3)]))
        t2 = torus_act(tau, t)
        assert np.allclose(np.abs(t2.wtilde), np.abs(t.wtilde), atol=1e-15)
        assert np.allclose(np.abs(t2.Q), np.abs(t.Q), atol=1e-15)
        rep1 = verify_admissible(t, p)
        rep2 = verify_admissible(t2, p)
        assert abs(rep1.max_residual - rep2.max_residual) < 1e-12

    def test_normal_form_invariance(self, rng):
        p = make_params(3)
        t = build_triple(random_spec(rng, p), p)
        tau = np.exp(1j * np.array([rng.uniform(0, 2 * math.pi) for _ in range(3)]))
        f1, _ = normal_form(t, p)
        f2, _ = normal_form(torus_act(tau, t), p)
        assert np.allclose(f1.wtilde, f2.wtilde, atol=1e-12)
        assert np.allclose(f1.Q, f2.Q, atol=1e-12)

    def test_normal_form_idempotent(self, rng):
        p = make_params(3)
        t = build_triple(random_spec(rng, p), p)
        f1, _ = normal_form(t, p)
        f2, tau = normal_form(f1, p)
        assert np.allclose(tau, 1.0, atol=1e-12)
        assert np.allclose(f2.wtilde, f1.wtilde, atol=1e-13)

    def test_gauge_conditions_hold(self, rng):
        p = make_params(4)
        t = build_triple(random_spec(rng, p), p)
        fixed, _ = normal_form(t, p)
        n = 4
        assert fixed.wtilde[0].real > 0 and abs(fixed.wtilde[0].imag) < 1e-13
        assert fixed.wtilde[-1].real > 0 and abs(fixed.wtilde[-1].imag) < 1e-13
        for j in range(1, n - 1):
            entry = fixed.Q[j, n + j - 1]
            assert entry.real < 0 and abs(entry.imag) < 1e-12


class TestGlobalCoordinates:
    def test_vertex_zeta_zero(self):
        p = make_params(2)
        t = triple_from_zeta(np.zeros(2, dtype=complex), p)
        assert np.allclose(t.lam, [abs(p.u) + p.mu, abs(p.u)], atol=1e-14)
        support = np.nonzero(np.abs(t.wtilde) > 1e-12)[0]
        assert list(support) == [0, 3]
        assert verify_admissible(t, p).passed

    def test_two_path_agreement(self, rng):
        # chart composition: build with theta phases = read coordinates back
        from aadual.model import DarbouxPoint, zeta_from_darboux

        for n in (1, 2, 3):
            p = make_params(n)
            lam = interior_lambda(rng, p)
            theta = np.array([rng.uniform(0, 2 * math.pi) for _ in range(n)])
            t = build_triple(BuildSpec(lam=lam, xi=np.concatenate([theta, np.zeros(n)])), p)
            z1 = zeta_from_triple(t, p)
            z2 = zeta_from_darboux(DarbouxPoint(lam=lam, theta=theta), p)
            assert np.allclose(z1, z2, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_round_trip(self, n):
        rng = SplitMix64(300 + n)
        p = make_params(n)
        for i in range(30):
            z = np.array([0.8 * rng.complex_normal() for _ in range(n)])
            if i % 5 == 4:
                z[rng.integers(0, n)] = 0.0
            t = triple_from_zeta(z, p)
            assert verify_admissible(t, p).passed
            back = zeta_from_triple(t, p)
            assert np.allclose(back, z, atol=1e-8)

    def test_zeta_gauge_invariant(self, rng):
        p = make_params(3)
        z = np.array([0.7 * rng.complex_normal() for _ in range(3)])
        t = triple_from_zeta(z, p)
        for _ in range(100):
            tau = np.exp(1j * np.array([rng.uniform(0, 2 * math.pi) for _ in range(3)]))
            z2 = zeta_from_triple(torus_act(tau, t), p)
            assert np.allclose(z2, z, atol=1e-10)


class TestAngles:
    def test_recovers_build_phases(self, rng):
        p = make_params(3)
        lam = interior_lambda(rng, p)
        theta = np.array([rng.uniform(0, 2 * math.pi) for _ in range(3)])
        t = build_triple(BuildSpec(lam=lam, xi=np.concatenate([theta, np.zeros(3)])), p)
        assert angles_close(theta_from_triple(t), theta, tol=1e-12)

    def test_torus_invariant(self, rng):
        p = make_params(2)
        t = build_triple(random_spec(rng, p), p)
        tau = np.exp(1j * np.array([1.2, 2.3]))
        assert angles_close(theta_from_triple(torus_act(tau, t)),
                            theta_from_triple(t), tol=1e-12)

    def test_boundary_raises(self):
        p = make_params(2)
        t = triple_from_zeta(np.array([0.0, 0.4 + 0.2j]), p)
        with pytest.raises(BoundaryPoint):
            theta_from_triple(t)


class TestSerialization:
    def test_round_trip(self, rng):
        p = make_params(2)
        t = build_triple(random_spec(rng, p), p)
        t2 = AdmissibleTriple.from_json(t.to_json(), p)
        assert np.allclose(t2.wtilde, t.wtilde, atol=1e-15)
        assert np.allclose(t2.Q, t.Q, atol=1e-15)

    def test_loader_rejects_corrupted(self, rng):
        p = make_params(2)
        t = build_triple(random_spec(rng, p), p)
        bad = AdmissibleTriple(wtilde=t.wtilde * 1.05, Q=t.Q, lam=t.lam)
        with pytest.raises(DomainError):
            AdmissibleTriple.from_json(bad.to_json(), p)


class TestFullPhaseAction:
    def test_any_phases_stay_admissible(self, rng):
        from aadual.triples import full_phase_act

        p = make_params(2)
        t = build_triple(random_spec(rng, p), p)
        xi = np.array([rng.uniform(0, 2 * math.pi) for _ in range(4)])
        t2 = full_phase_act(xi, t)
        assert verify_admissible(t2, p).passed
        assert np.allclose(np.abs(t2.wtilde), np.abs(t.wtilde), atol=1e-15)
