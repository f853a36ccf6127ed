import math
import warnings

import numpy as np
import pytest

from lempert_lab.complex_core import DomainError, mobius_factor
from lempert_lab.discs import Competitor, constant_disc, restrict_competitor
from lempert_lab.domains import ContainmentCertificate, euclidean_ball, polydisc, punctured_disc, unit_disc
from lempert_lab.lempert import (
    OptimizerConfig,
    PoleSchedule,
    PoleSpec,
    UnconvergedWarning,
    estimate_lempert,
    lempert_disc_oracle,
    lempert_product_oracle,
    lempert_punctured_oracle,
    objective,
    punctured_oracle_details,
    single_pole,
)
from lempert_lab.lempert.oracles import lift

CERT = ContainmentCertificate(True, 0.1, "coefficient_bound")
FAST = OptimizerConfig(restarts=2, max_iter=300)


def _comp(nodes):
    return Competitor(constant_disc(0.0), [0.0], tuple((l, i) for i, l in enumerate(nodes)), CERT)


class TestObjective:
    def test_single_node(self):
        assert objective(_comp([0.5]), single_pole(0.1)) == 0.5

    def test_product_of_moduli(self):
        spec = PoleSpec(np.array([[0.1], [0.2]]), (1.0, 1.0))
        assert objective(_comp([0.5, 0.5j]), spec) == pytest.approx(0.25, abs=1e-16)

    def test_weight_exponent(self):
        assert objective(_comp([0.5]), single_pole(0.1, 2.0)) == 0.25

    def test_mismatch(self):
        with pytest.raises(DomainError):
            objective(_comp([0.5]), PoleSpec(np.array([[0.1], [0.2]]), (1.0, 1.0)))


class TestPoleSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            PoleSpec(np.zeros((0, 1)), ())
        with pytest.raises(DomainError):
            PoleSpec(np.array([[0.1], [0.1]]), (1.0, 1.0))
        with pytest.raises(DomainError):
            PoleSpec(np.array([[0.1]]), (0.0,))

    def test_check_against(self):
        spec = single_pole(0.5)
        with pytest.raises(DomainError):
            spec.check_against(unit_disc(), 0.5)
        with pytest.raises(DomainError):
            spec.check_against(unit_disc(), 1.2)
        with pytest.raises(DomainError):
            single_pole(0.0).check_against(punctured_disc(), 0.3)

    def test_dominates(self):
        p = PoleSpec(np.array([[0.1]]), (1.0,))
        q = PoleSpec(np.array([[0.1], [0.2]]), (2.0, 1.0))
        assert q.dominates(p) and not p.dominates(q)

    def test_records_round_trip(self):
        spec = PoleSpec(np.array([[0.1 + 0.2j, 0.3], [0.0, -0.4j]]), (1.5, 0.5))
        back = PoleSpec.from_records(spec.to_records())
        assert np.array_equal(back.points, spec.points) and back.weights == spec.weights

    def test_schedule(self):
        spec = PoleSchedule(t=0.9).take(2)
        assert np.allclose(spec.points[:, 0], [0.9, 0.975])
        sched = PoleSchedule("explicit", points=(0.2, 0.4))
        assert sched.available(5) == 2


class TestOracles:
    def test_disc(self):
        assert lempert_disc_oracle(single_pole(0.0), 0.7) == pytest.approx(0.7, abs=1e-15)
        spec = PoleSpec(np.array([[0.3], [0.6]]), (1.0, 1.0))
        assert lempert_disc_oracle(spec, 0) == pytest.approx(0.18, abs=1e-15)

    def test_product(self):
        assert lempert_product_oracle(PoleSpec(np.array([[0.5, 0]]), (1.0,)), (0, 0.7)) == pytest.approx(0.7)
        spec = PoleSpec(np.array([[0.3, 0], [0.6, 0]]), (1.0, 1.0))
        assert lempert_product_oracle(spec, (0, 0.1)) == pytest.approx(0.18, abs=1e-15)
        assert lempert_product_oracle(spec, (0, 0.0)) == pytest.approx(0.18, abs=1e-15)

    def test_product_rejects_malformed(self):
        with pytest.raises(DomainError):
            lempert_product_oracle(PoleSpec(np.array([[0.3, 0], [0.6, 0.1]]), (1.0, 1.0)), (0, 0.1))
        with pytest.raises(DomainError):
            lempert_product_oracle(single_pole(0.3), (0, 0.1))

    def test_punctured_coincident(self):
        assert lempert_punctured_oracle([(0.3j, 1.0)], 0.3j) == 0.0

    def test_punctured_principal_lifts(self):
        a, z = math.exp(-1), math.exp(-2)
        assert lift(a) == pytest.approx(0.0, abs=1e-15)
        assert lift(z) == pytest.approx(1 / 3, abs=1e-15)
        value, branches, converged = punctured_oracle_details([(a, 1.0)], z, 50)
        assert value == pytest.approx(1 / 3, abs=1e-14) and branches == (0,) and converged
        # Every other sheet is farther away.
        others = [mobius_factor(lift(a, k), lift(z)) for k in range(-50, 51) if k]
        assert min(others) > 1 / 3

    def test_punctured_pair_is_product(self):
        a, z = 0.5, 0.25
        pair = lempert_punctured_oracle([(a, 1.0), (-a, 1.0)], z)
        one = lempert_punctured_oracle([(a, 1.0)], z)
        two = lempert_punctured_oracle([(-a, 1.0)], z)
        assert pair == pytest.approx(one * two, rel=1e-14)
        assert pair < min(one, two)
        assert pair == pytest.approx(0.284644, abs=1e-6)

    def test_punctured_flags_unconverged(self, monkeypatch):
        from lempert_lab.lempert import oracles

        # A fake lift whose far sheets keep getting closer forces the flag.
        monkeypatch.setattr(oracles, "lift", lambda a, k=0: 0.0 if a == 0.25 else 0.9 / (1 + abs(k)))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            oracles.lempert_punctured_oracle([(0.5, 1.0)], 0.25, branch_bound=3)
        assert any(issubclass(w.category, UnconvergedWarning) for w in caught)

    def test_punctured_stable_for_principal_logs(self):
        # The nearest sheet is within one turn, so K = 1 already converges.
        _, _, converged = punctured_oracle_details([(-0.999, 1.0)], 0.999, branch_bound=1)
        assert converged
        with pytest.raises(DomainError):
            lempert_punctured_oracle([(0.5, 1.0)], 0.25, branch_bound=0)


class TestEstimator:
    def test_single_pole_disc(self):
        est = estimate_lempert(unit_disc(), single_pole(0.5), 0, FAST, seed=1)
        assert est.certified and abs(est.value - 0.5) <= 1e-2
        assert est.value >= 0.5
        assert est.value == objective(est.competitor, single_pole(0.5))
        assert np.max(est.competitor.residuals(np.array([[0.5]]))) < 1e-10

    def test_weighted_poles_off_center(self):
        spec = PoleSpec(np.array([[0.4 + 0.3j], [-0.5]]), (0.5, 1.7))
        z = 0.6j
        est = estimate_lempert(unit_disc(), spec, z, FAST, seed=3)
        oracle = lempert_disc_oracle(spec, z)
        assert est.certified and oracle <= est.value <= oracle * 1.01

    def test_bidisc_single(self):
        spec = PoleSpec(np.array([[0.3, 0.3]]), (1.0,))
        est = estimate_lempert(polydisc(2), spec, (0, 0), FAST, seed=0)
        assert est.certified and 0.3 <= est.value <= 0.31

    def test_ball(self):
        # In the ball the extremal disc through 0 and a is a complex line: |a|.
        spec = PoleSpec(np.array([[0.3, 0.4]]), (1.0,))
        est = estimate_lempert(euclidean_ball(2), spec, (0, 0), FAST, seed=0)
        assert est.certified and 0.5 <= est.value <= 0.51

    def test_punctured_single(self):
        est = estimate_lempert(punctured_disc(), single_pole(math.exp(-1)), math.exp(-2), FAST, seed=0)
        assert est.certified and 1 / 3 <= est.value <= 1 / 3 + 1e-2

    def test_deterministic(self):
        spec = PoleSpec(np.array([[0.2 - 0.1j], [-0.4j]]), (1.0, 0.7))
        a = estimate_lempert(unit_disc(), spec, 0.3, FAST, seed=9).to_record(spec)
        b = estimate_lempert(unit_disc(), spec, 0.3, FAST, seed=9).to_record(spec)
        assert a == b

    def test_no_certificate_fallback(self):
        cfg = OptimizerConfig(restarts=1, max_iter=5, shrink=0.5)
        est = estimate_lempert(unit_disc(), single_pole(0.9), 0, cfg)
        assert not est.certified and est.value == 1.0 and est.competitor is None

    def test_warm_start_never_worsened(self):
        spec = PoleSpec(np.array([[0.5], [-0.5j]]), (1.0, 1.0))
        best = estimate_lempert(unit_disc(), spec, 0.1, FAST, seed=2)
        cheap = OptimizerConfig(restarts=1, max_iter=3)
        again = estimate_lempert(unit_disc(), spec, 0.1, cheap, seed=2, warm_starts=[best.competitor])
        assert again.value <= best.value

    def test_restriction_of_best_competitor(self):
        spec = PoleSpec(np.array([[0.5], [-0.5j], [0.2 + 0.6j]]), (1.0, 0.5, 2.0))
        est = estimate_lempert(unit_disc(), spec, 0.1, FAST, seed=4)
        for sub in ([0], [1], [2], [0, 1], [0, 2], [1, 2]):
            r = restrict_competitor(est.competitor, sub)
            assert objective(r, spec.restrict(sub)) >= est.value

    def test_rejects_pole_at_z(self):
        with pytest.raises(DomainError):
            estimate_lempert(unit_disc(), single_pole(0.5), 0.5, FAST)

    def test_config_rejects_unknown_keys(self):
        with pytest.raises(DomainError):
            OptimizerConfig.from_dict({"restart": 3})
