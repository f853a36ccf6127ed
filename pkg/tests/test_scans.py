import numpy as np
import pytest

from lempert_lab.complex_core import DomainError
from lempert_lab.discs import eval_disc_array
from lempert_lab.domains import polydisc, unit_disc
from lempert_lab.lempert import (
    OptimizerConfig,
    PoleSchedule,
    PoleSpec,
    check_monotonicity,
    estimate_lempert,
    extend_competitor,
    finite_truncation_scan,
    objective,
    single_pole,
)

FAST = OptimizerConfig(restarts=1, max_iter=150, min_separation=1e-8)


def test_first_truncations():
    scan = finite_truncation_scan(unit_disc(), PoleSchedule(t=0.9), 0, 3, FAST)
    oracle = np.cumprod([0.9, 0.975, 1 - 0.1 / 9])
    assert np.all(np.abs(np.array(scan.values) - oracle) <= 1e-2)
    assert np.all(np.array(scan.values) >= oracle)
    assert scan.monotone and all(scan.transfers)


def test_single_truncation_is_a_plain_estimate():
    scan = finite_truncation_scan(unit_disc(), PoleSchedule(t=0.9), 0, 1, FAST, seed=5)
    est = estimate_lempert(unit_disc(), single_pole(0.9), 0, FAST, seed=5)
    assert scan.values == [est.value]


def test_scan_errors_and_exhaustion():
    with pytest.raises(DomainError):
        finite_truncation_scan(unit_disc(), PoleSchedule(t=0.9), 0, 0, FAST)
    scan = finite_truncation_scan(unit_disc(), PoleSchedule("explicit", points=(0.3, -0.5j)), 0.1, 4, FAST)
    assert scan.exhausted and len(scan.values) == 2


def test_extension_keeps_old_values():
    spec = PoleSpec(np.array([[0.5], [-0.4j]]), (1.0, 1.0))
    est = estimate_lempert(unit_disc(), spec.restrict([0]), 0.1, FAST)
    ext = extend_competitor(unit_disc(), est.competitor, spec, 1, FAST)
    assert ext is not None and ext.certificate.certified
    assert np.max(ext.residuals(spec.points)) < 1e-10
    assert objective(ext, spec) <= est.value
    with pytest.raises(DomainError):
        extend_competitor(unit_disc(), ext, spec, 1, FAST)


def test_monotonicity_report():
    p = PoleSpec(np.array([[0.5]]), (1.0,))
    q = PoleSpec(np.array([[0.5], [-0.4j]]), (2.0, 1.0))
    rep = check_monotonicity(unit_disc(), p, q, 0.1, FAST)
    assert rep.estimate_p.certified and rep.estimate_q.certified
    assert rep.transfer_certified and rep.ordered
    with pytest.raises(DomainError):
        check_monotonicity(unit_disc(), q, p, 0.1, FAST)


def test_equal_pole_functions_give_equal_values():
    p = PoleSpec(np.array([[0.5], [-0.4j]]), (1.0, 1.0))
    rep = check_monotonicity(unit_disc(), p, p, 0.1, FAST)
    assert rep.value_p == rep.value_q


def test_bidisc_extension_preserves_constraints():
    spec = PoleSpec(np.array([[0.3, 0.3], [0.6, 0.3]]), (1.0, 1.0))
    est = estimate_lempert(polydisc(2), spec.restrict([0]), (0, 0), FAST)
    ext = extend_competitor(polydisc(2), est.competitor, spec, 1, FAST)
    if ext is not None:
        vals = eval_disc_array(ext.disc, ext.node_values)
        assert np.allclose(vals.T, spec.points[list(ext.pole_indices)], atol=1e-10)
