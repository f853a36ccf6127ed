"""Acceptance criteria 1 to 6, each reported as one PASS/FAIL line.

Criteria 1 to 5 run the committed experiment configs. Criterion 6 repeats
the property checks at the stated sample sizes and checks determinism.
"""

import numpy as np

from conftest import report
from lempert_lab.complex_core import blaschke_interpolate, blaschke_product_array
from lempert_lab.discs import AnalyticDisc, Competitor, constant_disc, eval_disc_array, restrict_competitor
from lempert_lab.domains import (
    ContainmentCertificate,
    certify_disc_in_domain,
    euclidean_ball,
    polydisc,
    product,
    punctured_disc,
    unit_disc,
)
from lempert_lab.experiments import dumps_rows, load_config, run_experiment
from lempert_lab.lempert import PoleSpec, objective


def _run(name, timing=False, **params):
    cfg = load_config(name)
    cfg.params.update(params)
    cfg.output = {}
    return {r.case: r for r in run_experiment(cfg, out=None, timing=timing)}


def _failed(rows):
    return [f"{r.case}:{k}" for r in rows.values() for k, v in r.checks.items() if not v]


def test_criterion_1_disc_oracle():
    rows = _run("disc-oracle", timing=True)
    worst = max(r.gap / r.oracle for r in rows.values())
    slowest = max(r.runtime_ms for r in rows.values()) / 1000.0
    bad = _failed(rows)
    ok = len(rows) == 20 and not bad
    assert report(1, ok, f"{len(rows)} random specs, worst relative gap {worst:.2e}, "
                         f"slowest {slowest:.2f}s, failures {bad}")


def test_criterion_2_bidisc_plateau():
    rows = _run("remark2-bidisc")
    pair, single = rows["pair"], rows["single"]
    ok = not _failed(rows) and pair.oracle == 0.3 and single.oracle == 0.3
    assert report(2, ok, f"pair {pair.estimate:.6f}, single {single.estimate:.6f}, oracle 0.3, "
                         f"failures {_failed(rows)}")


def test_criterion_3_product_property():
    rows = _run("example4-product")
    cfg = load_config("example4-product").params
    scan = [rows[f"m={m}"] for m in range(1, cfg["m_max"] + 1)]
    plateau = all(r.oracle == cfg["w"] for r in scan[cfg["plateau_from"] - 1:])
    worst = max(r.gap for r in scan)
    bad = _failed(rows)
    ok = plateau and worst <= cfg["tol"] and not bad
    assert report(3, ok, f"oracle equals w for m >= {cfg['plateau_from']}: {plateau}, "
                         f"worst gap m<={cfg['m_max']} {worst:.2e}, failures {bad}")


def test_criterion_4_covering():
    rows = _run("covering-counterexample")
    gap = rows["strict-gap"]
    ok = not _failed(rows)
    assert report(4, ok, f"pair {rows['pair'].estimate:.6f} vs oracle {rows['pair'].oracle:.6f}, "
                         f"oracle margin {gap.detail['oracle_margin']:.4f}, failures {_failed(rows)}")


def test_criterion_5_truncation():
    rows = _run("theorem1-truncation")
    first = [rows[f"m={m}"] for m in range(1, 9)]
    values = [r.estimate for r in first]
    nonincreasing = all(b <= a for a, b in zip(values, values[1:]))
    within = all(r.checks["within_tol"] and r.checks["certified"] for r in first)
    stopped = rows["scan"].detail["stopped_at"]
    ok = nonincreasing and within and stopped is not None and not _failed(rows)
    assert report(5, ok, f"nonincreasing m=1..8: {nonincreasing}, within 1e-2: {within}, "
                         f"stop rule fired at m={stopped}, failures {_failed(rows)}")


def _boundary_and_interpolation(r):
    worst_mod, worst_res = 0.0, 0.0
    u = np.exp(2j * np.pi * np.arange(256) / 256)
    for _ in range(200):
        m = int(r.integers(1, 9))
        zeros = 0.95 * np.sqrt(r.uniform(size=m)) * np.exp(2j * np.pi * r.uniform(size=m))
        worst_mod = max(worst_mod, float(np.abs(np.abs(blaschke_product_array(zeros, u)) - 1).max()))
        d = np.abs(zeros[:, None] - zeros[None, :]) + np.eye(m)
        if d.min() < 1e-3:
            continue
        vals = r.normal(size=m) + 1j * r.normal(size=m)
        g = blaschke_interpolate(zeros, vals)
        worst_res = max(worst_res, max(abs(g(l) - v) for l, v in zip(zeros, vals)))
    return worst_mod, worst_res


def _restriction(r):
    cert = ContainmentCertificate(True, 0.1, "coefficient_bound")
    for _ in range(1000):
        m = int(r.integers(1, 7))
        nodes = 0.95 * np.sqrt(r.uniform(0.01, 1, m)) * np.exp(2j * np.pi * r.uniform(size=m))
        c = Competitor(constant_disc(0.0), [0.0], tuple((l, i) for i, l in enumerate(nodes)), cert)
        spec = PoleSpec(np.arange(1, m + 1)[:, None] * 0.1, tuple(r.uniform(0.01, 2.0, m)))
        sub = sorted(r.choice(m, size=int(r.integers(1, m + 1)), replace=False))
        if objective(restrict_competitor(c, sub), spec.restrict(sub)) < objective(c, spec):
            return False
    return True


def _soundness(r):
    lam = np.sqrt(r.uniform(0, 1, 100_000)) * np.exp(2j * np.pi * r.uniform(size=100_000))
    cases = [(unit_disc(), 1), (polydisc(2), 2), (euclidean_ball(2), 2), (product(unit_disc(), euclidean_ball(2)), 3)]
    checked = 0
    for domain, n in cases:
        for _ in range(20):
            c = r.normal(size=(n, 7)) + 1j * r.normal(size=(n, 7))
            c *= 1.1 / np.abs(c).sum(axis=1, keepdims=True).max() * r.uniform(0.5, 1.5)
            disc = AnalyticDisc(c, "polynomial")
            cert = certify_disc_in_domain(domain, disc, samples=256)
            if not cert.certified:
                continue
            checked += 1
            vals = eval_disc_array(disc, lam)
            for kind, idx in domain.blocks():
                w = vals[list(idx)]
                top = np.sqrt((np.abs(w) ** 2).sum(axis=0)) if kind == "ball" else np.abs(w[0])
                if np.any(top > 1 - cert.margin + 1e-12):
                    return False, checked
    return checked > 0, checked


def _determinism(tmp_path):
    cfg = load_config("disc-oracle")
    cfg.params["cases"] = 3
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    rows = run_experiment(cfg, out=a)
    run_experiment(cfg, out=b)
    return a.read_bytes() == b.read_bytes() == dumps_rows(rows).encode()


def test_criterion_6_properties(tmp_path):
    r = np.random.default_rng(6)
    worst_mod, worst_res = _boundary_and_interpolation(r)
    restriction = _restriction(r)
    sound, checked = _soundness(r)
    same = _determinism(tmp_path)
    ok = worst_mod <= 1e-10 and worst_res < 1e-12 and restriction and sound and same
    assert report(6, ok, f"boundary modulus error {worst_mod:.1e}, interpolation residual {worst_res:.1e}, "
                         f"restriction transfer on 1000 samples {restriction}, "
                         f"soundness on 1e5 points for {checked} certified discs {sound}, "
                         f"byte-identical reruns {same}")
