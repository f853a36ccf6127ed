import json

import numpy as np
import pytest

from lempert_lab.complex_core import DomainError
from lempert_lab.experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ResultRow,
    dumps_rows,
    product_points,
    load_config,
    random_disc_specs,
    random_product_specs,
    run_experiment,
)
from lempert_lab.lempert import lempert_product_oracle


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_committed_configs_load(name):
    cfg = load_config(name)
    assert cfg.experiment_id == name and cfg.seed == 42
    cfg.optimizer_config()


def test_config_validation(tmp_path):
    with pytest.raises(DomainError):
        ExperimentConfig("no-such-experiment")
    with pytest.raises(DomainError):
        ExperimentConfig.from_dict({"experiment_id": "disc-oracle", "extra": 1})
    with pytest.raises(DomainError):
        ExperimentConfig("disc-oracle", seed=-1)
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment_id": "disc-oracle"}))
    with pytest.raises(DomainError):
        load_config("remark2-bidisc", p)


def test_domain_section_must_match():
    cfg = load_config("covering-counterexample")
    cfg.domain = {"kind": "unit_disc"}
    with pytest.raises(DomainError):
        run_experiment(cfg)


def test_rows():
    row = ResultRow("disc-oracle", "x", 0.5, 0.4, True, 42, None, {"a": True})
    assert row.gap == pytest.approx(0.1) and row.passed
    assert ResultRow("disc-oracle", "x", 0.5, None, True, 42).gap is None
    assert not ResultRow("disc-oracle", "x", 0.5, None, True, 42, None, {"a": False}).passed
    line = dumps_rows([row])
    assert line.endswith("\n") and json.loads(line)["gap"] == pytest.approx(0.1)


def test_product_points_reach_the_plateau():
    cfg = load_config("example4-product")
    p = cfg.params
    pts = product_points(p["m_max"], p["radius"], p["angle"])
    prods = np.cumprod(np.abs(pts))
    assert np.all(prods[p["plateau_from"] - 1:] < p["w"])
    assert np.all(prods[: p["plateau_from"] - 1] > p["w"])
    d = np.abs(np.subtract.outer(pts, pts)) + np.eye(len(pts))
    assert d.min() > 0.3


def test_random_specs_are_seeded():
    a = random_disc_specs(np.random.default_rng(1), 5, 5, 2.0, 0.9, 0.05)
    b = random_disc_specs(np.random.default_rng(1), 5, 5, 2.0, 0.9, 0.05)
    assert all(np.array_equal(x[0].points, y[0].points) and x[1] == y[1] for x, y in zip(a, b))
    assert all(0 < w <= 2.0 for spec, _ in a for w in spec.weights)
    for spec, point in random_product_specs(np.random.default_rng(2), 5, 3, 0.7):
        lempert_product_oracle(spec, point)
