import numpy as np
import pytest

from lempert_lab.discs import AnalyticDisc, eval_disc_array
from lempert_lab.domains import certify_disc_in_domain, euclidean_ball, polydisc, punctured_disc, unit_disc
from lempert_lab.fitting import CircleFit, block_excess, max_radius


def test_identity_radius():
    r = max_radius(np.array([[0.0, 1.0]]), unit_disc().blocks(), "polynomial")
    assert r == pytest.approx(1.0, abs=1e-9) and r < 1.0


def test_radius_is_capped():
    assert max_radius(np.array([[0.0, 0.25]]), unit_disc().blocks(), "polynomial", r_hi=2.0) == 2.0
    assert max_radius(np.array([[1.5]]), unit_disc().blocks(), "polynomial") == 0.0


def test_ball_radius():
    coeffs = np.array([[0.0, 0.6], [0.0, 0.8]])
    assert max_radius(coeffs, euclidean_ball(2).blocks(), "polynomial") == pytest.approx(1.0, abs=1e-9)


def test_punctured_root_cap():
    # 0.5 - λ vanishes at 0.5, so no radius beyond it is admissible.
    r = max_radius(np.array([[0.5, -1.0]]), punctured_disc().blocks(), "polynomial")
    assert r <= 0.5


def test_halfplane_radius():
    # Re(-1 + λ) < 0 up to radius 1.
    r = max_radius(np.array([[-1.0, 1.0]]), [("halfplane", (0,))], "exp_lift")
    assert r == pytest.approx(1.0, abs=1e-9)


def test_excess_matches_radius():
    coeffs = np.array([[0.1, 0.5, 0.3j], [0.0, -0.4, 0.2]])
    blocks = polydisc(2).blocks()
    r = max_radius(coeffs, blocks, "polynomial", samples=512)
    u = np.exp(2j * np.pi * np.arange(512) / 512)
    assert block_excess(coeffs, blocks, "polynomial", r * u) < 0
    assert block_excess(coeffs, blocks, "polynomial", (r + 1e-6) * u) >= 0


@pytest.mark.parametrize(
    "domain,rep,base,targets",
    [
        (unit_disc(), "polynomial", [0.0], [[0.6], [-0.3j]]),
        (polydisc(2), "polynomial", [0.0, 0.1], [[0.5, 0.0], [0.0, 0.3j]]),
        (euclidean_ball(2), "polynomial", [0.0, 0.0], [[0.3, 0.2]]),
        (punctured_disc(), "covering_lift", [0.2], [[0.5]]),
    ],
)
def test_fit_keeps_constraints_and_lowers_the_sup(domain, rep, base, targets):
    nodes = np.array([0.7, -0.6j][: len(targets)])
    fit = CircleFit(domain, 8, 128, rep)
    coeffs, state = fit.fit(nodes, base, targets)
    vals = eval_disc_array(AnalyticDisc(coeffs), np.concatenate([[0], nodes]))
    want = np.concatenate([np.array(base)[:, None], np.array(targets).T], axis=1)
    assert np.max(np.abs(vals - want)) < 1e-10
    bare, _ = CircleFit(domain, 0, 128, rep).fit(nodes, base, targets)
    u = np.exp(2j * np.pi * np.arange(128) / 128)
    # The fit minimizes a smoothed maximum, so it may trail an already
    # optimal interpolant by about the final temperature times log(samples).
    assert block_excess(coeffs, fit.blocks, rep, u) <= block_excess(bare, fit.blocks, rep, u) + 1e-4


def test_fit_can_be_certified_after_dilation():
    nodes = np.array([0.8])
    coeffs, _ = CircleFit(unit_disc(), 8, 128).fit(nodes, [0.0], [[0.5]])
    r = max_radius(coeffs, unit_disc().blocks(), "polynomial", 1024)
    scaled = coeffs * (0.999 * r) ** np.arange(coeffs.shape[1])
    assert certify_disc_in_domain(unit_disc(), AnalyticDisc(scaled)).certified
