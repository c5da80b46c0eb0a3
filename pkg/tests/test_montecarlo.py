import pytest

from hyperpack.errors import ParameterError
from hyperpack.montecarlo import MCConfig, lemma_montecarlo


def test_trial_floor():
    with pytest.raises(ParameterError, match="floor"):
        lemma_montecarlo("coverage", MCConfig(trials=10))


def test_unknown_target():
    with pytest.raises(ParameterError):
        lemma_montecarlo("nope")


def test_coverage_complete_graph_exact():
    rep = lemma_montecarlo("coverage", MCConfig(n=8, r=10, trials=100), seed=1)
    # C(8,3) = 56 edges per trial
    assert rep["stats"]["trials"] == 56 * 100
    assert rep["stats"]["mean"] == pytest.approx(rep["exact_complete_graph_r_p1"])
    assert sum(rep["histogram"].values()) == 5600


def test_firstorder_matches_conditional_expectation():
    rep = lemma_montecarlo("firstorder", MCConfig(n=8, kappa=3, r=20, trials=200), seed=0)
    assert abs(rep["stats"]["z_score"]) < 4
    assert rep["family_size"] == 6


def test_secondorder_reports_bound():
    rep = lemma_montecarlo("secondorder", MCConfig(n=8, r=20, trials=100), seed=0)
    assert rep["bound_7q_B_over_kappa_z"] > 0
    assert rep["stats"]["trials"] == 100


def test_condensed_report():
    rep = lemma_montecarlo("condensed", MCConfig(n=8, r=10, trials=100, condensed_sets=30), seed=2)
    assert rep["bound_4q_plus_1"] == 9
    assert rep["max_observed"] <= 10  # at most one hit per digraph


def test_digraph_regularity_closed_form():
    rep = lemma_montecarlo("digraph-regularity", MCConfig(n=16, trials=100))
    assert rep["per_property_max"] == pytest.approx(rep["complete_digraph_closed_form"])


def test_seeded_reproducible():
    cfg = MCConfig(n=8, r=5, trials=100)
    assert lemma_montecarlo("coverage", cfg, seed=4) == lemma_montecarlo("coverage", cfg, seed=4)
