import math

import numpy as np
import pytest

import mvgt


def nilpotent():
    s1 = np.array([[0.0, 1.0], [0.0, 0.0]])
    return s1, s1.T.copy()


def test_words():
    assert mvgt.words(0) == ["e"]
    assert mvgt.words(2) == ["e", "1", "2", "11", "12", "21", "22"]
    assert len(mvgt.words(8)) == 2**9 - 1


def test_coulomb_and_views():
    x = mvgt.coulomb_matrix([1.0, 8.0, 1.0], np.array([[0.0, 0, 0], [1.0, 0, 0], [2.0, 0, 0]]))
    assert x.shape == (3, 3)
    assert x[0, 0] == pytest.approx(0.5)
    assert x[0, 1] == pytest.approx(8.0)
    assert x[0, 2] == pytest.approx(0.5)
    strong, weak = mvgt.threshold_views(x, 2.0)
    assert set(strong) == {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert set(weak) == {(0, 2), (2, 0)}
    with pytest.raises(mvgt.ConfigError):
        mvgt.radius_views(np.zeros((2, 3)), 2.0, 1.0)


def test_theory_functions():
    s1, s2 = nilpotent()
    eye = np.eye(2)
    assert mvgt.nc_binomial_residual(s1, s2, 4) < 1e-12
    comm = s1 @ s2 - s2 @ s1
    assert mvgt.class_distance(comm, s1, s2, 2, "H0", eye) == pytest.approx(math.sqrt(2.0))
    assert mvgt.class_distance(comm, s1, s2, 2, "HGt", eye) < 1e-10
    gap = mvgt.oracle_risk_gap(eye + comm, s1, s2, 2, eye)
    assert gap["gap"] == pytest.approx(2.0)
    with pytest.raises(mvgt.AssumptionViolation):
        mvgt.oracle_risk_gap(comm, s1, s2, 1, eye)
    with pytest.raises(mvgt.DomainError):
        mvgt.class_distance(comm, s1, s2, 2, "H0", -eye)


def test_gradcheck():
    r = mvgt.gradcheck("gine-gt", seed=1)
    assert r["max_rel_error"] < 1e-5
    with pytest.raises(mvgt.ConfigError):
        mvgt.gradcheck("gcn")


def test_verify_theory():
    report = mvgt.verify_theory(trials=5, mc_samples=5000)
    assert report["pass"]
    assert len(report["checks"]) == 9


def test_train_and_evaluate():
    data = mvgt.generate_dataset("molecule", 9, seed=2)
    assert len(data) == 9 and "charges" in data[0]
    config = {"task": "molecule", "hidden": 8, "folds": 3, "batch_size": 4,
              "max_epochs": 2, "early_stop_patience": 0, "seed": 1}
    model, report, csv = mvgt.train(config, data)
    assert report["status"] == "trained"
    assert len(report["runs"]) == 3
    assert csv.startswith("run,")
    scores = mvgt.evaluate(model, data)
    assert scores["samples"] == 9
    with pytest.raises(mvgt.ConfigError):
        mvgt.train({"task": "molecule", "hidden": 0}, data)


def test_planted_filter():
    data = mvgt.generate_dataset("planted-filter", 200, seed=3, size=5)
    _, report, _ = mvgt.train({"task": "planted-filter", "repeats": 2, "seed": 3}, data)
    assert report["summary"]["all_pass"]
