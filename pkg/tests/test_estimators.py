import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from stquad.duffy import duffy_rule
from stquad.elements import DomainError, sample_points
from stquad.estimators import (CollapsedCoordinates, OrthonormalBasisFeatures,
                               SymmetricRuleGenerator)
from stquad.jacobi import ParameterError


def test_collapsed_transformer():
    t = CollapsedCoordinates("pentatope").fit()
    out = t.transform([[-0.6] * 4])
    assert np.allclose(out, [[0, -1 / 3, -0.5, -0.6]])
    with pytest.raises(DomainError):
        t.transform([[0.9] * 4])


def test_basis_features_orthonormal(rng):
    feats = OrthonormalBasisFeatures("tetprism", 2).fit()
    Z = feats.transform(sample_points("tetprism", 20, rng))
    assert Z.shape == (20, 30)
    names = feats.get_feature_names_out()
    assert names[0] == "psi_0000" and len(names) == 30
    pts, w = duffy_rule("tetprism", 6).expanded()
    V = feats.transform(pts)
    assert np.abs(V.T @ (w[:, None] * V) - np.eye(30)).max() < 1e-12


def test_pipeline_and_clone(rng):
    pipe = make_pipeline(OrthonormalBasisFeatures("tesseract", 1))
    X = rng.uniform(-1, 1, (5, 4))
    assert pipe.fit_transform(X).shape == (5, 16)
    c = clone(OrthonormalBasisFeatures("tesseract", 3))
    assert c.get_params() == {"element": "tesseract", "degree": 3}


def test_parameter_validation():
    with pytest.raises(ParameterError):
        OrthonormalBasisFeatures("tesseract", 21).fit()
    with pytest.raises(ParameterError):
        CollapsedCoordinates("sphere").fit()
    with pytest.raises(ParameterError):
        OrthonormalBasisFeatures("tesseract", 1).fit().transform(np.zeros((2, 3)))


def test_rule_generator():
    gen = SymmetricRuleGenerator("pentatope", strength=2, n_points=5, n_starts=8).fit()
    assert gen.rule_ is not None and gen.rule_.n_points == 5
    assert gen.score() > -1e-12
    assert gen.integrate(lambda x: np.ones(len(x))) == pytest.approx(2 / 3)


def test_rule_generator_failure():
    gen = SymmetricRuleGenerator("pentatope", strength=4, n_points=5, n_starts=1).fit()
    assert gen.rule_ is None and gen.score() == -np.inf
    with pytest.raises(ValueError):
        gen.integrate(lambda x: np.ones(len(x)))
