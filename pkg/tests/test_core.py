import numpy as np
import pytest

from seqlabel.core import (Dataset, Feature, LabelSchema, argmax_lowest,
                           is_distribution, normalize_log_scores,
                           validate_dataset)


def make_dataset():
    schema = LabelSchema((2, 3))
    features = (Feature.numeric("a"), Feature.categorical(2, "b"))
    instances = [
        ((0.5, 0), (0, 2)),
        ((1.5, 1), (1, 0)),
        ((-0.25, 1), (0, 1)),
    ]
    return Dataset(schema, features, instances, name="toy")


def test_schema_invariants():
    with pytest.raises(ValueError):
        LabelSchema(())
    with pytest.raises(ValueError):
        LabelSchema((2, 1))
    s = LabelSchema((2, 3, 2))
    assert s.T == 3
    assert s.conforms((1, 2, 0))
    assert not s.conforms((1, 3, 0))
    assert not s.conforms((1, 2))


def test_feature_invariants():
    with pytest.raises(ValueError):
        Feature("categorical")
    with pytest.raises(ValueError):
        Feature("numeric", 3)
    with pytest.raises(ValueError):
        Feature("fancy")
    f = Feature.categorical(4, "c")
    assert Feature.from_dict(f.to_dict()) == f


def test_validate_conforming_dataset():
    assert validate_dataset(make_dataset()) == []


def test_validate_label_at_cardinality_boundary():
    d = make_dataset()
    d.instances.append(((0.0, 0), (0, 3)))  # position 1 has cardinality 3
    violations = validate_dataset(d)
    assert len(violations) == 1
    assert "instance 3" in violations[0] and "position 1" in violations[0]


def test_validate_mixed_feature_arity():
    d = make_dataset()
    d.instances.append(((0.0,), (0, 0)))          # short row
    d.instances.append(((0.0, 1, 2.0), (1, 1)))   # long row
    violations = validate_dataset(d)
    arity = [v for v in violations if "feature arity" in v]
    assert len(arity) == 2
    assert any("instance 3" in v for v in arity)
    assert any("instance 4" in v for v in arity)


def test_validate_categorical_code_range():
    d = make_dataset()
    d.instances.append(((0.0, 2), (0, 0)))  # feature b has cardinality 2
    violations = validate_dataset(d)
    assert len(violations) == 1 and "feature 1" in violations[0]


def test_dataset_arrays_cached_and_frozen():
    d = make_dataset()
    assert d.X.shape == (3, 2)
    assert d.Y.dtype == np.int64
    with pytest.raises(ValueError):
        d.X[0, 0] = 9.0


def test_is_distribution():
    assert is_distribution(np.array([0.5, 0.5]))
    assert not is_distribution(np.array([0.5, 0.6]))
    assert not is_distribution(np.array([-0.1, 1.1]))


def test_argmax_lowest_breaks_ties_low():
    assert argmax_lowest(np.array([0.4, 0.4, 0.2])) == 0
    assert argmax_lowest(np.array([0.1, 0.6, 0.6])) == 1


def test_normalize_log_scores_is_distribution_and_positive():
    rng = np.random.default_rng(0)
    for _ in range(100):
        scores = rng.normal(size=rng.integers(2, 8)) * rng.uniform(1, 400)
        p = normalize_log_scores(scores)
        assert is_distribution(p)
        assert np.all(p > 0)
