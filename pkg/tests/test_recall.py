import pytest
from hypothesis import given
from hypothesis import strategies as st

from recalldrift import (
    AgeBucket,
    ConfigError,
    DecayParams,
    EffectMode,
    FeatureVector,
    InterventionEffect,
    RecallModelParams,
    apply_intervention,
    evaluate_recall,
    recall_decay,
)

OLD = FeatureVector(400.0, AgeBucket.OLD)


def table(pc=0.57, po=0.57, **kw):
    return RecallModelParams.uniform(pc, po, **kw)


def test_table_lookup_baseline():
    assert evaluate_recall(OLD, table()) == (0.57, 0.57)


def test_bucket_specific_lookup():
    params = RecallModelParams({(AgeBucket.OLD, False): (0.5, 0.6), (AgeBucket.OLD, True): (0.3, 0.8)})
    assert evaluate_recall(FeatureVector(400, "Old", sensitive=True), params) == (0.3, 0.8)
    with pytest.raises(ConfigError):
        evaluate_recall(FeatureVector(10, "Recent"), params)


def test_upper_clamp():
    assert evaluate_recall(OLD, table(1.0, 0.2))[0] == 1.0
    blended = table(1.0, 0.2, blend=True, decay=DecayParams(0.2, 0.9, 30))
    assert evaluate_recall(FeatureVector(0.0, "Recent"), blended)[0] == 1.0


def test_blend_at_half_life():
    decay = DecayParams(floor=0.2, ceiling=0.8, half_life_days=100.0)
    x = FeatureVector(100.0, "Recent")
    # closed form: decay = (floor + ceiling) / 2 = 0.5, normalized by ceiling
    expected_pc = 0.9 * 0.5 / 0.8
    pc, po = evaluate_recall(x, table(0.9, 0.4, blend=True, decay=decay))
    assert pc == pytest.approx(expected_pc, abs=1e-15)
    assert po == 0.4


def test_decay_examples():
    d = DecayParams(0.3, 0.9, 60.0)
    assert recall_decay(0.0, d) == 0.9
    assert recall_decay(60.0, d) == pytest.approx(0.6, abs=1e-15)
    assert recall_decay(360.0, d) <= recall_decay(30.0, d)
    assert recall_decay(1e6, d) == pytest.approx(0.3)


@given(st.lists(st.floats(0, 1e5), min_size=2, max_size=50),
       st.floats(0, 1), st.floats(0, 1), st.floats(0.1, 1e4))
def test_decay_monotone(ts, a, b, hl):
    d = DecayParams(min(a, b), max(a, b), hl)
    vals = [recall_decay(t, d) for t in sorted(ts)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
    assert all(d.floor - 1e-12 <= v <= d.ceiling + 1e-12 for v in vals)


def test_decay_validation():
    with pytest.raises(ConfigError):
        DecayParams(0.9, 0.1, 10)
    with pytest.raises(ConfigError):
        DecayParams(0.1, 0.9, 0)


probs = st.floats(0, 1)


@given(st.floats(0, 1e4), st.booleans(), probs, probs, probs, st.booleans(), probs, probs, st.floats(1, 1e3))
def test_probabilities_in_unit_interval(age, sens, hes, pc, po, blend, f, c, hl):
    params = table(pc, po, blend=blend, decay=DecayParams(min(f, c), max(f, c), hl))
    x = FeatureVector.from_age(age, sensitive=sens, hesitation=hes)
    p_c, p_o = evaluate_recall(x, params)
    assert 0 <= p_c <= 1 and 0 <= p_o <= 1


def test_feature_bucket_threshold():
    assert FeatureVector.from_age(180.0).age_bucket is AgeBucket.OLD
    assert FeatureVector.from_age(179.9).age_bucket is AgeBucket.RECENT
    assert FeatureVector.from_age(50, old_threshold_days=30).age_bucket is AgeBucket.OLD
    with pytest.raises(ValueError):
        FeatureVector(1.0, "Old", hesitation=1.5)
    with pytest.raises(ValueError):
        FeatureVector(-1.0, "Old")


def test_apply_absolute():
    assert apply_intervention(0.57, 0.57, InterventionEffect(0.72, 0.47)) == (0.72, 0.47)


def test_apply_identity():
    assert apply_intervention(0.3, 0.6, InterventionEffect.identity()) == (0.3, 0.6)


def test_apply_delta_clamps():
    assert apply_intervention(0.5, 0.5, InterventionEffect(0.9, -0.9, EffectMode.DELTA)) == (1.0, 0.0)


@given(probs, probs, probs, probs)
def test_absolute_idempotent(pc, po, a, b):
    eff = InterventionEffect(a, b)
    once = apply_intervention(pc, po, eff)
    assert apply_intervention(*once, eff) == once


@given(probs, probs, st.floats(-2, 2), st.floats(-2, 2))
def test_delta_stays_in_range(pc, po, da, db):
    a, b = apply_intervention(pc, po, InterventionEffect(da, db, "delta"))
    assert 0 <= a <= 1 and 0 <= b <= 1


def test_params_roundtrip_dict():
    params = table(0.4, 0.7, blend=True, decay=DecayParams(0.1, 0.9, 90), old_threshold_days=120)
    assert RecallModelParams.from_dict(params.to_dict()) == params
    with pytest.raises(ConfigError):
        RecallModelParams.from_dict({"bucket_table": [{"age_bucket": "Old", "sensitive": False, "p_c": 1.5, "p_o": 0}]})
