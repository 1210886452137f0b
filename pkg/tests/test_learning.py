import numpy as np
import pytest

from qnnwitness.errors import DivergenceError
from qnnwitness.hamiltonian import PLAIN, Schedule, bundled_schedule
from qnnwitness.learning import (
    P_STATE_TARGET,
    Dataset,
    IntegratorConfig,
    TrainConfig,
    TrainingPair,
    backprop_gradient,
    fd_gradient,
    history_csv,
    load_dataset,
    loss,
    output,
    resolve_state,
    rms_error,
    train,
)
from qnnwitness.states import catalog, global_phase, StateSpec

RNG = np.random.default_rng(19)

ZERO_TARGETS = {"AB": 0.0, "AC": 0.0, "BC": 0.0, "ABC": 0.0}


def random_schedule():
    return Schedule(RNG.uniform(-6.0, 6.0, size=(4, 9)), 75.0, PLAIN)


def test_resolve_state_accepts_names_and_expressions():
    assert resolve_state("W").is_pure
    spec = resolve_state("|000> + |111>")
    assert np.count_nonzero(np.abs(spec.ket) > 1e-12) == 2


def test_training_pair_validation():
    spec = catalog("Bell_AB")
    with pytest.raises(ValueError):
        TrainingPair(spec, {})
    with pytest.raises(KeyError):
        TrainingPair(spec, {"XY": 0.5})
    with pytest.raises(ValueError):
        TrainingPair(spec, {"AB": 1.5})


def test_bundled_datasets():
    ds1 = load_dataset("set1")
    assert len(ds1.pairs) == 12
    assert ds1.n_outputs == 36
    ds2 = load_dataset("set2")
    assert len(ds2.pairs) == 13
    assert ds2.n_outputs == 52
    # every set2 pair grades the triple observable as well
    assert all("ABC" in p.targets for p in ds2.pairs)


def test_dataset_targets_follow_witness_pattern():
    ds = load_dataset("set1")
    bells = [p for p in ds.pairs if max(p.targets.values()) == 1.0]
    assert len(bells) == 3
    p_states = [p for p in ds.pairs
                if max(p.targets.values()) == pytest.approx(P_STATE_TARGET)]
    assert len(p_states) == 3
    assert 0.0 < P_STATE_TARGET < 0.5


def test_dataset_arrays_shapes():
    rhos, targets, mask = load_dataset("set1").arrays()
    assert rhos.shape == (12, 8, 8)
    assert targets.shape == (12, 4) and mask.shape == (12, 4)
    assert mask.sum() == 36
    # set1 never grades the triple product
    assert mask[:, 3].sum() == 0


def test_loss_report_arithmetic():
    s = bundled_schedule("trained_set1")
    pair = TrainingPair(catalog("Bell_AB"), {"AB": 1.0, "AC": 0.0, "BC": 0.0})
    rep = loss(pair, s, IntegratorConfig(0.25))
    resid = np.array([1.0 - rep.outputs["AB"],
                      -rep.outputs["AC"], -rep.outputs["BC"]])
    assert rep.loss == pytest.approx(0.5 * np.sum(resid ** 2))
    assert rep.rms == pytest.approx(np.sqrt(np.mean(resid ** 2)))


def test_output_accepts_id_or_matrix():
    s = bundled_schedule("trained_set1")
    from qnnwitness.ops import OBSERVABLES
    from qnnwitness.propagate import evolve
    from qnnwitness.states import mix
    rho_f, _ = evolve(mix(catalog("Bell_AB")), s, IntegratorConfig(0.25))
    assert output(rho_f, "AB") == pytest.approx(
        output(rho_f, OBSERVABLES["AB"]))


def test_gradient_against_finite_differences():
    s = random_schedule()
    pair = TrainingPair(catalog("GHZ_minus"), dict(ZERO_TARGETS))
    cfg = IntegratorConfig(0.25)
    exact = backprop_gradient(pair, s, cfg)
    numeric = fd_gradient(pair, s, cfg)
    keep = np.abs(numeric) > 1e-10
    rel = np.abs(exact - numeric)[keep] / np.abs(numeric)[keep]
    assert rel.max() < 1e-6


def test_gradient_for_mixed_input():
    s = random_schedule()
    pair = TrainingPair(catalog("M"), dict(ZERO_TARGETS))
    cfg = IntegratorConfig(0.25)
    exact = backprop_gradient(pair, s, cfg)
    numeric = fd_gradient(pair, s, cfg)
    keep = np.abs(numeric) > 1e-8
    rel = np.abs(exact - numeric)[keep] / np.abs(numeric)[keep]
    assert rel.max() < 1e-6


def test_gradient_vanishes_at_exact_fit():
    """Targets set to the model's own outputs give zero residual, and the
    reverse pass must return an exactly zero gradient."""
    s = random_schedule()
    cfg = IntegratorConfig(0.25)
    probe = TrainingPair(catalog("W"), dict(ZERO_TARGETS))
    fitted = TrainingPair(catalog("W"),
                          loss(probe, s, cfg).outputs)
    g = backprop_gradient(fitted, s, cfg)
    assert np.abs(g).max() < 1e-14


def test_outputs_ignore_global_phase():
    s = bundled_schedule("set1")
    cfg = IntegratorConfig(0.25)
    base = catalog("GHZ_minus").ket
    a = TrainingPair(StateSpec.pure(base), dict(ZERO_TARGETS))
    b = TrainingPair(StateSpec.pure(global_phase(base, 0.77)),
                     dict(ZERO_TARGETS))
    ra = loss(a, s, cfg)
    rb = loss(b, s, cfg)
    for key in ra.outputs:
        assert ra.outputs[key] == pytest.approx(rb.outputs[key], abs=1e-12)


def test_rms_error_counts_only_graded_outputs():
    s = bundled_schedule("initial")
    cfg = IntegratorConfig(0.25)
    ds = load_dataset("set1")
    total = 0.0
    for pair in ds.pairs:
        rep = loss(pair, s, cfg)
        total += sum(r ** 2 for r in rep.residuals.values())
    assert rms_error(ds, s, cfg) == pytest.approx(np.sqrt(total / 36.0))


def test_train_zero_epochs_returns_start():
    init = bundled_schedule("initial")
    trained, history = train("set1", init, TrainConfig(epochs=0, dt=0.25))
    assert history.shape == (0,)
    assert np.allclose(trained.chunks, init.chunks)


def test_train_descends_and_is_deterministic():
    cfg = TrainConfig(epochs=40, learning_rate=3e-3, momentum=0.9, dt=0.25)
    init = bundled_schedule("initial")
    s1, h1 = train("set1", init, cfg)
    s2, h2 = train("set1", init, cfg)
    assert np.array_equal(h1, h2)
    assert np.array_equal(s1.chunks, s2.chunks)
    assert h1[-1] < h1[0]
    assert len(h1) == 40


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(momentum=1.0)


def test_train_raises_on_divergence():
    cfg = TrainConfig(epochs=600, learning_rate=50.0, momentum=0.9, dt=0.25)
    with pytest.raises(DivergenceError):
        train("set1", bundled_schedule("initial"), cfg)


def test_history_csv(tmp_path):
    path = tmp_path / "hist.csv"
    history_csv(np.array([0.5, 0.25]), path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "epoch,rms"
    assert lines[1].startswith("0,0.5")
    assert len(lines) == 3


def test_dataset_from_file(tmp_path):
    import json
    doc = {"name": "tiny", "pairs": [
        {"state": "Bell_AB", "targets": {"AB": 1.0}},
        {"state": "|000> + |011>", "targets": {"BC": 1.0, "ABC": 0.0}},
    ]}
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(doc))
    ds = load_dataset(str(path))
    assert ds.n_outputs == 3
    assert ds.pairs[1].targets["BC"] == 1.0
