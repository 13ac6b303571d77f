import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from autodiff.gradcheck import grad_check
from autodiff.tensor import Tensor, kink_distance
from datagen.flows import random_cyclic_flow
from datagen.masks import MaskSet
from graphs.graph import FlipMatrix, apply_flip
from graphs.operators import ShiftOperator
from models.hodge_rnn import (
    HodgeRNN,
    RnnParams,
    RnnTrainer,
    RnnTrainingConfig,
    _loss_graph,
    init_rnn_params,
    interpolate,
    rnn_forward,
    rnn_loss,
    rnn_loss_and_grads,
    train_interpolator,
)
from utils.errors import EmptyDatasetError, EmptyMaskError, UnsupportedShiftError
from utils.rng import STREAM_INIT, make_rng


def test_zero_params_give_zero_output(triangle, rng):
    s = ShiftOperator.build(triangle, "hodge")
    out = rnn_forward(rng.standard_normal(3), s, RnnParams.zeros(4, 3))
    assert_array_equal(out, np.zeros(3))


def test_zero_input_gives_zero_output(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    assert_array_equal(rnn_forward(np.zeros(3), s, init_rnn_params(8, 4, seed=1)), np.zeros(3))


def test_node_shift_rejected(triangle):
    with pytest.raises(UnsupportedShiftError):
        rnn_forward(np.zeros(3), ShiftOperator.build(triangle, "node"), RnnParams.zeros(2, 1))


def test_flip_equivariance(random_graph):
    for trial in range(50):
        g = random_graph(8 + trial % 5, 6, trial)
        rng = np.random.default_rng(trial)
        s = ShiftOperator.build(g, "hodge")
        p = init_rnn_params(6, 4, seed=trial, std=0.5)
        f = rng.standard_normal(g.num_edges)
        flip = FlipMatrix.random(g.num_edges, rng)
        direct = apply_flip(flip, rnn_forward(f, s, p))
        flipped = rnn_forward(apply_flip(flip, f), s.reoriented(flip), p)
        assert np.max(np.abs(flipped - direct)) < 1e-9


def test_relu_breaks_flip_equivariance(random_graph):
    worst = 0.0
    for trial in range(10):
        g = random_graph(8, 6, trial)
        rng = np.random.default_rng(trial)
        s = ShiftOperator.build(g, "hodge")
        p = init_rnn_params(6, 4, seed=trial, std=1.0)
        f = rng.standard_normal(g.num_edges)
        flip = FlipMatrix.random(g.num_edges, rng)
        direct = apply_flip(flip, rnn_forward(f, s, p, activation="relu"))
        flipped = rnn_forward(apply_flip(flip, f), s.reoriented(flip), p, activation="relu")
        worst = max(worst, float(np.max(np.abs(flipped - direct))))
    assert worst > 1e-6


def test_linegraph_variant_is_flip_invariant(random_graph):
    g = random_graph(10, 8, 3)
    rng = np.random.default_rng(3)
    s = ShiftOperator.build(g, "linegraph")
    p = init_rnn_params(6, 4, seed=3, std=0.5)
    f = rng.standard_normal(g.num_edges)
    flip = FlipMatrix.random(g.num_edges, rng)
    assert_array_equal(rnn_forward(apply_flip(flip, f), s, p), rnn_forward(f, s, p))


def test_loss_examples(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    zeros = RnnParams.zeros(4, 2)
    assert rnn_loss(np.array([2.0, 1.0, -1.0]), zeros, s, MaskSet((0, 1, 2), (0,))) == 4.0
    assert rnn_loss(np.array([1.0, 3.0, 0.0]), zeros, s, MaskSet((0, 1, 2), (0, 1))) == 5.0


def test_loss_needs_artificial_mask(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    with pytest.raises(EmptyMaskError):
        rnn_loss(np.ones(3), RnnParams.zeros(2, 1), s, MaskSet((0, 1, 2)))


def test_loss_gradient_matches_finite_differences(square_with_diagonal):
    g = square_with_diagonal
    s = ShiftOperator.build(g, "hodge")
    checked = 0
    for seed in range(200):
        if checked == 20:
            break
        rng = np.random.default_rng(seed)
        f = rng.standard_normal(g.num_edges)
        m = MaskSet(tuple(range(g.num_edges)), (int(rng.integers(g.num_edges)),))
        p = init_rnn_params(4, 3, seed=seed, std=0.5)

        def fn(leaves):
            return _loss_graph(f, s, m, leaves, p.k_steps)

        leaves = {name: Tensor(v) for name, v in p.arrays().items()}
        if kink_distance(fn(leaves)) < 1e-4:
            continue
        assert grad_check(fn, p.arrays(), h=1e-5) < 1e-4
        checked += 1
    assert checked == 20


def test_loss_and_grads_agree_with_loss(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    p = init_rnn_params(4, 2, seed=0, std=0.5)
    m = MaskSet((0, 1, 2), (2,))
    f = np.array([1.0, 1.0, -1.0])
    loss, grads = rnn_loss_and_grads(f, p, s, m)
    assert loss == rnn_loss(f, p, s, m)
    assert set(grads) == {"u", "V", "w", "tau_hidden", "tau_out"}
    assert grads["V"].shape == (4, 4)


def test_interpolate_passes_observed_entries_through(random_graph):
    g = random_graph(10, 6, 2)
    s = ShiftOperator.build(g, "hodge")
    p = init_rnn_params(6, 3, seed=2, std=0.5)
    f_obs = np.random.default_rng(2).standard_normal(g.num_edges)
    observed = tuple(range(0, g.num_edges, 2))
    f_hat = interpolate(f_obs, observed, s, p)
    assert_array_equal(f_hat[list(observed)], f_obs[list(observed)])


def test_interpolate_fully_observed_and_unobserved(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    p = init_rnn_params(4, 2, seed=0, std=0.5)
    f = np.array([0.3, -1.2, 2.0])
    assert_array_equal(interpolate(f, MaskSet.all_observed(3), s, p), f)
    assert_array_equal(interpolate(f, (), s, p), rnn_forward(np.zeros(3), s, p))


def test_zero_epochs_returns_initial_params(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    cfg = RnnTrainingConfig(f_dim=4, k_steps=2, epochs=0, seed=5)
    p = train_interpolator([np.array([1.0, 1.0, -1.0])], s, cfg)
    expected = init_rnn_params(4, 2, make_rng(5, STREAM_INIT), std=cfg.init_std, tau_init=cfg.tau_init)
    for name, value in expected.arrays().items():
        assert_array_equal(p.arrays()[name], value)


def test_empty_dataset_rejected(triangle):
    with pytest.raises(EmptyDatasetError):
        train_interpolator([], ShiftOperator.build(triangle, "hodge"))


def test_training_reduces_loss(random_graph):
    g = random_graph(15, 12, 0)
    s = ShiftOperator.build(g, "hodge")
    f = random_cyclic_flow(g, seed=0)
    trainer = RnnTrainer(s, RnnTrainingConfig(f_dim=8, k_steps=4, epochs=400, lr=1e-2, seed=0))
    trainer.fit([f])
    assert len(trainer.step_losses) == 400
    assert np.mean(trainer.step_losses[-50:]) < np.mean(trainer.step_losses[:50])
    assert min(trainer.validation_history[1:]) < trainer.validation_history[0]


def test_training_is_deterministic(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    cfg = RnnTrainingConfig(f_dim=4, k_steps=2, epochs=5, lr=1e-2, seed=3)
    flows = [np.array([1.0, 1.0, -1.0]), np.array([-0.5, -0.5, 0.5])]
    a = train_interpolator(flows, s, cfg)
    b = train_interpolator(flows, s, cfg)
    for name, value in a.arrays().items():
        assert_array_equal(b.arrays()[name], value)


def test_duplicate_flows_match_repeated_epochs(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    f = np.array([1.0, 1.0, -1.0])
    twice = RnnTrainer(s, RnnTrainingConfig(f_dim=4, k_steps=2, epochs=3, lr=1e-2, seed=1))
    twice.fit([f, f])
    repeated = RnnTrainer(s, RnnTrainingConfig(f_dim=4, k_steps=2, epochs=6, lr=1e-2, seed=1))
    repeated.fit([f])
    assert twice.step_losses == repeated.step_losses
    for name, value in twice.last_params.arrays().items():
        assert_array_equal(repeated.last_params.arrays()[name], value)


def test_triangle_completion_after_training(triangle):
    s = ShiftOperator.build(triangle, "hodge")
    rng = np.random.default_rng(0)
    cycle = np.array([1.0, 1.0, -1.0])
    flows = [c * cycle for c in rng.choice([-1.0, 1.0], 20) * rng.uniform(0.5, 1.5, 20)]
    model = HodgeRNN(s, RnnTrainingConfig(f_dim=8, k_steps=2, epochs=100, lr=1e-2, mask_fraction=0.34, seed=0))
    model.fit(flows)
    f_hat = model.predict(np.array([1.0, 1.0, 0.0]), (0, 1))
    assert abs(f_hat[2] - (-1.0)) < 0.5


def test_hodge_rnn_checkpoint_round_trip(tmp_path, triangle):
    s = ShiftOperator.build(triangle, "linegraph")
    model = HodgeRNN(s, RnnTrainingConfig(f_dim=3, k_steps=2, shift="linegraph", seed=7))
    assert model.name == "linegraph-rnn" and model.unsigned
    model.save(tmp_path / "rnn.json")

    restored = HodgeRNN(s, RnnTrainingConfig(f_dim=3, k_steps=2, shift="linegraph", seed=99))
    restored.load(tmp_path / "rnn.json")
    for name, value in model.parameter_arrays().items():
        assert_array_equal(restored.parameter_arrays()[name], value)
    assert restored.params.k_steps == 2


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        RnnTrainingConfig.from_dict({"f_dim": 4, "hidden": 3})
