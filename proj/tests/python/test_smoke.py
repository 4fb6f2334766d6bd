import math

import pytest

import agelab


def test_rng_streams_deterministic():
    a = agelab.Rng(7)
    b = agelab.Rng(7)
    assert [a.uniform() for _ in range(5)] == [b.uniform() for _ in range(5)]
    assert agelab.Rng(7).split("env").uniform() != agelab.Rng(7).split("attack").uniform()


def test_cartpole_step_matches_euler_dynamics():
    state = agelab.EnvState()
    out = agelab.step(state, 1)
    assert out.reward == 1.0
    assert not out.terminated
    assert out.next_state.cart_velocity == pytest.approx(88.0 / 451.0, abs=1e-12)


def test_zeta_is_a_distribution_peaking_at_the_weakest_action():
    q = [1.0, 0.0, 0.5]
    zeta = agelab.zeta_adv(q, 0.5)
    assert sum(zeta) == pytest.approx(1.0, abs=1e-12)
    assert max(range(3), key=lambda a: zeta[a]) == 1


def test_network_forward_and_checkpoint(tmp_path):
    rng = agelab.Rng(3)
    net = agelab.QNetwork.make([4, 8, 2], agelab.Activation.tanh, rng)
    q = net.forward([0.1, -0.2, 0.03, 0.4])
    assert len(q) == 2 and all(math.isfinite(v) for v in q)
    path = tmp_path / "net.ageq"
    agelab.save_checkpoint(net, path)
    clone = agelab.load_checkpoint(path)
    assert list(clone.forward([0.1, -0.2, 0.03, 0.4])) == list(q)


def test_attack_crafting_flips_the_greedy_action():
    rng = agelab.Rng(11)
    net = agelab.QNetwork.make([4, 16, 2], agelab.Activation.tanh, rng)
    spec = agelab.AttackSpec()
    spec.p_attack = 1.0
    spec.mode = agelab.AttackMode.targeted
    obs = [0.0, 0.0, 0.0, 0.0]
    result = agelab.craft(spec, net, obs)
    assert result.success
    assert result.induced_action == min(range(2), key=lambda a: net.forward(obs)[a])


def test_short_training_run_logs_and_learns():
    config = agelab.TrainerConfig()
    config.total_timesteps = 2000
    config.buffer_size = 2000
    config.first_learning_step = 200
    config.batch_size = 16
    config.hidden_dims = [16]
    config.strategy = agelab.Strategy.eps_greedy
    config.validate()
    result = agelab.train(config, agelab.Rng(1))
    assert len(result.log.steps) == 2000
    assert result.log.episodes[-1].episode >= 1
    stats = agelab.evaluate(result.network, 3, agelab.Rng(2))
    assert 0.0 < stats.mean <= 500.0


def test_tabular_chain_oracle():
    mdp = agelab.ToyMdp.chain(5)
    values = agelab.value_iteration(mdp)
    assert values[mdp.start_state] == pytest.approx(0.99 ** 3, abs=1e-10)
    assert agelab.uniform_threshold_holds(0.3)
    assert not agelab.uniform_threshold_holds(0.7)


def test_experiment_registry():
    names = agelab.known_experiment_names()
    assert "nominal-age" in names and "tabular-sweep" in names
