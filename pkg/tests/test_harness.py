import io
import os
import dataclasses

import pytest
import tempfile
import numpy as np

from tests.utils import random_quadratic_shards

from flecs.errors import ConfigError
from flecs.compression import IDENTITY
from flecs.harness import RunConfig, parse_config, load_config, save_config
from flecs.harness import TraceRow, run, compare, bits_to_reach, build_shards
from flecs.harness import write_trace, write_comparison, read_trace
from flecs.harness import CheckResult, check_compressor, check_error_feedback, check_operator_bounds
from flecs.harness import cli
from flecs.harness.cli import main, format_bits
from flecs.optim import DIRECT, TRUNCATED


@pytest.fixture
def small_config():
    return RunConfig(
        synthetic_samples=200, synthetic_dim=10, n_workers=4, memory=2, reg_mu=1e-2, rounds=10, seed=7
    )


@pytest.fixture
def config_file(small_config):
    with tempfile.TemporaryDirectory() as tmpdir:
        filepath = os.path.join(tmpdir, 'run.cfg')
        save_config(small_config, filepath)
        yield filepath


def test_config_defaults():
    config = RunConfig().validate()
    assert config.b0_scale == 0.0
    assert (config.omega_trunc, config.Omega_trunc) == (1e-5, 1e8)
    assert (config.alpha, config.beta, config.gamma) == (1.0, 1.0, 1.0)
    assert config.rho_value == pytest.approx(1e-8)
    assert config.memory == 1
    assert config.grad_spec.levels == 64 and config.grad_spec.norm_order == np.inf
    assert config.hess_spec.levels == 64 and config.hess_spec.norm_order == np.inf


def test_config_round_trip(small_config):
    assert parse_config(small_config.to_text()) == small_config
    other = dataclasses.replace(small_config, rho=0.125, batch='minibatch', batch_size=5, n_features=30,
                                grad_norm=2.0, record_time=True)
    assert parse_config(other.to_text()) == other


def test_parse_config():
    text = "# comment\n\nrounds = 5\nrho = auto\nhess_levels = 128  # inline\ngrad_compressor = identity\n"
    config = parse_config(text)
    assert config.rounds == 5 and config.rho is None
    assert config.hess_levels == 128
    assert config.grad_compressor == IDENTITY


@pytest.mark.parametrize("text,line_number", [
    ("rounds = 5\nunknown = 1\n", 2),
    ("rounds = 5\nrounds = 6\n", 2),
    ("rounds five\n", 1),
    ("\nrounds = 5.5\n", 2),
    ("verbose = maybe\n", 1)
])
def test_parse_config_errors(text, line_number):
    with pytest.raises(ConfigError, match="Line {}:".format(line_number)):
        parse_config(text)


@pytest.mark.parametrize("key,value", [
    ('omega_trunc', '0.0'), ('Omega_trunc', '1e-6'), ('beta', '2.0'), ('gamma', '0.0'), ('alpha', '-1.0'),
    ('memory', '0'), ('grad_levels', '0'), ('grad_norm', '1.0'), ('hessian_update', 'bfgs'),
    ('direction', 'newton'), ('lsr1_middle', 'other'), ('batch', 'minibatch'), ('partition', 'random'),
    ('n_workers', '0'), ('rounds', '-1'), ('sketch', 'hadamard'), ('rho', '-1.0')
])
def test_config_validation(key, value):
    with pytest.raises(ConfigError):
        parse_config("{} = {}\n".format(key, value))


def test_load_config(config_file, small_config):
    assert load_config(config_file) == small_config
    with pytest.raises(ConfigError):
        load_config(config_file + '.missing')


def test_run_zero_rounds(small_config):
    trace = run(dataclasses.replace(small_config, rounds=0))
    assert len(trace) == 1
    assert trace[0].k == 0
    assert trace[0].objective == pytest.approx(np.log(2.0))
    assert trace[0].uplink_bits == 0 and trace[0].downlink_bits == 0


def test_run_trace(small_config):
    trace = run(small_config)
    assert [row.k for row in trace] == list(range(11))
    uplinks = [row.uplink_bits for row in trace]
    downlinks = [row.downlink_bits for row in trace]
    assert all(a < b for a, b in zip(uplinks, uplinks[1:]))
    assert all(a < b for a, b in zip(downlinks, downlinks[1:]))
    assert all(row.ms == 0.0 for row in trace)
    assert trace[-1].objective < trace[0].objective


def test_run_deterministic(small_config):
    first = write_trace(run(small_config))
    second = write_trace(run(small_config))
    parallel = write_trace(run(dataclasses.replace(small_config, n_jobs=2)))
    assert first == second == parallel


def test_run_identity_equals_flecs(small_config):
    config = dataclasses.replace(small_config, grad_compressor=IDENTITY, hess_compressor=IDENTITY)
    traces = compare(config, ['cgd', 'flecs'])
    cgd, flecs = traces['cgd'], traces['flecs']
    assert [(r.objective, r.grad_sq_norm) for r in cgd] == [(r.objective, r.grad_sq_norm) for r in flecs]
    assert [r.uplink_bits for r in cgd] == [r.uplink_bits for r in flecs]


def test_run_quadratic_shards(rng):
    shards = random_quadratic_shards(2, 6, rng)
    config = RunConfig(
        n_workers=2, memory=6, grad_compressor=IDENTITY, hess_compressor=IDENTITY, hessian_update=DIRECT,
        direction=TRUNCATED, rounds=3
    )
    trace = run(config, shards=shards)
    assert trace[-1].grad_sq_norm <= 1e-16 * max(1.0, trace[0].grad_sq_norm)


def test_run_errors(small_config, rng):
    with pytest.raises(ConfigError):
        run(dataclasses.replace(small_config, memory=11))
    with pytest.raises(ConfigError):
        run(dataclasses.replace(small_config, batch='minibatch', batch_size=51))
    with pytest.raises(ConfigError):
        run(small_config, shards=random_quadratic_shards(3, 10, rng))


def test_compare(small_config):
    traces = compare(small_config, ['cgd', 'flecs'])
    assert list(traces.keys()) == ['cgd', 'flecs']
    assert traces['cgd'][0] == traces['flecs'][0]
    assert traces['cgd'][1].uplink_bits < traces['flecs'][1].uplink_bits
    with pytest.raises(ConfigError):
        compare(small_config, [])
    with pytest.raises(ConfigError):
        compare(small_config, ['fednl'])
    with pytest.raises(ConfigError):
        compare(small_config, ['cgd', 'cgd'])


def test_bits_to_reach():
    trace = [TraceRow(0, 1.0, 1.0, 0, 0, 0.0), TraceRow(1, 0.5, 0.1, 10, 20, 0.0), TraceRow(2, 0.2, 0.0, 20, 40, 0.0)]
    assert bits_to_reach(trace, 1.0) == 0
    assert bits_to_reach(trace, 0.4) == 20
    assert bits_to_reach(trace, 0.1) is None


def test_write_trace():
    trace = [TraceRow(0, 0.6931471805599453, 0.25, 0, 0, 0.0), TraceRow(1, 0.5, 0.125, 2064, 7872, 0.0)]
    text = write_trace(trace)
    assert text == (
        "k,objective,grad_sq_norm,uplink_bits,downlink_bits,ms\n"
        "0,0.6931471805599453,0.25,0,0,0.0\n"
        "1,0.5,0.125,2064,7872,0.0\n"
    )
    assert read_trace(io.StringIO(text)) == {'': trace}
    merged = write_comparison({'cgd': trace, 'flecs': trace})
    assert merged.splitlines()[0] == "variant,k,objective,grad_sq_norm,uplink_bits,downlink_bits,ms"
    assert merged.splitlines()[3] == "flecs,0,0.6931471805599453,0.25,0,0,0.0"
    assert read_trace(io.StringIO(merged)) == {'cgd': trace, 'flecs': trace}


def test_format_bits():
    text = format_bits(RunConfig(), 123)
    assert "uplink bits (cgd) = 2064\n" in text
    assert "uplink bits (flecs) = 4984\n" in text
    assert "downlink bits = 7872\n" in text


@pytest.mark.parametrize("d,m,levels,grad_compressor", [
    (123, 1, 64, 'random-dithering'), (123, 2, 64, 'random-dithering'), (10, 1, 1, 'random-dithering'),
    (10, 4, 128, 'random-dithering'), (5000, 1, 64, 'random-dithering'), (5000, 8, 128, 'random-dithering'),
    (50, 3, 7, 'random-dithering'), (123, 1, 64, 'identity'), (1, 1, 64, 'random-dithering'), (300, 8, 2, 'identity')
])
def test_cli_bits(d, m, levels, grad_compressor, capsys):
    config = RunConfig(synthetic_dim=d, memory=m, grad_compressor=grad_compressor, grad_levels=levels,
                       hess_levels=levels)
    with tempfile.TemporaryDirectory() as tmpdir:
        filepath = os.path.join(tmpdir, 'bits.cfg')
        save_config(config, filepath)
        assert main(['bits', filepath]) == 0
    out = dict(line.split(' = ') for line in capsys.readouterr().out.splitlines())
    level_bits = int(levels).bit_length()
    hess_vector = 32 + d * (1 + level_bits)
    grad_vector = 32 * d if grad_compressor == IDENTITY else hess_vector
    assert int(out['uplink gradient bits']) == grad_vector
    assert int(out['uplink hessian bits']) == m * hess_vector
    assert int(out['uplink curvature bits']) == 32 * m * m
    assert int(out['uplink bits (cgd)']) == grad_vector + m * hess_vector + 32 * m * m
    assert int(out['uplink bits (flecs)']) == 32 * d + m * hess_vector + 32 * m * m
    assert int(out['downlink bits']) == 32 * d + 32 * d * m


def test_cli_run(config_file, capsys):
    with tempfile.TemporaryDirectory() as tmpdir:
        out_path = os.path.join(tmpdir, 'results', 'trace.csv')
        assert main(['run', config_file, '--rounds', '3', '--seed', '11', '--out', out_path]) == 0
        with open(out_path, 'r', encoding='utf-8') as file:
            first = file.read()
        assert main(['run', config_file, '--rounds', '3', '--seed', '11', '--out', out_path]) == 0
        with open(out_path, 'r', encoding='utf-8') as file:
            assert file.read() == first
    assert len(first.splitlines()) == 5
    assert main(['compare', config_file, '--rounds', '2', '--variants', 'cgd,flecs']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith('variant,k')
    assert len(lines) == 1 + 2 * 3


def test_cli_exit_codes(config_file):
    with tempfile.TemporaryDirectory() as tmpdir:
        bad_config = os.path.join(tmpdir, 'bad.cfg')
        with open(bad_config, 'w', encoding='utf-8') as file:
            file.write("beta = 3.0\n")
        assert main(['run', bad_config]) == 1
        missing_data = os.path.join(tmpdir, 'missing.cfg')
        with open(missing_data, 'w', encoding='utf-8') as file:
            file.write("dataset = {}\n".format(os.path.join(tmpdir, 'missing.txt')))
        assert main(['run', missing_data]) == 2
        bad_data = os.path.join(tmpdir, 'bad_data.cfg')
        with open(os.path.join(tmpdir, 'bad.txt'), 'w', encoding='utf-8') as file:
            file.write("+1 2:1.0 1:1.0\n")
        with open(bad_data, 'w', encoding='utf-8') as file:
            file.write("dataset = {}\n".format(os.path.join(tmpdir, 'bad.txt')))
        assert main(['run', bad_data]) == 2
    assert main(['compare', config_file, '--variants', '']) == 1


def test_cli_gradcheck(config_file, capsys):
    assert main(['gradcheck', config_file]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8
    assert all(line.startswith('PASS') for line in lines)


def test_build_shards(small_config):
    shards = build_shards(small_config)
    assert len(shards) == 4
    assert sum(shard.n_samples for shard in shards) == 200
    assert all(shard.dim == 10 and shard.reg_mu == 1e-2 for shard in shards)


def test_check_compressor(rng):
    results = check_compressor(dim=20, n_vectors=2, draws=20_000, random_state=rng)
    assert len(results) == 4
    assert all(r.passed for r in results)


def test_check_error_feedback(rng):
    results = check_error_feedback(dim=10, draws=20_000, random_state=rng)
    assert [r.name for r in results] == ['error-feedback[gamma=0.25]', 'error-feedback[gamma=1.0]']
    assert all(r.passed for r in results)


def test_check_operator_bounds(rng):
    results = check_operator_bounds(random_state=rng)
    assert [r.name for r in results] == ['operator-bounds[truncated]', 'operator-bounds[fedsonia]']
    assert all(r.passed for r in results)


def test_cli_selftest(monkeypatch, capsys):
    def fake_selftest(results):
        return lambda draws, random_state: results

    monkeypatch.setattr(cli, 'run_selftest', fake_selftest([CheckResult('check', True, 'ok')]))
    assert main(['selftest', '--draws', '10000']) == 0
    assert capsys.readouterr().out == "PASS check: ok\n"
    monkeypatch.setattr(cli, 'run_selftest', fake_selftest([CheckResult('check', False, 'bad')]))
    assert main(['selftest']) == 3
    assert capsys.readouterr().out == "FAIL check: bad\n"
