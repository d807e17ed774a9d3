import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anyon_interferometry.algebra import monodromy
from anyon_interferometry.interferometry import (
    BeamSplitter,
    InterferometerConfig,
    PairBasisMatrix,
    ProbeSpec,
    TargetState,
    channel_factor,
    evolve,
    pair_basis,
)
from anyon_interferometry.models import BUILTIN_NAMES, builtin_model
from anyon_interferometry.oracle import (
    BINOMIAL_MAX_N,
    ENUMERATION_MAX_N,
    Scenario,
    binomial_channel_factor,
    check_density_matrix,
    closed_form_vs_oracle,
    oracle_evolve,
    path_enumeration_factor,
    random_probe,
    random_scenario,
    random_splitter,
    random_target,
)

BAL = BeamSplitter.balanced()


def test_binomial_empty_product(model):
    for b in model.names:
        for e in model.names:
            assert binomial_channel_factor(model, e, b, BAL, 0) == 1


@pytest.mark.parametrize("N", [1, 5, 20])
def test_binomial_vacuum_channel(model, rng, N):
    sp = random_splitter(rng)
    for b in model.names:
        assert binomial_channel_factor(model, "1", b, sp, N) == pytest.approx(1.0, abs=1e-12)


def test_binomial_ising_sigma(ising):
    assert binomial_channel_factor(ising, "sigma", "sigma", BAL, 4) == pytest.approx(0.0625, abs=1e-15)


def test_binomial_range(ising):
    with pytest.raises(ValueError):
        binomial_channel_factor(ising, "sigma", "sigma", BAL, BINOMIAL_MAX_N + 1)
    with pytest.raises(ValueError):
        binomial_channel_factor(ising, "sigma", "sigma", BAL, -1)


@pytest.mark.parametrize("name", ["ising", "fibonacci", "semion"])
def test_path_enumeration_single_and_double(name, rng):
    m = builtin_model(name)
    sp = random_splitter(rng)
    for b in m.names:
        for e in m.names:
            bracket = abs(sp.r) ** 2 + abs(sp.t) ** 2 * monodromy(m, b, e)
            p = ProbeSpec.definite(b)
            assert path_enumeration_factor(m, e, p, sp, 1) == pytest.approx(bracket, abs=1e-14)
            assert path_enumeration_factor(m, e, [p, p], sp) == pytest.approx(bracket**2, abs=1e-14)


def test_path_enumeration_heterogeneous(ising):
    seq = [ProbeSpec.definite("sigma"), ProbeSpec.definite("psi")]
    sp = BeamSplitter(0.6, 0.8)
    expected = (0.64 + 0.36 * 0.0) * (0.64 + 0.36 * -1.0)
    assert path_enumeration_factor(ising, "sigma", seq, sp) == pytest.approx(expected, abs=1e-15)


def test_path_enumeration_vertical_entry(ising):
    sp = BeamSplitter(0.6, 0.8j)
    p = ProbeSpec.definite("sigma", "vertical")
    # a vertical probe passes between with probability |r|^2
    assert path_enumeration_factor(ising, "sigma", p, sp, 1) == pytest.approx(0.36, abs=1e-15)


def test_path_enumeration_range(ising):
    p = ProbeSpec.definite("sigma")
    with pytest.raises(ValueError):
        path_enumeration_factor(ising, "sigma", p, BAL, ENUMERATION_MAX_N + 1)
    with pytest.raises(ValueError):
        path_enumeration_factor(ising, "sigma", p, BAL, 2, placement="left")


@settings(max_examples=80, deadline=None)
@given(name=st.sampled_from(BUILTIN_NAMES), seed=st.integers(0, 2**32 - 1))
def test_enumeration_matches_product_formula(name, seed):
    m = builtin_model(name)
    rng = np.random.default_rng(seed)
    N = int(rng.integers(0, 9))
    probes = [random_probe(m, rng) for _ in range(N)]
    placement = ["below", "above"][int(rng.integers(0, 2))]
    cfg = InterferometerConfig(random_splitter(rng), placement=placement)
    for e in m.names:
        closed = channel_factor(m, e, probes, cfg)
        brute = path_enumeration_factor(m, e, probes, cfg.t1, placement=placement)
        assert abs(closed - brute) < 1e-12


def test_check_density_matrix_initial_state(model, rng):
    t = random_target(model, rng)
    r = check_density_matrix(evolve(t, [], InterferometerConfig(BAL)), t)
    assert max(r.hermiticity_deviation, r.trace_deviation, r.block_weight_deviation) < 1e-12
    assert r.min_eigenvalue >= -1e-12
    assert r.passed


def test_check_density_matrix_long_run(ising):
    t = TargetState.from_mapping(ising, {"1": 1, "psi": 1, "sigma": 1}, normalize=True)
    rho = evolve(t, ProbeSpec.definite("sigma"), InterferometerConfig(BAL), 200)
    r = check_density_matrix(rho, t)
    assert r.passed and r.min_eigenvalue >= -1e-9


def test_check_density_matrix_flags_faults(ising):
    basis = pair_basis(ising)
    n = len(basis)
    bad = np.eye(n, dtype=complex) / n
    bad[0, 1] = 0.3
    r = check_density_matrix(PairBasisMatrix(ising, basis, bad))
    assert r.hermiticity_deviation == pytest.approx(0.3)
    assert not r.passed
    neg = np.diag([1.5, -0.5] + [0.0] * (n - 2)).astype(complex)
    r = check_density_matrix(PairBasisMatrix(ising, basis, neg))
    assert r.min_eigenvalue == pytest.approx(-0.5) and not r.passed
    assert r.trace_deviation == pytest.approx(0.0)


def test_oracle_examples():
    ising = builtin_model("ising")
    rng = np.random.default_rng(6)
    sc = Scenario(random_target(ising, rng), [ProbeSpec.definite("sigma")] * 6, InterferometerConfig(random_splitter(rng)), 6)
    assert closed_form_vs_oracle(sc).passed

    fib = builtin_model("fibonacci")
    t = TargetState.from_mapping(fib, {"1": 0.6, "eps": 0.8})
    sc = Scenario(t, [ProbeSpec.definite("eps")] * 8, InterferometerConfig(BeamSplitter(0.8, 0.6)), 8)
    rep = closed_form_vs_oracle(sc)
    assert rep.max_deviation < 1e-10 and rep.passed


def test_oracle_zero_probes_exact(model, rng):
    sc = random_scenario(model, rng)
    sc = Scenario(sc.target, [], sc.config, 0)
    assert closed_form_vs_oracle(sc).max_deviation == 0.0


def test_oracle_evolve_limits(ising, rng):
    sc = random_scenario(ising, rng)
    big = Scenario(sc.target, [ProbeSpec.definite("sigma")] * 13, sc.config, 13)
    with pytest.raises(ValueError):
        oracle_evolve(big)


def test_report_dict(ising, rng):
    d = closed_form_vs_oracle(random_scenario(ising, rng)).to_dict()
    assert d["threshold"] == 1e-10
    assert isinstance(d["passed"], bool)
    assert set(d["channel_deviations"]) <= set(ising.names)


def test_random_generators_are_seeded():
    a = random_scenario(builtin_model("ising"), np.random.default_rng(3))
    b = random_scenario(builtin_model("ising"), np.random.default_rng(3))
    assert a.N == b.N and np.array_equal(a.target.amplitudes, b.target.amplitudes)
    assert a.config == b.config and a.probes == b.probes
    sp = random_splitter(np.random.default_rng(1))
    assert math.isclose(abs(sp.t) ** 2 + abs(sp.r) ** 2, 1.0, abs_tol=1e-15)
