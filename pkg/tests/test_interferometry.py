import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anyon_interferometry.algebra import monodromy
from anyon_interferometry.interferometry import (
    DECAYS,
    KEPT,
    NON_CONVERGENT,
    BeamSplitter,
    InterferometerConfig,
    MissingFSymbolError,
    ProbeSpec,
    TargetState,
    all_channel_factors,
    asymptotic,
    channel_factor,
    channel_table,
    classify_step_factor,
    decompose_initial,
    evolve,
    pair_basis,
    pair_channel_matrix,
    probe_sequence,
    recompose,
    step_factors,
    stray_anyon_pass,
)
from anyon_interferometry.models import BUILTIN_NAMES, builtin_model
from anyon_interferometry.oracle import (
    check_density_matrix,
    path_enumeration_factor,
    random_probe,
    random_scenario,
    random_splitter,
    random_target,
)

from conftest import PHI

S2 = 1 / math.sqrt(2)
BAL = InterferometerConfig(BeamSplitter.balanced())


def ising_target(model):
    return TargetState.from_mapping(model, {"1": 1, "psi": 1, "sigma": 1}, normalize=True)


def rho0(target):
    """Pure initial state written directly in the pair basis: all weight on f = 1."""
    m = target.model
    basis = pair_basis(m)
    v = np.zeros(len(basis), dtype=complex)
    for a in range(m.rank):
        v[basis.index((a, m.vacuum, 0))] = target.amplitudes[a]
    return np.outer(v, v.conj())


# -- value types --------------------------------------------------------------


def test_beam_splitter_validation():
    with pytest.raises(ValueError, match="lossless"):
        BeamSplitter(0.8, 0.8)
    b = BeamSplitter(0.6, 0.8j)
    assert np.allclose(b.matrix @ b.matrix.conj().T, np.eye(2))
    assert BeamSplitter.from_transmission(0.6).r == pytest.approx(0.8)
    assert b.swapped() == BeamSplitter(0.8j, 0.6)


def test_config_validation():
    with pytest.raises(ValueError, match="placement"):
        InterferometerConfig(BeamSplitter.balanced(), placement="between")


def test_probe_spec_normalization_and_directions():
    p = ProbeSpec({("sigma", "h"): 0.6, ("psi", "^"): 0.8})
    assert set(p.amplitudes) == {("sigma", "horizontal"), ("psi", "vertical")}
    with pytest.raises(ValueError, match="normalized"):
        ProbeSpec({("sigma", "h"): 0.6})
    with pytest.raises(ValueError, match="direction"):
        ProbeSpec({("sigma", "up"): 1.0})


def test_between_weights(ising):
    t, r = 0.6, 0.8j
    p = ProbeSpec({("sigma", "h"): 0.6, ("psi", "v"): 0.8})
    w = p.between_weights(ising, BeamSplitter(t, r))
    assert w[ising.index("sigma")] == pytest.approx(abs(0.6 * t) ** 2)
    assert w[ising.index("psi")] == pytest.approx(abs(0.8 * r.conjugate()) ** 2)
    assert w[ising.vacuum] == 0


def test_target_validation(ising):
    with pytest.raises(ValueError, match="normalized"):
        TargetState.from_mapping(ising, {"1": 0.5})
    with pytest.raises(ValueError, match="zero"):
        TargetState.from_mapping(ising, {}, normalize=True)
    with pytest.raises(ValueError, match="amplitudes"):
        TargetState(ising, [1.0, 0.0])
    t = TargetState.from_mapping(ising, {"σ": 0.6, "ψ": 0.8j})
    assert t.amplitude("sigma") == 0.6 and t.support == [1, 2]


def test_probe_sequence():
    p = ProbeSpec.definite("sigma")
    assert probe_sequence(p, 3) == [p, p, p]
    with pytest.raises(ValueError):
        probe_sequence(p)
    with pytest.raises(ValueError):
        probe_sequence([p], 2)
    with pytest.raises(ValueError):
        probe_sequence([p], -1)


# -- decomposition ------------------------------------------------------------


def test_pair_channel_matrix_unitary(model):
    for a in range(model.rank):
        for ap in range(model.rank):
            rows, cols, G = pair_channel_matrix(model, a, ap)
            assert len(rows) == len(cols)
            assert np.allclose(G @ G.conj().T, np.eye(len(rows)), atol=1e-12)


def test_ising_decomposition_channels(ising):
    ch = decompose_initial(ising_target(ising))
    names = lambda es: {ising.names[e] for e in es}
    assert names(ch.channels("sigma", "sigma")) == {"1", "psi"}
    assert names(ch.channels("1", "sigma")) == {"sigma"}
    assert names(ch.channels("psi", "1")) == {"psi"}
    assert names(ch.channels("1", "1")) == {"1"}
    assert len(ch.blocks()) == 9


def test_fibonacci_decomposition_channels(fibonacci):
    t = TargetState.from_mapping(fibonacci, {"1": 0.6, "eps": 0.8})
    ch = decompose_initial(t)
    assert ch.channels("eps", "1") == [1]
    assert ch.channels("1", "eps") == [1]
    assert ch.channels("eps", "eps") == [0, 1]
    # e = 1 share of a diagonal block is |A_a|^2 / d_a^2
    assert ch.coefficient("eps", "eps", "1") == pytest.approx(0.64 / PHI**2, abs=1e-12)


def test_single_charge_target_trace_in_vacuum_channel(model):
    for a in model.names:
        t = TargetState.from_mapping(model, {a: 1.0})
        ch = decompose_initial(t)
        assert ch.blocks() == [(model.index(a), model.index(a))]
        only_vacuum = recompose(ch, np.array([1.0 if e == model.vacuum else 0.0 for e in range(model.rank)]))
        assert only_vacuum.trace() == pytest.approx(1.0, abs=1e-12)


def test_decomposition_conjugate_symmetry(rng):
    for name in BUILTIN_NAMES:
        m = builtin_model(name)
        ch = decompose_initial(random_target(m, rng))
        for (a, ap, e, al, be), v in ch.entries.items():
            assert ch.entries[(ap, a, m.dual[e], be, al)] == pytest.approx(v.conjugate(), abs=1e-14)


def test_missing_f_block(ising):
    s = ising.index("sigma")
    f = {k: v for k, v in ising.f_symbols.items() if not (k[0] == s and k[2] == s and k[3] == ising.index("psi"))}
    broken = ising.replace(f_symbols=f)
    with pytest.raises(MissingFSymbolError):
        decompose_initial(ising_target(broken))


# -- channel factors ----------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(name=st.sampled_from(BUILTIN_NAMES), seed=st.integers(0, 2**32 - 1), N=st.integers(0, 15))
def test_vacuum_channel_factor_is_one(name, seed, N):
    m = builtin_model(name)
    rng = np.random.default_rng(seed)
    probes = [random_probe(m, rng) for _ in range(N)]
    config = InterferometerConfig(random_splitter(rng), placement=["below", "above"][seed % 2])
    assert channel_factor(m, "1", probes, config) == pytest.approx(1.0, abs=1e-12)


def test_ising_psi_probe_kills_sigma_in_one_step(ising):
    assert channel_factor(ising, "sigma", ProbeSpec.definite("psi"), BAL, 1) == pytest.approx(0.0, abs=1e-15)


def test_fibonacci_ten_probes(fibonacci):
    cfg = InterferometerConfig(BeamSplitter(0.8, 0.6))
    p = ProbeSpec.definite("eps")
    closed = channel_factor(fibonacci, "eps", p, cfg, 10)
    oracle = path_enumeration_factor(fibonacci, "eps", p, cfg.t1, 10)
    assert closed == pytest.approx(oracle, abs=1e-12)
    assert closed == pytest.approx((0.36 - 0.64 / PHI**2) ** 10, abs=1e-12)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_identical_probe_reduction(name, rng):
    m = builtin_model(name)
    for _ in range(5):
        sp = random_splitter(rng)
        cfg = InterferometerConfig(sp)
        for b in m.names:
            for e in m.names:
                M = monodromy(m, b, e)
                base = abs(sp.r) ** 2 + abs(sp.t) ** 2 * M
                for N in (0, 1, 7, 50):
                    got = channel_factor(m, e, ProbeSpec.definite(b), cfg, N)
                    assert abs(got - base**N) < 1e-12


def test_all_channel_factors_matches_single(ising, rng):
    probes = [random_probe(ising, rng) for _ in range(6)]
    cfg = InterferometerConfig(random_splitter(rng))
    fac = all_channel_factors(ising, probes, cfg)
    for e in range(ising.rank):
        assert fac[e] == pytest.approx(channel_factor(ising, e, probes, cfg), abs=1e-15)


def test_monotone_decay(fibonacci):
    cfg = InterferometerConfig(BeamSplitter(0.8, 0.6))
    p = ProbeSpec.definite("eps")
    ratio = abs(0.36 + 0.64 * monodromy(fibonacci, "eps", "eps"))
    prev = 1.0
    for N in range(1, 40):
        cur = abs(channel_factor(fibonacci, "eps", p, cfg, N))
        assert cur < prev
        assert cur == pytest.approx(ratio * prev, rel=1e-12)
        prev = cur


def test_placement_above_swaps_and_conjugates(rng):
    for name in BUILTIN_NAMES:
        m = builtin_model(name)
        m_conj = m.replace(s_matrix=m.s_matrix.conj())
        for _ in range(5):
            target = random_target(m, rng)
            probes = [random_probe(m, rng) for _ in range(5)]
            sp = random_splitter(rng)
            above = evolve(target, probes, InterferometerConfig(sp, placement="above"))
            below = evolve(
                TargetState(m_conj, target.amplitudes), probes, InterferometerConfig(sp.swapped(), placement="below")
            )
            assert np.max(np.abs(above.matrix - below.matrix)) < 1e-13


# -- evolution ----------------------------------------------------------------


def test_zero_probes_gives_initial_state(model, rng):
    t = random_target(model, rng)
    rho = evolve(t, [], BAL)
    assert np.max(np.abs(rho.matrix - rho0(t))) < 1e-13


def test_no_transmission_leaves_state(ising, rng):
    t = random_target(ising, rng)
    cfg = InterferometerConfig(BeamSplitter(0.0, 1.0))
    rho = evolve(t, ProbeSpec.definite("sigma"), cfg, 25)
    assert np.max(np.abs(rho.matrix - rho0(t))) < 1e-13


def test_ising_sigma_full_decoherence(ising):
    rho = evolve(ising_target(ising), ProbeSpec.definite("sigma"), BAL, 200)
    diag = {ising.names[a] + ";" + ising.names[f]: rho.matrix[i, i].real for i, (a, f, _) in enumerate(rho.basis)}
    assert diag == pytest.approx({"1;1": 1 / 3, "psi;1": 1 / 3, "sigma;1": 1 / 6, "sigma;psi": 1 / 6}, abs=1e-12)
    off = rho.matrix - np.diag(np.diag(rho.matrix))
    assert np.max(np.abs(off)) < 1e-12


def test_ising_psi_probe_partial_decoherence(ising):
    t = ising_target(ising)
    rho = evolve(t, ProbeSpec.definite("psi"), BAL, 200)
    assert rho.entry("1", "1", "psi") == pytest.approx(t.amplitude("psi").conjugate() * t.amplitude("1"), abs=1e-12)
    assert abs(rho.entry("1", "1", "sigma")) < 1e-12
    assert abs(rho.entry("psi", "1", "sigma")) < 1e-12
    assert rho.entry("sigma", "1", "sigma") == pytest.approx(1 / 3, abs=1e-12)


def test_theta_and_second_splitter_are_ignored(ising, rng):
    t = random_target(ising, rng)
    probes = [random_probe(ising, rng) for _ in range(7)]
    sp = random_splitter(rng)
    ref = evolve(t, probes, InterferometerConfig(sp))
    for _ in range(5):
        cfg = InterferometerConfig(sp, t2=random_splitter(rng), theta_I=rng.uniform(-7, 7), theta_II=rng.uniform(-7, 7))
        assert np.array_equal(evolve(t, probes, cfg).matrix, ref.matrix)


def test_trace_carried_by_vacuum_channel(model, rng):
    for _ in range(5):
        ch = decompose_initial(random_target(model, rng))
        factors = rng.normal(size=model.rank) + 1j * rng.normal(size=model.rank)
        factors[model.vacuum] = 0.0
        assert abs(recompose(ch, factors).trace()) < 1e-12
        factors[model.vacuum] = 1.0
        assert recompose(ch, factors).trace() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(BUILTIN_NAMES), seed=st.integers(0, 2**32 - 1))
def test_density_matrix_invariants(name, seed):
    m = builtin_model(name)
    sc = random_scenario(m, np.random.default_rng(seed), max_N=20)
    rho = evolve(sc.target, sc.probes, sc.config, sc.N)
    report = check_density_matrix(rho, sc.target)
    assert report.passed, report.to_dict()
    assert report.min_eigenvalue >= -1e-9


# -- stray anyons -------------------------------------------------------------


def test_stray_zero_passes(ising, rng):
    t = random_target(ising, rng)
    assert np.max(np.abs(stray_anyon_pass(t, ProbeSpec.definite("sigma"), 0).matrix - rho0(t))) < 1e-13


def test_stray_sigma_decoheres_in_one_pass(ising):
    t = TargetState.from_mapping(ising, {"1": 0.6, "sigma": 0.8})
    rho = stray_anyon_pass(t, ProbeSpec.definite("sigma"), 1)
    assert abs(rho.entry("1", "1", "sigma")) < 1e-15
    assert rho.block_weight("sigma") == pytest.approx(0.64, abs=1e-12)


@pytest.mark.parametrize("passes,sign", [(1, -1), (2, 1), (3, -1), (4, 1)])
def test_stray_semion_oscillates(semion, passes, sign):
    t = TargetState.from_mapping(semion, {"1": 0.6, "s": 0.8})
    rho = stray_anyon_pass(t, ProbeSpec.definite("s"), passes)
    assert rho.entry("1", "1", "s") == pytest.approx(sign * 0.48, abs=1e-14)


def test_stray_matches_evolve(fibonacci, rng):
    t = random_target(fibonacci, rng)
    p = ProbeSpec.definite("eps")
    cfg = InterferometerConfig(BeamSplitter(1.0, 0.0))
    assert np.array_equal(stray_anyon_pass(t, p, 3).matrix, evolve(t, p, cfg, 3).matrix)


# -- asymptotics --------------------------------------------------------------


def test_classify_step_factor():
    assert classify_step_factor(1.0) == KEPT
    assert classify_step_factor(0.5 + 0.1j) == DECAYS
    assert classify_step_factor(-1.0) == NON_CONVERGENT
    assert classify_step_factor(1j) == NON_CONVERGENT


def test_asymptotic_ising_psi(ising):
    t = ising_target(ising)
    rho, report = asymptotic(t, ProbeSpec.definite("psi"), BAL)
    assert report.converged
    assert rho.entry("1", "1", "psi") == pytest.approx(1 / 3, abs=1e-12)
    assert rho.entry("sigma", "1", "sigma") == pytest.approx(1 / 3, abs=1e-12)
    assert abs(rho.entry("1", "1", "sigma")) < 1e-15
    assert abs(rho.entry("psi", "1", "sigma")) < 1e-15
    assert np.max(np.abs(rho.matrix - evolve(t, ProbeSpec.definite("psi"), BAL, 60).matrix)) < 1e-12


def test_asymptotic_fibonacci(fibonacci):
    t = TargetState.from_mapping(fibonacci, {"1": 0.6, "eps": 0.8})
    rho, report = asymptotic(t, ProbeSpec.definite("eps"), InterferometerConfig(BeamSplitter(0.8, 0.6)))
    assert report.converged
    assert rho.entry("1", "1", "1") == pytest.approx(0.36, abs=1e-12)
    assert rho.entry("eps", "1", "eps") == pytest.approx(0.64 / PHI**2, abs=1e-12)
    assert rho.entry("eps", "eps", "eps") == pytest.approx(0.64 / PHI, abs=1e-12)
    assert abs(rho.entry("1", "1", "eps")) < 1e-15
    statuses = {(c.a, c.a_prime, c.e): c.status for c in report.channels}
    assert statuses[("eps", "eps", "1")] == KEPT
    assert statuses[("eps", "eps", "eps")] == DECAYS


def test_asymptotic_non_convergent(ising):
    t = TargetState.from_mapping(ising, {"1": 0.6, "sigma": 0.8})
    p = ProbeSpec.definite("psi")
    cfg = InterferometerConfig(BeamSplitter(1.0, 0.0))
    rho, report = asymptotic(t, p, cfg)
    assert not report.converged
    flagged = {(c.a, c.a_prime, c.e) for c in report.non_convergent()}
    assert flagged == {("1", "sigma", "sigma"), ("sigma", "1", "sigma")}
    assert all(c.factor == pytest.approx(-1.0) for c in report.non_convergent())
    # the limit does not exist: consecutive N differ by a sign in that channel
    a, b = evolve(t, p, cfg, 10), evolve(t, p, cfg, 11)
    assert a.entry("1", "1", "sigma") == pytest.approx(-b.entry("1", "1", "sigma"), abs=1e-15)
    assert abs(a.entry("1", "1", "sigma")) == pytest.approx(0.48)
    assert check_density_matrix(rho, t).passed


def test_channel_table(ising):
    table = channel_table(decompose_initial(ising_target(ising)))
    assert (1, 1, 0) in table and (1, 1, 2) in table and (0, 1, 1) in table
    assert len(table) == 10


def test_step_factors_vector(ising):
    sf = step_factors(ising, ProbeSpec.definite("sigma"), BAL)
    assert sf == pytest.approx([1.0, 0.5, 0.5 + 0.5 * monodromy(ising, "sigma", "psi")], abs=1e-15)
