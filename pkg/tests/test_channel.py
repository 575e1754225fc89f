import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmwsim.channel import (
    BeamformingPair,
    ChannelRealization,
    FixedLinkState,
    LinkState,
    LinkStateModel,
    PathlossParams,
    SpatialChannel,
    SubpathParams,
    assemble_channel,
    beam_projections,
    beamformed_gains,
    beamforming_gain,
    generate_realization_pool,
    load_pool,
    pathloss_db,
    power_iteration_beamforming,
    save_pool,
    select_link_state,
    small_scale_gain,
    update_large_scale,
)
from mmwsim.channel.pool import parse_pool, pool_to_bytes
from mmwsim.channel.propagation import link_budget_dbm


def _subpaths(power, omega=None, delay=None):
    n = len(power)
    return SubpathParams(
        power=np.asarray(power, float),
        aoa_rel_motion=np.zeros(n) if omega is None else np.asarray(omega, float),
        delay=np.zeros(n) if delay is None else np.asarray(delay, float),
        cluster=np.zeros(n, dtype=np.int32),
    )


# -- link state ----------------------------------------------------------------


def test_link_state_examples():
    assert select_link_state(10.0, FixedLinkState(0.7, 0.2), 0.5) is LinkState.LOS
    assert select_link_state(10.0, FixedLinkState(0.0, 0.0), 0.3) is LinkState.OUTAGE
    assert select_link_state(10.0, FixedLinkState(0.3, 0.5), 0.6) is LinkState.NLOS


@given(st.floats(0.01, 1000.0), st.floats(0.0, 1.0))
def test_link_state_partition(d, u):
    m = LinkStateModel()
    p_los, p_nlos = m.p_los(d), m.p_nlos(d)
    assert 0 <= p_los <= 1 and 0 <= p_nlos <= 1 and p_los + p_nlos <= 1 + 1e-12
    branches = [u <= p_los, p_los < u <= p_los + p_nlos, u > p_los + p_nlos]
    assert sum(branches) == 1
    expected = [LinkState.LOS, LinkState.NLOS, LinkState.OUTAGE][branches.index(True)]
    assert select_link_state(d, m, u) is expected


@pytest.mark.parametrize("d", [0.0, -1.0, math.inf, math.nan])
def test_link_state_rejects_bad_distance(d):
    with pytest.raises(ValueError):
        select_link_state(d, LinkStateModel(), 0.5)


# -- pathloss ---------------------------------------------------------------------


def test_pathloss_examples():
    assert pathloss_db(1.0, PathlossParams(61.4, 2.0, 5.8)) == 61.4
    assert pathloss_db(100.0, PathlossParams(61.4, 2.0, 5.8)) == pytest.approx(101.4, abs=1e-12)
    assert pathloss_db(10.0, PathlossParams(0.0, 1.0, 0.0), 3.0) == pytest.approx(13.0, abs=1e-12)
    with pytest.raises(ValueError):
        pathloss_db(0.0, PathlossParams(61.4, 2.0, 5.8))


@given(st.floats(0.1, 1e4), st.floats(0.1, 1e4))
def test_pathloss_increasing(d1, d2):
    p = PathlossParams(72.0, 2.92, 8.7)
    if d1 < d2:
        assert pathloss_db(d1, p) < pathloss_db(d2, p)


def test_link_budget():
    assert link_budget_dbm(30.0, 100.0, 101.4) == pytest.approx(-51.4, abs=1e-12)
    assert link_budget_dbm(30.0, 1.0, 0.0) == 30.0


# -- small-scale fading -------------------------------------------------------------


def test_small_scale_examples():
    assert small_scale_gain(0.0, 0.0, 1.0, 0.0, 0.0, 0.0) == 1 + 0j
    assert abs(small_scale_gain(0.3, 1e9, 4.0, 1.0, 1e-8, 50.0)) == pytest.approx(2.0, abs=1e-12)
    g = small_scale_gain(2.5e-3, 0.0, 1.0, 0.0, 0.0, 100.0)
    assert cmath.phase(g) == pytest.approx(math.pi / 2, abs=1e-9)
    assert g == pytest.approx(1j, abs=1e-12)
    with pytest.raises(ValueError):
        small_scale_gain(0.0, 0.0, -1.0, 0.0, 0.0, 0.0)


@given(
    st.floats(0, 10), st.floats(-5e8, 5e8), st.floats(0, 10), st.floats(0, 2 * math.pi), st.floats(0, 1e-6), st.floats(0, 3000)
)
def test_small_scale_unit_modulus(t, f, p, w, tau, fd):
    assert abs(abs(small_scale_gain(t, f, p, w, tau, fd)) - math.sqrt(p)) <= 1e-12 * max(1.0, math.sqrt(p))


# -- channel matrix -----------------------------------------------------------------


def test_assemble_scalar_channel():
    sp = SpatialChannel(0, np.ones((1, 1), complex), np.ones((1, 1), complex), _subpaths([0.25]))
    H = assemble_channel(sp, 0.0, 0.0, 0.0)
    assert H.shape == (1, 1)
    assert H[0, 0] == pytest.approx(0.5)


def test_assemble_cancellation():
    # equal signatures, gains of opposite phase: delay of half a period at f
    u = np.ones((2, 2), complex) / math.sqrt(2)
    sp = SpatialChannel(0, u, u, _subpaths([0.5, 0.5], delay=[0.0, 0.5e-6]))
    H = assemble_channel(sp, 0.0, 1e6, 0.0)
    assert np.max(np.abs(H)) < 1e-12


def test_assemble_matches_direct_sum():
    rng = np.random.default_rng(7)
    n_rx, n_tx, L = 2, 2, 3
    tx = rng.normal(size=(n_tx, L)) + 1j * rng.normal(size=(n_tx, L))
    rx = rng.normal(size=(n_rx, L)) + 1j * rng.normal(size=(n_rx, L))
    tx /= np.linalg.norm(tx, axis=0)
    rx /= np.linalg.norm(rx, axis=0)
    power = np.array([0.5, 0.3, 0.2])
    omega = np.array([0.1, 1.2, 2.5])
    delay = np.array([1e-9, 5e-9, 20e-9])
    sp = SpatialChannel(0, tx, rx, _subpaths(power, omega, delay))
    t, f, fd = 1.3e-3, 2e8, 1867.0
    H = assemble_channel(sp, t, f, fd)
    for i in range(n_rx):
        for j in range(n_tx):
            acc = 0j
            for l in range(L):
                g = math.sqrt(power[l]) * cmath.exp(1j * (2 * math.pi * fd * math.cos(omega[l]) * t - 2 * math.pi * delay[l] * f))
                acc += g * rx[i, l] * tx[j, l].conjugate()
            assert H[i, j] == pytest.approx(math.sqrt(n_rx * n_tx) * acc, abs=1e-12)


def test_beamformed_gains_match_matrix_path():
    pool = generate_realization_pool(3, 1, tx_antennas=8, rx_antennas=4)
    sp = pool[0]
    H0 = assemble_channel(sp, 0.0, 0.0, 500.0)
    pair = power_iteration_beamforming(H0)
    proj = beam_projections(sp, pair.rx_weights, pair.tx_weights)
    freqs = np.array([-3e8, 0.0, 1e8])
    fast = beamformed_gains(sp, proj, 2e-3, freqs, 500.0)
    for k, f in enumerate(freqs):
        slow = beamforming_gain(assemble_channel(sp, 2e-3, f, 500.0), pair)
        assert fast[k] == pytest.approx(slow, rel=1e-10)


def test_doubling_gains_quadruples_bf_gain():
    pool = generate_realization_pool(4, 1, tx_antennas=8, rx_antennas=4)
    sp = pool[0]
    sp4 = SpatialChannel(0, sp.tx_spatial, sp.rx_spatial, _subpaths(4 * sp.subpaths.power, sp.subpaths.aoa_rel_motion, sp.subpaths.delay))
    H = assemble_channel(sp, 1e-3, 0.0, 100.0)
    pair = power_iteration_beamforming(H)
    assert beamforming_gain(assemble_channel(sp4, 1e-3, 0.0, 100.0), pair) == pytest.approx(4 * beamforming_gain(H, pair), rel=1e-12)


# -- beamforming ----------------------------------------------------------------------


def test_bf_diagonal():
    H = np.diag([3.0, 1.0]).astype(complex)
    pair = power_iteration_beamforming(H)
    assert beamforming_gain(H, pair) == pytest.approx(9.0, rel=1e-12)
    assert abs(pair.tx_weights[0]) == pytest.approx(1.0) and abs(pair.rx_weights[0]) == pytest.approx(1.0)


def test_bf_rank_one():
    rng = np.random.default_rng(1)
    u = rng.normal(size=5) + 1j * rng.normal(size=5)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    u /= np.linalg.norm(u)
    v /= np.linalg.norm(v)
    pair = power_iteration_beamforming(2.0 * np.outer(u, v.conj()))
    assert abs(np.vdot(u, pair.rx_weights)) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.vdot(v, pair.tx_weights)) == pytest.approx(1.0, abs=1e-12)


def test_bf_random_4x4_matches_svd():
    rng = np.random.default_rng(2)
    H = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    sigma = np.linalg.svd(H, compute_uv=False)[0]
    assert beamforming_gain(H, power_iteration_beamforming(H)) == pytest.approx(sigma**2, rel=1e-6)


def test_bf_gain_examples():
    assert beamforming_gain(np.array([[2 - 1j]]), BeamformingPair(np.array([1.0 + 0j]), np.array([1.0 + 0j]))) == pytest.approx(5.0)
    H = np.array([[1.0, 0.0], [0.0, 0.0]], complex)
    pair = BeamformingPair(np.array([0, 1], complex), np.array([0, 1], complex))
    assert beamforming_gain(H, pair) == 0.0
    with pytest.raises(ValueError):
        beamforming_gain(np.ones((3, 3)), pair)
    with pytest.raises(ValueError):
        power_iteration_beamforming(np.zeros((2, 2)))


def test_bf_gain_64x16_direct_triple_product():
    sp = generate_realization_pool(5, 1)[0]
    H = assemble_channel(sp, 0.0, 0.0, 0.0)
    assert H.shape == (16, 64)
    pair = power_iteration_beamforming(H)
    direct = 0j
    for i in range(16):
        for j in range(64):
            direct += pair.rx_weights[i].conjugate() * H[i, j] * pair.tx_weights[j]
    assert beamforming_gain(H, pair) == pytest.approx(abs(direct) ** 2, rel=1e-10)


@settings(max_examples=30)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.integers(0, 1000))
def test_bf_gain_phase_invariance(a, b, seed):
    rng = np.random.default_rng(seed)
    H = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    pair = power_iteration_beamforming(H)
    rotated = BeamformingPair(pair.tx_weights * cmath.exp(1j * a), pair.rx_weights * cmath.exp(1j * b))
    assert beamforming_gain(H, rotated) == pytest.approx(beamforming_gain(H, pair), rel=1e-12)


def test_bf_weights_unit_norm_enforced():
    with pytest.raises(ValueError):
        BeamformingPair(np.array([1.0, 1.0]), np.array([1.0]))


# -- pool and updates -------------------------------------------------------------------


def test_pool_generation_properties():
    pool = generate_realization_pool(11, 100)
    assert len(pool) == 100
    for sp in pool:
        assert sp.n_tx == 64 and sp.n_rx == 16
        assert sp.tx_spatial.shape[1] == sp.rx_spatial.shape[1] == len(sp.subpaths)
        assert np.max(np.abs(np.linalg.norm(sp.tx_spatial, axis=0) - 1)) <= 1e-12
        assert np.max(np.abs(np.linalg.norm(sp.rx_spatial, axis=0) - 1)) <= 1e-12
        assert sp.subpaths.power.sum() == pytest.approx(1.0, abs=1e-12)
    again = generate_realization_pool(11, 100)
    assert pool_to_bytes(pool) == pool_to_bytes(again)
    assert pool_to_bytes(pool) != pool_to_bytes(generate_realization_pool(12, 100))


def test_pool_errors():
    with pytest.raises(ValueError):
        generate_realization_pool(1, 0)
    with pytest.raises(ValueError):
        generate_realization_pool(1, 1, tx_antennas=0)


def test_pool_roundtrip(tmp_path):
    pool = generate_realization_pool(2, 1)
    path = tmp_path / "pool.bin"
    save_pool(pool, path)
    back = load_pool(path)
    assert len(back) == 1
    a, b = pool[0], back[0]
    assert a.realization_id == b.realization_id
    assert np.array_equal(a.tx_spatial, b.tx_spatial) and np.array_equal(a.rx_spatial, b.rx_spatial)
    for name in ("power", "aoa_rel_motion", "delay", "cluster"):
        assert np.array_equal(getattr(a.subpaths, name), getattr(b.subpaths, name))
    assert pool_to_bytes(back) == path.read_bytes()


def test_pool_rejects_garbage(tmp_path):
    import io

    with pytest.raises(ValueError, match="magic"):
        parse_pool(io.BytesIO(b"NOTAPOOL\x00\x00\x00\x00"))
    data = pool_to_bytes(generate_realization_pool(2, 1))
    with pytest.raises(ValueError, match="truncated"):
        parse_pool(io.BytesIO(data[:-5]))


def test_update_large_scale():
    pool = generate_realization_pool(1, 3, tx_antennas=4, rx_antennas=2)
    rng = np.random.default_rng(0)
    real = ChannelRealization(LinkState.LOS, 1.5, pool[0], last_large_scale_update=0.0)
    assert update_large_scale(real, 0.05, 0.1, pool, rng) is real
    single = [pool[2]]
    new = update_large_scale(real, 0.1, 0.1, single, rng)
    assert new.spatial is pool[2]
    assert new.last_large_scale_update == 0.1 and new.epoch == 1
    assert new.link_state is LinkState.LOS and new.shadowing_db == 1.5
    with pytest.raises(ValueError):
        update_large_scale(real, 1.0, 0.1, [], rng)
