import math

import pytest

from mmwsim.config import (
    ConfigError,
    FrameConfig,
    rb_bandwidth,
    resource_elements_per_slot,
    system_bandwidth,
    tti,
)


def test_tti_default():
    assert tti(FrameConfig()) == pytest.approx(124.8e-6, rel=1e-12)
    assert FrameConfig().tti_ns == 124800


def test_tti_examples():
    assert tti(FrameConfig(symbols_per_slot=1, symbol_length=1.0, num_reference_symbols=0)) == 1.0
    assert tti(FrameConfig(symbols_per_slot=14, symbol_length=71.4e-6)) == pytest.approx(999.6e-6, rel=1e-12)


def test_bandwidths():
    cfg = FrameConfig()
    assert rb_bandwidth(cfg) == pytest.approx(250.02e6, rel=1e-12)
    assert system_bandwidth(cfg) == pytest.approx(1000.08e6, rel=1e-12)
    one = FrameConfig(subbands_per_rb=1, subband_width=1.0, num_resource_blocks=1)
    assert rb_bandwidth(one) == 1.0
    assert system_bandwidth(one) == rb_bandwidth(one)
    lte = FrameConfig(subbands_per_rb=12, subband_width=15e3, num_resource_blocks=100)
    assert rb_bandwidth(lte) == pytest.approx(180e3)
    assert system_bandwidth(lte) == pytest.approx(18e6)


def test_resource_elements():
    assert resource_elements_per_slot(FrameConfig()) == 103680
    ones = FrameConfig(
        symbols_per_slot=1, num_reference_symbols=0, subcarriers_per_subband=1, subbands_per_rb=1,
        num_resource_blocks=1, slots_per_subframe=1, tdd_pattern="c",
    )
    assert resource_elements_per_slot(ones) == 1
    small = FrameConfig(symbols_per_slot=2, num_reference_symbols=0, subcarriers_per_subband=3, subbands_per_rb=4, num_resource_blocks=5)
    assert resource_elements_per_slot(small) == 120


def test_guard_symbols():
    assert FrameConfig().guard_symbols == 1
    assert FrameConfig(guard_time=4.16e-6).guard_symbols == 1
    assert FrameConfig(guard_time=5e-6).guard_symbols == 2


@pytest.mark.parametrize(
    "kwargs, key",
    [
        ({"tdd_pattern": "ccxddddd"}, "TDDControlDataPattern"),
        ({"tdd_pattern": "cccddd"}, "TDDControlDataPattern"),
        ({"subband_width": -1.0}, "SubbandWidth"),
        ({"symbols_per_slot": 0}, "SymbolPerSlot"),
        ({"num_reference_symbols": 30}, "NumReferenceSymbols"),
        ({"center_freq": math.inf}, "CenterFreq"),
    ],
)
def test_invalid_configs_name_the_key(kwargs, key):
    with pytest.raises(ConfigError) as exc:
        FrameConfig(**kwargs)
    assert key in {k for k, _ in exc.value.problems}


def test_mapping_roundtrip_and_unknown_keys():
    cfg = FrameConfig(tdd_pattern="cdcddddd")
    assert FrameConfig.from_mapping(cfg.to_mapping()) == cfg
    with pytest.raises(ConfigError, match="Bogus"):
        FrameConfig.from_mapping({"Bogus": 1})
