import json

import pytest
from hypothesis import given, strategies as st

from fognodes.model import ConfigError, NetworkConfig, derived_quantities, dump_config, load_config

BASE = {"a": 50, "R": 3.825, "n": 200, "alpha": 1}


def test_load_config_applies_defaults():
    cfg = load_config(BASE)
    assert cfg.half_side_a == 50
    assert cfg.fog_radius_R == pytest.approx(0.0765 * 50)
    assert cfg.total_nodes_n == 200
    assert cfg.alpha == 1
    assert cfg.packet_bits_M == 1000
    assert cfg.processed_bits_K == 500
    assert cfg.bandwidth_W == 1
    assert cfg.interference_fog_I == 0 and cfg.interference_cloud_I == 0
    assert cfg.channel_inv_mean_c == 1
    assert cfg.fixed_delays == 0


def test_fog_radius_must_be_below_half_side():
    with pytest.raises(ConfigError) as exc:
        load_config({"a": 50, "R": 60, "n": 200, "alpha": 2})
    assert exc.value.key == "fog_radius_R"
    assert "50" in str(exc.value)


@pytest.mark.parametrize("alpha", [3, 0, 1.5, True])
def test_unsupported_alpha(alpha):
    with pytest.raises(ConfigError) as exc:
        load_config({**BASE, "alpha": alpha})
    assert exc.value.key == "alpha"


@pytest.mark.parametrize("missing", ["a", "R", "n", "alpha"])
def test_missing_required_key(missing):
    doc = {k: v for k, v in BASE.items() if k != missing}
    with pytest.raises(ConfigError, match="missing"):
        load_config(doc)


@pytest.mark.parametrize(
    "key,value",
    [
        ("n", 1),
        ("n", 20.5),
        ("a", 0),
        ("R", -1),
        ("processed_bits_K", 1001),
        ("processed_bits_K", -1),
        ("noise_var_sigma2", 0),
        ("tx_power_device_P", 0),
        ("interference_fog_I", -0.1),
    ],
)
def test_bound_violations(key, value):
    with pytest.raises(ConfigError):
        load_config({**BASE, key: value})


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown"):
        load_config({**BASE, "colour": "red"})


def test_overrides_win(tmp_path):
    path = tmp_path / "net.yaml"
    path.write_text("half_side_a: 50\nfog_radius_R: 3.825\ntotal_nodes_n: 200\nalpha: 1\n")
    cfg = load_config(path, overrides={"n": 400, "alpha": None})
    assert cfg.total_nodes_n == 400
    assert cfg.alpha == 1


def test_json_file(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(json.dumps({**BASE, "packet_bits_M": 2000}))
    cfg = load_config(path)
    assert cfg.processed_bits_K == 1000


def test_round_trip():
    cfg = load_config({**BASE, "interference_cloud_I": 0.25, "processed_bits_K": 300})
    assert load_config(json.loads(dump_config(cfg))) == cfg


@pytest.mark.parametrize(
    "n,p,expected",
    [
        (200, 0.04, (192, 8, 24)),
        (200, 0.5, (100, 100, 1)),
        (800, 0.02, (784, 16, 49)),
    ],
)
def test_derived_quantities(n, p, expected):
    cfg = load_config({**BASE, "n": n})
    assert derived_quantities(cfg, p) == pytest.approx(expected, rel=1e-12)


def test_derived_quantities_exact_p_from_table():
    # 49.5 devices per fog at the unrounded p=0.0198
    cfg = load_config({**BASE, "n": 800})
    assert derived_quantities(cfg, 0.0198)[2] == pytest.approx(49.505, abs=1e-3)


@pytest.mark.parametrize("p", [0, 1, -0.1, 1.5])
def test_derived_quantities_rejects_p(p):
    with pytest.raises(ValueError):
        derived_quantities(load_config(BASE), p)


@given(n=st.integers(2, 10**6), p=st.floats(1e-6, 1 - 1e-6))
def test_counts_add_up(n, p):
    n0, n1, per_fog = derived_quantities(load_config({**BASE, "n": n}), p)
    assert n0 + n1 == pytest.approx(n, rel=1e-12)
    assert per_fog == pytest.approx(n0 / n1, rel=1e-12)


def test_config_is_immutable():
    cfg = load_config(BASE)
    with pytest.raises(AttributeError):
        cfg.alpha = 2
    assert isinstance(cfg, NetworkConfig)
