import pytest

from circsynth.errors import ConfigError
from circsynth.params import ModelParams, parse_config_text


def test_defaults_are_valid():
    p = ModelParams()
    assert p.t_minus == pytest.approx(0.45)
    assert p.thermal_factor < 0.0  # junction-potential sign for t_plus > 0.5
    assert p.charge_coupling < 0.0


@pytest.mark.parametrize("bad", [
    dict(t_plus=0.0), dict(t_plus=1.0), dict(t_plus=-0.2),
    dict(N_electrode=2), dict(N_separator=1),
    dict(sigma=0.0), dict(c_init=-1.0), dict(area=0.0),
])
def test_invalid_params_rejected(bad):
    with pytest.raises(ConfigError):
        ModelParams(**bad)


def test_negative_dq_allowed():
    p = ModelParams(dq_plus_dq=-0.7, dq_minus_dq=-0.3)
    assert p.dq_plus_dq == -0.7


def test_parse_config_roundtrip():
    text = """
    # comment line
    t_plus = 0.6
    N_electrode = 7
    sigma = 0.05

    [run]
    order = 4
    topology = dynamic
    """
    items, run = parse_config_text(text)
    assert items == {"t_plus": 0.6, "N_electrode": 7, "sigma": 0.05}
    assert run == {"order": "4", "topology": "dynamic"}
    p = ModelParams(**items)
    assert p.N_electrode == 7


def test_parse_unknown_key_is_error():
    with pytest.raises(ConfigError, match="unknown parameter"):
        parse_config_text("not_a_parameter = 1.0")


def test_parse_bad_value_is_error():
    with pytest.raises(ConfigError, match="bad value"):
        parse_config_text("sigma = five")


def test_parse_bad_line_is_error():
    with pytest.raises(ConfigError, match="expected"):
        parse_config_text("sigma 0.05")


def test_parse_unknown_section_is_error():
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config_text("[output]\nx = 1")
