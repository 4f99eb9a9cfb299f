import pytest

from nonlocal_logistic import ConfigurationError
from nonlocal_logistic.config import (
    build_initial_field,
    config_digest,
    load_config,
    parse_config_text,
    symbol_to_text,
)

SAMPLE = """
# baseline run
symbol = { kind = "fractional", alpha = 1.0 }
domain = { left = -1.0, right = 1.0, n = 63 }
discretization = { far_cutoff = 4.0 }
problem = { a_rel = 2.0, c = 0.0, f = { kind = "quadratic", b = 1.0 } }
solver = { tol = 1e-10 }
output = { directory = "out", formats = ["csv", "json"] }
"""


def test_parse_sample():
    cfg = parse_config_text(SAMPLE)
    assert cfg["symbol"]["kind"] == "fractional"
    assert cfg["domain"]["n"] == 63
    assert cfg["output"]["formats"] == ["csv", "json"]
    assert cfg["solver"]["tol"] == 1e-10


def test_json_fallback_equivalent():
    import json

    text = json.dumps(parse_config_text(SAMPLE))
    assert parse_config_text(text) == parse_config_text(SAMPLE)


def test_digest_stable_under_key_order():
    a = parse_config_text('x = { p = 1, q = 2 }')
    b = parse_config_text('x = { q = 2, p = 1 }')
    assert config_digest(a) == config_digest(b)


@pytest.mark.parametrize(
    "bad",
    [
        "symbol = { kind = fractional }",  # unquoted string
        "symbol { kind = \"fractional\" }",  # missing equals
        "symbol = [1, ",  # unterminated list
        "= 3",
    ],
)
def test_syntax_errors(bad):
    with pytest.raises(ConfigurationError):
        parse_config_text(bad)


def test_load_config_validates_blocks():
    cfg = load_config(SAMPLE)
    assert cfg.grid.n_interior == 63
    assert cfg.far_cutoff == 4.0
    assert cfg.kernel.mode == "exact"
    spec = cfg.reaction(lam1=1.0)
    assert spec.a == 2.0


def test_unknown_block_rejected():
    with pytest.raises(ConfigurationError, match="unknown config blocks"):
        load_config(SAMPLE + "\nmystery = { x = 1 }")


def test_unknown_symbol_kind_rejected():
    with pytest.raises(ConfigurationError, match="unknown symbol kind"):
        load_config('symbol = { kind = "gamma", alpha = 1.0 }')


def test_a_and_a_rel_mutually_exclusive():
    with pytest.raises(ConfigurationError, match="exactly one"):
        load_config(
            'symbol = { kind = "fractional", alpha = 1.0 }\n'
            'problem = { a = 1.0, a_rel = 2.0 }'
        )


def test_symbol_round_trip():
    from nonlocal_logistic import BernsteinSymbol
    from nonlocal_logistic.config import build_symbol

    sym = BernsteinSymbol("relativistic", 1.5, m=0.7)
    text = symbol_to_text(sym)
    parsed = build_symbol(parse_config_text(text)["symbol"])
    assert parsed == sym


def test_initial_field_catalog(op99, eig99):
    grid = op99.grid
    assert build_initial_field("zero", 1.0, grid).max() == 0.0
    assert build_initial_field("eigenfunction", 0.5, grid, phi1=eig99.phi).max() == pytest.approx(0.5)
    bump = build_initial_field("bump", 2.0, grid)
    assert bump.max() == pytest.approx(2.0, rel=1e-2)
    with pytest.raises(ConfigurationError):
        build_initial_field("vortex", 1.0, grid)
