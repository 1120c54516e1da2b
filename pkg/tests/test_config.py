import math

import pytest

from afstruct.config import (
    ConfigError,
    SIGN_PATTERNS,
    default_config,
    load_config,
    parse_config,
    resolve_signs,
)


def test_default_grid_size_and_radii():
    cfg = default_config()
    assert cfg.seed == 42 and cfg.n_points == 100 and cfg.n_tangents == 8
    assert len(cfg.cases) == 3 * 3 * 4 * 4 * 3 * 3
    for c in cfg.cases:
        assert c.R in (0.5, 1.0, 2.0) or min(abs(c.R - v) for v in (0.5, 1.0, 2.0)) <= 1e-15
        assert len(c.nu) == c.p and len(c.eps) == c.q
    ratios = {round(c.r / c.r3, 12) for c in cfg.cases}
    assert ratios == {1.0, 0.25, 4.0}


def test_sign_patterns():
    assert SIGN_PATTERNS["plus"](3) == (1, 1, 1)
    assert SIGN_PATTERNS["minus"](2) == (-1, -1)
    assert SIGN_PATTERNS["alternating"](3) == (1, -1, 1)
    assert SIGN_PATTERNS["alternating-neg"](3) == (-1, 1, -1)


def test_resolve_signs_forms():
    problems = []
    assert resolve_signs("+-", 2, "x", problems) == ((1, -1), "+-")
    assert resolve_signs([1, -1, 1], 3, "x", problems)[0] == (1, -1, 1)
    assert not problems
    assert resolve_signs("+-", 3, "x", problems)[0] is None
    assert resolve_signs([2], 1, "y", problems)[0] is None
    assert len(problems) == 2 and problems[0].startswith("x:")


def test_explicit_cases():
    cfg = parse_config("""
schema_version = 1
[[cases]]
p = 1
q = 2
r = 0.6
r3 = 0.8
[[cases]]
p = 2
q = 3
nu = "+-"
eps = [1, 1, -1]
R = 2.0
split = [1, 1]
""")
    a, b = cfg.cases
    assert (a.r, a.r3) == (0.6, 0.8) and a.R == pytest.approx(1.0)
    assert b.nu == (1, -1) and b.eps == (1, 1, -1)
    assert b.r == pytest.approx(math.sqrt(2)) and b.r3 == pytest.approx(math.sqrt(2))


def test_tolerances_table():
    cfg = parse_config('schema_version = 1\n[tolerances]\ndefault = 1e-9\n"2.6.iv" = 1e-12\n')
    assert cfg.tolerance("2.6.iv") == 1e-12
    assert cfg.tolerance("2.2.i") == 1e-9


def _problems(text):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    return exc.value.problems


def test_field_level_diagnostics():
    problems = _problems("""
schema_version = 1
n_points = 0
format = "xml"
bogus = 1
[tolerances]
default = -1
[[cases]]
p = 1
q = 1
""")
    joined = "\n".join(problems)
    for needle in ("n_points", "format", "bogus: unknown key", "tolerances.default", "cases[0].q"):
        assert needle in joined


def test_schema_version_required():
    assert any("schema_version" in p for p in _problems("seed = 1\n"))


def test_sign_length_mismatch_reported():
    problems = _problems('schema_version = 1\n[[cases]]\np = 2\nq = 2\nnu = "+"\nR = 1.0\n')
    assert any("cases[0].nu" in p and "needs 2 signs" in p for p in problems)


def test_inconsistent_radii():
    problems = _problems("schema_version = 1\n[[cases]]\np = 1\nq = 2\nr = 1.0\nr3 = 1.0\nR = 1.0\n")
    assert any("inconsistent" in p for p in problems)


def test_grid_missing_axis():
    assert any("grid.R: missing" in p for p in _problems('schema_version = 1\n[grid]\np = [1]\nq = [2]\nnu = ["plus"]\neps = ["plus"]\n'))


def test_toml_syntax_error():
    problems = _problems("schema_version = \n")
    assert problems[0].startswith("parse error")


def test_seed_range():
    assert any("seed" in p for p in _problems("schema_version = 1\nseed = -1\n"))


def test_load_config(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text('schema_version = 1\nseed = 7\noutput = "out.csv"\nformat = "csv"\n')
    cfg = load_config(path)
    assert (cfg.seed, cfg.format, cfg.output_path, cfg.cases) == (7, "csv", "out.csv", [])
