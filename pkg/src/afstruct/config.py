"""Suite configuration: a small TOML file describing a grid of cases.

Example::

    schema_version = 1
    seed = 42
    n_points = 100
    n_tangents = 8
    format = "json"            # or "csv"
    output = "report.json"

    [tolerances]
    default = 1e-10
    "2.6.iv" = 1e-11

    [grid]                     # cartesian product, in this key order
    p = [1, 2, 3]
    q = [2, 3, 4]
    nu = ["plus", "minus", "alternating", "alternating-neg"]
    eps = ["plus", "minus", "alternating", "alternating-neg"]
    R = [0.5, 1.0, 2.0]
    split = [[1, 1], [0.5, 2], [2, 0.5]]

    [[cases]]                  # appended after the grid
    p = 1
    q = 2
    nu = "+"
    eps = "+-"
    r = 1.0
    r3 = 1.0

A case gives either ``r`` and ``r3`` (then ``R = hypot(r, r3)``) or ``R``
with an optional ``split = [a, b]`` ratio, rescaled so that
``r^2 + r3^2 = R^2``.  Sign patterns are a name from :data:`SIGN_PATTERNS`,
a string of ``+``/``-`` or a list of ``+1``/``-1``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import InvalidInputError

SCHEMA_VERSION = 1
FORMATS = ("json", "csv")
DEFAULT_TOLERANCE = 1e-10


def _plus(n):
    return (1,) * n


def _minus(n):
    return (-1,) * n


def _alt(n):
    return tuple(1 if i % 2 == 0 else -1 for i in range(n))


def _alt_neg(n):
    return tuple(-1 if i % 2 == 0 else 1 for i in range(n))


SIGN_PATTERNS = {
    "plus": _plus,
    "minus": _minus,
    "alternating": _alt,
    "alternating-neg": _alt_neg,
}


class ConfigError(InvalidInputError):
    """Invalid configuration; ``problems`` lists one diagnostic per field."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class CaseSpec:
    p: int
    q: int
    nu: tuple[int, ...]
    eps: tuple[int, ...]
    r: float
    r3: float
    nu_label: str = ""
    eps_label: str = ""

    @property
    def R(self) -> float:
        return math.hypot(self.r, self.r3)

    def descriptor(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "nu": list(self.nu),
            "eps": list(self.eps),
            "R": self.R,
            "r": self.r,
            "r3": self.r3,
        }


@dataclass
class SuiteConfig:
    seed: int = 42
    cases: list[CaseSpec] = field(default_factory=list)
    n_points: int = 100
    n_tangents: int = 8
    tolerances: dict[str, float] = field(default_factory=lambda: {"default": DEFAULT_TOLERANCE})
    output_path: str = "report.json"
    format: str = "json"

    def tolerance(self, identity_id: str) -> float:
        return self.tolerances.get(identity_id, self.tolerances.get("default", DEFAULT_TOLERANCE))


def resolve_signs(spec, n: int, where: str, problems: list[str]):
    if isinstance(spec, str) and spec in SIGN_PATTERNS:
        return SIGN_PATTERNS[spec](n), spec
    if isinstance(spec, str):
        if not spec or set(spec) - {"+", "-"}:
            problems.append(f"{where}: expected a pattern name {sorted(SIGN_PATTERNS)} or a +/- string, got {spec!r}")
            return None, ""
        signs = tuple(1 if c == "+" else -1 for c in spec)
    elif isinstance(spec, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in spec):
        signs = tuple(spec)
        if any(v not in (1, -1) for v in signs):
            problems.append(f"{where}: entries must be +1 or -1, got {spec!r}")
            return None, ""
    else:
        problems.append(f"{where}: unsupported sign pattern {spec!r}")
        return None, ""
    if len(signs) != n:
        problems.append(f"{where}: needs {n} signs, got {len(signs)}")
        return None, ""
    return signs, "".join("+" if v > 0 else "-" for v in signs)


def _int(v, where, problems, minimum):
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        problems.append(f"{where}: expected an integer >= {minimum}, got {v!r}")
        return None
    return v


def _pos(v, where, problems):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
        problems.append(f"{where}: expected a positive number, got {v!r}")
        return None
    return float(v)


def _split(v, where, problems):
    if not (isinstance(v, list) and len(v) == 2):
        problems.append(f"{where}: expected a pair [r, r3], got {v!r}")
        return None
    a = _pos(v[0], f"{where}[0]", problems)
    b = _pos(v[1], f"{where}[1]", problems)
    return None if a is None or b is None else (a, b)


def _radii(R, split, r, r3, where, problems):
    if r is not None or r3 is not None:
        rr = _pos(r, f"{where}.r", problems)
        rr3 = _pos(r3, f"{where}.r3", problems)
        if rr is None or rr3 is None:
            return None
        if R is not None:
            RR = _pos(R, f"{where}.R", problems)
            if RR is not None and abs(math.hypot(rr, rr3) - RR) > 1e-12 * RR:
                problems.append(f"{where}: R={RR!r} is inconsistent with hypot(r, r3)={math.hypot(rr, rr3)!r}")
                return None
        return rr, rr3
    RR = _pos(R, f"{where}.R", problems)
    sp = _split(split if split is not None else [1.0, 1.0], f"{where}.split", problems)
    if RR is None or sp is None:
        return None
    scale = RR / math.hypot(*sp)
    return sp[0] * scale, sp[1] * scale


def _make_case(p, q, nu, eps, radii, where, problems):
    p = _int(p, f"{where}.p", problems, 1)
    q = _int(q, f"{where}.q", problems, 2)
    if p is None or q is None:
        return None
    nus, nul = resolve_signs(nu, p, f"{where}.nu", problems)
    epss, epsl = resolve_signs(eps, q, f"{where}.eps", problems)
    if nus is None or epss is None or radii is None:
        return None
    return CaseSpec(p, q, nus, epss, radii[0], radii[1], nul, epsl)


GRID_KEYS = ("p", "q", "nu", "eps", "R", "split")
CASE_KEYS = ("p", "q", "nu", "eps", "R", "split", "r", "r3")
TOP_KEYS = ("schema_version", "seed", "n_points", "n_tangents", "format", "output", "tolerances", "grid", "cases")


def config_from_dict(data: dict[str, Any]) -> SuiteConfig:
    problems: list[str] = []
    for key in data:
        if key not in TOP_KEYS:
            problems.append(f"{key}: unknown key")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        problems.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    seed = data.get("seed", 42)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        problems.append(f"seed: expected an unsigned 64-bit integer, got {seed!r}")
    n_points = _int(data.get("n_points", 100), "n_points", problems, 1)
    n_tangents = _int(data.get("n_tangents", 8), "n_tangents", problems, 1)
    fmt = data.get("format", "json")
    if fmt not in FORMATS:
        problems.append(f"format: expected one of {FORMATS}, got {fmt!r}")
    output = data.get("output", "report.json" if fmt != "csv" else "report.csv")
    if not isinstance(output, str) or not output:
        problems.append(f"output: expected a file path, got {output!r}")

    tolerances = {"default": DEFAULT_TOLERANCE}
    raw_tol = data.get("tolerances", {})
    if not isinstance(raw_tol, dict):
        problems.append("tolerances: expected a table")
    else:
        for key, val in raw_tol.items():
            v = _pos(val, f"tolerances.{key}", problems)
            if v is not None:
                tolerances[key] = v

    cases: list[CaseSpec] = []
    grid = data.get("grid")
    if grid is not None:
        if not isinstance(grid, dict):
            problems.append("grid: expected a table")
        else:
            for key in grid:
                if key not in GRID_KEYS:
                    problems.append(f"grid.{key}: unknown key")
            axes = {}
            for key in GRID_KEYS:
                default = [[1.0, 1.0]] if key == "split" else None
                values = grid.get(key, default)
                if values is None:
                    problems.append(f"grid.{key}: missing")
                elif not isinstance(values, list):
                    problems.append(f"grid.{key}: expected a list")
                else:
                    axes[key] = values
            if len(axes) == len(GRID_KEYS):
                for i, (p, q, nu, eps, R, split) in enumerate(itertools.product(*(axes[k] for k in GRID_KEYS))):
                    where = f"grid[{i}]"
                    case = _make_case(p, q, nu, eps, _radii(R, split, None, None, where, problems), where, problems)
                    if case is not None:
                        cases.append(case)

    raw_cases = data.get("cases", [])
    if not isinstance(raw_cases, list):
        problems.append("cases: expected an array of tables")
        raw_cases = []
    for i, c in enumerate(raw_cases):
        where = f"cases[{i}]"
        if not isinstance(c, dict):
            problems.append(f"{where}: expected a table")
            continue
        for key in c:
            if key not in CASE_KEYS:
                problems.append(f"{where}.{key}: unknown key")
        radii = _radii(c.get("R"), c.get("split"), c.get("r"), c.get("r3"), where, problems)
        case = _make_case(c.get("p"), c.get("q"), c.get("nu", "plus"), c.get("eps", "plus"), radii, where, problems)
        if case is not None:
            cases.append(case)

    if problems:
        # grids repeat the same complaint once per combination
        raise ConfigError(list(dict.fromkeys(problems)))
    return SuiteConfig(seed, cases, n_points, n_tangents, tolerances, output, fmt)


def parse_config(text: str) -> SuiteConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"parse error: {exc}"]) from exc
    return config_from_dict(data)


def load_config(path) -> SuiteConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def default_config_text() -> str:
    return resources.files("afstruct").joinpath("data/default.toml").read_text(encoding="utf-8")


def default_config() -> SuiteConfig:
    return parse_config(default_config_text())
