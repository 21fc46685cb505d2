"""Project configuration: named algebras, expressions, fields, and bivectors.

The file is YAML; expressions are stored as grammar strings and parsed at
load, so a config is diffable and language-agnostic.  Monomial relations
use the same syntax as the element rendering: ``eps^2``, ``x*y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .algebra import AlgebraPresentation, Monomial, WeilAlgebra, build_algebra
from .errors import ConfigError, WeilcError
from .expr import Expr, parse
from .poisson import PoissonStructure
from .prolongation import VectorField


@dataclass
class SuiteSettings:
    seed: int = 42
    trials: int = 100
    tol: float = 1e-9


@dataclass
class ProjectConfig:
    chart_dim: int
    algebras: dict[str, WeilAlgebra] = field(default_factory=dict)
    expressions: dict[str, Expr] = field(default_factory=dict)
    vector_fields: dict[str, VectorField] = field(default_factory=dict)
    bivectors: dict[str, PoissonStructure] = field(default_factory=dict)
    suites: SuiteSettings = field(default_factory=SuiteSettings)


def parse_relation(text: str, generators: tuple[str, ...]) -> Monomial:
    exponents = [0] * len(generators)
    for factor in str(text).split("*"):
        factor = factor.strip()
        name, _, power = factor.partition("^")
        name = name.strip()
        if name not in generators:
            raise ConfigError(f"relation {text!r} uses unknown generator {name!r}")
        try:
            k = int(power) if power else 1
        except ValueError:
            raise ConfigError(f"bad exponent in relation {text!r}") from None
        if k < 1:
            raise ConfigError(f"bad exponent in relation {text!r}")
        exponents[generators.index(name)] += k
    return tuple(exponents)


def _expect_mapping(data, what: str) -> dict:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{what} must be a mapping, got {type(data).__name__}")
    return data


def load_config(path: str) -> ProjectConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")

    n = data.get("chart_dim")
    if not isinstance(n, int) or n < 1:
        raise ConfigError("chart_dim must be a positive integer")
    cfg = ProjectConfig(chart_dim=n)

    for name, entry in _expect_mapping(data.get("algebras"), "algebras").items():
        entry = _expect_mapping(entry, f"algebra {name!r}")
        generators = tuple(str(g) for g in entry.get("generators", []))
        try:
            relations = tuple(
                parse_relation(r, generators) for r in entry.get("relations", [])
            )
            cfg.algebras[name] = build_algebra(
                AlgebraPresentation(generators, relations)
            )
        except (WeilcError, ValueError) as exc:
            raise ConfigError(f"algebra {name!r}: {exc}") from exc

    for name, text in _expect_mapping(data.get("expressions"), "expressions").items():
        try:
            cfg.expressions[name] = parse(str(text), n)
        except WeilcError as exc:
            raise ConfigError(f"expression {name!r}: {exc}") from exc

    for name, comps in _expect_mapping(
        data.get("vector_fields"), "vector_fields"
    ).items():
        if not isinstance(comps, list) or len(comps) != n:
            raise ConfigError(
                f"vector field {name!r} needs {n} component expressions"
            )
        try:
            cfg.vector_fields[name] = VectorField(
                tuple(parse(str(c), n) for c in comps)
            )
        except WeilcError as exc:
            raise ConfigError(f"vector field {name!r}: {exc}") from exc

    for name, entries in _expect_mapping(data.get("bivectors"), "bivectors").items():
        entries = _expect_mapping(entries, f"bivector {name!r}")
        parsed: dict[tuple[int, int], Expr] = {}
        for key, text in entries.items():
            try:
                i_s, j_s = str(key).split(",")
                i, j = int(i_s), int(j_s)
            except ValueError:
                raise ConfigError(
                    f"bivector {name!r}: key {key!r} is not 'i,j'"
                ) from None
            if not 1 <= i < j <= n:
                raise ConfigError(
                    f"bivector {name!r}: entry ({i},{j}) is not upper-triangle in 1..{n}"
                )
            try:
                parsed[(i - 1, j - 1)] = parse(str(text), n)
            except WeilcError as exc:
                raise ConfigError(f"bivector {name!r} entry {key}: {exc}") from exc
        try:
            cfg.bivectors[name] = PoissonStructure(n, parsed)
        except WeilcError as exc:
            raise ConfigError(f"bivector {name!r}: {exc}") from exc

    suites = _expect_mapping(data.get("suites"), "suites")
    try:
        cfg.suites = SuiteSettings(
            seed=int(suites.get("seed", 42)),
            trials=int(suites.get("trials", 100)),
            tol=float(suites.get("tol", 1e-9)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"suites settings: {exc}") from exc
    return cfg
