"""Configuration grammar (versioned JSON), example registry, and builders.

A run configuration describes either a single finite instance (group, normal
subgroup, character, coefficient action, declared level) or a tower (cyclic
p-power chain or an explicit chain) with an optional unit twist.  Parsing is
strict and location-tagged: every complaint names the JSON path it comes
from.  Builders turn a parsed configuration into validated domain objects.

Grammar summary (version 1):

    {
      "version": 1,
      "name": "label",                          # optional
      "field": {"conductor": 4},                # default 1 (the rationals)
      "measure_total": "1",                     # optional, rational "p/q"
      "instance": {
        "group": <group>,
        "normal": [0, 2],                       # default [0]
        "omega": {"values": {"2": "-1"}}        # or {"generator": g, "order": k}
                                                # default trivial
        "rho": {"exponents": [1, 3, 1, 3]},     # default trivial
        "level": [0],                           # default [0]
        "expect_invalid": false                 # default false
      },
      "tower": {
        "kind": "cyclic", "p": 3, "depth": 2,
        "twist": {"u": 2, "coefficient_exponent": 1}   # twist optional
      },
      "suite": ["validate", "ring", ...]        # optional check selection
    }

    <group> := {"kind": "cyclic", "n": 4}
             | {"kind": "symmetric", "n": 3}
             | {"kind": "table", "rows": [[...], ...]}
             | {"kind": "product", "factors": [<group>, ...]}
             | {"kind": "semidirect", "normal": <group>, "acting": <group>,
                "action": [[...], ...]}

    scalars: "p/q" (rational), {"zeta": k} (root of unity power), or a list
    of "p/q" strings (power-basis coordinates).

Exactly one of "instance" / "tower" must be present.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from hashlib import sha256
from typing import Optional

from .cyclotomic import CycloField, cyclo_field
from .errors import ConfigError, WorkbenchError
from .groups import (
    FiniteGroup,
    GroupHom,
    NormalCharacter,
    RhoAction,
    Subgroup,
    ValidationReport,
    validate_normal_character,
)
from .hecke import HeckeInstance
from .laurent import LevelAutomorphism
from .towers import TowerSpec, UnitTwist, attach_unit_twist, cyclic_tower

CONFIG_VERSION = 1

KNOWN_SUITES = (
    "validate",
    "ring",
    "dictionary",
    "embedding",
    "maschke",
    "functoriality",
    "xi",
)

EXAMPLE_NAMES = (
    "plain-z4",
    "omega-sign",
    "galois-twist",
    "zp",
    "zp-twist",
    "s3-invalid-omega",
)


def _fail(path, message):
    raise ConfigError(f"{path}: {message}")


def _get_dict(obj, path):
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {type(obj).__name__}")
    return obj


def _get_int(obj, path, minimum=None):
    if isinstance(obj, bool) or not isinstance(obj, int):
        _fail(path, f"expected an integer, got {obj!r}")
    if minimum is not None and obj < minimum:
        _fail(path, f"expected an integer >= {minimum}, got {obj}")
    return obj


def _get_int_list(obj, path):
    if not isinstance(obj, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in obj
    ):
        _fail(path, "expected a list of integers")
    return list(obj)


def _get_bool(obj, path):
    if not isinstance(obj, bool):
        _fail(path, f"expected true/false, got {obj!r}")
    return obj


def _check_keys(obj, path, allowed):
    for key in obj:
        if key not in allowed:
            _fail(path, f"unknown key {key!r} (allowed: {', '.join(sorted(allowed))})")


def _parse_rational(obj, path) -> Fraction:
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError):
            _fail(path, f"not a rational number: {obj!r}")
    _fail(path, f"expected a rational as a string, got {obj!r}")


def _normalize_group(obj, path):
    obj = _get_dict(obj, path)
    kind = obj.get("kind")
    if kind == "cyclic":
        _check_keys(obj, path, {"kind", "n"})
        return {"kind": "cyclic", "n": _get_int(obj.get("n"), f"{path}.n", 1)}
    if kind == "symmetric":
        _check_keys(obj, path, {"kind", "n"})
        return {"kind": "symmetric", "n": _get_int(obj.get("n"), f"{path}.n", 1)}
    if kind == "table":
        _check_keys(obj, path, {"kind", "rows"})
        rows = obj.get("rows")
        if not isinstance(rows, list) or not rows:
            _fail(f"{path}.rows", "expected a non-empty list of rows")
        return {
            "kind": "table",
            "rows": [_get_int_list(r, f"{path}.rows[{i}]")
                     for i, r in enumerate(rows)],
        }
    if kind == "product":
        _check_keys(obj, path, {"kind", "factors"})
        factors = obj.get("factors")
        if not isinstance(factors, list) or len(factors) < 2:
            _fail(f"{path}.factors", "expected a list of at least two groups")
        return {
            "kind": "product",
            "factors": [_normalize_group(f, f"{path}.factors[{i}]")
                        for i, f in enumerate(factors)],
        }
    if kind == "semidirect":
        _check_keys(obj, path, {"kind", "normal", "acting", "action"})
        action = obj.get("action")
        if not isinstance(action, list) or not action:
            _fail(f"{path}.action", "expected a list of automorphism tables")
        return {
            "kind": "semidirect",
            "normal": _normalize_group(obj.get("normal"), f"{path}.normal"),
            "acting": _normalize_group(obj.get("acting"), f"{path}.acting"),
            "action": [_get_int_list(a, f"{path}.action[{i}]")
                       for i, a in enumerate(action)],
        }
    _fail(path, f"unknown group kind {kind!r}")


def _normalize_scalar(obj, path):
    if isinstance(obj, str):
        _parse_rational(obj, path)
        return obj
    if isinstance(obj, int) and not isinstance(obj, bool):
        return str(obj)
    if isinstance(obj, dict):
        _check_keys(obj, path, {"zeta"})
        return {"zeta": _get_int(obj.get("zeta"), f"{path}.zeta")}
    if isinstance(obj, list):
        return [
            str(_parse_rational(x, f"{path}[{i}]")) for i, x in enumerate(obj)
        ]
    _fail(path, f"cannot read a scalar from {obj!r}")


def _normalize_omega(obj, path):
    obj = _get_dict(obj, path)
    if "values" in obj:
        _check_keys(obj, path, {"values"})
        values = _get_dict(obj.get("values"), f"{path}.values")
        out = {}
        for key, raw in values.items():
            try:
                elt = int(key)
            except ValueError:
                _fail(f"{path}.values", f"element key {key!r} is not an integer")
            out[str(elt)] = _normalize_scalar(raw, f"{path}.values.{key}")
        return {"values": out}
    if "generator" in obj:
        _check_keys(obj, path, {"generator", "order"})
        return {
            "generator": _get_int(obj.get("generator"), f"{path}.generator", 0),
            "order": _get_int(obj.get("order"), f"{path}.order", 1),
        }
    _fail(path, "character needs either 'values' or 'generator'/'order'")


def _normalize_instance(obj, path):
    obj = _get_dict(obj, path)
    _check_keys(obj, path, {"group", "normal", "omega", "rho", "level",
                            "expect_invalid"})
    if "group" not in obj:
        _fail(path, "missing 'group'")
    out = {"group": _normalize_group(obj["group"], f"{path}.group")}
    out["normal"] = sorted(set(
        _get_int_list(obj.get("normal", [0]), f"{path}.normal")))
    if "omega" in obj:
        out["omega"] = _normalize_omega(obj["omega"], f"{path}.omega")
    if "rho" in obj:
        rho = _get_dict(obj["rho"], f"{path}.rho")
        _check_keys(rho, f"{path}.rho", {"exponents"})
        out["rho"] = {
            "exponents": _get_int_list(rho.get("exponents"),
                                       f"{path}.rho.exponents")
        }
    out["level"] = sorted(set(
        _get_int_list(obj.get("level", [0]), f"{path}.level")))
    if "expect_invalid" in obj:
        out["expect_invalid"] = _get_bool(obj["expect_invalid"],
                                          f"{path}.expect_invalid")
    return out


def _normalize_twist(obj, path):
    obj = _get_dict(obj, path)
    _check_keys(obj, path, {"u", "coefficient_exponent", "auts"})
    out = {}
    if "u" in obj:
        out["u"] = _get_int(obj.get("u"), f"{path}.u")
    if "auts" in obj:
        auts = obj.get("auts")
        if not isinstance(auts, list) or not auts:
            _fail(f"{path}.auts", "expected a list of automorphism tables")
        out["auts"] = [_get_int_list(a, f"{path}.auts[{i}]")
                       for i, a in enumerate(auts)]
    if "u" not in out and "auts" not in out:
        _fail(path, "twist needs 'u' (power twist) or 'auts' (explicit)")
    if "coefficient_exponent" in obj:
        out["coefficient_exponent"] = _get_int(
            obj.get("coefficient_exponent"), f"{path}.coefficient_exponent"
        )
    return out


def _normalize_tower(obj, path):
    obj = _get_dict(obj, path)
    kind = obj.get("kind", "cyclic")
    if kind == "cyclic":
        _check_keys(obj, path, {"kind", "p", "depth", "twist"})
        out = {
            "kind": "cyclic",
            "p": _get_int(obj.get("p"), f"{path}.p", 2),
            "depth": _get_int(obj.get("depth"), f"{path}.depth", 0),
        }
    elif kind == "chain":
        _check_keys(obj, path, {"kind", "levels", "downs", "twist"})
        levels = obj.get("levels")
        downs = obj.get("downs")
        if not isinstance(levels, list) or not levels:
            _fail(f"{path}.levels", "expected a non-empty list of groups")
        if not isinstance(downs, list):
            _fail(f"{path}.downs", "expected a list of mapping tables")
        out = {
            "kind": "chain",
            "levels": [_normalize_group(g, f"{path}.levels[{i}]")
                       for i, g in enumerate(levels)],
            "downs": [_get_int_list(d, f"{path}.downs[{i}]")
                      for i, d in enumerate(downs)],
        }
    else:
        _fail(path, f"unknown tower kind {kind!r}")
    if "twist" in obj:
        out["twist"] = _normalize_twist(obj["twist"], f"{path}.twist")
    return out


@dataclass
class RunConfig:
    """A validated, normalized run configuration."""

    version: int
    name: str
    conductor: int
    measure_total: Fraction
    instance: Optional[dict]
    tower: Optional[dict]
    suite: Optional[tuple]

    @property
    def echo(self) -> dict:
        """Canonical dictionary form; hashed for cache keys and echoed in
        reports."""
        out = {
            "version": self.version,
            "name": self.name,
            "field": {"conductor": self.conductor},
            "measure_total": str(self.measure_total),
        }
        if self.instance is not None:
            out["instance"] = self.instance
        if self.tower is not None:
            out["tower"] = self.tower
        if self.suite is not None:
            out["suite"] = list(self.suite)
        return out


def parse_config(obj, origin="config") -> RunConfig:
    obj = _get_dict(obj, origin)
    _check_keys(obj, origin, {"version", "name", "field", "measure_total",
                              "instance", "tower", "suite"})
    version = _get_int(obj.get("version"), f"{origin}.version")
    if version != CONFIG_VERSION:
        _fail(f"{origin}.version",
              f"unsupported version {version} (this tool reads {CONFIG_VERSION})")
    name = obj.get("name", "")
    if not isinstance(name, str):
        _fail(f"{origin}.name", "expected a string")
    conductor = 1
    if "field" in obj:
        fld = _get_dict(obj["field"], f"{origin}.field")
        _check_keys(fld, f"{origin}.field", {"conductor"})
        conductor = _get_int(fld.get("conductor", 1), f"{origin}.field.conductor", 1)
    measure_total = Fraction(1)
    if "measure_total" in obj:
        measure_total = _parse_rational(obj["measure_total"],
                                        f"{origin}.measure_total")
        if measure_total <= 0:
            _fail(f"{origin}.measure_total", "total measure must be positive")
    has_instance = "instance" in obj
    has_tower = "tower" in obj
    if has_instance == has_tower:
        _fail(origin, "exactly one of 'instance' / 'tower' is required")
    instance = (_normalize_instance(obj["instance"], f"{origin}.instance")
                if has_instance else None)
    tower = (_normalize_tower(obj["tower"], f"{origin}.tower")
             if has_tower else None)
    suite = None
    if "suite" in obj:
        raw = obj["suite"]
        if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
            _fail(f"{origin}.suite", "expected a list of suite names")
        for s in raw:
            if s not in KNOWN_SUITES:
                _fail(f"{origin}.suite",
                      f"unknown suite {s!r} (known: {', '.join(KNOWN_SUITES)})")
        suite = tuple(raw)
    return RunConfig(version, name, conductor, measure_total, instance,
                     tower, suite)


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(obj, origin=str(path))


def config_hash(cfg: RunConfig) -> str:
    payload = json.dumps(cfg.echo, sort_keys=True).encode("utf-8")
    return sha256(payload).hexdigest()[:16]


# ---------------------------------------------------------------------------
# example registry
# ---------------------------------------------------------------------------


def _parse_example_args(args, path):
    if not args:
        return []
    try:
        return [int(x) for x in args.split(",")]
    except ValueError:
        _fail(path, f"example arguments must be integers, got {args!r}")


def example_config(name: str, depth: Optional[int] = None,
                   conductor: Optional[int] = None) -> RunConfig:
    """A registry configuration by name.

    zp and zp-twist accept colon arguments: "zp:5" (p = 5),
    "zp-twist:3,2" (p = 3, u = 2).  depth defaults to 2 for towers; the
    field conductor defaults to p^depth for towers so every level splits.
    """
    base, _, argstr = name.partition(":")
    args = _parse_example_args(argstr, f"example {name!r}")
    obj = None
    if base == "plain-z4":
        obj = {
            "version": 1,
            "name": "plain-z4",
            "field": {"conductor": 4},
            "instance": {"group": {"kind": "cyclic", "n": 4}},
        }
    elif base == "omega-sign":
        obj = {
            "version": 1,
            "name": "omega-sign",
            "field": {"conductor": 1},
            "instance": {
                "group": {"kind": "cyclic", "n": 4},
                "normal": [0, 2],
                "omega": {"values": {"0": "1", "2": "-1"}},
                "level": [0],
            },
        }
    elif base == "galois-twist":
        obj = {
            "version": 1,
            "name": "galois-twist",
            "field": {"conductor": 4},
            "instance": {
                "group": {"kind": "cyclic", "n": 4},
                "normal": [0, 2],
                "omega": {"values": {"0": "1", "2": "-1"}},
                "rho": {"exponents": [1, 3, 1, 3]},
                "level": [0],
            },
        }
    elif base == "s3-invalid-omega":
        obj = {
            "version": 1,
            "name": "s3-invalid-omega",
            "field": {"conductor": 3},
            "instance": {
                "group": {"kind": "symmetric", "n": 3},
                "normal": [0, 3, 4],
                "omega": {"values": {"0": "1", "3": {"zeta": 1},
                                     "4": {"zeta": 2}}},
                "level": [0],
                "expect_invalid": True,
            },
        }
    elif base in ("zp", "zp-twist"):
        p = args[0] if args else 3
        if p < 2:
            _fail(f"example {name!r}", "p must be at least 2")
        d = depth if depth is not None else 2
        obj = {
            "version": 1,
            "name": name if argstr else f"{base}:{p}",
            "tower": {"kind": "cyclic", "p": p, "depth": d},
            "field": {"conductor": p ** max(d, 1)},
        }
        if base == "zp-twist":
            u = args[1] if len(args) > 1 else 2
            obj["tower"]["twist"] = {"u": u}
            if not argstr:
                obj["name"] = f"zp-twist:{p},{u}"
    if obj is None:
        raise ConfigError(
            f"unknown example {name!r}; available: {', '.join(EXAMPLE_NAMES)}"
        )
    cfg = parse_config(obj, origin=f"example:{name}")
    return apply_overrides(cfg, depth=depth, conductor=conductor)


def apply_overrides(cfg: RunConfig, depth: Optional[int] = None,
                    conductor: Optional[int] = None) -> RunConfig:
    """Apply command-line overrides, renormalizing the echo."""
    tower = cfg.tower
    if depth is not None:
        if tower is None:
            raise ConfigError("--depth only applies to tower configurations")
        if depth < 0:
            raise ConfigError("--depth must be nonnegative")
        if tower.get("kind") == "chain" and depth > len(tower["levels"]) - 1:
            raise ConfigError(
                f"--depth {depth} exceeds the chain length "
                f"{len(tower['levels']) - 1}"
            )
        tower = dict(tower)
        if tower.get("kind") == "cyclic":
            tower["depth"] = depth
        else:
            tower["levels"] = tower["levels"][: depth + 1]
            tower["downs"] = tower["downs"][:depth]
    new_conductor = conductor if conductor is not None else cfg.conductor
    if conductor is not None and conductor < 1:
        raise ConfigError("--field-conductor must be a positive integer")
    return RunConfig(cfg.version, cfg.name, new_conductor, cfg.measure_total,
                     cfg.instance, tower, cfg.suite)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _build_group(spec, path) -> FiniteGroup:
    kind = spec["kind"]
    try:
        if kind == "cyclic":
            return FiniteGroup.cyclic(spec["n"])
        if kind == "symmetric":
            return FiniteGroup.symmetric(spec["n"])
        if kind == "table":
            return FiniteGroup.from_table(spec["rows"])
        if kind == "product":
            grp = _build_group(spec["factors"][0], f"{path}.factors[0]")
            for i, factor in enumerate(spec["factors"][1:], start=1):
                grp = FiniteGroup.direct_product(
                    grp, _build_group(factor, f"{path}.factors[{i}]")
                )
            return grp
        if kind == "semidirect":
            n_grp = _build_group(spec["normal"], f"{path}.normal")
            h_grp = _build_group(spec["acting"], f"{path}.acting")
            return FiniteGroup.semidirect(
                n_grp, h_grp, [tuple(a) for a in spec["action"]]
            )
    except WorkbenchError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}: unknown group kind {kind!r}")


def _build_scalar(field: CycloField, spec, path):
    try:
        if isinstance(spec, str):
            return field.from_rational(Fraction(spec))
        if isinstance(spec, dict):
            return field.zeta_power(spec["zeta"])
        return field.element_from_strings(spec)
    except (WorkbenchError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _build_omega(field, group, domain, spec, path) -> NormalCharacter:
    try:
        if spec is None:
            return NormalCharacter.trivial(group, domain, field)
        if "values" in spec:
            values = {
                int(k): _build_scalar(field, v, f"{path}.values.{k}")
                for k, v in spec["values"].items()
            }
            values.setdefault(0, field.one)
            missing = sorted(domain.elements - set(values))
            if missing:
                raise ConfigError(
                    f"{path}.values: missing values for domain elements "
                    f"{missing}"
                )
            extra = sorted(set(values) - domain.elements)
            if extra:
                raise ConfigError(
                    f"{path}.values: values given outside the domain: {extra}"
                )
            return NormalCharacter(group, domain, field, values)
        root = field.zeta_power(field.conductor // spec["order"]) \
            if field.conductor % spec["order"] == 0 else None
        if root is None:
            raise ConfigError(
                f"{path}.order: the field has no root of unity of order "
                f"{spec['order']} (conductor {field.conductor})"
            )
        return NormalCharacter.cyclic(group, domain, field,
                                      spec["generator"], root)
    except WorkbenchError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass
class BuiltConfig:
    """Domain objects materialized from a configuration."""

    config: RunConfig
    field: CycloField
    group: Optional[FiniteGroup]
    validation: Optional[ValidationReport]
    expect_invalid: bool
    instance: Optional[HeckeInstance]
    level: Optional[Subgroup]
    tower: Optional[TowerSpec]
    twist: Optional[UnitTwist]


def build(cfg: RunConfig) -> BuiltConfig:
    """Materialize a configuration.

    Character data is always validated; when it is dirty, the instance slot
    stays empty and the validation report carries the violations (the verify
    command decides whether that is the expected outcome).
    """
    field = cyclo_field(cfg.conductor)
    if cfg.instance is not None:
        path = "instance"
        spec = cfg.instance
        group = _build_group(spec["group"], f"{path}.group")
        try:
            normal = Subgroup(group, set(spec["normal"]))
        except WorkbenchError as exc:
            raise ConfigError(f"{path}.normal: {exc}") from exc
        omega = _build_omega(field, group, normal, spec.get("omega"),
                             f"{path}.omega")
        if "rho" in spec:
            exponents = spec["rho"]["exponents"]
            if len(exponents) != group.order:
                raise ConfigError(
                    f"{path}.rho.exponents: expected {group.order} entries, "
                    f"got {len(exponents)}"
                )
            try:
                rho = RhoAction(group, field, tuple(exponents))
            except WorkbenchError as exc:
                raise ConfigError(f"{path}.rho: {exc}") from exc
        else:
            rho = RhoAction.trivial(group, field)
        validation = validate_normal_character(omega, rho)
        expect_invalid = bool(spec.get("expect_invalid", False))
        instance = None
        level = None
        if validation.ok:
            instance = HeckeInstance(group, omega, rho,
                                     measure_total=cfg.measure_total,
                                     name=cfg.name or "instance")
            try:
                level = Subgroup(group, set(spec["level"]))
                instance.require_admissible_class(level)
            except WorkbenchError as exc:
                raise ConfigError(f"{path}.level: {exc}") from exc
        return BuiltConfig(cfg, field, group, validation, expect_invalid,
                           instance, level, None, None)

    spec = cfg.tower
    path = "tower"
    if spec["kind"] == "cyclic":
        tower = cyclic_tower(spec["p"], spec["depth"])
    else:
        groups = [
            _build_group(g, f"{path}.levels[{i}]")
            for i, g in enumerate(spec["levels"])
        ]
        downs = []
        for i, mapping in enumerate(spec["downs"]):
            try:
                downs.append(GroupHom(groups[i + 1], groups[i],
                                      tuple(mapping)))
            except WorkbenchError as exc:
                raise ConfigError(f"{path}.downs[{i}]: {exc}") from exc
        try:
            tower = TowerSpec(groups, downs, name=cfg.name or "chain")
        except WorkbenchError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    twist = None
    if "twist" in spec:
        tspec = spec["twist"]
        rho_t = None
        if "coefficient_exponent" in tspec:
            try:
                rho_t = field.aut(tspec["coefficient_exponent"])
            except ValueError as exc:
                raise ConfigError(
                    f"{path}.twist.coefficient_exponent: {exc}"
                ) from exc
        try:
            if "auts" in tspec:
                auts = []
                for j, mapping in enumerate(tspec["auts"]):
                    hom = GroupHom(tower.level(j), tower.level(j),
                                   tuple(mapping))
                    if not hom.is_bijective():
                        raise ConfigError(
                            f"{path}.twist.auts[{j}]: not a bijection"
                        )
                    auts.append(hom)
                if len(auts) != tower.depth + 1:
                    raise ConfigError(
                        f"{path}.twist.auts: expected {tower.depth + 1} "
                        f"tables, got {len(auts)}"
                    )
                twist = UnitTwist(tower, tspec.get("u"), auts, rho_t=rho_t)
            else:
                twist = attach_unit_twist(tower, tspec["u"], rho_t=rho_t)
        except WorkbenchError as exc:
            raise ConfigError(f"{path}.twist: {exc}") from exc
    return BuiltConfig(cfg, field, None, None, False, None, None, tower,
                       twist)


# ---------------------------------------------------------------------------
# derived structures used by the commands
# ---------------------------------------------------------------------------


def tower_top_instance(built: BuiltConfig):
    """The top-level instance of a tower (trivial character data), its
    descending kernel levels (coarse to fine), and the distinguished
    automorphism when a twist is configured."""
    tower = built.tower
    if tower is None:
        raise ConfigError("this command needs a tower configuration")
    grp = tower.top
    omega = NormalCharacter.trivial(grp, Subgroup.trivial(grp), built.field)
    rho = RhoAction.trivial(grp, built.field)
    instance = HeckeInstance(grp, omega, rho,
                             measure_total=built.config.measure_total,
                             name=built.config.name or "tower-top")
    levels = [tower.kernel_at(j) for j in range(tower.depth + 1)]
    auto = None
    if built.twist is not None:
        auto = LevelAutomorphism(
            instance,
            built.twist.level_aut(tower.depth),
            rho_t=built.twist.coefficient_aut(built.field),
            preserve=levels,
        )
    return instance, levels, auto


def _subgroups_above(group: FiniteGroup, floor: Subgroup):
    """All subgroups containing floor (bounded search for small groups)."""
    if group.order > 64:
        raise WorkbenchError(
            "subgroup enumeration is limited to groups of order <= 64"
        )
    seen = {tuple(floor.sorted_elements()): floor}
    frontier = [floor]
    while frontier:
        sub = frontier.pop()
        for g in group.elements:
            if g in sub.elements:
                continue
            bigger = Subgroup.from_generators(
                group, list(sub.elements) + [g]
            )
            key = tuple(bigger.sorted_elements())
            if key not in seen:
                seen[key] = bigger
                frontier.append(bigger)
    return sorted(seen.values(),
                  key=lambda s: (len(s.elements), tuple(s.sorted_elements())))


def admissible_level_chain(instance: HeckeInstance, floor: Subgroup):
    """A maximal descending chain of admissible levels ending at floor.

    Levels must be admissible for the instance and have a normal product
    with the normal subgroup (so the crossed-product picture exists).
    Deterministic: at each size step the smallest eligible subgroup (by
    sorted elements) containing the next chain member is chosen.
    """
    candidates = []
    for sub in _subgroups_above(instance.group, floor):
        if not instance.is_admissible_class(sub):
            continue
        if not instance.nk(sub).is_normal():
            continue
        candidates.append(sub)
    # candidates are sorted by (size, elements); build the chain top-down
    chain = []
    current = None
    for sub in reversed(candidates):
        if current is None or (
            sub.elements < current.elements
        ):
            chain.append(sub)
            current = sub
    if not chain or chain[-1] != floor:
        # floor is always admissible (the instance validated it)
        chain.append(floor)
    return chain  # coarse (largest) to fine (floor)
