"""Configuration documents: schema, parsing and construction of named objects.

A config is a JSON document with ``"format": "factalg-config"`` and
``"version": 1``.  Named sections (``spaces``, ``universes``, ``algebras``,
``models``) are referenced by name from the ordered ``tasks`` list.
Rationals are integers or strings ``"p"`` / ``"p/q"``; open literals use the
syntax of :func:`factalg.stratline.parse_open`.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema

from .errors import FactAlgError, RationalParseError, SchemaError
from .fdvect import LinMap, VectObj
from .stratline import (CIRCLE, LINE, STAR, CircleVProj, ConeProj, Fold, Square, StratSpace, Universe,
                        close_universe, line_open)

CONFIG_FORMAT = "factalg-config"
CONFIG_VERSION = 1
COMMANDS = ("check-space", "check-algebra", "evaluate", "glue", "sections", "cone", "dendro-verify",
            "cube-verify")

_RAT = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*-?\d+\s*)?$"}]}
_RATS = {"type": "array", "items": _RAT}
_NAME = {"type": "string", "minLength": 1}
_LITS = {"type": "array", "items": {"type": "string"}}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format", "version", "tasks"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": CONFIG_FORMAT},
        "version": {"const": CONFIG_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "spaces": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["kind"], "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["line", "circle", "star"]},
                "marks": _RATS, "length": _RAT, "rays": {"type": "integer", "minimum": 1},
            }}},
        "universes": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["space"], "additionalProperties": False,
            "properties": {
                "space": _NAME,
                "opens": _LITS,
                "intervals": {"type": "object", "required": ["grid"], "additionalProperties": False,
                              "properties": {"grid": _RATS, "avoid": _RATS}},
                "closure": {"type": "array", "items": {"enum": ["disjoint_unions", "intersections"]}},
                "drop_empty": {"type": "boolean"},
                "add_empty": {"type": "boolean"},
            }}},
        "algebras": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["kind"], "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["ground", "matrix", "truncated_poly", "upper_triangular", "diagonal",
                                  "structure"]},
                "n": {"type": "integer", "minimum": 1},
                "dim": {"type": "integer", "minimum": 1},
                "table": {"type": "array", "items": {"type": "array", "items": _RATS}},
                "unit": _RATS,
            }}},
        "models": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["kind", "universe"], "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["interval", "bimodule", "pushforward"]},
                "universe": _NAME,
                "algebra": _NAME,
                "right": _NAME,
                "dim": {"type": "integer", "minimum": 1},
                "action": {"type": "array", "items": _RATS},
                "point": _RATS,
                "mark": _RAT,
                "source": _NAME,
                "map": {"type": "object", "required": ["kind"], "additionalProperties": False,
                        "properties": {"kind": {"enum": ["square", "cone_proj", "circle_vproj", "fold"]},
                                       "marked": {"type": "boolean"}, "k": {"type": "integer", "minimum": 1},
                                       "n": {"type": "integer", "minimum": 1}, "top": _RAT, "bottom": _RAT}},
            }}},
        "tasks": {"type": "array", "items": {
            "type": "object", "required": ["id", "command", "check"], "additionalProperties": False,
            "properties": {
                "id": {"type": "string", "pattern": r"^[A-Za-z0-9_.:-]+$"},
                "command": {"enum": list(COMMANDS)},
                "check": {"type": "string"},
                "description": {"type": "string"},
                "params": {"type": "object"},
                "expect": {"type": "object", "additionalProperties": False,
                           "properties": {"status": {"enum": ["pass", "fail"]}, "values": {"type": "object"}}},
            }}},
    },
}


def parse_rational(x, where: str = "") -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise RationalParseError(f"{where}: {x!r} is not an exact rational", witness=where)
    if isinstance(x, int):
        return Fraction(x)
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:/\s*(-?\d+)\s*)?", x)
    if not m:
        raise RationalParseError(f"{where}: cannot parse rational {x!r}", witness=where)
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise RationalParseError(f"{where}: zero denominator in {x!r}", witness=where)
    return Fraction(num, den)


def _loc(path) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)


@dataclass
class Task:
    id: str
    command: str
    check: str
    params: dict
    expect_status: str = "pass"
    expect_values: dict = field(default_factory=dict)
    description: str = ""


class Config:
    """A validated config.  Named objects are built on first use and cached."""

    def __init__(self, doc: dict, source: str = "<string>"):
        self.doc = doc
        self.source = source
        self.name = doc.get("name", "")
        self.tasks = [Task(t["id"], t["command"], t["check"], t.get("params", {}),
                           t.get("expect", {}).get("status", "pass"), t.get("expect", {}).get("values", {}),
                           t.get("description", "")) for t in doc["tasks"]]
        self._cache = {}

    def section(self, kind: str) -> dict:
        return self.doc.get(kind, {})

    def _get(self, kind, name, build):
        key = (kind, name)
        if key not in self._cache:
            spec = self.section(kind).get(name)
            if spec is None:
                raise SchemaError(f"$.{kind}: no entry named {name!r}", witness=name)
            self._cache[key] = build(spec, f"$.{kind}.{name}")
        return self._cache[key]

    # builders
    def space(self, name: str) -> StratSpace:
        def build(s, where):
            marks = [parse_rational(m, f"{where}.marks") for m in s.get("marks", [])]
            if s["kind"] == "line":
                return LINE(*marks)
            if s["kind"] == "circle":
                return CIRCLE(parse_rational(s.get("length", 1), f"{where}.length"), marks)
            if "rays" not in s:
                raise SchemaError(f"{where}: a star needs 'rays'", witness=where)
            return STAR(s["rays"])
        return self._get("spaces", name, build)

    def universe(self, name: str) -> Universe:
        def build(s, where):
            X = self.space(s["space"])
            opens = [self.open(X, lit, f"{where}.opens[{i}]") for i, lit in enumerate(s.get("opens", []))]
            iv = s.get("intervals")
            if iv:
                grid = [parse_rational(g, f"{where}.intervals.grid") for g in iv["grid"]]
                avoid = [parse_rational(g, f"{where}.intervals.avoid") for g in iv.get("avoid", [])]
                for i, a in enumerate(grid):
                    for b in grid[i + 1:]:
                        if a < b and not any(a < p < b for p in avoid):
                            opens.append(line_open(X, [(a, b)]))
            un = Universe(X, opens)
            for op in s.get("closure", []):
                un = close_universe(un, op)
            if s.get("drop_empty"):
                un = un.without_empty()
            if s.get("add_empty"):
                un = un.union(Universe(X, [X.empty()]))
            return un
        return self._get("universes", name, build)

    def open(self, space: StratSpace, literal: str, where: str = ""):
        try:
            return space.open(literal)
        except RationalParseError as exc:
            raise RationalParseError(f"{where}: {exc}", witness=where) from exc
        except (FactAlgError, ValueError) as exc:
            raise SchemaError(f"{where}: bad open literal {literal!r}: {exc}", witness=where) from exc

    def opens(self, space: StratSpace, literals, where: str = "") -> list:
        return [self.open(space, lit, f"{where}[{i}]") for i, lit in enumerate(literals)]

    def algebra(self, name: str):
        from .prefact import (diagonal, from_structure_constants, ground_field, matrix_algebra, truncated_poly,
                              upper_triangular)

        def build(s, where):
            k = s["kind"]
            if k == "ground":
                return ground_field()
            if k == "structure":
                if "dim" not in s or "table" not in s or "unit" not in s:
                    raise SchemaError(f"{where}: structure constants need dim, table and unit", witness=where)
                table = [[[parse_rational(x, f"{where}.table") for x in row] for row in plane]
                         for plane in s["table"]]
                unit = [parse_rational(x, f"{where}.unit") for x in s["unit"]]
                return from_structure_constants(s["dim"], table, unit, name=name)
            if "n" not in s:
                raise SchemaError(f"{where}: {k} needs 'n'", witness=where)
            return {"matrix": matrix_algebra, "truncated_poly": truncated_poly,
                    "upper_triangular": upper_triangular, "diagonal": diagonal}[k](s["n"])
        return self._get("algebras", name, build)

    def map_descriptor(self, m: dict, where: str):
        k = m["kind"]
        if k == "square":
            return Square(m.get("marked", False))
        if k == "cone_proj":
            return ConeProj(m.get("k", 2))
        if k == "fold":
            raise SchemaError(f"{where}: fold maps need a base space and are built in code", witness=where)
        return CircleVProj(parse_rational(m.get("top", 1), where), parse_rational(m.get("bottom", 0), where))

    def model(self, name: str):
        from .prefact import Bimodule, from_bimodule, from_interval_algebra, pushforward, regular_bimodule

        def build(s, where):
            un = self.universe(s["universe"])
            k = s["kind"]
            if k == "interval":
                return from_interval_algebra(self.algebra(self._need(s, "algebra", where)), un)
            if k == "bimodule":
                a = self.algebra(self._need(s, "algebra", where))
                point = [parse_rational(x, f"{where}.point") for x in s["point"]] if "point" in s else None
                mark = parse_rational(s["mark"], f"{where}.mark") if "mark" in s else None
                if "action" in s:
                    b = self.algebra(s.get("right", s["algebra"]))
                    dim = self._need(s, "dim", where)
                    rows = [[parse_rational(x, f"{where}.action") for x in r] for r in s["action"]]
                    act = LinMap.from_rows(VectObj(a.dim * dim * b.dim), VectObj(dim), rows)
                    bm = Bimodule(a, dim, b, act, point)
                else:
                    bm = regular_bimodule(a, point)
                return from_bimodule(bm, un, mark)
            src = self.model(self._need(s, "source", where))
            return pushforward(src, self.map_descriptor(self._need(s, "map", where), f"{where}.map"), un)
        return self._get("models", name, build)

    @staticmethod
    def _need(s, key, where):
        if key not in s:
            raise SchemaError(f"{where}: missing {key!r}", witness=where)
        return s[key]

    def validate_references(self):
        """Build every named object once so broken references surface as config errors."""
        for kind, getter in (("spaces", self.space), ("universes", self.universe), ("algebras", self.algebra)):
            for name in self.section(kind):
                getter(name)
        from .tasks import HANDLERS
        seen = set()
        for i, t in enumerate(self.tasks):
            if (t.command, t.check) not in HANDLERS:
                raise SchemaError(f"$.tasks[{i}].check: {t.command} has no check {t.check!r}", witness=t.id)
            if t.id in seen:
                raise SchemaError(f"$.tasks[{i}].id: duplicate task id {t.id!r}", witness=t.id)
            seen.add(t.id)


def parse_config(text: str, source: str = "<string>") -> Config:
    """Parse and validate a config document.

    Raises ``SchemaError`` with a JSON-path location on the first structural
    problem and ``RationalParseError`` on a malformed rational.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        if _is_rational_slot(err):
            raise RationalParseError(f"{_loc(path)}: {err.message}", witness=_loc(path))
        raise SchemaError(f"{_loc(path)}: {err.message}", witness=_loc(path))
    _check_rationals(doc)
    cfg = Config(doc, source)
    try:
        cfg.validate_references()
    except (SchemaError, RationalParseError):
        raise
    except FactAlgError as exc:
        raise SchemaError(str(exc), witness=exc.witness) from exc
    return cfg


def _is_rational_slot(err) -> bool:
    return err.validator == "oneOf" and err.schema is _RAT


def _check_rationals(doc):
    """Reject zero denominators anywhere a rational string may appear."""
    def walk(x, path):
        if isinstance(x, dict):
            for k, v in x.items():
                walk(v, path + [k])
        elif isinstance(x, list):
            for i, v in enumerate(x):
                walk(v, path + [i])
        elif isinstance(x, str) and re.fullmatch(r"\s*-?\d+\s*/\s*-?0+\s*", x):
            raise RationalParseError(f"{_loc(path)}: zero denominator in {x!r}", witness=_loc(path))
    walk(doc, [])


def load_config(path: str) -> Config:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, path)


def paper_examples_text() -> str:
    return resources.files("factalg").joinpath("data/paper_examples.json").read_text(encoding="utf-8")


def paper_examples() -> Config:
    return parse_config(paper_examples_text(), "paper_examples.json")
