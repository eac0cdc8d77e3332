"""Self-describing JSON problem files.

A problem file declares the atom partition and named formulas,
strategies, environment machines and histories. Formula texts may refer to
earlier formulas by name, and ``not`` is accepted as a spelling of ``!``
in formula references.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

from . import ltlf, strategies
from .ltlf import AtomPartition


class ValidationError(ValueError):
    pass


_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*")


def _expand(text, defs):
    def sub(m):
        tok = m.group(0)
        if tok == "not":
            return "!"
        if tok in defs:
            return "(" + defs[tok] + ")"
        return tok
    return _WORD.sub(sub, text)


def _letter(obj, names, where):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object of atom values")
    unknown = set(obj) - set(names)
    if unknown:
        raise ValidationError(f"{where}: unknown atom {sorted(unknown)[0]!r}")
    missing = set(names) - set(obj)
    if missing:
        raise ValidationError(f"{where}: atom {sorted(missing)[0]!r} has no "
                              "value")
    return frozenset(a for a, v in obj.items() if v)


@dataclass
class Problem:
    partition: AtomPartition
    texts: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    strategies: dict = field(default_factory=dict)
    env_strategies: dict = field(default_factory=dict)
    histories: dict = field(default_factory=dict)
    source: dict = None

    def formula(self, expr):
        """A named formula or a formula text that may use the names."""
        if expr in self.formulas:
            return self.formulas[expr]
        try:
            return ltlf.parse(_expand(expr, self.texts), self.partition)
        except ltlf.FormulaError as exc:
            raise ValidationError(f"formula {expr!r}: {exc}") from exc

    def strategy(self, name):
        return self._get(self.strategies, name, "strategy")

    def env_strategy(self, name):
        return self._get(self.env_strategies, name, "environment strategy")

    def history(self, name):
        return self._get(self.histories, name, "history")

    @staticmethod
    def _get(table, name, what):
        if name not in table:
            raise ValidationError(f"unknown {what} {name!r}")
        return table[name]


def _agent_machine(name, spec, p):
    where = f"strategy {name!r}"
    try:
        ids = [s["id"] for s in spec["states"]]
        outputs = {s["id"]: _letter(s["output"], p.agent, f"{where} output")
                   for s in spec["states"] if "output" in s}
        trans = {}
        for t in spec.get("transitions", []):
            x = _letter(t["input"], p.env, f"{where} transition")
            key = (t["from"], p.env_mask(x))
            if key in trans:
                raise ValidationError(f"{where}: duplicate transition from "
                                      f"{t['from']!r}")
            trans[key] = t["to"]
        a = strategies.AgentTransducer(p, ids, spec["initial"], outputs,
                                       trans, spec.get("terminating", []),
                                       name=name)
    except KeyError as exc:
        raise ValidationError(f"{where}: missing field {exc}") from exc
    except strategies.StrategyError as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    rep = strategies.validate_stopping(a)
    if not rep:
        raise ValidationError(f"{where} does not stop: lasso "
                              + " -> ".join(map(str, rep.lasso)))
    return a


def _env_machine(name, spec, p):
    where = f"environment strategy {name!r}"
    try:
        outputs, trans = {}, {}
        for o in spec["outputs"]:
            y = _letter(o["input"], p.agent, f"{where} output")
            outputs[(o["state"], p.agent_mask(y))] = _letter(
                o["output"], p.env, f"{where} output")
        for t in spec["transitions"]:
            y = _letter(t["input"], p.agent, f"{where} transition")
            trans[(t["from"], p.agent_mask(y))] = t["to"]
        return strategies.EnvTransducer(p, spec["states"], spec["initial"],
                                        outputs, trans, name=name)
    except KeyError as exc:
        raise ValidationError(f"{where}: missing field {exc}") from exc
    except strategies.StrategyError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _history(name, spec, p):
    if not isinstance(spec, list) or not spec:
        raise ValidationError(f"history {name!r} must be a nonempty list")
    try:
        return strategies.make_history(
            (_letter(s["agent"], p.agent, f"history {name!r}"),
             _letter(s["env"], p.env, f"history {name!r}")) for s in spec)
    except KeyError as exc:
        raise ValidationError(f"history {name!r}: missing field {exc}") from exc


def load_problem(data):
    """Build a Problem from a parsed JSON object, a path, or JSON text."""
    if not isinstance(data, dict):
        text = str(data)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text, encoding="utf-8") as fh:
                data = json.load(fh)
    try:
        part = data["partition"]
        p = AtomPartition(tuple(part.get("agent", ())), tuple(part.get("env", ())))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad partition: {exc}") from exc
    prob = Problem(p, source=data)
    for name, text in data.get("formulas", {}).items():
        if name in p.atoms:
            raise ValidationError(f"formula name {name!r} clashes with an atom")
        expanded = _expand(text, prob.texts)
        try:
            prob.formulas[name] = ltlf.parse(expanded, p)
        except ltlf.FormulaError as exc:
            raise ValidationError(f"formula {name!r}: {exc}") from exc
        prob.texts[name] = expanded
    for name, spec in data.get("strategies", {}).items():
        prob.strategies[name] = _agent_machine(name, spec, p)
    for name, spec in data.get("envStrategies", {}).items():
        prob.env_strategies[name] = _env_machine(name, spec, p)
    for name, spec in data.get("histories", {}).items():
        prob.histories[name] = _history(name, spec, p)
    return prob


def plant_json():
    return json.loads(resources.files("rescheck.data")
                      .joinpath("plant.json").read_text(encoding="utf-8"))


def plant():
    """The bundled plant-watering corpus."""
    return load_problem(plant_json())


def history_json(history):
    return [{"agent": sorted(y), "env": sorted(x)} for y, x in history]
