"""Line-oriented scenario configuration.

A config is a sequence of ``[section]`` headers followed by ``key = value``
lines.  Vectors are comma-separated reals (``1/3`` style fractions are
accepted); keys that hold a list of vectors are repeated, one vector per
line.  ``#`` starts a comment.  ``[component]`` may appear several times,
once per translation field, in order.

Example::

    [group]
    dim = 2
    h = 0, 1
    gamma = 1, 0

    [base]
    kind = lebesgue_segment
    start = 0, 0
    end = 1, 0
    nodes = 1000

    [component]
    field = square_upper

    [component]
    field = square_lower

    [task]
    K = 2, 4, 8, 16
    t = 0, 0
    t = 0, 1/2
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError

# per section: key -> (kind, repeated)
SCHEMA = {
    "scenario": {"name": ("str", False), "description": ("str", False)},
    "group": {"dim": ("int", False), "h": ("vec", True), "gamma": ("vec", True),
              "tol": ("float", False)},
    "base": {"kind": ("str", False), "start": ("vec", False), "end": ("vec", False),
             "lower": ("vec", False), "upper": ("vec", False), "nodes": ("ints", False),
             "rule": ("str", False), "mass": ("float", False), "atom": ("vec", True),
             "weight": ("float", True), "depth": ("int", False)},
    "component": {"field": ("str", False), "delta": ("float", False), "g": ("vec", False),
                  "shift": ("int", False), "axis": ("int", False), "row": ("vec", True)},
    "task": {"threshold": ("float", False), "sep_tol": ("float", False),
             "collision_budget": ("int", False), "chunk": ("int", False),
             "seed": ("int", False), "K": ("ints", False), "spectrum": ("str", False),
             "t": ("vec", True), "force_all": ("bool", False), "grid": ("int", False),
             "refine": ("bool", False)},
    "output": {"dir": ("str", False)},
}
SECTION_ORDER = ("scenario", "group", "base", "component", "task", "output")
KEY_ORDER = {s: tuple(keys) for s, keys in SCHEMA.items()}


def _real(text):
    return float(Fraction(text.strip())) if "/" in text else float(text)


def _convert(kind, text):
    if kind == "str":
        return text
    if kind == "int":
        return int(text)
    if kind == "float":
        return _real(text)
    if kind == "bool":
        low = text.lower()
        if low in ("yes", "true", "1", "on"):
            return True
        if low in ("no", "false", "0", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if kind == "vec":
        return [_real(x) for x in text.split(",")]
    if kind == "ints":
        return [int(x) for x in text.split(",")]
    raise AssertionError(kind)


@dataclass
class ScenarioConfig:
    name: str = "custom"
    description: str = ""
    group: dict = field(default_factory=dict)
    base: dict = field(default_factory=dict)
    components: list = field(default_factory=list)
    task: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    def to_text(self):
        return dump_config(self)


def parse_config(text):
    """Parse config text; raises :class:`ParseError` with a line number."""
    cfg = ScenarioConfig()
    section = None
    block = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {raw.strip()!r}", lineno)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ParseError(f"unknown section [{section}]", lineno)
            if section == "component":
                block = {}
                cfg.components.append(block)
            elif section == "scenario":
                block = None
            else:
                block = getattr(cfg, section)
            continue
        if section is None:
            raise ParseError("key outside of any section", lineno)
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA[section]:
            raise ParseError(f"unknown key {key!r} in [{section}]", lineno)
        kind, repeated = SCHEMA[section][key]
        try:
            val = _convert(kind, value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key!r}: {exc}", lineno) from None
        if section == "scenario":
            setattr(cfg, key, val)
            continue
        if repeated:
            block.setdefault(key, []).append(val)
        elif key in block:
            raise ParseError(f"duplicate key {key!r} in [{section}]", lineno)
        else:
            block[key] = val
    _validate(cfg)
    return cfg


def _validate(cfg):
    if "dim" not in cfg.group:
        raise ParseError("[group] needs 'dim'")
    if "kind" not in cfg.base:
        raise ParseError("[base] needs 'kind'")
    if not cfg.components:
        raise ParseError("at least one [component] is required")
    for i, comp in enumerate(cfg.components):
        if "field" not in comp:
            raise ParseError(f"component {i + 1} has no 'field'")
    if cfg.base.get("kind") in ("lebesgue_segment",):
        nodes = cfg.base.get("nodes", [0])
        if min(nodes) < 2:
            raise ParseError("node count must be at least 2")


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def _fmt(kind, val):
    if kind == "vec":
        return ", ".join(_num(x) for x in val)
    if kind == "ints":
        return ", ".join(str(int(x)) for x in val)
    if kind == "float":
        return _num(val)
    if kind == "bool":
        return "yes" if val else "no"
    return str(val)


def _num(x):
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _dump_block(lines, section, block):
    lines.append(f"[{section}]")
    for key in KEY_ORDER[section]:
        if key not in block:
            continue
        kind, repeated = SCHEMA[section][key]
        values = block[key] if repeated else [block[key]]
        for v in values:
            lines.append(f"{key} = {_fmt(kind, v)}")
    lines.append("")


def dump_config(cfg):
    lines = ["[scenario]", f"name = {cfg.name}"]
    if cfg.description:
        lines.append(f"description = {cfg.description}")
    lines.append("")
    _dump_block(lines, "group", cfg.group)
    _dump_block(lines, "base", cfg.base)
    for comp in cfg.components:
        _dump_block(lines, "component", comp)
    if cfg.task:
        _dump_block(lines, "task", cfg.task)
    if cfg.output:
        _dump_block(lines, "output", cfg.output)
    return "\n".join(lines)
