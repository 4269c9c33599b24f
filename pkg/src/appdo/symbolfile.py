"""Symbol definition files (TOML).

Layout::

    dim = 1

    [[generators]]
    name = "one"
    value = [1.0]

    [[generators]]
    name = "sqrt2"
    value = [1.4142135623730951]

    [class]
    m = -1.0
    rho = 1.0
    delta = 0.0

    [[terms]]
    freq = ["1", "0"]
    coeff = "0.5*jbracket(xi)^(-2)"

Frequencies are exact rational coordinates over the generators, written
as strings such as ``"1/2"``. :func:`dumps` writes the canonical form:
terms sorted by frequency and coefficient text re-printed from the parsed
tree, so formatting a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import AppdoError, SchemaError, SymbolClassError
from .expr import parse_coeff_expr
from .frequencies import Frequency, GeneratorSet
from .symbols import APSymbol, SymbolClassParams

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TOP_KEYS = {"dim", "generators", "class", "terms"}


def _locate(text: str, table: str | None, index: int | None = None, key: str | None = None):
    """1-based line of ``key`` inside the ``index``-th ``[table]`` / ``[[table]]`` block."""
    header = None
    seen = -1
    target_header = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"^\[\[\s*([^\]]+?)\s*\]\]$", line) or re.match(r"^\[\s*([^\]]+?)\s*\]$", line)
        if m:
            header = m.group(1)
            if header == table:
                seen += 1
                if index is None or seen == index:
                    target_header = no
            continue
        in_block = (header is None and table is None) or (
            header == table and (index is None or seen == index))
        if in_block and key is not None and re.match(rf"^{re.escape(key)}\s*=", line):
            return no
    return target_header


def _real(value, field, line):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("expected a real number", field, line)
    return float(value)


def loads(text: str) -> APSymbol:
    """Parse symbol-file text into an :class:`APSymbol`."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise SchemaError(f"malformed TOML: {exc}", None, int(m.group(1)) if m else None) from None

    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise SchemaError("unknown key", unknown[0], _locate(text, None, key=unknown[0]))
    for key in ("dim", "generators", "terms"):
        if key not in doc:
            raise SchemaError("missing required key", key)

    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError("dim must be a positive integer", "dim", _locate(text, None, key="dim"))

    gens_raw = doc["generators"]
    if not isinstance(gens_raw, list) or not gens_raw:
        raise SchemaError("at least one [[generators]] entry is required", "generators")
    names, vectors = [], []
    for k, entry in enumerate(gens_raw):
        if not isinstance(entry, dict):
            raise SchemaError("generators must be tables", "generators")
        line = _locate(text, "generators", k)
        extra = sorted(set(entry) - {"name", "value"})
        if extra:
            raise SchemaError("unknown key", f"generators.{extra[0]}", _locate(text, "generators", k, extra[0]))
        name = entry.get("name", f"g{k + 1}")
        if not isinstance(name, str) or not _NAME.match(name):
            raise SchemaError("generator names must be identifiers", "generators.name",
                              _locate(text, "generators", k, "name") or line)
        value = entry.get("value")
        vline = _locate(text, "generators", k, "value") or line
        if not isinstance(value, list) or len(value) != dim:
            raise SchemaError(f"value must be a list of {dim} reals", "generators.value", vline)
        vectors.append([_real(v, "generators.value", vline) for v in value])
        names.append(name)
    if len(set(names)) != len(names):
        raise SchemaError("generator names must be unique", "generators.name")
    try:
        gens = GeneratorSet(vectors, names)
    except AppdoError as exc:
        raise SchemaError(str(exc), "generators", _locate(text, "generators", 0)) from None

    cls_raw = doc.get("class", {})
    if not isinstance(cls_raw, dict):
        raise SchemaError("class must be a table", "class")
    extra = sorted(set(cls_raw) - {"m", "rho", "delta", "m0"})
    if extra:
        raise SchemaError("unknown key", f"class.{extra[0]}", _locate(text, "class", None, extra[0]))
    params = {}
    for key, default in (("m", 0.0), ("rho", 1.0), ("delta", 0.0), ("m0", None)):
        if key in cls_raw:
            params[key] = _real(cls_raw[key], f"class.{key}", _locate(text, "class", None, key))
        else:
            params[key] = default
    try:
        cls = SymbolClassParams(**params)
    except SymbolClassError as exc:
        bad = next((k for k in ("rho", "delta", "m0") if k in str(exc)), "class")
        line = _locate(text, "class", None, bad) or _locate(text, "class")
        raise SymbolClassError(f"{exc} (line {line})" if line else str(exc)) from None

    terms_raw = doc["terms"]
    if not isinstance(terms_raw, list):
        raise SchemaError("terms must be an array of tables", "terms")
    terms = {}
    for k, entry in enumerate(terms_raw):
        line = _locate(text, "terms", k)
        if not isinstance(entry, dict):
            raise SchemaError("terms must be tables", "terms", line)
        extra = sorted(set(entry) - {"freq", "coeff"})
        if extra:
            raise SchemaError("unknown key", f"terms.{extra[0]}", _locate(text, "terms", k, extra[0]))
        freq_raw = entry.get("freq")
        fline = _locate(text, "terms", k, "freq") or line
        if not isinstance(freq_raw, list) or len(freq_raw) != gens.count:
            raise SchemaError(f"freq must list {gens.count} rational coordinates", "terms.freq", fline)
        try:
            coords = [Fraction(c) if isinstance(c, (str, int)) and not isinstance(c, bool) else None
                      for c in freq_raw]
        except (ValueError, ZeroDivisionError):
            raise SchemaError("freq entries must be rationals such as \"1/2\"", "terms.freq", fline) from None
        if any(c is None for c in coords):
            raise SchemaError("freq entries must be rationals such as \"1/2\"", "terms.freq", fline)
        lam = Frequency(coords)
        if lam in terms:
            raise SchemaError(f"duplicate frequency {lam.label()}", "terms.freq", fline)
        coeff = entry.get("coeff")
        cline = _locate(text, "terms", k, "coeff") or line
        if not isinstance(coeff, str):
            raise SchemaError("coeff must be an expression string", "terms.coeff", cline)
        try:
            terms[lam] = parse_coeff_expr(coeff, dim)
        except AppdoError as exc:
            raise SchemaError(f"bad coefficient expression: {exc}", "terms.coeff", cline) from None
    return APSymbol(gens, terms, cls)


def load(path) -> APSymbol:
    """Read and parse a symbol file."""
    return loads(Path(path).read_text(encoding="utf-8"))


def parse_symbol_file(path) -> APSymbol:
    return load(path)


def _fmt_float(x: float) -> str:
    return repr(float(x))


def dumps(a: APSymbol) -> str:
    """Canonical symbol-file text."""
    lines = [f"dim = {a.dim}"]
    if not a.terms:
        lines.append("terms = []")
    lines.append("")
    for name, vec in zip(a.gens.names, a.gens.generators):
        lines += ["[[generators]]", f'name = "{name}"',
                  "value = [" + ", ".join(_fmt_float(v) for v in vec) + "]", ""]
    lines += ["[class]", f"m = {_fmt_float(a.cls.m)}", f"rho = {_fmt_float(a.cls.rho)}",
              f"delta = {_fmt_float(a.cls.delta)}"]
    if a.cls.m0 is not None:
        lines.append(f"m0 = {_fmt_float(a.cls.m0)}")
    lines.append("")
    for lam, fn in a.terms:
        coords = ", ".join(f'"{c}"' for c in lam.coeffs)
        lines += ["[[terms]]", f"freq = [{coords}]", f'coeff = "{fn.text()}"', ""]
    return "\n".join(lines).rstrip("\n") + "\n"


def dump(a: APSymbol, path) -> None:
    Path(path).write_text(dumps(a), encoding="utf-8")
