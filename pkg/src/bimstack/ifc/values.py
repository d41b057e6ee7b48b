"""Attribute value model for STEP physical files.

Values are plain Python where unambiguous (int, float, str, None for the
unset token ``$``, tuples for aggregates) plus small wrapper types for the
constructs Python has no natural twin for: entity references, enumeration
tokens, the redeclared-derived marker ``*`` and typed (select) values.
Booleans never appear raw; STEP encodes them as the enum tokens .T./.F.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Ref:
    """Reference to another entity instance (``#123``)."""

    target: int


@dataclass(frozen=True)
class EnumVal:
    """Enumeration token without the delimiting dots (``.ELEMENT.`` -> ``ELEMENT``)."""

    name: str


@dataclass(frozen=True)
class Typed:
    """Type-wrapped (select) value such as ``IFCBOOLEAN(.T.)``."""

    type_name: str
    value: "SpfValue"


class _Derived:
    """Singleton for the ``*`` token (attribute derived in a subtype)."""

    _instance: "_Derived | None" = None

    def __new__(cls) -> "_Derived":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DERIVED"


DERIVED = _Derived()

# None encodes the unset token `$`; tuples encode aggregates.
SpfValue = int | float | str | None | Ref | EnumVal | Typed | _Derived | tuple


def format_real(x: float) -> str:
    """Render a float in STEP real syntax (mantissa always carries a dot)."""
    s = repr(float(x))
    if "e" in s or "E" in s:
        mantissa, _, exponent = s.lower().partition("e")
        if "." not in mantissa:
            mantissa += "."
        elif mantissa.endswith(".0"):
            mantissa = mantissa[:-1]
        sign, digits = ("-", exponent[1:]) if exponent.startswith("-") else ("", exponent.lstrip("+"))
        return f"{mantissa}E{sign}{int(digits)}"
    if s.endswith(".0"):
        s = s[:-1]
    return s


def encode_string(s: str) -> str:
    """Encode a decoded string into STEP string-literal body form.

    Printable ASCII passes through (apostrophes doubled, backslashes
    doubled); everything else is emitted as \\X2\\..\\X0\\ or \\X4\\..\\X0\\ runs.
    """
    out: list[str] = []
    run16: list[str] = []
    run32: list[str] = []

    def flush() -> None:
        if run16:
            out.append("\\X2\\" + "".join(run16) + "\\X0\\")
            run16.clear()
        if run32:
            out.append("\\X4\\" + "".join(run32) + "\\X0\\")
            run32.clear()

    for ch in s:
        cp = ord(ch)
        if 0x20 <= cp <= 0x7E:
            flush()
            if ch == "'":
                out.append("''")
            elif ch == "\\":
                out.append("\\\\")
            else:
                out.append(ch)
        elif cp <= 0xFFFF:
            if run32:
                flush()
            run16.append(f"{cp:04X}")
        else:
            if run16:
                flush()
            run32.append(f"{cp:08X}")
    flush()
    return "".join(out)


def format_value(v: SpfValue) -> str:
    """Serialize one attribute value to its SPF token text."""
    if v is None:
        return "$"
    if v is DERIVED:
        return "*"
    if isinstance(v, bool):
        raise TypeError("raw bool is not a STEP value; use EnumVal('T'/'F')")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_real(v)
    if isinstance(v, str):
        return f"'{encode_string(v)}'"
    if isinstance(v, Ref):
        return f"#{v.target}"
    if isinstance(v, EnumVal):
        return f".{v.name}."
    if isinstance(v, Typed):
        return f"{v.type_name}({format_value(v.value)})"
    if isinstance(v, tuple):
        return "(" + ",".join(format_value(x) for x in v) + ")"
    raise TypeError(f"not a STEP value: {v!r}")
