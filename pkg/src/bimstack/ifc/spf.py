"""STEP physical file (ISO 10303-21) reader and canonical writer.

The reader is whitespace- and comment-insensitive and reports every failure
with the 1-based line and column where it was detected. The writer always
emits the same canonical shape: one instance per line, ids ascending,
fixed three-record header. serialize(parse(x)) is a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import SUPPORTED_SCHEMAS, IfcEntity, IfcHeader, IfcModel
from .values import DERIVED, EnumVal, Ref, SpfValue, Typed, encode_string, format_value


class SpfParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # ID NAME STRING ENUM INT REAL LPAREN RPAREN COMMA SEMI EQ DOLLAR STAR EOF
    value: object
    line: int
    col: int


_PUNCT = {"(": "LPAREN", ")": "RPAREN", ",": "COMMA", ";": "SEMI", "=": "EQ", "$": "DOLLAR", "*": "STAR"}


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _err(self, message: str, line: int | None = None, col: int | None = None) -> SpfParseError:
        return SpfParseError(message, line if line is not None else self.line, col if col is not None else self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def _skip_blank(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self._advance()
            elif ch == "/" and self._peek(1) == "*":
                start_line, start_col = self.line, self.col
                self._advance(2)
                while self.pos < len(self.text) and not (self.text[self.pos] == "*" and self._peek(1) == "/"):
                    self._advance()
                if self.pos >= len(self.text):
                    raise self._err("unterminated comment", start_line, start_col)
                self._advance(2)
            else:
                return

    def next(self) -> Token:
        self._skip_blank()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return Token("EOF", None, line, col)
        ch = self.text[self.pos]
        if ch in _PUNCT:
            self._advance()
            return Token(_PUNCT[ch], ch, line, col)
        if ch == "#":
            self._advance()
            digits = self._take_while(str.isdigit)
            if not digits:
                raise self._err("expected digits after '#'", line, col)
            return Token("ID", int(digits), line, col)
        if ch == "'":
            return Token("STRING", self._string(line, col), line, col)
        if ch == ".":
            self._advance()
            name = self._take_while(lambda c: c.isalnum() or c == "_")
            if not name or self._peek() != ".":
                raise self._err("malformed enumeration token", line, col)
            self._advance()
            return Token("ENUM", name, line, col)
        if ch.isdigit() or ch in "+-":
            return self._number(line, col)
        if ch.isalpha() or ch == "_":
            name = self._take_while(lambda c: c.isalnum() or c in "_-")
            return Token("NAME", name.upper(), line, col)
        raise self._err(f"unexpected character {ch!r}", line, col)

    def _take_while(self, pred) -> str:
        start = self.pos
        while self.pos < len(self.text) and pred(self.text[self.pos]):
            self._advance()
        return self.text[start : self.pos]

    def _number(self, line: int, col: int) -> Token:
        start = self.pos
        if self._peek() in "+-":
            self._advance()
        digits = self._take_while(str.isdigit)
        if not digits:
            raise self._err("expected digits in numeric literal", line, col)
        is_real = False
        if self._peek() == ".":
            is_real = True
            self._advance()
            self._take_while(str.isdigit)
        if self._peek() in "eE":
            is_real = True
            self._advance()
            if self._peek() in "+-":
                self._advance()
            if not self._take_while(str.isdigit):
                raise self._err("expected digits in exponent", line, col)
        raw = self.text[start : self.pos]
        return Token("REAL", float(raw), line, col) if is_real else Token("INT", int(raw), line, col)

    def _string(self, line: int, col: int) -> str:
        # self.pos sits on the opening quote
        self._advance()
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self._err("unterminated string", line, col)
            ch = self.text[self.pos]
            if ch == "'":
                if self._peek(1) == "'":
                    out.append("'")
                    self._advance(2)
                    continue
                self._advance()
                return "".join(out)
            if ch == "\\":
                out.append(self._escape(line, col))
                continue
            if ch == "\n":
                raise self._err("unterminated string", line, col)
            out.append(ch)
            self._advance()

    def _escape(self, line: int, col: int) -> str:
        # self.pos sits on the backslash
        nxt = self._peek(1)
        if nxt == "\\":
            self._advance(2)
            return "\\"
        if nxt in "Ss" and self._peek(2) == "\\":
            target = self._peek(3)
            if not target:
                raise self._err("truncated \\S\\ escape", self.line, self.col)
            self._advance(4)
            return chr(ord(target) + 128)
        if nxt in "Pp" and self._peek(3) == "\\":
            # code-page directive; only the Latin-1 default is supported
            self._advance(4)
            return ""
        if nxt in "Xx":
            if self._peek(2) == "\\":
                hh = self._peek(3) + self._peek(4)
                if len(hh) < 2 or any(c not in "0123456789abcdefABCDEF" for c in hh):
                    raise self._err("malformed \\X\\ escape", self.line, self.col)
                self._advance(5)
                return chr(int(hh, 16))
            if self._peek(2) in "24" and self._peek(3) == "\\":
                width = 4 if self._peek(2) == "2" else 8
                self._advance(4)
                return self._hex_run(width, line, col)
        raise self._err("unknown string escape", self.line, self.col)

    def _hex_run(self, width: int, line: int, col: int) -> str:
        chars: list[str] = []
        while True:
            if self._peek() == "\\":
                if self._peek(1) in "Xx" and self._peek(2) == "0" and self._peek(3) == "\\":
                    self._advance(4)
                    try:
                        return _join_utf16(chars) if width == 4 else "".join(chars)
                    except UnicodeDecodeError:
                        raise self._err("malformed extended-string run", line, col) from None
                raise self._err("malformed extended-string run", self.line, self.col)
            group = self.text[self.pos : self.pos + width]
            if len(group) < width or any(c not in "0123456789abcdefABCDEF" for c in group):
                raise self._err("malformed extended-string run", self.line, self.col)
            chars.append(chr(int(group, 16)) if width == 8 else group)  # 16-bit groups joined later
            self._advance(width)


def _join_utf16(groups: list[str]) -> str:
    units = [int(g, 16) for g in groups]
    return b"".join(u.to_bytes(2, "big") for u in units).decode("utf-16-be", errors="strict")


class _Parser:
    def __init__(self, text: str):
        self.lexer = _Lexer(text)
        self.tok = self.lexer.next()

    def _err(self, message: str, tok: Token | None = None) -> SpfParseError:
        t = tok or self.tok
        return SpfParseError(message, t.line, t.col)

    def _next(self) -> None:
        self.tok = self.lexer.next()

    def _expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            raise self._err(f"expected {what}")
        t = self.tok
        self._next()
        return t

    def _expect_name(self, name: str) -> None:
        if self.tok.kind != "NAME" or self.tok.value != name:
            raise self._err(f"expected {name}")
        self._next()

    def parse(self) -> IfcModel:
        self._expect_name("ISO-10303-21")
        self._expect("SEMI", "';'")
        header = self._header()
        model = IfcModel(header)
        self._expect_name("DATA")
        self._expect("SEMI", "';'")
        ref_sites: list[tuple[int, int, int]] = []
        while not (self.tok.kind == "NAME" and self.tok.value == "ENDSEC"):
            self._instance(model, ref_sites)
        self._next()
        self._expect("SEMI", "';'")
        self._expect_name("END-ISO-10303-21")
        self._expect("SEMI", "';'")
        if self.tok.kind != "EOF":
            raise self._err("trailing content after END-ISO-10303-21")
        for target, line, col in ref_sites:
            if target not in model.entities:
                raise SpfParseError(f"reference to missing instance #{target}", line, col)
        return model

    def _header(self) -> IfcHeader:
        self._expect_name("HEADER")
        self._expect("SEMI", "';'")
        records: dict[str, tuple] = {}
        while self.tok.kind == "NAME" and self.tok.value != "ENDSEC":
            name = self.tok.value
            name_tok = self.tok
            self._next()
            args = self._arg_list([])
            self._expect("SEMI", "';'")
            records[str(name)] = (args, name_tok)
        self._expect_name("ENDSEC")
        self._expect("SEMI", "';'")

        header = IfcHeader()
        if "FILE_DESCRIPTION" in records:
            args, _ = records["FILE_DESCRIPTION"]
            if args and isinstance(args[0], tuple):
                header.description = "; ".join(str(x) for x in args[0] if isinstance(x, str) and x)
        if "FILE_NAME" in records:
            args, _ = records["FILE_NAME"]
            header.name = args[0] if len(args) > 0 and isinstance(args[0], str) else ""
            header.timestamp = args[1] if len(args) > 1 and isinstance(args[1], str) else ""
            originating = args[5] if len(args) > 5 and isinstance(args[5], str) else ""
            preprocessor = args[4] if len(args) > 4 and isinstance(args[4], str) else ""
            header.authoring_tool = originating or preprocessor
        if "FILE_SCHEMA" not in records:
            raise self._err("missing FILE_SCHEMA header record")
        args, name_tok = records["FILE_SCHEMA"]
        if not (args and isinstance(args[0], tuple) and args[0] and isinstance(args[0][0], str)):
            raise SpfParseError("malformed FILE_SCHEMA record", name_tok.line, name_tok.col)
        schema = args[0][0]
        if schema not in SUPPORTED_SCHEMAS:
            raise SpfParseError(f"unsupported schema {schema!r}", name_tok.line, name_tok.col)
        header.schema_id = schema
        return header

    def _instance(self, model: IfcModel, ref_sites: list[tuple[int, int, int]]) -> None:
        id_tok = self._expect("ID", "instance id like '#12'")
        eid = int(id_tok.value)  # type: ignore[arg-type]
        if eid < 1:
            raise self._err("instance id must be >= 1", id_tok)
        if eid in model.entities:
            raise self._err(f"duplicate instance id #{eid}", id_tok)
        self._expect("EQ", "'='")
        name_tok = self._expect("NAME", "entity type name")
        args = self._arg_list(ref_sites)
        self._expect("SEMI", "';'")
        model.put(IfcEntity(eid, str(name_tok.value), list(args)))

    def _arg_list(self, ref_sites: list[tuple[int, int, int]]) -> tuple:
        self._expect("LPAREN", "'('")
        args: list[SpfValue] = []
        if self.tok.kind == "RPAREN":
            self._next()
            return tuple(args)
        while True:
            args.append(self._value(ref_sites))
            if self.tok.kind == "COMMA":
                self._next()
                continue
            if self.tok.kind == "RPAREN":
                self._next()
                return tuple(args)
            raise self._err("expected ',' or ')'")

    def _value(self, ref_sites: list[tuple[int, int, int]]) -> SpfValue:
        tok = self.tok
        if tok.kind == "DOLLAR":
            self._next()
            return None
        if tok.kind == "STAR":
            self._next()
            return DERIVED
        if tok.kind in ("INT", "REAL", "STRING"):
            self._next()
            return tok.value  # type: ignore[return-value]
        if tok.kind == "ENUM":
            self._next()
            return EnumVal(str(tok.value))
        if tok.kind == "ID":
            self._next()
            ref_sites.append((int(tok.value), tok.line, tok.col))  # type: ignore[arg-type]
            return Ref(int(tok.value))  # type: ignore[arg-type]
        if tok.kind == "LPAREN":
            return self._arg_list(ref_sites)
        if tok.kind == "NAME":
            self._next()
            inner = self._arg_list(ref_sites)
            if len(inner) != 1:
                raise self._err("typed value takes exactly one argument", tok)
            return Typed(str(tok.value), inner[0])
        raise self._err("expected attribute value")


def parse_spf(data: str | bytes) -> IfcModel:
    """Parse STEP clear text into an IfcModel.

    Raises SpfParseError (with .line/.col) on lexical errors, structural
    errors, duplicate instance ids, dangling references, or an
    unsupported/missing FILE_SCHEMA.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            text = data.decode("latin-1")
    else:
        text = data
    return _Parser(text).parse()


def serialize_spf(model: IfcModel) -> str:
    """Write the canonical clear-text form (ASCII, one instance per line)."""
    h = model.header
    lines = [
        "ISO-10303-21;",
        "HEADER;",
        f"FILE_DESCRIPTION(('{encode_string(h.description)}'),'2;1');",
        "FILE_NAME('{}','{}',(''),(''),'{}','{}','');".format(
            encode_string(h.name), encode_string(h.timestamp), encode_string(h.authoring_tool), encode_string(h.authoring_tool)
        ),
        f"FILE_SCHEMA(('{h.schema_id}'));",
        "ENDSEC;",
        "DATA;",
    ]
    for eid in sorted(model.entities):
        e = model.entities[eid]
        body = ",".join(format_value(a) for a in e.attrs)
        lines.append(f"#{eid}={e.type_name}({body});")
    lines += ["ENDSEC;", "END-ISO-10303-21;", ""]
    return "\n".join(lines)
