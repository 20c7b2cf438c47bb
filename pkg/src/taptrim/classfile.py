"""Parser and serializer for the textual class format.

One class per file:

    .class com.example.MainActivity
    .super android.app.Activity
    .implements com.example.Listener
    .field count I
    .method onCreate (Landroid/os/Bundle;)V
        invoke android.app.Activity.onCreate (Landroid/os/Bundle;)V
        const-resource 0x7f090000
    .end method

Serialization is canonical (fixed ordering within a class, one statement
per line) so that byte sizes of classes and of individual method blocks
are stable; parse(serialize(c)) == c for every valid ClassDef.
"""

from __future__ import annotations

import re

from .errors import ClassParseError, DuplicateMethod
from .model import (
    ClassDef,
    ConstResource,
    ConstString,
    FieldAccess,
    Instruction,
    Invoke,
    MethodDef,
    NewInstance,
    is_fqn,
    IDENT_RE,
)

_METHOD_NAME_RE = re.compile(r"(<init>|<clinit>|[A-Za-z_$][A-Za-z0-9_$]*)\Z")
_HEX_ID_RE = re.compile(r"0x[0-9a-fA-F]{1,8}\Z")
_UNESCAPE_RE = re.compile(r"\\(u[0-9a-fA-F]{4}|.)")

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}
# every code point str.splitlines() treats as a line break must be escaped
_LINE_BREAKS = frozenset("\x85  ")


def escape_string(value: str) -> str:
    out = []
    for ch in value:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F or ch in _LINE_BREAKS:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def unescape_string(text: str, line: int) -> str:
    def replace(m: re.Match[str]) -> str:
        esc = m.group(1)
        if esc.startswith("u"):
            return chr(int(esc[1:], 16))
        if esc in _UNESCAPES:
            return _UNESCAPES[esc]
        raise ClassParseError(f"unknown escape \\{esc}", line)

    return _UNESCAPE_RE.sub(replace, text)


def _split_owner_member(token: str, line: int) -> tuple[str, str]:
    owner, sep, member = token.rpartition(".")
    if not sep or not owner:
        raise ClassParseError(f"expected <owner>.<member>, got {token!r}", line)
    return owner, member


def _require_fqn(name: str, line: int, what: str) -> str:
    if not is_fqn(name):
        raise ClassParseError(f"invalid {what} {name!r}", line)
    return name


def parse_body_line(line_text: str, line: int) -> Instruction:
    parts = line_text.split(None, 1)
    op = parts[0]
    rest = parts[1] if len(parts) > 1 else ""
    if op == "invoke":
        toks = rest.split()
        if len(toks) != 2:
            raise ClassParseError("invoke needs <owner>.<name> <descriptor>", line)
        owner, name = _split_owner_member(toks[0], line)
        _require_fqn(owner, line, "invoke owner")
        if not _METHOD_NAME_RE.match(name):
            raise ClassParseError(f"invalid method name {name!r}", line)
        if not toks[1].startswith("("):
            raise ClassParseError(f"invalid method descriptor {toks[1]!r}", line)
        return Invoke(owner, name, toks[1])
    if op == "new-instance":
        return NewInstance(_require_fqn(rest.strip(), line, "class name"))
    if op == "field-access":
        owner, fname = _split_owner_member(rest.strip(), line)
        _require_fqn(owner, line, "field owner")
        if not IDENT_RE.match(fname):
            raise ClassParseError(f"invalid field name {fname!r}", line)
        return FieldAccess(owner, fname)
    if op == "const-string":
        text = rest.strip()
        if len(text) < 2 or not text.startswith('"') or not text.endswith('"'):
            raise ClassParseError("const-string needs a quoted value", line)
        return ConstString(unescape_string(text[1:-1], line))
    if op == "const-resource":
        token = rest.strip()
        if not _HEX_ID_RE.match(token):
            raise ClassParseError(f"invalid resource id {token!r}", line)
        return ConstResource(int(token, 16))
    raise ClassParseError(f"unknown instruction {op!r}", line)


def parse_class_text(text: str, path: str | None = None) -> ClassDef:
    """Parse one class file. Raises ClassParseError / DuplicateMethod."""
    name: str | None = None
    superclass: str | None = None
    interfaces: list[str] = []
    fields: list[tuple[str, str]] = []
    methods: list[MethodDef] = []
    seen_methods: set[tuple[str, str]] = set()

    current: MethodDef | None = None
    body: list[Instruction] = []

    def fail(msg: str, line: int) -> ClassParseError:
        return ClassParseError(msg, line, path)

    # the format is newline-delimited; splitlines() would also split on
    # unicode line separators that escaped strings may not contain anyway
    for lineno, raw in enumerate(text.split("\n"), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            if current is not None:
                if stripped == ".end method":
                    methods.append(
                        MethodDef(current.name, current.descriptor, current.is_native, tuple(body))
                    )
                    current = None
                    body = []
                else:
                    if current.is_native:
                        raise fail("native methods must have empty bodies", lineno)
                    body.append(parse_body_line(stripped, lineno))
                continue
            parts = stripped.split()
            directive = parts[0]
            if directive == ".class":
                if name is not None:
                    raise fail("duplicate .class directive", lineno)
                if len(parts) != 2:
                    raise fail(".class needs a class name", lineno)
                name = _require_fqn(parts[1], lineno, "class name")
            elif directive == ".super":
                if superclass is not None:
                    raise fail("duplicate .super directive", lineno)
                if len(parts) != 2:
                    raise fail(".super needs a class name", lineno)
                superclass = _require_fqn(parts[1], lineno, "superclass name")
            elif directive == ".implements":
                if len(parts) != 2:
                    raise fail(".implements needs a class name", lineno)
                interfaces.append(_require_fqn(parts[1], lineno, "interface name"))
            elif directive == ".field":
                if len(parts) != 3:
                    raise fail(".field needs <name> <descriptor>", lineno)
                if not IDENT_RE.match(parts[1]):
                    raise fail(f"invalid field name {parts[1]!r}", lineno)
                fields.append((parts[1], parts[2]))
            elif directive == ".method":
                toks = parts[1:]
                is_native = bool(toks) and toks[0] == "native"
                if is_native:
                    toks = toks[1:]
                if len(toks) != 2:
                    raise fail(".method needs [native] <name> <descriptor>", lineno)
                mname, mdesc = toks
                if not _METHOD_NAME_RE.match(mname):
                    raise fail(f"invalid method name {mname!r}", lineno)
                if not mdesc.startswith("("):
                    raise fail(f"invalid method descriptor {mdesc!r}", lineno)
                if (mname, mdesc) in seen_methods:
                    raise DuplicateMethod(f"duplicate method {mname} {mdesc}", lineno, path)
                seen_methods.add((mname, mdesc))
                current = MethodDef(mname, mdesc, is_native, ())
            else:
                raise fail(f"unknown directive {directive!r}", lineno)
        except ClassParseError as err:
            if err.path is None and path is not None:
                raise type(err)(str(err), err.line, path) from None
            raise

    last_line = text.count("\n") + 1
    if current is not None:
        raise ClassParseError("unterminated method block", last_line, path)
    if name is None:
        raise ClassParseError("missing .class directive", last_line, path)
    if name == superclass:
        raise ClassParseError(f"{name} is its own superclass", last_line, path)
    return ClassDef(name, superclass, tuple(interfaces), tuple(fields), tuple(methods))


def serialize_instruction(ins: Instruction) -> str:
    match ins:
        case Invoke(owner, name, descriptor):
            return f"invoke {owner}.{name} {descriptor}"
        case NewInstance(owner):
            return f"new-instance {owner}"
        case FieldAccess(owner, field_name):
            return f"field-access {owner}.{field_name}"
        case ConstString(value):
            return f'const-string "{escape_string(value)}"'
        case ConstResource(resource_id):
            return f"const-resource 0x{resource_id:08x}"
    raise TypeError(f"not an instruction: {ins!r}")


def serialize_method(method: MethodDef) -> str:
    """One method block, .method through .end method, trailing newline."""
    native = "native " if method.is_native else ""
    lines = [f".method {native}{method.name} {method.descriptor}"]
    lines.extend("    " + serialize_instruction(ins) for ins in method.body)
    lines.append(".end method")
    return "\n".join(lines) + "\n"


def serialize_class_text(cls: ClassDef) -> str:
    parts = [f".class {cls.name}\n"]
    if cls.superclass:
        parts.append(f".super {cls.superclass}\n")
    parts.extend(f".implements {i}\n" for i in cls.interfaces)
    parts.extend(f".field {n} {d}\n" for n, d in cls.fields)
    parts.extend(serialize_method(m) for m in cls.methods)
    return "".join(parts)


def class_text_size(cls: ClassDef) -> int:
    return len(serialize_class_text(cls).encode("utf-8"))


def method_block_size(method: MethodDef) -> int:
    return len(serialize_method(method).encode("utf-8"))
