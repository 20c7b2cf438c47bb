from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taptrim.classfile import (
    escape_string,
    method_block_size,
    parse_class_text,
    serialize_class_text,
    serialize_method,
    unescape_string,
)
from taptrim.errors import ClassParseError, DuplicateMethod
from taptrim.model import (
    ClassDef,
    ConstResource,
    ConstString,
    FieldAccess,
    Invoke,
    MethodDef,
    NewInstance,
)

import helpers


def test_parse_empty_class():
    cls = parse_class_text(".class a.B\n.super java.lang.Object\n")
    assert cls.name == "a.B"
    assert cls.superclass == "java.lang.Object"
    assert cls.methods == ()


def test_parse_entry_activity_has_four_methods(entry_pkg):
    text = serialize_class_text(entry_pkg.classes["com.example.MainActivity"])
    cls = parse_class_text(text)
    assert [m.name for m in cls.methods] == ["<init>", "onCreate", "sum", "sub"]
    assert cls.superclass == "android.app.Activity"


def test_duplicate_method_rejected():
    text = (
        ".class a.B\n.super java.lang.Object\n"
        ".method sum (II)I\n.end method\n"
        ".method sum (II)I\n.end method\n"
    )
    with pytest.raises(DuplicateMethod):
        parse_class_text(text)


def test_overloads_are_distinct_methods():
    text = (
        ".class a.B\n.super java.lang.Object\n"
        ".method sum (II)I\n.end method\n"
        ".method sum (III)I\n.end method\n"
    )
    assert len(parse_class_text(text).methods) == 2


@pytest.mark.parametrize(
    "text, fragment",
    [
        (".super java.lang.Object\n", "missing .class"),
        (".class a.B\n.class a.C\n", "duplicate .class"),
        (".class a.B\n.method sum (II)I\n", "unterminated"),
        (".class a.B\n.method sum II\n.end method\n", "descriptor"),
        (".class a.B\n.method sum (II)I\n    jump a.B\n.end method\n", "unknown instruction"),
        (".class a.B\n.method sum (II)I\n    invoke nowhere (I)V\n.end method\n", "owner"),
        (".class 1bad\n", "invalid class name"),
        (".class a.B\n.super a.B\n", "superclass"),
    ],
)
def test_parse_errors_carry_line_numbers(text, fragment):
    with pytest.raises(ClassParseError) as exc:
        parse_class_text(text)
    assert fragment.split()[0] in str(exc.value)
    assert exc.value.line >= 1


def test_native_method_body_rejected():
    text = (
        ".class a.B\n.super java.lang.Object\n"
        ".method native enc (I)I\n    const-resource 0x01\n.end method\n"
    )
    with pytest.raises(ClassParseError):
        parse_class_text(text)


def test_parser_tolerates_comments_and_whitespace():
    text = (
        "# header comment\n"
        ".class a.B\n\n"
        "  .super java.lang.Object\n"
        ".method go ()V\n"
        "      invoke a.B.go ()V\n"
        ".end method\n"
    )
    cls = parse_class_text(text)
    assert cls.methods[0].body == (Invoke("a.B", "go", "()V"),)


def test_constructor_invoke_round_trip():
    method = MethodDef("<init>", "()V", body=(Invoke("a.B", "<init>", "()V"),))
    cls = ClassDef("a.C", "a.B", methods=(method,))
    assert parse_class_text(serialize_class_text(cls)) == cls


def test_string_escaping_round_trip_specials():
    value = 'line1\nline2\t"quoted"\\end\r\x01'
    assert unescape_string(escape_string(value), 1) == value


_names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)
_fqns = st.builds(lambda parts: ".".join(parts), st.lists(_names, min_size=1, max_size=4))
_descriptors = st.sampled_from(["()V", "(I)V", "(II)I", "(Ljava/lang/String;)V", "()Z"])
_strings = st.text(max_size=40)

_instructions = st.one_of(
    st.builds(Invoke, _fqns, st.one_of(_names, st.sampled_from(["<init>", "<clinit>"])), _descriptors),
    st.builds(NewInstance, _fqns),
    st.builds(FieldAccess, _fqns, _names),
    st.builds(ConstString, _strings),
    st.builds(ConstResource, st.integers(min_value=0, max_value=0xFFFFFFFF)),
)


@st.composite
def _class_defs(draw):
    keys = draw(
        st.lists(
            st.tuples(st.one_of(_names, st.sampled_from(["<init>", "<clinit>"])), _descriptors),
            max_size=5,
            unique=True,
        )
    )
    methods = []
    for mname, mdesc in keys:
        native = draw(st.booleans())
        body = () if native else tuple(draw(st.lists(_instructions, max_size=4)))
        methods.append(MethodDef(mname, mdesc, native, body))
    name = draw(_fqns)
    superclass = draw(st.one_of(st.none(), _fqns.filter(lambda s: s != name)))
    fields = tuple(draw(st.lists(st.tuples(_names, st.sampled_from(["I", "J", "[B"])), max_size=3)))
    interfaces = tuple(draw(st.lists(_fqns, max_size=2)))
    return ClassDef(name, superclass, interfaces, fields, tuple(methods))


@settings(max_examples=60, deadline=None)
@given(_class_defs())
def test_class_text_round_trip(cls):
    assert parse_class_text(serialize_class_text(cls)) == cls


def test_class_text_is_sum_of_header_and_method_blocks():
    cls = helpers.entry_activity_package().classes["com.example.MainActivity"]
    text = serialize_class_text(cls)
    blocks = "".join(serialize_method(m) for m in cls.methods)
    assert text.endswith(blocks)
    assert sum(method_block_size(m) for m in cls.methods) == len(blocks.encode())
