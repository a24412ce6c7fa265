import pytest

from exposcan.errors import CommentHasNoContext
from exposcan.javasrc import extract_context, extract_elements, parse_source
from exposcan.javasrc.model import ElementKind


def _unit(src: str):
    return parse_source(src, "T.java")


def test_one_of_each_kind():
    unit = _unit('class A { void f() { String pw = "s3cret"; } } // key')
    elements = extract_elements(unit)
    kinds = {}
    for element in elements:
        kinds.setdefault(element.kind, []).append(element.name)
    assert "pw" in kinds[ElementKind.VARIABLE]
    assert kinds[ElementKind.STRING_LITERAL] == ["s3cret"]
    assert kinds[ElementKind.COMMENT] == ["key"]


def test_empty_class_body():
    unit = _unit("class A { }")
    assert extract_elements(unit) == []


def test_medical_record_elements(medical_record_source):
    unit = parse_source(medical_record_source, "M.java")
    elements = extract_elements(unit)
    variables = {e.name for e in elements if e.kind is ElementKind.VARIABLE}
    assert "patientId" in variables
    calls = [e for e in elements if e.kind is ElementKind.API_CALL]
    print_call = [c for c in calls if c.qualified_name == "System.out.println"]
    assert print_call and print_call[0].start_line == 23


def test_ids_unique_and_deterministic(medical_record_source):
    unit1 = parse_source(medical_record_source, "M.java")
    unit2 = parse_source(medical_record_source, "M.java")
    first = [(e.id, e.kind.value, e.name) for e in extract_elements(unit1)]
    second = [(e.id, e.kind.value, e.name) for e in extract_elements(unit2)]
    assert first == second
    ids = [row[0] for row in first]
    assert len(ids) == len(set(ids))


def test_order_by_position():
    unit = _unit('class A { int a; void f() { int b; } int c; }')
    elements = extract_elements(unit)
    lines = [e.start_line for e in elements]
    assert lines == sorted(lines)


def test_context_local_variable():
    src = """class A {
    void f() {
        int depth = 3;
        use(depth);
    }
}
"""
    unit = _unit(src)
    element = next(e for e in extract_elements(unit) if e.name == "depth")
    snippet = extract_context(element, unit)
    assert snippet.method_text.startswith("void f()")
    assert len(snippet.method_text.splitlines()) == 4
    assert snippet.global_lines == []
    assert snippet.type_tag == "int"


def test_context_class_scope_constant():
    src = """class A {
    static final String DB_PASSWORD = "x";
    void f() { use(DB_PASSWORD); }
    void g() { log(DB_PASSWORD); }
}
"""
    unit = _unit(src)
    element = next(e for e in extract_elements(unit) if e.name == "DB_PASSWORD")
    snippet = extract_context(element, unit)
    assert snippet.method_text == ""
    assert snippet.global_lines == ['    static final String DB_PASSWORD = "x";']


def test_identifier_boundary_no_substring_match():
    src = """class A {
    static final int id = 1;
    static final int valid = 2;
    void f() { use(id); }
}
"""
    unit = _unit(src)
    element = next(e for e in extract_elements(unit) if e.name == "id")
    snippet = extract_context(element, unit)
    assert snippet.global_lines == ["    static final int id = 1;"]


def test_medical_record_patient_id_context(medical_record_source):
    unit = parse_source(medical_record_source, "M.java")
    element = next(e for e in extract_elements(unit)
                   if e.name == "patientId" and e.kind is ElementKind.VARIABLE)
    snippet = extract_context(element, unit)
    assert snippet.type_tag == "String"
    assert "retrieveRecord" in snippet.method_text
    assert snippet.method_text == unit.slice(
        *[(m.start, m.end) for m in unit.methods if m.name == "retrieveRecord"][0])


def test_comment_has_no_context():
    unit = _unit("class A { } // note")
    comment = next(e for e in extract_elements(unit)
                   if e.kind is ElementKind.COMMENT)
    with pytest.raises(CommentHasNoContext):
        extract_context(comment, unit)


def test_method_text_mentions_variable_name(medical_record_source):
    unit = parse_source(medical_record_source, "M.java")
    for element in extract_elements(unit):
        if element.kind is ElementKind.VARIABLE and element.enclosing_method:
            snippet = extract_context(element, unit)
            assert element.name in snippet.method_text


def test_api_call_type_tag_is_qualified():
    unit = _unit('class A { void f() { logger.info("x"); } }')
    call = next(e for e in extract_elements(unit) if e.kind is ElementKind.API_CALL)
    snippet = extract_context(call, unit)
    assert snippet.type_tag == "logger.info"
