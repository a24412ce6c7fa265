import pytest

from exposcan.embeddings import DEFAULT_DIM
from exposcan.errors import ModelMissing
from exposcan.harness import generate_element_dataset
from exposcan.javasrc import extract_elements, parse_source
from exposcan.javasrc.model import ElementKind
from exposcan.learning import SearchSpace
from exposcan.lexicon import SensitiveCategory, SinkKind
from exposcan.surface import (
    SurfaceModels,
    detect_sinks,
    detect_sources,
    element_features,
    lexicon_sources,
    rule_list_sinks,
    task_input_dim,
)
from exposcan.tasks import train_element_task


def test_lexicon_surface_on_medical_record(medical_record_source):
    unit = parse_source(medical_record_source, "M.java")
    findings = lexicon_sources(unit)
    by_name = {f.element.name: f for f in findings
               if f.element.kind is ElementKind.VARIABLE}
    assert by_name["patientId"].category is SensitiveCategory.PII
    assert by_name["DB_PASSWORD"].category is SensitiveCategory.AUTH_CREDENTIALS
    assert by_name["DB_USER"].category is SensitiveCategory.AUTH_CREDENTIALS
    assert "DB_URL" in by_name
    assert "query" not in by_name


def test_rule_list_sinks_on_medical_record(medical_record_source):
    unit = parse_source(medical_record_source, "M.java")
    findings = rule_list_sinks(unit)
    kinds = {(f.element.qualified_name, f.sink_kind) for f in findings}
    assert ("System.out.println", SinkKind.PRINT_OUTPUT) in kinds
    assert ("new RuntimeException", SinkKind.ERROR_MESSAGE) in kinds


def test_findings_are_subset_of_elements(medical_record_source):
    unit = parse_source(medical_record_source, "M.java")
    elements = extract_elements(unit)
    ids = {e.id for e in elements}
    for finding in lexicon_sources(unit, elements) + rule_list_sinks(unit, elements):
        assert finding.element.id in ids


def test_comment_features_are_name_dim_only(provider):
    unit = parse_source("class A { } // admin password is hunter2", "A.java")
    comment = next(e for e in extract_elements(unit)
                   if e.kind is ElementKind.COMMENT)
    features = element_features(comment, unit, provider)
    assert features.shape == (DEFAULT_DIM,)
    variable_unit = parse_source("class A { int width; }", "A.java")
    variable = extract_elements(variable_unit)[0]
    assert element_features(variable, variable_unit, provider).shape == (2 * DEFAULT_DIM,)


def test_task_input_dims():
    assert task_input_dim("comments", 384) == 384
    assert task_input_dim("variables", 384) == 768
    assert task_input_dim("sinks", 384) == 768


@pytest.fixture(scope="module")
def comments_model(provider):
    records = generate_element_dataset("comments", 24, 48, seed=3)
    result = train_element_task(records, "comments", provider, seed=3,
                                space=SearchSpace(trials=2, folds=2))
    return result.model


def test_detect_sources_with_learned_comment_model(provider, comments_model):
    src = """class A {
    // staging apiKey = sk-test-9911 do not commit
    // sort ascending for display
    void f() { }
}
"""
    unit = parse_source(src, "A.java")
    models = SurfaceModels(comments=comments_model)
    elements = [e for e in extract_elements(unit)
                if e.kind is ElementKind.COMMENT]
    findings = detect_sources(unit, models, provider, elements=elements)
    names = {f.element.name for f in findings}
    assert any("apiKey" in n for n in names)
    assert not any("ascending" in n for n in names)


def test_threshold_monotonicity(provider, comments_model):
    src = """class A {
    // staging apiKey = sk-test-9911 do not commit
    // db password rotates monthly, current one is in this file
    void f() { }
}
"""
    unit = parse_source(src, "A.java")
    models = SurfaceModels(comments=comments_model)
    elements = [e for e in extract_elements(unit)
                if e.kind is ElementKind.COMMENT]
    previous = None
    for threshold in (0.1, 0.3, 0.5, 0.7, 0.9):
        found = {f.element.id for f in detect_sources(
            unit, models, provider, threshold, elements)}
        if previous is not None:
            assert found <= previous
        previous = found


def test_missing_model_raises(provider):
    unit = parse_source("class A { int width; }", "A.java")
    with pytest.raises(ModelMissing):
        detect_sources(unit, SurfaceModels(), provider)


def test_detect_sinks_rule_list_survives_untrained(provider):
    src = """class A {
    void f(String pw) {
        System.out.println(pw);
        logger.warn(pw);
        custom.frobnicate(pw);
    }
}
"""
    unit = parse_source(src, "A.java")
    findings = detect_sinks(unit, SurfaceModels(), provider)
    kinds = {f.sink_kind for f in findings}
    assert kinds == {SinkKind.PRINT_OUTPUT, SinkKind.LOGGING}
    assert all(f.score == 1.0 for f in findings)
