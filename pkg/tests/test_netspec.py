import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ndsan.distributions import Constant, Triangular, TruncatedNormal
from ndsan.errors import NetworkSyntaxError, SchemaError, ValidationError
from ndsan.model import Acyclic, Decision, Loop, Trivial, series
from ndsan.netspec import (
    example_names,
    export_results,
    format_number,
    load_example,
    oracle_cdf_csv,
    parse_document,
    parse_network,
    read_samples,
    serialize_document,
    serialize_network,
)
from ndsan.numeric import analyze
from ndsan.sampler import run_batch
from ndsan.stats import approximate_density, ecdf, histogram


def leaf(name, dur):
    return {"kind": "trivial", "name": name, "duration": dur}


# -- parsing -----------------------------------------------------------------------


def test_parse_triangular_activity():
    net = parse_network('{"kind":"trivial","name":"a1","duration":{"triangular":[2,4,5]}}')
    assert net == Trivial("a1", Triangular(2, 4, 5))


def test_parse_loop():
    doc = {
        "format_version": 1,
        "name": "l1",
        "root": {
            "kind": "loop",
            "entry": leaf("a2", {"constant": [1]}),
            "body": leaf("a3", {"truncated_normal": [14, 7]}),
            "exit": leaf("a4", {"constant": 0}),
            "continue_probs": [0.5, 0.2, 0.0],
        },
    }
    net = parse_network(json.dumps(doc))
    assert isinstance(net, Loop)
    assert net.beta == 3
    assert net.body.duration == TruncatedNormal(14, 7)


def test_parse_rejects_bad_branch_sum():
    doc = {
        "kind": "decision",
        "entry": leaf("d", {"constant": [0]}),
        "branches": [
            {"probability": 0.5, "node": leaf("x", {"constant": [1]})},
            {"probability": 0.4, "node": leaf("y", {"constant": [2]})},
        ],
        "exit": leaf("e", {"constant": [0]}),
    }
    with pytest.raises(ValidationError) as info:
        parse_network(json.dumps(doc))
    assert not info.value.report.ok


def test_syntax_error_has_position():
    with pytest.raises(NetworkSyntaxError) as info:
        parse_network('{"kind": "trivial",\n  "name": }')
    assert info.value.line == 2
    assert info.value.position > 0


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"kind": "spiral"}, "unknown node kind"),
        ({"kind": "trivial", "name": "a"}, "missing field 'duration'"),
        (leaf("a", {"weibull": [1, 2]}), "unknown distribution"),
        (leaf("a", {"triangular": [1, 2]}), "takes 3 parameters"),
        ({**leaf("a", {"constant": [1]}), "colour": "red"}, "unknown fields"),
        ({"format_version": 2, "root": leaf("a", {"constant": [1]})}, "format_version"),
        ({"name": "x"}, "missing"),
    ],
)
def test_schema_errors(doc, fragment):
    with pytest.raises(SchemaError, match=fragment):
        parse_network(json.dumps(doc))


# -- serialization -----------------------------------------------------------------


def test_constant_serializes_to_minimal_document():
    text = serialize_network(Trivial("a", Constant(5))).decode()
    assert json.loads(text) == {
        "format_version": 1,
        "name": "network",
        "root": {"kind": "trivial", "name": "a", "duration": {"constant": [5]}},
    }
    assert text.endswith("}\n")


@pytest.mark.parametrize("name", ["development-process", "paper-review"])
def test_shipped_documents_round_trip(name):
    doc = load_example(name)
    data = serialize_document(doc)
    again = parse_document(data)
    assert again == doc
    assert serialize_document(again) == data


def test_shipped_files_are_canonical():
    from importlib import resources

    for name in example_names():
        raw = (resources.files("ndsan.networks") / f"{name}.json").read_bytes()
        assert serialize_document(parse_document(raw)) == raw


def test_full_precision_probabilities_survive():
    p = 0.1 + 0.2  # 0.30000000000000004 needs 17 digits
    net = Decision(
        Trivial("d", Constant(0)),
        [(p, Trivial("x", Constant(1))), (1 - p, Trivial("y", Constant(2)))],
        Trivial("e", Constant(0)),
    )
    back = parse_network(serialize_network(net))
    assert back.branches[0][0] == p
    assert back == net


def test_format_number():
    assert format_number(2.0) == "2"
    assert format_number(0.1) == "0.1"
    assert format_number(1 / 3) == repr(1 / 3)


_leaf = st.builds(
    Trivial,
    st.sampled_from(["a", "b", "c"]),
    st.one_of(
        st.builds(Constant, st.floats(0, 50)),
        st.builds(lambda a, d1, d2: Triangular(a, a + d1, a + d1 + d2), st.floats(0, 10), st.floats(0.01, 5), st.floats(0.01, 5)),
    ),
)


def _grow(children):
    probs = st.floats(0.01, 0.99)
    return st.one_of(
        st.lists(children, min_size=1, max_size=3).map(lambda xs: series(*xs)),
        st.tuples(children, probs, children, children, children).map(
            lambda t: Decision(t[0], [(t[1], t[2]), (1 - t[1], t[3])], t[4])
        ),
        st.tuples(children, children, children, st.lists(st.floats(0, 1), max_size=3)).map(
            lambda t: Loop(t[0], t[1], t[2], t[3] + [0.0])
        ),
        st.tuples(children, children, children, children).map(
            lambda t: Acyclic(list(t), [(0, 1), (0, 2), (1, 3), (2, 3)])
        ),
    )


@settings(max_examples=100, deadline=None)
@given(st.recursive(_leaf, _grow, max_leaves=12))
def test_round_trip_property(net):
    data = serialize_network(net, name="prop")
    back = parse_network(data)
    assert back == net
    assert serialize_network(back, name="prop") == data


# -- exports -----------------------------------------------------------------------


def test_ecdf_export():
    text = export_results(ecdf([1.0, 2.0, 3.0])).decode()
    assert text == "x,F\n1,0.333333333333\n2,0.666666666667\n3,1.0\n"


def test_ecdf_export_merges_ties():
    assert export_results(ecdf([2, 2, 5, 5])) == b"x,F\n2,0.5\n5,1.0\n"


def test_samples_export_and_reload(tmp_path):
    batch = run_batch(Trivial("a", Triangular(2, 4, 5)), 50, 3)
    path = tmp_path / "samples.csv"
    export_results(batch, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "time" and len(lines) == 51
    # 12 significant digits
    assert np.allclose(read_samples(path), batch.times, rtol=1e-11, atol=0)


def test_histogram_export_uses_right_edges():
    assert export_results(histogram([0.5, 1.0, 1.5, 3.5], 1)) == (
        b"right_edge,count\n1,2\n2,1\n3,0\n4,1\n"
    )


def test_density_export_points():
    x = np.arange(1.0, 101.0)
    text = export_results(approximate_density(ecdf(x), 25)).decode().splitlines()
    assert text[0] == "t,f"
    assert [row.split(",")[0] for row in text[1:]] == ["26", "51", "76"]
    assert all(float(row.split(",")[1]) == pytest.approx(0.01) for row in text[1:])


def test_oracle_export_decimation():
    dist = analyze(Trivial("a", Triangular(2, 4, 5)), 0.01)
    full = export_results(dist).decode().splitlines()
    assert full[0] == "t,F" and len(full) == dist.size + 1
    rows = oracle_cdf_csv(dist, 100).decode().splitlines()[1:]
    assert rows[0].split(",")[0] == "0"
    assert rows[-1] == full[-1]
    assert float(rows[-1].split(",")[1]) == pytest.approx(1.0)


def test_export_to_file_object_and_determinism():
    emp = ecdf(run_batch(Trivial("a", Triangular(2, 4, 5)), 200, 9))
    buf = io.BytesIO()
    export_results(emp, buf)
    assert buf.getvalue() == export_results(emp) == export_results(ecdf(emp.sorted_times[::-1]))


def test_export_unknown_type():
    with pytest.raises(TypeError):
        export_results(object())
