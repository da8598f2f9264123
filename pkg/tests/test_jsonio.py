import pytest

from gridfill import jsonio
from gridfill.model import canonical_form

T1_TEXT = """
{"variables": [{"name": "v1", "domain": ["a", "b"]},
               {"name": "v2", "domain": ["a", "b"]}],
 "unary_costs": [{"var": "v1", "costs": {"a": 1, "b": 0}, "default": 0},
                 {"var": "v2", "costs": {"a": 0, "b": 3}, "default": 0}],
 "constraints": [{"scope": ["v1", "v2"], "allowed": [["a", "a"], ["b", "b"]]}]}
"""


def test_load_t1():
    p = jsonio.loads(T1_TEXT)
    assert p.size == 2
    assert p.domains[0] == ("a", "b")
    assert p.soft[1].cost("b") == 3.0
    (c,) = p.hard
    assert c.allows(("a", "a")) and not c.allows(("a", "b"))


def test_round_trip():
    p = jsonio.loads(T1_TEXT)
    again = jsonio.loads(jsonio.dumps(p))
    assert canonical_form(again) == canonical_form(p)


def test_unknown_top_level_key_rejected():
    with pytest.raises(jsonio.FormatError):
        jsonio.loads('{"variables": [], "extra": 1}')


def test_unknown_nested_key_rejected():
    with pytest.raises(jsonio.FormatError):
        jsonio.loads('{"variables": [{"name": "v", "domain": ["a"], "color": 1}]}')


def test_negative_cost_rejected():
    with pytest.raises(jsonio.FormatError):
        jsonio.loads(
            '{"variables": [{"name": "v", "domain": ["a"]}],'
            ' "unary_costs": [{"var": "v", "costs": {"a": -2}, "default": 0}]}'
        )


def test_missing_default_rejected():
    with pytest.raises(jsonio.FormatError):
        jsonio.loads(
            '{"variables": [{"name": "v", "domain": ["a"]}],'
            ' "unary_costs": [{"var": "v", "costs": {"a": 2}}]}'
        )


def test_unknown_scope_name_rejected():
    with pytest.raises(jsonio.FormatError):
        jsonio.loads(
            '{"variables": [{"name": "v", "domain": ["a"]}],'
            ' "constraints": [{"scope": ["w"], "allowed": [["a"]]}]}'
        )
