"""Input formats: parsing, validation errors, serialization round trips."""

import pytest

from semiform import errors
from semiform.frontend import (divide_props, gen_xprop, parse_design,
                               parse_esw, parse_netlist, parse_props,
                               parse_regmap, render_expr, serialize_design,
                               serialize_esw, serialize_netlist,
                               serialize_props, serialize_regmap)

from conftest import (COUNTER_TEXT, MINI_DSN, MINI_ESW, MINI_MAP, MINI_PROP,
                      build_model)


# -- netlists ----------------------------------------------------------------


def test_netlist_round_trip():
    ip = parse_netlist(COUNTER_TEXT)
    again = parse_netlist(serialize_netlist(ip))
    assert again.name == ip.name
    assert [(p.name, p.width, p.direction) for p in again.ports] == \
        [(p.name, p.width, p.direction) for p in ip.ports]
    assert [(r.name, r.width, r.init) for r in again.registers] == \
        [(r.name, r.width, r.init) for r in ip.registers]
    assert len(again.nodes) == len(ip.nodes)


def test_netlist_errors():
    cases = [
        ".module t\n.input a 1\n.gate AND o a\n.endmodule\n",  # arity
        ".module t\n.input a 1\n.gate AND o a b\n.endmodule\n",  # undeclared
        ".module t\n.input a 0\n.endmodule\n",  # zero width
        ".module t\n.input a 1\n.input a 1\n.endmodule\n",  # redeclared
        ".module t\n.input d 1\n.wire w 1\n.dff w d\n.endmodule\n",  # dff non-reg
    ]
    for text in cases:
        with pytest.raises(errors.ParseError):
            parse_netlist(text)


def test_netlist_const_and_bit_refs():
    text = (".module t\n.input a 2\n.output o 1\n.wire k 2\n"
            ".const k 10\n.gate AND o a[1] k[1]\n.endmodule\n")
    ip = parse_netlist(text)
    consts = [n for n in ip.nodes if n.kind == "CONST"]
    assert [c.value for c in consts] == [0, 1]


# -- designs -------------------------------------------------------------------


def test_design_round_trip(mini_parsed):
    design, _, _, _, _ = mini_parsed
    again = parse_design(serialize_design(design))
    assert again.name == design.name
    assert again.instances == design.instances
    assert again.connects == design.connects
    assert again.bus.reset == design.bus.reset
    assert again.bus.regmap == design.bus.regmap
    assert [(r.base, r.size) for r in again.bus.ranges] == \
        [(r.base, r.size) for r in design.bus.ranges]


def test_design_errors():
    with pytest.raises(errors.ParseError):
        parse_design(".design d\n.instance alpha a0\n.instance alpha a0\n")
    with pytest.raises(errors.ParseError):
        parse_design(".design d\n.connect a0.x b0.y\n")  # unknown instance


# -- register map --------------------------------------------------------------


def test_regmap_lookup(mini_parsed):
    _, _, regmap, _, _ = mini_parsed
    assert regmap.address_of("a0.CFG") == 0x0
    assert regmap.register_at(0x103) == "b0.GAIN"
    assert regmap.register_at(0x55) is None
    assert regmap.address_of("nope") is None
    assert regmap.registers() == ["a0.CFG", "b0.GAIN"]
    reparsed = parse_regmap(serialize_regmap(regmap))
    assert reparsed.entries == regmap.entries


def test_regmap_errors(mini_parsed):
    design, lib, _, _, _ = mini_parsed
    with pytest.raises(errors.DuplicateAddress):
        parse_regmap("0x0 a0.CFG\n0x0 b0.GAIN\n")
    with pytest.raises(errors.UnknownSignal):
        # address present but bound to a different register in the design
        parse_regmap("0x1 a0.CFG\n", design=design, library=lib)


# -- software scripts -----------------------------------------------------------


def test_esw_accesses(mini_parsed):
    _, _, _, script, _ = mini_parsed
    assert script.statements[0] == ("reset", 2)
    assert script.accesses() == [(1, "write", 0x0), (2, "write", 0x103)]
    again = parse_esw(serialize_esw(script))
    assert again.statements == script.statements


def test_esw_errors():
    for text in ["", "wait 3\n", "reset 0\n", "reset 2\nwrite 0x0\n",
                 "reset 2\npoke 0x0 1\n",
                 "reset 1\nwrite 0x100000000 0x0\n"]:
        with pytest.raises(errors.ParseError):
            parse_esw(text)


# -- properties ------------------------------------------------------------------


def test_prop_parse_and_render(mini_parsed):
    design, lib, _, _, props = mini_parsed
    names = [p.name for p in props]
    assert names == ["alpha_quiet", "beta_quiet", "cross_ok"]
    assert props[0].scope == frozenset({"a0"})
    assert props[2].scope == frozenset({"a0", "b0"})
    text = serialize_props(props)
    again = parse_props(text, design=design, library=lib)
    assert [render_expr(p.expr) for p in again] == \
        [render_expr(p.expr) for p in props]


def test_prop_precedence():
    p = parse_props("prop p : ~a.x & a.y | a.z -> a.w == 1\n")[0]
    # -> binds loosest, then |, &, ~; == tightest of the binary ops
    assert p.expr[0] == "imp"
    assert p.expr[1][0] == "or"
    assert p.expr[1][1][0] == "and"
    assert p.expr[2][0] == "eq"


def test_prop_errors(mini_parsed):
    design, lib, _, _, _ = mini_parsed
    bad = [
        "prop p : a0.CFG == 1\nprop p : a0.CFG == 2\n",  # duplicate name
        "notprop p : 1 == 1\n",
        "prop p : a0.CFG ==\n",
    ]
    for text in bad:
        with pytest.raises(errors.ParseError):
            parse_props(text, design=design, library=lib)
    with pytest.raises(errors.UnknownSignal):
        parse_props("prop p : ~a0.NOPE\n", design=design, library=lib)
    with pytest.raises(errors.WidthMismatch):
        # 4-bit register in a boolean position
        parse_props("prop p : ~a0.CFG\n", design=design, library=lib)


def test_gen_xprop(mini_parsed):
    design, lib, _, _, _ = mini_parsed
    xs = gen_xprop(design, lib)
    assert [x.name for x in xs] == ["xprop_a0_CFG", "xprop_b0_GAIN"]
    assert all(x.kind == "xprop" and x.settle == 4 for x in xs)
    assert xs[0].register == "a0.CFG" and xs[0].scope == {"a0"}
    assert gen_xprop(design, lib, settle=7)[0].settle == 7
    text = serialize_props(xs)
    assert "known(a0.CFG) after 4" in text


def test_divide_props_corpus(gateway):
    design, lib, _, _, props = gateway
    groups = divide_props(props, design, lib)
    assert set(groups) == {"can", "cpu", "ethmac", "ram",
                           "subsystem-1", "subsystem-2", "subsystem-3"}
    counts = {k: len(v) for k, v in groups.items()}
    assert counts == {"can": 2, "cpu": 1, "ethmac": 3, "ram": 1,
                      "subsystem-1": 1, "subsystem-2": 1, "subsystem-3": 1}
    # subsystem k covers the top k+1 ranked instances
    sub2 = groups["subsystem-2"][0]
    assert sub2.scope <= {"cpu0", "ram0", "can0"}
    assert len(sub2.scope) > 1


def test_divide_props_unresolvable(gateway):
    design, lib, _, _, _ = gateway
    from semiform.frontend import PropertyAst
    p = PropertyAst(name="q", kind="user", expr=("int", 1),
                    scope=frozenset())
    with pytest.raises(errors.UnresolvableScope):
        divide_props([p], design, lib)
