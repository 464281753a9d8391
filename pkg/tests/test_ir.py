import pytest

from mirtaint import ir


def parse(text):
    return ir.parse_program(text)


def test_minimal_function():
    prog = parse("func f @0x1000 frame=0 {\nbb0:\n  r1 = r2\n  ret r1\n}\n")
    assert set(prog.functions) == {"f"}
    f = prog.functions["f"]
    assert f.entry_address == 0x1000 and f.frame_size == 0
    (block,) = f.blocks
    assert block.label == "bb0"
    assert [type(s.form).__name__ for s in block.stmts] == ["Move", "Ret"]
    assert block.stmts[0].point == ir.Point("f", "bb0", 0)


def test_all_statement_forms():
    prog = parse("""
func f @0x1000 frame=0x10 {
  buf b @0x0 size 0x8
bb0:
  r1 = 0x2a
  r2 = r1 + 0x4
  r3 = ~r1
  r4 = ite r1, r2, 0x0
  r5 = load r2
  r6 = load r2 + 0x8
  store r2 = r5
  store r2 + 0x4 = 0x1
  r7 = call g(r1, 0x2)
  call g(r1)
  r8 = icall r7(r1)
  icall r7()
  branch r1, bb1, bb2
bb1:
  jump bb2
bb2:
  ret r1
}
func g @0x2000 frame=0 {
bb0:
  ret
}
""")
    forms = [type(s.form).__name__ for s in prog.functions["f"].statements()]
    assert forms == ["Move", "BinOp", "UnOp", "Ite", "Load", "Load", "Store",
                     "Store", "Call", "Call", "ICall", "ICall", "Branch",
                     "Jump", "Ret"]
    assert prog.functions["f"].stack_buffers == (ir.StackBuffer("b", 0, 8),)


def test_data_section_example():
    prog = parse("""
data @0x92C44 { word 0x5100, word 0x2000, word 0x5200, word 0x2400 }
func f @0x1000 frame=0 {
bb0:
  ret
}
""")
    assert prog.data_section[0x92C44] == (0x5100, 0x2000, 0x5200, 0x2400)
    assert prog.data_word(0x92C44 + 8) == 0x5200
    assert prog.data_object(0x92C44 + 5) == (0x92C44, (0x5100, 0x2000, 0x5200, 0x2400))


def test_strings_section():
    prog = parse("""
strings { @0x9000 "GET"  @0x9010 "POST" }
func f @0x1000 frame=0 {
bb0:
  ret
}
""")
    assert prog.string_table == {0x9000: "GET", 0x9010: "POST"}


def test_syntax_error_reports_line():
    with pytest.raises(ir.ParseError) as exc:
        parse("func f @0x1000 frame=0 {\nbb0:\n  r1 <- r2\n  ret\n}\n")
    assert any(d.line == 3 for d in exc.value.diagnostics)


def test_duplicate_label_rejected():
    with pytest.raises(ir.ParseError) as exc:
        parse("func f @0x1000 frame=0 {\nbb0:\n  ret\nbb0:\n  ret\n}\n")
    assert any("duplicate label" in d.message for d in exc.value.diagnostics)


def test_validate_clean_program():
    prog = parse("func f @0x1000 frame=0 {\nbb0:\n  ret\n}\n")
    assert ir.validate(prog) == []


def test_validate_dangling_branch_target():
    prog = parse("func f @0x1000 frame=0 {\nbb0:\n  branch r1, bb0, nowhere\n}\n")
    diags = ir.validate(prog)
    assert any("nowhere" in d.message for d in diags)


def test_validate_buffer_exceeds_frame():
    prog = parse("""
func f @0x1000 frame=0x10 {
  buf big @0x8 size 0x10
bb0:
  ret
}
""")
    diags = ir.validate(prog)
    assert any("exceeds frame size" in d.message for d in diags)


def test_validate_duplicate_entry_address():
    prog = parse("""
func f @0x1000 frame=0 {
bb0:
  ret
}
func g @0x1000 frame=0 {
bb0:
  ret
}
""")
    assert any("share entry address" in d.message for d in ir.validate(prog))


def test_validate_entry_overlapping_data():
    prog = parse("""
data @0x1000 { word 0x1, word 0x2 }
func f @0x1004 frame=0 {
bb0:
  ret
}
""")
    assert any("overlaps data" in d.message for d in ir.validate(prog))


def test_validate_missing_terminator():
    prog = parse("func f @0x1000 frame=0 {\nbb0:\n  r1 = r2\n}\n")
    assert any("does not end" in d.message for d in ir.validate(prog))


def test_validate_oversized_immediate():
    prog = parse("func f @0x1000 frame=0 {\nbb0:\n  r1 = 0x100000000\n  ret\n}\n")
    assert any("word width" in d.message for d in ir.validate(prog))


def test_statement_points_are_unique_and_stable(corpus):
    prog = corpus("listing1.ir")
    points = [s.point for f in prog.functions.values() for s in f.statements()]
    assert len(points) == len(set(points))


def test_round_trip(corpus):
    for name in ("listing1.ir", "overflow_icall.ir", "diamond.ir",
                 "loop_copy.ir", "wordsize8.ir"):
        prog = corpus(name)
        again = ir.parse_program(ir.pretty_program(prog))
        assert again == prog
