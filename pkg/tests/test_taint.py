import json

from mirtaint import cfg as C
from mirtaint import icall as IC
from mirtaint import ir
from mirtaint import oracle
from mirtaint import sse as S
from mirtaint import taint as T


def run(corpus, name, icalls=True):
    prog = corpus(name)
    if icalls:
        _, mapping = IC.resolve_all(prog, C.find_address_taken(prog))
    else:
        mapping = {}
    return prog, T.run_taint(prog, resolutions=mapping)


# -- models ---------------------------------------------------------------

def test_default_model_counts():
    models = T.default_models()
    assert len(models.sources) == 9
    assert len(models.sinks) == 11
    assert len(models.summaries) == 29


def test_default_summary_groups():
    models = T.default_models()
    groups = {}
    for m in models.summaries.values():
        groups.setdefault(m.group, []).append(m.name)
    assert len(groups["String Copy"]) == 12
    assert len(groups["String Index"]) == 5
    assert len(groups["String Split"]) == 3
    assert len(groups["String to Int"]) == 6
    assert len(groups["Other functions"]) == 3


def test_strcpy_summary_flows_src_to_dst():
    strcpy = T.default_models().summaries["strcpy"]
    assert (1, 0) in strcpy.flows


def test_load_models_defaults():
    models, diags = T.load_models(None)
    assert diags == [] and len(models.summaries) == 29


def test_load_models_extends(tmp_path):
    cfg = tmp_path / "models.json"
    cfg.write_text(json.dumps({
        "sinks": [{"name": "do_cmd", "class": "exec", "checked_args": [0]}],
        "summaries": [{"name": "strcpy", "flows": [[1, 0]]}],
    }))
    models, diags = T.load_models(str(cfg))
    assert diags == []
    assert "do_cmd" in models.sinks and len(models.sinks) == 12
    assert models.summaries["strcpy"].flows == ((1, 0),)


def test_load_models_malformed_keeps_defaults(tmp_path):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{nope")
    models, diags = T.load_models(str(cfg))
    assert len(diags) == 1 and len(models.sinks) == 11


# -- seeding ----------------------------------------------------------------

def test_seed_sources_recv(corpus):
    prog = corpus("overflow_icall.ir")
    seeds = T.seed_sources(prog, T.default_models())
    (seed,) = seeds
    assert seed.tainted and seed.trigger == seed.point
    assert seed.expr == S.Reg("r1")


def test_seed_sources_getenv_return(corpus):
    prog = corpus("getenv_source.ir")
    seeds = T.seed_sources(prog, T.default_models())
    assert any(s.expr == S.Reg("r2") for s in seeds)


def test_fd_filter_skips_fixed_file(corpus):
    prog = corpus("read_fixed_fd.ir")
    assert T.seed_sources(prog, T.default_models()) == []


def test_fd_filter_keeps_unknown_fd(corpus):
    prog = corpus("read_net_fd.ir")
    assert len(T.seed_sources(prog, T.default_models())) == 1


def test_no_sources_no_seeds(corpus):
    assert T.seed_sources(corpus("moves.ir"), T.default_models()) == []


# -- propagation --------------------------------------------------------------

def test_end_to_end_single_alert(corpus):
    _, result = run(corpus, "overflow_icall.ir")
    assert len(result.alerts) == 1
    (alert,) = result.alerts
    assert alert.sink_fn == "strcpy" and alert.klass == "copy-like"
    assert alert.capacity == 32 and alert.stack_offset == 32
    assert str(alert.sink_site) == "worker:bb0:1"
    assert alert.chain[0] == "handler:bb0:2"


def test_constant_guard_suppresses(corpus):
    _, result = run(corpus, "overflow_guarded_const.ir")
    assert result.alerts == [] and result.tainted_sinks == 1


def test_symbolic_guard_suppresses(corpus):
    _, result = run(corpus, "overflow_guarded_sym.ir")
    assert result.alerts == [] and result.tainted_sinks == 1


def test_ablation_shape(corpus):
    _, with_icall = run(corpus, "overflow_icall.ir", icalls=True)
    _, without = run(corpus, "overflow_icall.ir", icalls=False)
    assert len(without.alerts) == 0 < len(with_icall.alerts)
    assert without.tainted_blocks < with_icall.tainted_blocks


def test_backward_alias_untainted_before_trigger(corpus):
    prog = corpus("overflow_icall.ir")
    models = T.default_models()
    policy = T.TaintPolicy(models)
    from mirtaint.alias import Analysis
    analysis = Analysis(prog, policy=policy)
    for seed in T.seed_sources(prog, models):
        analysis.add_seed(seed)
    analysis.run()
    reg = analysis.registry["handler"]
    # aliases recorded above the recv callsite (index < 2) are untainted
    before = [t for t in reg.values() if t.point.index < 2
              and t.point.block == "bb0"]
    assert before and all(not t.tainted for t in before)
    after = [t for t in reg.values() if t.point.index > 2]
    assert any(t.tainted for t in after)


def test_arithmetic_propagates_taint():
    prog = ir.parse_program("""
func main @0x1000 frame=0x40 {
bb0:
  r1 = sp
  r2 = 0x40
  r3 = call recv(r9, r1, r2)
  r4 = r1 + 0x1
  r5 = call system(r4)
  ret
}
""")
    result = T.run_taint(prog)
    assert len(result.alerts) == 1


def test_command_exec_alert_and_suppression(corpus):
    _, hot = run(corpus, "system_cmdi.ir", icalls=False)
    assert len(hot.alerts) == 1 and hot.alerts[0].klass == "command-exec"
    _, cold = run(corpus, "system_guarded.ir", icalls=False)
    assert cold.alerts == []


def test_memcpy_constant_bounds(corpus):
    _, bad = run(corpus, "memcpy_bound_bad.ir", icalls=False)
    (alert,) = bad.alerts
    assert alert.bound == 0x80 and alert.capacity == 0x20
    _, ok = run(corpus, "memcpy_bound_ok.ir", icalls=False)
    assert ok.alerts == []


def test_tainted_length_argument_alerts(corpus):
    _, result = run(corpus, "atoi_len.ir", icalls=False)
    assert len(result.alerts) == 1


def test_loop_copy_idiom_detected(corpus):
    _, result = run(corpus, "loop_copy.ir", icalls=False)
    (alert,) = result.alerts
    assert alert.sink_fn == "loop-copy"
    assert "loop copy" in alert.verdict


def test_unmodeled_library_warns():
    prog = ir.parse_program("""
func main @0x1000 frame=0x40 {
bb0:
  r1 = sp
  r2 = 0x40
  r3 = call recv(r9, r1, r2)
  r4 = call frobnicate(r1)
  ret
}
""")
    result = T.run_taint(prog)
    assert any("unmodeled frobnicate" in w for w in result.warnings)


def test_metrics_consistent(corpus):
    for name in ("overflow_icall.ir", "system_cmdi.ir", "summaries_tour.ir"):
        _, result = run(corpus, name)
        assert len(result.alerts) <= result.tainted_sinks
        assert result.covered_blocks >= result.tainted_blocks


def test_check_sink_overflow_confirmed_by_execution(corpus):
    """The flagged memcpy really writes past the frame top: execute the
    program and observe bytes at and beyond sp+frame_size being
    written (0x80 copied into the 0x20 bytes of headroom)."""
    prog = corpus("memcpy_bound_bad.ir")
    frame = prog.functions["main"].frame_size
    res = oracle.run(prog, entry="main", seed=5,
                     watch={(ir.Point("main", "bb0", 6), "post")})
    ((regs, mem, _),) = list(res.snapshots.values())
    top = regs["sp"] + frame
    assert any(a in mem for a in range(top, top + 0x20))
