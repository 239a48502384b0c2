"""Command line entry point.

Subcommands:
  run        full five-phase flow over a design
  phase      same inputs, restricted phase set (e.g. "2,4" = formal only)
  sra-rank   influence ranking of one IP's mapped registers
  bmc        standalone bounded check of a single IP
  sim        execute a register script against the design
  gen-xprop  emit one known-value obligation per register
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bmc as bmc_mod
from . import flow, sim, sra
from .errors import SemiformError
from .frontend import (gen_xprop, parse_design, parse_esw, parse_netlist,
                       parse_props, parse_regmap, serialize_props)
from .netlist import Design, IpNetlist, elaborate

EXIT_INPUT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _load_library(netlist_dir: str) -> dict[str, IpNetlist]:
    lib: dict[str, IpNetlist] = {}
    if not os.path.isdir(netlist_dir):
        raise SemiformError(f"netlist directory {netlist_dir} not found")
    for name in sorted(os.listdir(netlist_dir)):
        if name.endswith(".net"):
            path = os.path.join(netlist_dir, name)
            with open(path) as fh:
                ip = parse_netlist(fh.read(), path=path)
            lib[ip.name] = ip
    if not lib:
        raise SemiformError(f"no .net files in {netlist_dir}")
    return lib


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _design_inputs(args):
    netlist_dir = args.netlist_dir or os.path.dirname(
        os.path.abspath(args.design))
    library = _load_library(netlist_dir)
    design = parse_design(_read(args.design), path=args.design)
    regmap_path = args.regmap
    if regmap_path is None:
        regmap_path = os.path.splitext(args.design)[0] + ".map"
    if os.path.exists(regmap_path):
        regmap = parse_regmap(_read(regmap_path), regmap_path, design,
                              library)
    else:
        regmap = parse_regmap("", path="<empty>")
    return design, library, regmap


def _flow_config(args, phases=None) -> flow.FlowConfig:
    return flow.FlowConfig(
        ip_time_limit=args.ip_limit,
        subsystem_time_limit=args.sub_limit,
        blackbox_failing_ips=args.blackbox_failing,
        bound=args.bound,
        seed=args.seed,
        phases=tuple(phases) if phases else (1, 2, 3, 4, 5),
        jobs=args.jobs,
        dump_cnf=args.dump_cnf,
        dump_trace=args.dump_trace,
    )


def _add_flow_args(p: argparse.ArgumentParser):
    p.add_argument("--design", required=True)
    p.add_argument("--netlist-dir")
    p.add_argument("--regmap")
    p.add_argument("--esw", required=True)
    p.add_argument("--props", required=True)
    p.add_argument("--ip-limit", type=float, default=3600.0)
    p.add_argument("--sub-limit", type=float, default=5400.0)
    p.add_argument("--bound", type=int, default=20)
    p.add_argument("--blackbox-failing", default=True,
                   action=argparse.BooleanOptionalAction)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--dump-cnf")
    p.add_argument("--dump-trace")


def _run_flow(args, phases=None) -> int:
    design, library, regmap = _design_inputs(args)
    script = parse_esw(_read(args.esw), path=args.esw)
    props = parse_props(_read(args.props), args.props, design, library)
    config = _flow_config(args, phases)
    report = flow.run_flow(design, library, regmap, script, props, config)
    text = report.to_json() if args.format == "json" else report.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return flow.exit_code(report)


def _cmd_run(args) -> int:
    return _run_flow(args)


def _cmd_phase(args) -> int:
    try:
        phases = sorted({int(t) for t in args.phases.split(",") if t})
    except ValueError:
        raise SemiformError(f"bad phase list {args.phases!r}")
    if not phases:
        raise SemiformError("empty phase list")
    return _run_flow(args, phases=phases)


def _solo_design(module: str, instance: str) -> Design:
    text = f".design solo_{instance}\n.instance {module} {instance}\n"
    return parse_design(text, path="<solo>")


def _cmd_sra_rank(args) -> int:
    with open(args.ip) as fh:
        ip = parse_netlist(fh.read(), path=args.ip)
    regmap = parse_regmap(_read(args.regmap), args.regmap)
    regnames = {r.name for r in ip.registers}
    by_inst: dict[str, list[str]] = {}
    for full in regmap.registers():
        inst, _, reg = full.partition(".")
        if reg in regnames:
            by_inst.setdefault(inst, []).append(full)
    if not by_inst:
        raise SemiformError(
            f"regmap has no registers matching module {ip.name}")
    # the instance with the most matching entries is the one meant
    inst = sorted(by_inst, key=lambda i: (-len(by_inst[i]), i))[0]
    model = elaborate(_solo_design(ip.name, inst), {ip.name: ip})
    ranked = sra.do_sra(model, by_inst[inst], w_paths=args.w_paths,
                        w_elements=args.w_elements)
    print(f"{'register':<28} {'paths':>7} {'elements':>9} {'score':>9}")
    for s in ranked.scores:
        print(f"{s.register:<28} {s.paths:>7} {s.elements:>9} {s.score:>9}")
    return 0


def _cmd_bmc(args) -> int:
    with open(args.ip) as fh:
        ip = parse_netlist(fh.read(), path=args.ip)
    instance = args.instance or f"{ip.name}0"
    design = _solo_design(ip.name, instance)
    library = {ip.name: ip}
    props = []
    if args.props:
        props += parse_props(_read(args.props), args.props, design, library)
    if args.xprop:
        props += gen_xprop(design, library, settle=args.settle)
    if not props:
        raise SemiformError("nothing to check: give --props and/or --xprop")
    model = elaborate(design, library)
    constraints = list(bmc_mod.create_stopats(args.stopat))
    assumes = {}
    for item in args.assume:
        reg, _, val = item.partition("=")
        if not val:
            raise SemiformError(f"bad --assume {item!r}, want REG=VALUE")
        assumes[reg] = int(val, 0)
    constraints += bmc_mod.create_assumes(assumes, constraints)
    constraints += [bmc_mod.Blackbox(i) for i in args.blackbox]
    run = bmc_mod.check(model, props, constraints=constraints, k=args.bound,
                        budget=args.budget, dump_cnf=args.dump_cnf)
    for name in sorted(run.outcomes):
        o = run.outcomes[name]
        extra = ""
        if o.status == "FAIL":
            extra = f" at frame {o.frame}"
        elif o.status == "UNDETERMINED":
            extra = f" ({o.reason}, bound reached {o.bound})"
        print(f"{o.status:<12} {name}{extra}")
        if o.status == "FAIL" and args.dump_trace:
            path = f"{args.dump_trace}.{name}.trace"
            with open(path, "w") as fh:
                fh.write(bmc_mod.format_trace(o.trace))
    print(f"result: {run.status} (k={run.k}, {run.n_vars} vars, "
          f"{run.n_clauses} clauses, {run.n_conflicts} conflicts)")
    if run.status == "FAIL":
        return 1
    return 0 if run.status == "PASS" else 2


def _cmd_sim(args) -> int:
    design, library, regmap = _design_inputs(args)
    script = parse_esw(_read(args.esw), path=args.esw)
    model = elaborate(design, library)
    s = sim.Simulator(model, design, script, trace_path=args.trace)
    try:
        while s.script_pc < len(script.statements):
            s.run_statement()
    finally:
        s.close()
    for w in s.warnings:
        print(f"warning: {w.kind}: {w.message}")
    print(f"ran {s.cycle} cycles")
    for reg in args.watch or regmap.registers():
        v = s.register_value(reg)
        print(f"{reg} = {'x' if v is None else hex(v)}")
    return 0


def _cmd_gen_xprop(args) -> int:
    design, library, _ = _design_inputs(args)
    props = gen_xprop(design, library, settle=args.settle)
    text = serialize_props(props)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="semiform",
                 description="semiformal hardware property checker")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full verification flow")
    _add_flow_args(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("phase", help="run a subset of flow phases")
    p.add_argument("phases", help="comma list, e.g. 2,4")
    _add_flow_args(p)
    p.set_defaults(fn=_cmd_phase)

    p = sub.add_parser("sra-rank", help="rank one IP's mapped registers")
    p.add_argument("--ip", required=True)
    p.add_argument("--regmap", required=True)
    p.add_argument("--w-paths", type=int, default=100)
    p.add_argument("--w-elements", type=int, default=1)
    p.set_defaults(fn=_cmd_sra_rank)

    p = sub.add_parser("bmc", help="bounded check of a single IP")
    p.add_argument("--ip", required=True)
    p.add_argument("--instance")
    p.add_argument("--props")
    p.add_argument("--xprop", action="store_true")
    p.add_argument("--settle", type=int, default=4)
    p.add_argument("--bound", type=int, default=20)
    p.add_argument("--budget", type=float)
    p.add_argument("--stopat", action="append", default=[])
    p.add_argument("--assume", action="append", default=[],
                   metavar="REG=VALUE")
    p.add_argument("--blackbox", action="append", default=[])
    p.add_argument("--dump-cnf")
    p.add_argument("--dump-trace")
    p.set_defaults(fn=_cmd_bmc)

    p = sub.add_parser("sim", help="run a register script")
    p.add_argument("--design", required=True)
    p.add_argument("--netlist-dir")
    p.add_argument("--regmap")
    p.add_argument("--esw", required=True)
    p.add_argument("--trace")
    p.add_argument("--watch", action="append")
    p.set_defaults(fn=_cmd_sim)

    p = sub.add_parser("gen-xprop", help="emit per-register obligations")
    p.add_argument("--design", required=True)
    p.add_argument("--netlist-dir")
    p.add_argument("--regmap")
    p.add_argument("--settle", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_gen_xprop)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        return args.fn(args)
    except (SemiformError, OSError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
