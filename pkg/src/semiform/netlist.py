"""Bit-level netlist IR: per-IP netlists, designs, and the flattened model.

Everything downstream (simulation, SAT encoding, register ranking) works on
the `FlatModel` produced by `elaborate`.  Nets are plain strings; inside an
IP they are `name` or `name[i]`, after elaboration `inst.name[i]`.  Multi-bit
signals are blasted to one net per bit at parse time, so gates are always
single-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CombinationalLoop,
    MultipleDrivers,
    SemiformError,
    UnknownInstance,
    UnknownModule,
    UnknownRegister,
    WidthMismatch,
)

# Gate basis.  MUX(sel, a, b) = a when sel else b.
GATE_ARITY = {"AND": 2, "OR": 2, "XOR": 2, "NOT": 1, "MUX": 3}
COMB_KINDS = ("AND", "OR", "XOR", "NOT", "MUX")

KIND_CODE = {"AND": 0, "OR": 1, "XOR": 2, "NOT": 3, "MUX": 4}

X = 2  # three-valued unknown


def bit_nets(name: str, width: int) -> tuple[str, ...]:
    """Net names for a declared signal: bare name when 1 bit wide."""
    if width == 1:
        return (name,)
    return tuple(f"{name}[{i}]" for i in range(width))


@dataclass(frozen=True)
class Port:
    name: str
    direction: str  # "in" | "out"
    width: int


@dataclass(frozen=True)
class RegisterDecl:
    name: str
    width: int
    bits: tuple[str, ...]
    init: int | None  # None means unknown at power-up
    software_visible: bool = False
    instance: str = ""

    def init_bit(self, i: int) -> int | None:
        if self.init is None:
            return None
        return (self.init >> i) & 1


@dataclass(frozen=True)
class Node:
    """One gate, constant, or flop.  `inputs` are net names.

    DFF nodes carry `init` (0/1/None) and, before desugaring, optional
    `en`/`rst` control nets with a per-bit `rstval`.
    """

    kind: str
    output: str
    inputs: tuple[str, ...] = ()
    value: int | None = None  # CONST only
    init: int | None = None  # DFF only
    en: str | None = None
    rst: str | None = None
    rstval: int | None = None


class IpNetlist:
    """A single module: ports, wires, registers, and gates."""

    def __init__(self, name, ports, wires, registers, nodes):
        self.name: str = name
        self.ports: tuple[Port, ...] = tuple(ports)
        self.wires: dict[str, int] = dict(wires)
        self.registers: tuple[RegisterDecl, ...] = tuple(registers)
        self.nodes: tuple[Node, ...] = tuple(nodes)
        self.signal_widths: dict[str, int] = {}
        for p in self.ports:
            self.signal_widths[p.name] = p.width
        for w, width in self.wires.items():
            self.signal_widths[w] = width
        for r in self.registers:
            self.signal_widths[r.name] = r.width
        self._validate()

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise UnknownInstance(f"module {self.name} has no port {name}")

    def bits(self, signal: str) -> tuple[str, ...]:
        return bit_nets(signal, self.signal_widths[signal])

    def all_nets(self):
        for sig, width in self.signal_widths.items():
            yield from bit_nets(sig, width)

    def _validate(self):
        declared = set(self.all_nets())
        drivers: dict[str, str] = {}
        for p in self.ports:
            if p.direction == "in":
                for b in bit_nets(p.name, p.width):
                    drivers[b] = "port"
        for n in self.nodes:
            if n.kind in GATE_ARITY and len(n.inputs) != GATE_ARITY[n.kind]:
                raise SemiformError(
                    f"{self.name}: {n.kind} gate on {n.output} has {len(n.inputs)} inputs")
            for i in n.inputs + tuple(x for x in (n.en, n.rst) if x):
                if i not in declared:
                    raise SemiformError(f"{self.name}: undeclared net {i}")
            if n.output not in declared:
                raise SemiformError(f"{self.name}: undeclared net {n.output}")
            if n.output in drivers:
                raise MultipleDrivers(
                    f"{self.name}: net {n.output} driven by {drivers[n.output]} and {n.kind}")
            drivers[n.output] = n.kind
        self._check_comb_cycles()

    def _check_comb_cycles(self):
        by_output = {n.output: n for n in self.nodes if n.kind in COMB_KINDS}
        state: dict[str, int] = {}
        for start in by_output:
            if state.get(start):
                continue
            stack = [(start, 0)]
            while stack:
                net, idx = stack.pop()
                node = by_output.get(net)
                if node is None or state.get(net) == 2:
                    continue
                ins = node.inputs
                if idx == 0:
                    state[net] = 1
                pushed = False
                for j in range(idx, len(ins)):
                    nxt = ins[j]
                    if state.get(nxt) == 1:
                        raise CombinationalLoop(
                            f"{self.name}: combinational cycle through {nxt}")
                    if nxt in by_output and state.get(nxt) != 2:
                        stack.append((net, j + 1))
                        stack.append((nxt, 0))
                        pushed = True
                        break
                if not pushed:
                    state[net] = 2


@dataclass(frozen=True)
class BusRange:
    base: int
    size: int
    addr_ref: str  # "inst.port" or bare top port
    wdata_ref: str
    we_ref: str

    def contains(self, addr: int) -> bool:
        return self.base <= addr < self.base + self.size


@dataclass
class BusSpec:
    reset: str | None = None
    ranges: list[BusRange] = field(default_factory=list)
    regmap: dict[int, str] = field(default_factory=dict)  # addr -> "inst.REG"

    def range_for(self, addr: int) -> BusRange | None:
        for r in self.ranges:
            if r.contains(addr):
                return r
        return None


@dataclass
class Design:
    name: str
    instances: list[tuple[str, str]]  # (instance, module), declaration order
    connects: list[tuple[str, str, str, str]]  # instA, portA, instB, portB
    tops: list[tuple[str, str, str]]  # top port, instance, port
    bus: BusSpec = field(default_factory=BusSpec)

    def module_of(self, inst: str) -> str:
        for i, m in self.instances:
            if i == inst:
                return m
        raise UnknownInstance(f"design {self.name} has no instance {inst}")

    def instance_names(self) -> list[str]:
        return [i for i, _ in self.instances]


def list_unique_ips(design: Design) -> list[str]:
    """Module names appearing in the design, deduplicated, sorted."""
    return sorted({m for _, m in design.instances})


def connection_scores(design: Design,
                      library: dict[str, IpNetlist]) -> dict[str, int]:
    """Total width of each instance's ports bound to inter-instance nets.

    Each port counts once no matter how many connections touch it.
    """
    bound: dict[str, set[str]] = {i: set() for i in design.instance_names()}
    for ia, pa, ib, pb in design.connects:
        bound[ia].add(pa)
        bound[ib].add(pb)
    scores = {}
    for inst, mod in design.instances:
        ip = library[mod]
        scores[inst] = sum(ip.port(p).width for p in bound[inst])
    return scores


def rank_ips_by_connection(design: Design, library: dict[str, IpNetlist]) -> list[str]:
    """Instances ordered by connected-port width; ties break on name."""
    scores = connection_scores(design, library)
    return sorted(scores, key=lambda i: (-scores[i], i))


class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        p = self.parent.setdefault(x, x)
        while p != x:
            self.parent[x] = p = self.parent.setdefault(p, p)
            x, p = p, self.parent[p]
        return x

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def groups(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass
class FlatRegister:
    name: str  # "inst.REG"
    width: int
    bits: tuple[str, ...]  # canonical net names
    init: int | None
    software_visible: bool
    instance: str

    def init_bit(self, i: int) -> int | None:
        if self.init is None:
            return None
        return (self.init >> i) & 1


@dataclass
class CompiledModel:
    """Arrays for the evaluation kernels, gates in topological order."""

    net_names: tuple[str, ...]
    index: dict[str, int]
    kinds: np.ndarray  # int8, per gate
    i0: np.ndarray
    i1: np.ndarray
    i2: np.ndarray
    outs: np.ndarray
    level_ptr: np.ndarray  # int32 prefix: gates [lp[k], lp[k+1]) share a level
    dff_q: np.ndarray
    dff_d: np.ndarray
    dff_init: np.ndarray  # uint8, 2 = unknown
    const_idx: np.ndarray
    const_val: np.ndarray
    n_nets: int


class FlatModel:
    """Flattened design: one namespace of nets, pure DFFs, gate basis only."""

    def __init__(self, name, instances, module_of, nodes, node_instance,
                 registers, inputs, outputs, signals, aliases,
                 blackboxed=(), free_inputs=()):
        self.name: str = name
        self.instances: tuple[str, ...] = tuple(instances)
        self.module_of: dict[str, str] = dict(module_of)
        self.nodes: tuple[Node, ...] = tuple(nodes)
        self.node_instance: tuple[str, ...] = tuple(node_instance)
        self.registers: dict[str, FlatRegister] = dict(registers)
        self.inputs: tuple[str, ...] = tuple(inputs)
        self.outputs: tuple[str, ...] = tuple(outputs)
        self.signals: dict[str, tuple[str, ...]] = dict(signals)
        self.aliases: dict[str, str] = dict(aliases)
        self.blackboxed: frozenset[str] = frozenset(blackboxed)
        self.free_inputs: frozenset[str] = frozenset(free_inputs)
        nets: set[str] = set()
        for n in self.nodes:
            nets.add(n.output)
            nets.update(n.inputs)
        nets.update(self.inputs)
        nets.update(self.outputs)
        self.nets: tuple[str, ...] = tuple(sorted(nets))
        self._driver: dict[str, int] = {}
        for i, n in enumerate(self.nodes):
            if n.output in self._driver:
                raise MultipleDrivers(f"net {n.output} has multiple drivers")
            self._driver[n.output] = i
        self._compiled: CompiledModel | None = None
        self._consumers: dict[str, list[int]] | None = None

    # -- naming ------------------------------------------------------------

    def resolve(self, net: str) -> str:
        return self.aliases.get(net, net)

    def signal_bits(self, signal: str) -> tuple[str, ...]:
        if signal in self.signals:
            return self.signals[signal]
        raise UnknownRegister(f"model {self.name} has no signal {signal}")

    def driver_of(self, net: str) -> Node | None:
        i = self._driver.get(net)
        return None if i is None else self.nodes[i]

    @property
    def state_bits(self) -> int:
        return sum(r.width for r in self.registers.values())

    def consumers(self) -> dict[str, list[int]]:
        if self._consumers is None:
            cons: dict[str, list[int]] = {}
            for i, n in enumerate(self.nodes):
                for inp in n.inputs:
                    cons.setdefault(inp, []).append(i)
            self._consumers = cons
        return self._consumers

    # -- compilation for the kernels ----------------------------------------

    def compile(self) -> CompiledModel:
        if self._compiled is not None:
            return self._compiled
        names = self.nets
        index = {n: i for i, n in enumerate(names)}
        gates = [n for n in self.nodes if n.kind in COMB_KINDS]
        level: dict[str, int] = {}

        # Iterative levelization; recursion depth can exceed limits on deep chains.
        for g in gates:
            stack = [g.output]
            while stack:
                net = stack[-1]
                if net in level:
                    stack.pop()
                    continue
                drv = self.driver_of(net)
                if drv is None or drv.kind not in COMB_KINDS:
                    level[net] = 0
                    stack.pop()
                    continue
                missing = [i for i in drv.inputs if i not in level]
                if missing:
                    stack.extend(missing)
                else:
                    level[net] = 1 + max(level[i] for i in drv.inputs)
                    stack.pop()
        order = sorted(gates, key=lambda n: (level[n.output], index[n.output]))

        kinds = np.array([KIND_CODE[n.kind] for n in order], dtype=np.int8)
        def pick(n: Node, j: int) -> int:
            return index[n.inputs[j]] if j < len(n.inputs) else 0
        i0 = np.array([pick(n, 0) for n in order], dtype=np.int32)
        i1 = np.array([pick(n, 1) for n in order], dtype=np.int32)
        i2 = np.array([pick(n, 2) for n in order], dtype=np.int32)
        outs = np.array([index[n.output] for n in order], dtype=np.int32)
        lvls = [level[n.output] for n in order]
        max_lv = max(lvls, default=0)
        lp = [0]
        pos = 0
        for lv in range(1, max_lv + 1):
            while pos < len(lvls) and lvls[pos] < lv:
                pos += 1
            lp.append(pos)
        lp.append(len(order))
        level_ptr = np.array(lp, dtype=np.int32)

        dffs = [n for n in self.nodes if n.kind == "DFF"]
        dff_q = np.array([index[n.output] for n in dffs], dtype=np.int32)
        dff_d = np.array([index[n.inputs[0]] for n in dffs], dtype=np.int32)
        dff_init = np.array(
            [X if n.init is None else n.init for n in dffs], dtype=np.uint8)
        consts = [n for n in self.nodes if n.kind == "CONST"]
        const_idx = np.array([index[n.output] for n in consts], dtype=np.int32)
        const_val = np.array([n.value for n in consts], dtype=np.uint8)

        self._compiled = CompiledModel(
            net_names=names, index=index, kinds=kinds, i0=i0, i1=i1, i2=i2,
            outs=outs, level_ptr=level_ptr, dff_q=dff_q, dff_d=dff_d,
            dff_init=dff_init, const_idx=const_idx, const_val=const_val,
            n_nets=len(names))
        return self._compiled


def _desugar_dff(node: Node, inst: str, fresh: list[Node]) -> Node:
    """Rewrite enable/reset controls into MUX gates feeding a plain DFF."""
    d = node.inputs[0]
    q = node.output
    if node.en is not None:
        en_net = f"{q}$en"
        fresh.append(Node("MUX", en_net, (node.en, d, q)))
        d = en_net
    if node.rst is not None:
        cv = node.rstval or 0
        cnet = f"{q}$rv"
        fresh.append(Node("CONST", cnet, value=cv))
        rnet = f"{q}$rst"
        fresh.append(Node("MUX", rnet, (node.rst, cnet, d)))
        d = rnet
    return Node("DFF", q, (d,), init=node.init)


def elaborate(design: Design, library: dict[str, IpNetlist],
              keep: set[str] | None = None) -> FlatModel:
    """Flatten `design` against `library`.

    `keep` restricts the model to a subset of instances; connections to
    dropped instances turn inputs into unconstrained model inputs and
    outputs into observable model outputs.
    """
    insts = [(i, m) for i, m in design.instances if keep is None or i in keep]
    if keep is not None:
        missing = keep - {i for i, _ in insts}
        if missing:
            raise UnknownInstance(f"unknown instances {sorted(missing)}")
    inst_names = [i for i, _ in insts]
    present = set(inst_names)
    for i, m in insts:
        if m not in library:
            raise UnknownModule(f"instance {i} references unknown module {m}")

    uf = _UnionFind()
    ext_alias: list[tuple[str, str, str, str]] = []  # absent inst, port <-> kept inst, port

    def port_bits(inst: str, port: str) -> tuple[str, ...]:
        ip = library[design.module_of(inst)]
        p = ip.port(port)
        return tuple(f"{inst}.{b}" for b in bit_nets(p.name, p.width))

    for ia, pa, ib, pb in design.connects:
        in_a, in_b = ia in present, ib in present
        if not in_a and not in_b:
            continue
        wa = library[design.module_of(ia)].port(pa).width
        wb = library[design.module_of(ib)].port(pb).width
        if wa != wb:
            raise WidthMismatch(
                f"connect {ia}.{pa}({wa}) to {ib}.{pb}({wb})")
        if in_a and in_b:
            for x, y in zip(port_bits(ia, pa), port_bits(ib, pb)):
                uf.union(x, y)
        elif in_a:
            ext_alias.append((ib, pb, ia, pa))
        else:
            ext_alias.append((ia, pa, ib, pb))

    top_ports: dict[str, list[tuple[str, str]]] = {}
    for tp, inst, port in design.tops:
        if inst not in present:
            continue
        top_ports.setdefault(tp, []).append((inst, port))
    top_width: dict[str, int] = {}
    for tp, binds in top_ports.items():
        widths = {library[design.module_of(i)].port(p).width for i, p in binds}
        if len(widths) != 1:
            raise WidthMismatch(f"top port {tp} binds differing widths {sorted(widths)}")
        w = widths.pop()
        top_width[tp] = w
        for i, p in binds:
            for x, y in zip(bit_nets(tp, w), port_bits(i, p)):
                uf.union(x, y)

    # Identify internally driven bits to pick canonical names.
    driven: set[str] = set()
    for inst, mod in insts:
        ip = library[mod]
        for n in ip.nodes:
            driven.add(f"{inst}.{n.output}")
    top_is_input = {
        tp: all(library[design.module_of(i)].port(p).direction == "in"
                for i, p in binds)
        for tp, binds in top_ports.items()
    }
    top_bits_all: set[str] = set()
    for tp, w in top_width.items():
        top_bits_all.update(bit_nets(tp, w))

    def canonical_of(group: list[str]) -> str:
        drv = sorted(b for b in group if b in driven)
        if len(drv) > 1:
            raise MultipleDrivers(f"net group {sorted(group)} has drivers {drv}")
        if drv:
            return drv[0]
        tops = sorted(b for b in group if b in top_bits_all)
        if tops:
            return tops[0]
        return min(group)

    canon: dict[str, str] = {}
    for root, group in uf.groups().items():
        c = canonical_of(group)
        for g in group:
            canon[g] = c

    def cn(net: str) -> str:
        return canon.get(net, net)

    nodes: list[Node] = []
    node_instance: list[str] = []
    registers: dict[str, FlatRegister] = {}
    signals: dict[str, tuple[str, ...]] = {}
    sw_map = set(design.bus.regmap.values())

    for inst, mod in insts:
        ip = library[mod]
        for sig, width in ip.signal_widths.items():
            signals[f"{inst}.{sig}"] = tuple(
                cn(f"{inst}.{b}") for b in bit_nets(sig, width))
        fresh: list[Node] = []
        for n in ip.nodes:
            ren = Node(
                n.kind,
                cn(f"{inst}.{n.output}"),
                tuple(cn(f"{inst}.{i}") for i in n.inputs),
                value=n.value, init=n.init,
                en=cn(f"{inst}.{n.en}") if n.en else None,
                rst=cn(f"{inst}.{n.rst}") if n.rst else None,
                rstval=n.rstval)
            if ren.kind == "DFF":
                ren = _desugar_dff(ren, inst, fresh)
            nodes.append(ren)
            node_instance.append(inst)
        for f in fresh:
            nodes.append(f)
            node_instance.append(inst)
        for r in ip.registers:
            fname = f"{inst}.{r.name}"
            registers[fname] = FlatRegister(
                name=fname, width=r.width,
                bits=tuple(cn(f"{inst}.{b}") for b in r.bits),
                init=r.init,
                software_visible=fname in sw_map,
                instance=inst)

    aliases = {k: v for k, v in canon.items() if k != v}
    for absent_i, absent_p, kept_i, kept_p in ext_alias:
        ip_a = library[design.module_of(absent_i)]
        pa = ip_a.port(absent_p)
        for x, y in zip(bit_nets(f"{absent_i}.{absent_p}", pa.width),
                        port_bits(kept_i, kept_p)):
            aliases[x] = cn(y)

    inputs: set[str] = set()
    outputs: list[str] = []
    for tp, w in top_width.items():
        bits = tuple(cn(b) for b in bit_nets(tp, w))
        signals[tp] = bits
        if top_is_input[tp]:
            inputs.update(bits)
        else:
            outputs.extend(bits)

    # Undriven input-port bits are free model inputs; output-port bits not
    # consumed by a present instance or top binding are observable.
    driven_canon = {n.output for n in nodes}
    for inst, mod in insts:
        ip = library[mod]
        for p in ip.ports:
            if p.direction != "in":
                continue
            for b in bit_nets(p.name, p.width):
                c = cn(f"{inst}.{b}")
                if c not in driven_canon:
                    inputs.add(c)
    bound_outputs: set[str] = set()
    for ia, pa, ib, pb in design.connects:
        if ia in present and ib in present:
            bound_outputs.update(port_bits(ia, pa))
            bound_outputs.update(port_bits(ib, pb))
    for tp, binds in top_ports.items():
        for i, p in binds:
            bound_outputs.update(port_bits(i, p))
    for inst, mod in insts:
        ip = library[mod]
        for p in ip.ports:
            if p.direction != "out":
                continue
            for b in port_bits(inst, p.name):
                if b not in bound_outputs:
                    outputs.append(cn(b))

    model = FlatModel(
        name=design.name, instances=inst_names,
        module_of={i: m for i, m in insts},
        nodes=nodes, node_instance=node_instance,
        registers=registers, inputs=sorted(inputs),
        outputs=sorted(set(outputs)), signals=signals, aliases=aliases)
    _check_flat_cycles(model)
    return model


def _check_flat_cycles(model: FlatModel):
    comb = {n.output: n for n in model.nodes if n.kind in COMB_KINDS}
    state: dict[str, int] = {}
    for start in comb:
        if state.get(start) == 2:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        while stack:
            net, idx = stack.pop()
            node = comb.get(net)
            if node is None or state.get(net) == 2:
                continue
            if idx == 0:
                state[net] = 1
            advanced = False
            for j in range(idx, len(node.inputs)):
                nxt = node.inputs[j]
                if nxt in comb:
                    if state.get(nxt) == 1:
                        raise CombinationalLoop(f"combinational cycle through {nxt}")
                    if state.get(nxt) != 2:
                        stack.append((net, j + 1))
                        stack.append((nxt, 0))
                        advanced = True
                        break
            if not advanced:
                state[net] = 2


def blackbox(model: FlatModel, instance: str) -> FlatModel:
    """Remove an instance's internals; its driven nets become free inputs."""
    if instance not in model.instances:
        raise UnknownInstance(f"model {model.name} has no instance {instance}")
    keep_nodes = []
    keep_inst = []
    dropped_outputs: set[str] = set()
    for n, src in zip(model.nodes, model.node_instance):
        if src == instance:
            dropped_outputs.add(n.output)
        else:
            keep_nodes.append(n)
            keep_inst.append(src)
    still_read: set[str] = set()
    for n in keep_nodes:
        still_read.update(n.inputs)
    observable = set(model.outputs)
    freed = sorted(b for b in dropped_outputs
                   if b in still_read or b in observable)
    registers = {k: v for k, v in model.registers.items()
                 if v.instance != instance}
    inputs = sorted(set(model.inputs) | set(freed))
    free_inputs = set(model.free_inputs) | set(freed)
    return FlatModel(
        name=model.name, instances=model.instances,
        module_of=model.module_of, nodes=keep_nodes,
        node_instance=keep_inst, registers=registers,
        inputs=inputs, outputs=model.outputs, signals=model.signals,
        aliases=model.aliases,
        blackboxed=model.blackboxed | {instance},
        free_inputs=free_inputs)


@dataclass(frozen=True)
class FanoutCone:
    """Forward cone of a register: reached elements plus output path count."""

    register: str
    elements: tuple[int, ...]  # node indices in model.nodes
    paths: int
    edges: tuple[tuple[int, int], ...] = ()

    @property
    def element_count(self) -> int:
        return len(self.elements)


def fanout_cone(model: FlatModel, register: str) -> FanoutCone:
    """Everything reachable from a register's outputs.

    Elements are counted once each; traversal continues through other
    registers' flops.  Paths run through combinational logic only and end
    at a primary output or at another register's data input.
    """
    reg = model.registers.get(register)
    if reg is None:
        raise UnknownRegister(f"no register {register} in {model.name}")
    own_bits = set(reg.bits)
    cons = model.consumers()
    outputs = set(model.outputs)

    own_dffs = set()
    for i, n in enumerate(model.nodes):
        if n.kind == "DFF" and n.output in own_bits:
            own_dffs.add(i)

    # element reach: cross every flop, count nodes once
    seen_nodes: set[int] = set()
    seen_nets: set[str] = set()
    frontier = list(reg.bits)
    edges: list[tuple[int, int]] = []
    while frontier:
        net = frontier.pop()
        if net in seen_nets:
            continue
        seen_nets.add(net)
        for ci in cons.get(net, ()):
            if ci in own_dffs:
                continue
            seen_nodes.add(ci)
            frontier.append(model.nodes[ci].output)
    for i in sorted(seen_nodes):
        node = model.nodes[i]
        if node.kind == "DFF":
            continue
        for ci in cons.get(node.output, ()):
            if ci in seen_nodes:
                edges.append((i, ci))

    # path count: combinational DP, per connection edge
    bit_owner: dict[str, str] = {}
    for rname, r in model.registers.items():
        for b in r.bits:
            bit_owner[b] = rname
    dff_reg_of: dict[int, str] = {}
    for i, n in enumerate(model.nodes):
        if n.kind == "DFF" and n.output in bit_owner:
            dff_reg_of[i] = bit_owner[n.output]

    memo: dict[str, int] = {}

    def paths_from(net: str) -> int:
        if net in memo:
            return memo[net]
        memo[net] = 0  # cycle guard; comb graph is acyclic anyway
        total = 1 if net in outputs else 0
        for ci in cons.get(net, ()):
            node = model.nodes[ci]
            if node.kind == "DFF":
                if dff_reg_of.get(ci) != register:
                    total += 1
            else:
                total += paths_from(node.output)
        memo[net] = total
        return total

    # DFF nodes reached across boundaries do not restart path counting.
    total_paths = sum(paths_from(b) for b in reg.bits)
    return FanoutCone(register=register, elements=tuple(sorted(seen_nodes)),
                      paths=total_paths, edges=tuple(edges))
