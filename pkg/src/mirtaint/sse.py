"""Structured symbolic expressions: the unit of alias identity.

An expression is a tree over registers, 64-bit constants, binary/unary
arithmetic, and abstract memory nodes ``load(addr)`` / ``store(addr)``.
A ``store`` node names the value written by some store statement; a
``load`` node names the value read from a cell.  Two expressions denote
the same runtime value exactly when their canonical forms are
structurally equal, which is what the whole analysis leans on.

Memory nodes carry two bookkeeping fields that deliberately do NOT take
part in structural equality:

``birth``
    The statement index (within the block being walked) at which the
    node entered the expression.  Needed to decide the ordering side
    conditions of the store-crossing rules: a store kills only memory
    nodes created before it, and a backward store-crossing rewrites only
    loads created after it.

``stale_fwd`` / ``stale_bwd``
    Set when the expression is carried across a store whose address is
    syntactically different from the node's but might collide at
    runtime: a store after the node's birth taints later forward
    re-matching (stale_fwd), a store crossed on the way up taints
    use-define matching above it (stale_bwd).  A marked node is never
    used again as a rewrite target on the affected side, and marked
    expressions are excluded from the pairs handed to the concrete
    certifier.  They are still reported: recall beats precision here,
    the certifier just does not vouch for them.

All values are immutable; every function in this module is pure.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

U64 = (1 << 64) - 1

# Births for nodes that entered the current block from elsewhere.
BIRTH_BEFORE_BLOCK = -(1 << 30)
BIRTH_AFTER_BLOCK = 1 << 30

BINOPS = ("+", "-", "*", "/", "<<", ">>", "&", "|", "^",
          "<", "<=", "==", "!=", ">=", ">")
UNOPS = ("~", "!", "neg")
COMMUTATIVE = {"+", "*", "&", "|", "^", "==", "!="}
BITWISE = {"&", "|", "^", "<<", ">>"}


# Node equality and hashing are structural and exclude the birth/stale
# bookkeeping on memory nodes.  Hashes are precomputed at construction so
# set/dict operations stay O(1) and equality can fail fast; `_canon`
# marks trees the canonicalizer already produced so re-canonicalizing is
# free.

class _Node:
    __slots__ = ()

    def __hash__(self):
        return self._h

    def _mark_canonical(self):
        object.__setattr__(self, "_canon", True)
        return self


@dataclass(frozen=True, eq=False)
class Reg(_Node):
    name: str
    _h: int = field(init=False, repr=False)
    _canon: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("R", self.name)))
        object.__setattr__(self, "_canon", True)

    __hash__ = _Node.__hash__

    def __eq__(self, other):
        return self is other or (type(other) is Reg and other.name == self.name)

    def __repr__(self):
        return f"Reg({self.name})"


@dataclass(frozen=True, eq=False)
class Val(_Node):
    value: int
    _h: int = field(init=False, repr=False)
    _canon: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("V", self.value)))
        object.__setattr__(self, "_canon", 0 <= self.value <= U64)

    __hash__ = _Node.__hash__

    def __eq__(self, other):
        return self is other or (type(other) is Val and other.value == self.value)

    def __repr__(self):
        return f"Val({self.value:#x})"


@dataclass(frozen=True, eq=False)
class Bin(_Node):
    op: str
    left: "Sse"
    right: "Sse"
    _h: int = field(init=False, repr=False)
    _canon: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h",
                           hash(("B", self.op, self.left._h, self.right._h)))
        object.__setattr__(self, "_canon", False)

    __hash__ = _Node.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Bin and other._h == self._h and other.op == self.op
                and other.left == self.left and other.right == self.right)


@dataclass(frozen=True, eq=False)
class Un(_Node):
    op: str
    child: "Sse"
    _h: int = field(init=False, repr=False)
    _canon: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("U", self.op, self.child._h)))
        object.__setattr__(self, "_canon", False)

    __hash__ = _Node.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Un and other._h == self._h and other.op == self.op
                and other.child == self.child)


@dataclass(frozen=True, eq=False)
class Load(_Node):
    addr: "Sse"
    birth: int = BIRTH_BEFORE_BLOCK
    stale_fwd: bool = False
    stale_bwd: bool = False
    _h: int = field(init=False, repr=False)
    _canon: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("L", self.addr._h)))
        object.__setattr__(self, "_canon", False)

    __hash__ = _Node.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Load and other._h == self._h
                and other.addr == self.addr)

    @property
    def stale(self):
        return self.stale_fwd or self.stale_bwd


@dataclass(frozen=True, eq=False)
class Store(_Node):
    addr: "Sse"
    birth: int = BIRTH_BEFORE_BLOCK
    stale_fwd: bool = False
    stale_bwd: bool = False
    _h: int = field(init=False, repr=False)
    _canon: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("S", self.addr._h)))
        object.__setattr__(self, "_canon", False)

    __hash__ = _Node.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Store and other._h == self._h
                and other.addr == self.addr)

    @property
    def stale(self):
        return self.stale_fwd or self.stale_bwd


@dataclass(frozen=True, eq=False)
class IndexTerm(_Node):
    """A loop-summarized term ``base + i * stride`` with a fresh index id.

    Two index terms are equal only when base, stride and index id all
    match.  Whole strides added to a register-rooted base are index
    shifts and are absorbed; constant bases anchor absolute function
    tables and are left alone.
    """

    base: "Sse"
    stride: int
    index: str
    _h: int = field(init=False, repr=False)
    _canon: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h",
                           hash(("I", self.base._h, self.stride, self.index)))
        object.__setattr__(self, "_canon", False)

    __hash__ = _Node.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is IndexTerm and other._h == self._h
                and other.stride == self.stride and other.index == self.index
                and other.base == self.base)


Sse = Union[Reg, Val, Bin, Un, Load, Store, IndexTerm]

_index_counter = itertools.count()


def fresh_index() -> str:
    return f"i{next(_index_counter)}"


# ---------------------------------------------------------------------------
# Shared two's-complement arithmetic (the interpreter uses the same table,
# so constant folding and concrete execution cannot disagree).
# ---------------------------------------------------------------------------

def eval_binop(op: str, a: int, b: int) -> int:
    a &= U64
    b &= U64
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    elif op == "/":
        r = a // b if b else 0
    elif op == "<<":
        r = a << (b & 63)
    elif op == ">>":
        r = a >> (b & 63)
    elif op == "&":
        r = a & b
    elif op == "|":
        r = a | b
    elif op == "^":
        r = a ^ b
    elif op == "<":
        r = int(a < b)
    elif op == "<=":
        r = int(a <= b)
    elif op == "==":
        r = int(a == b)
    elif op == "!=":
        r = int(a != b)
    elif op == ">=":
        r = int(a >= b)
    elif op == ">":
        r = int(a > b)
    else:
        raise ValueError(f"unknown binop {op!r}")
    return r & U64


def eval_unop(op: str, a: int) -> int:
    a &= U64
    if op == "~":
        return (~a) & U64
    if op == "!":
        return int(a == 0)
    if op == "neg":
        return (-a) & U64
    raise ValueError(f"unknown unop {op!r}")


# ---------------------------------------------------------------------------
# Canonicalization
# ---------------------------------------------------------------------------

_REG_ORDER = {"sp": 1 << 40, "gp": (1 << 40) + 1}


def _reg_rank(name: str) -> int:
    if name in _REG_ORDER:
        return _REG_ORDER[name]
    return int(name[1:])


def sort_key(e: Sse):
    """Deterministic total order: registers first, then memory nodes and
    compound terms, constants last."""
    if isinstance(e, Reg):
        return (0, _reg_rank(e.name))
    if isinstance(e, Load):
        return (1, sort_key(e.addr))
    if isinstance(e, Store):
        return (2, sort_key(e.addr))
    if isinstance(e, IndexTerm):
        return (3, sort_key(e.base), e.stride, e.index)
    if isinstance(e, Un):
        return (4, e.op, sort_key(e.child))
    if isinstance(e, Bin):
        return (5, e.op, sort_key(e.left), sort_key(e.right))
    return (9, e.value)


def _sum_terms(e: Sse) -> tuple[list[Sse], int]:
    """Flatten an additive chain into (non-constant terms, folded constant)."""
    if isinstance(e, Val):
        return [], e.value
    if isinstance(e, Bin) and e.op == "+":
        lt, lc = _sum_terms(e.left)
        rt, rc = _sum_terms(e.right)
        return lt + rt, (lc + rc) & U64
    if isinstance(e, Bin) and e.op == "-" and isinstance(e.right, Val):
        lt, lc = _sum_terms(e.left)
        return lt, (lc - e.right.value) & U64
    return [e], 0


def _rebuild_sum(terms: list[Sse], const: int) -> Sse:
    terms = sorted(terms, key=sort_key)
    if const:
        terms = terms + [Val(const)._mark_canonical()]
    if not terms:
        return Val(0)._mark_canonical()
    acc = terms[0]
    for t in terms[1:]:
        acc = Bin("+", acc, t)._mark_canonical()
    return acc


def canonicalize(e: Sse) -> Sse:
    """Normalize an expression: fold constants (mod 2**64), flatten and
    sort additive chains, drop neutral elements, absorb whole-stride
    shifts of an index term's base.  Idempotent."""
    if e._canon:
        return e
    return _canonicalize(e)._mark_canonical()


def _canonicalize(e: Sse) -> Sse:
    if e._canon:
        return e
    if isinstance(e, Reg):
        return e
    if isinstance(e, Val):
        return Val(e.value & U64)
    if isinstance(e, Un):
        c = canonicalize(e.child)
        if isinstance(c, Val):
            return Val(eval_unop(e.op, c.value))
        return Un(e.op, c)
    if isinstance(e, Load):
        return Load(canonicalize(e.addr), e.birth, e.stale_fwd, e.stale_bwd)
    if isinstance(e, Store):
        return Store(canonicalize(e.addr), e.birth, e.stale_fwd, e.stale_bwd)
    if isinstance(e, IndexTerm):
        base = canonicalize(e.base)
        # A whole stride added to the base is an index shift and is
        # absorbed into the (unconstrained) index; the remainder stays in
        # the base.  Constant bases anchor absolute tables and are never
        # touched.
        bterms, bconst = _sum_terms(base)
        if bterms and e.stride and bconst:
            base = _rebuild_sum(bterms, bconst % e.stride)
        return IndexTerm(base, e.stride, e.index)
    # Bin
    l = canonicalize(e.left)
    r = canonicalize(e.right)
    op = e.op
    if isinstance(l, Val) and isinstance(r, Val):
        return Val(eval_binop(op, l.value, r.value))
    if op in ("+", "-") and (op == "+" or isinstance(r, Val)):
        terms, const = _sum_terms(Bin(op, l, r))
        terms = [canonicalize(t) if isinstance(t, IndexTerm) else t for t in terms]
        return _rebuild_sum(terms, const)
    if op == "*":
        if isinstance(l, Val):
            l, r = r, l
        if isinstance(r, Val):
            if r.value == 0:
                return Val(0)
            if r.value == 1:
                return l
    if op in ("<<", ">>") and isinstance(r, Val) and r.value == 0:
        return l
    if op in COMMUTATIVE and sort_key(r) < sort_key(l):
        l, r = r, l
    return Bin(op, l, r)


# ---------------------------------------------------------------------------
# Structure queries
# ---------------------------------------------------------------------------

def subtrees(e: Sse) -> Iterator[Sse]:
    stack = [e]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Bin):
            stack.append(n.left)
            stack.append(n.right)
        elif isinstance(n, Un):
            stack.append(n.child)
        elif isinstance(n, (Load, Store)):
            stack.append(n.addr)
        elif isinstance(n, IndexTerm):
            stack.append(n.base)


def size(e: Sse) -> int:
    return sum(1 for _ in subtrees(e))


def occurs(expr: Sse, pattern: Sse) -> bool:
    """True iff ``pattern`` appears as a subtree of ``expr`` (structural
    equality; both sides assumed canonical)."""
    return any(n == pattern for n in subtrees(expr))


def registers(e: Sse) -> frozenset[str]:
    return frozenset(n.name for n in subtrees(e) if isinstance(n, Reg))


def contains_reg(e: Sse, name: str) -> bool:
    return any(isinstance(n, Reg) and n.name == name for n in subtrees(e))


def mem_nodes(e: Sse) -> Iterator[Union[Load, Store]]:
    for n in subtrees(e):
        if isinstance(n, (Load, Store)):
            yield n


def mem_depth(e: Sse) -> int:
    if isinstance(e, (Load, Store)):
        return 1 + mem_depth(e.addr)
    if isinstance(e, Bin):
        return max(mem_depth(e.left), mem_depth(e.right))
    if isinstance(e, Un):
        return mem_depth(e.child)
    if isinstance(e, IndexTerm):
        return mem_depth(e.base)
    return 0


def has_bitwise_addr(e: Sse) -> bool:
    """True when some memory node's address subtree uses a bitwise op.
    Such expressions are tracked but never trusted for kills or call
    matching (pointer bit-twiddling is out of reach of this analysis)."""
    for n in mem_nodes(e):
        for s in subtrees(n.addr):
            if isinstance(s, Bin) and s.op in BITWISE:
                return True
            if isinstance(s, Un) and s.op == "~":
                return True
    return False


def root_register(e: Sse) -> Optional[str]:
    """The base register an expression hangs off (e.g. r0 for
    load(r0+0x8)), or None for constant-rooted expressions."""
    if isinstance(e, Reg):
        return e.name
    if isinstance(e, (Load, Store)):
        return root_register(e.addr)
    if isinstance(e, Un):
        return root_register(e.child)
    if isinstance(e, IndexTerm):
        return root_register(e.base)
    if isinstance(e, Bin):
        return root_register(e.left) or root_register(e.right)
    return None


# ---------------------------------------------------------------------------
# Rewriting
# ---------------------------------------------------------------------------

def _rebuild(e: Sse, f) -> Sse:
    """Apply f to each node bottom-up (f sees rebuilt children)."""
    if isinstance(e, Bin):
        e = Bin(e.op, _rebuild(e.left, f), _rebuild(e.right, f))
    elif isinstance(e, Un):
        e = Un(e.op, _rebuild(e.child, f))
    elif isinstance(e, Load):
        e = Load(_rebuild(e.addr, f), e.birth, e.stale_fwd, e.stale_bwd)
    elif isinstance(e, Store):
        e = Store(_rebuild(e.addr, f), e.birth, e.stale_fwd, e.stale_bwd)
    elif isinstance(e, IndexTerm):
        e = IndexTerm(_rebuild(e.base, f), e.stride, e.index)
    return f(e)


def _substitute(e: Sse, match, replacement: Sse) -> Sse:
    """Pre-order substitution: only nodes of the original tree are
    matched, so a node formed by the rewrite itself never cascades into
    another replacement."""
    if match(e):
        return replacement
    if isinstance(e, Bin):
        return Bin(e.op, _substitute(e.left, match, replacement),
                   _substitute(e.right, match, replacement))
    if isinstance(e, Un):
        return Un(e.op, _substitute(e.child, match, replacement))
    if isinstance(e, (Load, Store)):
        return type(e)(_substitute(e.addr, match, replacement),
                       e.birth, e.stale_fwd, e.stale_bwd)
    if isinstance(e, IndexTerm):
        return IndexTerm(_substitute(e.base, match, replacement),
                         e.stride, e.index)
    return e


def replace(expr: Sse, pattern: Sse, replacement: Sse) -> Sse:
    """Substitute every occurrence of ``pattern`` in ``expr`` and
    re-canonicalize.  Matching is structural, so memory-node tags on the
    pattern are ignored; tags of untouched nodes survive the rebuild."""
    return canonicalize(_substitute(expr, lambda n: n == pattern, replacement))


def replace_mem(expr: Sse, node_pred, replacement: Sse) -> tuple[Sse, bool]:
    """Substitute memory nodes selected by ``node_pred`` (which sees the
    node including its tags, unlike plain structural matching).  Returns
    the canonical result and whether anything was replaced."""
    hit = False

    def match(n):
        nonlocal hit
        if isinstance(n, (Load, Store)) and node_pred(n):
            hit = True
            return True
        return False

    out = _substitute(expr, match, replacement)
    return (canonicalize(out) if hit else expr), hit


def _mark_tree(e: Sse) -> Sse:
    """Mark a tree whose structure is known canonical (tag-only edits)."""
    for n in subtrees(e):
        if not n._canon:
            n._mark_canonical()
    return e


def retag(expr: Sse, birth: int) -> Sse:
    """Reset every memory node's birth (used when an expression crosses a
    block boundary).  Staleness is NOT cleared: a node known stale stays
    stale forever."""
    if not any(n.birth != birth for n in mem_nodes(expr)):
        return expr

    def f(n):
        if isinstance(n, (Load, Store)) and n.birth != birth:
            return type(n)(n.addr, birth, n.stale_fwd, n.stale_bwd)
        return n

    out = _rebuild(expr, f)
    return _mark_tree(out) if expr._canon else out


def mark_stale(expr: Sse, node_pred, which: str = "fwd") -> Sse:
    """Set the forward or backward staleness flag on the selected memory
    nodes (a tag-only edit; structure and identity are unchanged)."""
    fwd = which == "fwd"

    def hit(n):
        return not (n.stale_fwd if fwd else n.stale_bwd) and node_pred(n)

    if not any(hit(n) for n in mem_nodes(expr)):
        return expr

    def f(n):
        if isinstance(n, (Load, Store)) and hit(n):
            return type(n)(n.addr, n.birth,
                           n.stale_fwd or fwd, n.stale_bwd or not fwd)
        return n

    out = _rebuild(expr, f)
    return _mark_tree(out) if expr._canon else out


def is_trusted(e: Sse) -> bool:
    """Expressions we are willing to hand to the concrete certifier:
    no stale memory node, no bitwise address arithmetic."""
    return not has_bitwise_addr(e) and not any(n.stale for n in mem_nodes(e))


# ---------------------------------------------------------------------------
# Kill primitives (shared by the rule engine; also the spec-level API)
# ---------------------------------------------------------------------------

def kills_register(expr: Sse, reg: str) -> bool:
    """Rule 14 trigger: the expression contains the redefined register."""
    return contains_reg(expr, reg)


def kills_memory(expr: Sse, addr: Sse, position: int) -> bool:
    """Rule 15 trigger: the expression holds a load/store of the same
    (syntactically equal) address created before the new store.  Bitwise
    addresses are exempt: we do not trust them enough to kill on them."""
    if has_bitwise_addr(expr):
        return False
    return any(n.addr == addr and n.birth < position for n in mem_nodes(expr))


def kill_matches(tracked, pattern: Sse, mode: str, position: int = 1 << 31):
    """Prune a collection of expressions against a redefinition.

    mode="register-redefine": ``pattern`` is Reg(r); drop every
    expression containing r.  mode="memory-overwrite": ``pattern`` is the
    store address; drop expressions whose matching memory node predates
    ``position`` (forward direction only).
    """
    if mode == "register-redefine":
        assert isinstance(pattern, Reg)
        return [t for t in tracked if not kills_register(_expr_of(t), pattern.name)]
    if mode == "memory-overwrite":
        return [t for t in tracked if not kills_memory(_expr_of(t), pattern, position)]
    raise ValueError(f"unknown kill mode {mode!r}")


def _expr_of(t):
    return t.expr if hasattr(t, "expr") else t


# ---------------------------------------------------------------------------
# Loop-induction summarization
# ---------------------------------------------------------------------------

def _const_positions(e: Sse, path=()) -> Iterator[tuple[tuple, int]]:
    """Positions (paths) of additive constants: the trailing Val of any
    canonical sum chain."""
    if isinstance(e, Bin) and e.op == "+" and isinstance(e.right, Val):
        yield path, e.right.value
    if isinstance(e, Bin):
        yield from _const_positions(e.left, path + (0,))
        yield from _const_positions(e.right, path + (1,))
    elif isinstance(e, Un):
        yield from _const_positions(e.child, path + (0,))
    elif isinstance(e, (Load, Store)):
        yield from _const_positions(e.addr, path + (0,))
    elif isinstance(e, IndexTerm):
        yield from _const_positions(e.base, path + (0,))


def _at(e: Sse, path) -> Sse:
    for i in path:
        if isinstance(e, Bin):
            e = e.left if i == 0 else e.right
        elif isinstance(e, Un):
            e = e.child
        elif isinstance(e, (Load, Store)):
            e = e.addr
        elif isinstance(e, IndexTerm):
            e = e.base
        else:
            raise IndexError(path)
    return e


def _set_at(e: Sse, path, new: Sse) -> Sse:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(e, Bin):
        if i == 0:
            return Bin(e.op, _set_at(e.left, rest, new), e.right)
        return Bin(e.op, e.left, _set_at(e.right, rest, new))
    if isinstance(e, Un):
        return Un(e.op, _set_at(e.child, rest, new))
    if isinstance(e, (Load, Store)):
        return type(e)(_set_at(e.addr, rest, new), e.birth, e.stale_fwd, e.stale_bwd)
    if isinstance(e, IndexTerm):
        return IndexTerm(_set_at(e.base, rest, new), e.stride, e.index)
    raise IndexError(path)


def _merge_bucket(path, skel, consts: list[int], index_id: str) -> Optional[Sse]:
    if len(consts) < 3 or len(set(consts)) != len(consts):
        return None
    cs = sorted(consts)
    d = cs[1] - cs[0]
    if d <= 0 or any(cs[k + 1] - cs[k] != d for k in range(len(cs) - 1)):
        return None
    sum_node = _at(skel, path)
    base_terms, _ = _sum_terms(sum_node)
    base = _rebuild_sum(list(base_terms), 0)
    term = IndexTerm(base, d, index_id)
    return canonicalize(_set_at(skel, path, Bin("+", term, Val(cs[0]))))


def recognize_induction(family: list[Sse], index_id: str | None = None) -> Optional[Sse]:
    """Collapse an offset family produced by a loop-carried pointer into
    its ``base + i*stride`` form.

    The members must be identical apart from one additive constant whose
    values form an arithmetic progression c0, c0+d, c0+2d (d > 0) with at
    least three members.  Returns the summarized expression or None.
    """
    if len(family) < 3:
        return None
    family = [canonicalize(e) for e in family]
    buckets: dict[tuple, list[int]] = {}
    for e in family:
        for path, const in _const_positions(e, ()):
            skel = _set_at(e, path + (1,), Val(0))
            buckets.setdefault((path, skel), []).append(const)
    for (path, skel), consts in buckets.items():
        if len(consts) != len(family):
            continue
        merged = _merge_bucket(path, skel, consts, index_id or fresh_index())
        if merged is not None:
            return merged
    return None


def induction_families(exprs: list[Sse], index_id: str) -> list[tuple[Sse, list[Sse]]]:
    """Partition a mixed collection into offset families and merge each:
    returns (merged expression, members it replaces) per family found.
    Members already absorbed by one family are not reused by another.
    A member with no additive constant at all (the pointer before its
    first increment) joins a family whose progression starts one stride
    above zero."""
    buckets: dict[tuple, list[tuple[int, Sse]]] = {}
    for e in exprs:
        ce = canonicalize(e)
        for path, const in _const_positions(ce, ()):
            skel = _set_at(ce, path + (1,), Val(0))
            buckets.setdefault((path, skel), []).append((const, e))
    out: list[tuple[Sse, list[Sse]]] = []
    used: set[int] = set()
    for (path, skel), members in sorted(buckets.items(),
                                        key=lambda kv: -len(kv[1])):
        members = [(c, e) for c, e in members if id(e) not in used]
        consts = [c for c, _ in members]
        if len(set(consts)) >= 2:
            cs = sorted(set(consts))
            d = cs[1] - cs[0]
            if d > 0 and cs[0] == d:
                zero = canonicalize(skel)
                for e in exprs:
                    if id(e) not in used and canonicalize(e) == zero:
                        members = [(0, e)] + members
                        consts = [0] + consts
                        break
        merged = _merge_bucket(path, skel, consts, index_id)
        if merged is None:
            continue
        out.append((merged, [e for _, e in members]))
        used.update(id(e) for _, e in members)
    return out


# ---------------------------------------------------------------------------
# Pretty printing / parsing (paper-style notation: load(store(r6+0x4)+0x8))
# ---------------------------------------------------------------------------

def pretty(e: Sse) -> str:
    if isinstance(e, Reg):
        return e.name
    if isinstance(e, Val):
        return hex(e.value)
    if isinstance(e, Load):
        return f"load({pretty(e.addr)})"
    if isinstance(e, Store):
        return f"store({pretty(e.addr)})"
    if isinstance(e, IndexTerm):
        b = pretty(e.base)
        return f"{b}+{e.index}*{hex(e.stride)}"
    if isinstance(e, Un):
        op = "-" if e.op == "neg" else e.op
        return f"{op}{_wrap(e.child)}"
    return f"{_wrap(e.left)}{e.op}{_wrap(e.right)}"


def _wrap(e: Sse) -> str:
    s = pretty(e)
    if isinstance(e, (Bin, IndexTerm)):
        return f"({s})"
    return s


_TOKEN = re.compile(
    r"\s*(load|store|r[0-9]+|sp|gp|i[0-9]+|0x[0-9a-fA-F]+|[0-9]+|<<|>>|<=|>=|==|!=|[()+\-*/&|^~!<>,])"
)


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"bad expression token at {text[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _ExprParser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expect=None):
        t = self.peek()
        if t is None or (expect is not None and t != expect):
            raise ValueError(f"expected {expect or 'token'}, got {t!r}")
        self.pos += 1
        return t

    def parse(self) -> Sse:
        e = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing tokens {self.toks[self.pos:]!r}")
        return e

    def expr(self, prec=0) -> Sse:
        levels = [("<", "<=", "==", "!=", ">=", ">"), ("&", "|", "^"),
                  ("<<", ">>"), ("+", "-"), ("*", "/")]
        if prec == len(levels):
            return self.atom()
        e = self.expr(prec + 1)
        while self.peek() in levels[prec]:
            op = self.take()
            rhs = self.expr(prec + 1)
            e = Bin(op, e, rhs)
        return e

    def atom(self) -> Sse:
        t = self.peek()
        if t == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if t in ("~", "!"):
            self.take()
            return Un(t, self.atom())
        if t == "-":
            self.take()
            return Un("neg", self.atom())
        if t in ("load", "store"):
            self.take()
            self.take("(")
            a = self.expr()
            self.take(")")
            return Load(a) if t == "load" else Store(a)
        if t and (t.startswith("0x") or t.isdigit()):
            self.take()
            return Val(int(t, 0))
        if t and re.fullmatch(r"r[0-9]+|sp|gp", t):
            self.take()
            # i*stride sugar is parsed as plain multiplication; index
            # identifiers only arise internally.
            return Reg(t)
        raise ValueError(f"unexpected token {t!r}")


def parse_sse(text: str) -> Sse:
    """Parse the debug notation back into a canonical expression."""
    return canonicalize(_ExprParser(_tokenize(text)).parse())
