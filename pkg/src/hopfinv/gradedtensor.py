"""Dense tensors with per-index Z/2 parity and Koszul-sign-correct contraction.

Conventions, fixed once:

* A tensor is a formal product factor.  Axis order is semantically
  significant; swapping adjacent axes multiplies each entry by
  (-1)**(parity_i * parity_j).
* Contraction of an adjacent (out, in) axis pair, with the out axis
  immediately to the LEFT of the in axis, is sign-free.  Every other
  contraction is reduced to this case by signed transpositions.  With this
  rule a closed loop on the identity map yields the graded dimension.
* Odd tensors in a network are combined in a stated sign order; moving one
  odd node past another multiplies the value by -1.  Even nodes commute
  freely.

Entries are stored in a dict keyed by index tuples; absent keys are zero.
The algebras in scope have dimension at most ~50, so nothing here is tuned
beyond skipping zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactfield import Cyclo


class AxisOutOfRange(IndexError):
    pass


class SpaceMismatch(ValueError):
    pass


class VarianceMismatch(ValueError):
    pass


class PlanIncomplete(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    """A finite-dimensional Z/2-graded vector space: dimension plus parities."""

    dim: int
    parity: tuple[int, ...]

    def __post_init__(self):
        if len(self.parity) != self.dim:
            raise ValueError("parity vector length must equal dim")
        if any(p not in (0, 1) for p in self.parity):
            raise ValueError("parities must be 0 or 1")

    @staticmethod
    def ungraded(dim: int) -> "GradedSpace":
        return GradedSpace(dim, (0,) * dim)

    @property
    def graded_dim(self) -> int:
        return sum(1 if p == 0 else -1 for p in self.parity)


IN, OUT = "in", "out"


class GradedTensor:
    """A homogeneous multi-index array of exact scalars.

    axes: tuple of (GradedSpace, variance) with variance "in" or "out".
    parity: 0 or 1; every stored entry must sit at an index tuple whose
    total parity equals it.
    """

    __slots__ = ("order", "axes", "parity", "entries")

    def __init__(self, order: int, axes, parity: int, entries: dict):
        self.order = order
        self.axes = tuple((sp, var) for sp, var in axes)
        for sp, var in self.axes:
            if var not in (IN, OUT):
                raise ValueError(f"variance must be 'in' or 'out', got {var!r}")
        self.parity = parity & 1
        self.entries = {}
        for idx, val in entries.items():
            if not val:
                continue
            if len(idx) != len(self.axes):
                raise ValueError("index arity mismatch")
            if self._index_parity(idx) != self.parity:
                raise ValueError(f"entry at {idx} violates homogeneity")
            self.entries[idx] = val

    def _index_parity(self, idx) -> int:
        p = 0
        for (sp, _), i in zip(self.axes, idx):
            p ^= sp.parity[i]
        return p

    @property
    def rank(self) -> int:
        return len(self.axes)

    def is_scalar(self) -> bool:
        return not self.axes

    def scalar_value(self) -> Cyclo:
        if self.axes:
            raise ValueError("tensor has free axes")
        return self.entries.get((), Cyclo.zero(self.order))

    @staticmethod
    def scalar(order: int, value: Cyclo) -> "GradedTensor":
        return GradedTensor(order, (), 0, {(): value})

    def __eq__(self, other):
        if not isinstance(other, GradedTensor):
            return NotImplemented
        return (
            self.order == other.order
            and self.axes == other.axes
            and self.parity == other.parity
            and self.entries == other.entries
        )

    def __repr__(self):
        sig = ",".join(f"{sp.dim}{'i' if var == IN else 'o'}" for sp, var in self.axes)
        return f"GradedTensor[{sig}; parity={self.parity}; nnz={len(self.entries)}]"

    # -- elementwise ----------------------------------------------------

    def scale(self, c: Cyclo) -> "GradedTensor":
        return GradedTensor(
            self.order, self.axes, self.parity,
            {k: v * c for k, v in self.entries.items()},
        )

    def add(self, other: "GradedTensor") -> "GradedTensor":
        if self.axes != other.axes or self.parity != other.parity:
            raise SpaceMismatch("can only add tensors of identical type")
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k)
            out[k] = v if s is None else s + v
        return GradedTensor(self.order, self.axes, self.parity, out)

    # -- structural operations ------------------------------------------

    def transpose_adjacent(self, axis: int) -> "GradedTensor":
        """Swap axes (axis, axis+1) with the Koszul sign on each entry."""
        if not (0 <= axis < self.rank - 1):
            raise AxisOutOfRange(f"axis {axis} of {self.rank}")
        pa = self.axes[axis][0].parity
        pb = self.axes[axis + 1][0].parity
        new_axes = list(self.axes)
        new_axes[axis], new_axes[axis + 1] = new_axes[axis + 1], new_axes[axis]
        out = {}
        for idx, val in self.entries.items():
            j = list(idx)
            j[axis], j[axis + 1] = j[axis + 1], j[axis]
            if pa[idx[axis]] and pb[idx[axis + 1]]:
                val = -val
            out[tuple(j)] = val
        return GradedTensor(self.order, new_axes, self.parity, out)

    def move_axis(self, src: int, dst: int) -> "GradedTensor":
        """Move one axis to a new position by repeated signed adjacent swaps."""
        t = self
        while src < dst:
            t = t.transpose_adjacent(src)
            src += 1
        while src > dst:
            t = t.transpose_adjacent(src - 1)
            src -= 1
        return t

    def tensor(self, other: "GradedTensor") -> "GradedTensor":
        """Juxtaposition self (x) other; no signs (self stays on the left)."""
        if self.order != other.order:
            raise SpaceMismatch("tensors over different fields")
        axes = self.axes + other.axes
        out = {}
        for ia, va in self.entries.items():
            for ib, vb in other.entries.items():
                out[ia + ib] = va * vb
        return GradedTensor(self.order, axes, (self.parity + other.parity) & 1, out)

    def trace_adjacent(self, axis: int) -> "GradedTensor":
        """Close the adjacent pair (axis, axis+1); requires (out, in) there."""
        sa, va = self.axes[axis]
        sb, vb = self.axes[axis + 1]
        if sa != sb:
            raise SpaceMismatch("traced axes carry different spaces")
        if (va, vb) != (OUT, IN):
            raise VarianceMismatch("trace needs an (out, in) pair in that order")
        new_axes = self.axes[:axis] + self.axes[axis + 2:]
        out = {}
        for idx, val in self.entries.items():
            if idx[axis] != idx[axis + 1]:
                continue
            j = idx[:axis] + idx[axis + 2:]
            s = out.get(j)
            out[j] = val if s is None else s + val
        return GradedTensor(self.order, new_axes, self.parity, out)

    def self_contract(self, out_axis: int, in_axis: int) -> "GradedTensor":
        """Graded trace over one (out, in) axis pair of this tensor."""
        sa, va = self.axes[out_axis]
        sb, vb = self.axes[in_axis]
        if va != OUT or vb != IN:
            raise VarianceMismatch("self contraction needs out then in axes")
        if sa != sb:
            raise SpaceMismatch("self contraction across different spaces")
        t = self
        if out_axis < in_axis:
            t = t.move_axis(out_axis, in_axis - 1)
            return t.trace_adjacent(in_axis - 1)
        t = t.move_axis(out_axis, in_axis)
        return t.trace_adjacent(in_axis)


def contract_edge(a: GradedTensor, out_axis: int, b: GradedTensor, in_axis: int) -> GradedTensor:
    """Contract a's out_axis with b's in_axis, a standing left of b.

    If a is b, this is the graded trace over that axis pair.  Signed
    transpositions bring out_axis to the last slot of a and in_axis to the
    first slot of b; the adjacent head-to-tail sum itself is sign-free.
    """
    if a is b:
        return a.self_contract(out_axis, in_axis)
    if a.order != b.order:
        raise SpaceMismatch("tensors over different fields")
    sa, va = a.axes[out_axis]
    sb, vb = b.axes[in_axis]
    if va != OUT or vb != IN:
        raise VarianceMismatch(f"need out meets in, got {va}/{vb}")
    if sa != sb:
        raise SpaceMismatch("contracted axes carry different spaces")
    a2 = a.move_axis(out_axis, a.rank - 1)
    b2 = b.move_axis(in_axis, 0)
    # bucket b2 entries by contracted index
    by_k: dict[int, list] = {}
    for idx, val in b2.entries.items():
        by_k.setdefault(idx[0], []).append((idx[1:], val))
    out: dict = {}
    for idx, val in a2.entries.items():
        k = idx[-1]
        rest = idx[:-1]
        for tail, bv in by_k.get(k, ()):
            key = rest + tail
            s = out.get(key)
            term = val * bv
            out[key] = term if s is None else s + term
    axes = a2.axes[:-1] + b2.axes[1:]
    return GradedTensor(a.order, axes, (a.parity + b.parity) & 1, out)


class TensorNetwork:
    """Labeled tensors plus (out-end -> in-end) edge pairings.

    The node list order doubles as the sign order of its odd nodes.
    """

    def __init__(self, order: int):
        self.order = order
        self.labels: list[str] = []
        self.tensors: dict[str, GradedTensor] = {}
        self.edges: list[tuple[tuple[str, int], tuple[str, int]]] = []

    def add_node(self, label: str, tensor: GradedTensor) -> str:
        if label in self.tensors:
            raise ValueError(f"duplicate node label {label!r}")
        if tensor.order != self.order:
            raise SpaceMismatch("node over a different field")
        self.labels.append(label)
        self.tensors[label] = tensor
        return label

    def add_edge(self, out_end: tuple[str, int], in_end: tuple[str, int]) -> int:
        (la, ax_a), (lb, ax_b) = out_end, in_end
        sa, va = self.tensors[la].axes[ax_a]
        sb, vb = self.tensors[lb].axes[ax_b]
        if va != OUT or vb != IN:
            raise VarianceMismatch(f"edge must run out->in, got {va}->{vb}")
        if sa != sb:
            raise SpaceMismatch("edge joins different spaces")
        used = {e for pair in self.edges for e in pair}
        if out_end in used or in_end in used:
            raise ValueError("axis already used by another edge")
        self.edges.append((out_end, in_end))
        return len(self.edges) - 1

    def node_parity(self, label: str) -> int:
        return self.tensors[label].parity

    def swap_sign_order(self, label_a: str, label_b: str) -> None:
        """Exchange two nodes' positions in the sign order (for tests)."""
        i, j = self.labels.index(label_a), self.labels.index(label_b)
        self.labels[i], self.labels[j] = self.labels[j], self.labels[i]


def plan_naive(net: TensorNetwork) -> list[int]:
    return list(range(len(net.edges)))


def plan_greedy(net: TensorNetwork) -> list[int]:
    """Order edges so each step minimizes the dense size of its result.

    The heuristic is exact-cost-free: it only looks at the dimension product
    of the would-be merged node's free axes.
    """
    slot_owner = {}
    free_axes: dict[str, list] = {}
    for label in net.labels:
        t = net.tensors[label]
        free_axes[label] = [(label, i) for i in range(t.rank)]
        for i in range(t.rank):
            slot_owner[(label, i)] = label
    axis_dim = {
        (label, i): net.tensors[label].axes[i][0].dim
        for label in net.labels
        for i in range(net.tensors[label].rank)
    }
    remaining = set(range(len(net.edges)))
    plan = []
    while remaining:
        best = None
        for eid in sorted(remaining):
            (sa, sb) = net.edges[eid]
            oa, ob = slot_owner[sa], slot_owner[sb]
            merged = {s for s in free_axes[oa]}
            if ob != oa:
                merged |= set(free_axes[ob])
            merged -= {sa, sb}
            size = 1
            for s in merged:
                size *= axis_dim[s]
            if best is None or size < best[0]:
                best = (size, eid)
        _, eid = best
        plan.append(eid)
        remaining.discard(eid)
        (sa, sb) = net.edges[eid]
        oa, ob = slot_owner[sa], slot_owner[sb]
        merged_slots = [s for s in free_axes[oa] if s not in (sa, sb)]
        if ob != oa:
            merged_slots += [s for s in free_axes[ob] if s not in (sa, sb)]
        for s in merged_slots:
            slot_owner[s] = oa
        free_axes[oa] = merged_slots
        if ob != oa:
            free_axes[ob] = []
            for label, owner in list(slot_owner.items()):
                if owner == ob:
                    slot_owner[label] = oa
    return plan


class _LiveNode:
    __slots__ = ("tensor", "slots")

    def __init__(self, tensor: GradedTensor, slots: list):
        self.tensor = tensor
        self.slots = slots


def evaluate_network(net: TensorNetwork, plan=None) -> GradedTensor:
    """Contract every edge following plan; return the resulting tensor.

    The result is independent of the plan.  Odd nodes are combined in the
    network's sign order, each transposition of odd factors contributing -1.
    Disconnected components are multiplied together at the end.
    """
    if plan is None:
        plan = plan_greedy(net)
    if sorted(plan) != list(range(len(net.edges))):
        raise PlanIncomplete("plan must cover every edge exactly once")

    order: list[str] = list(net.labels)
    live: dict[str, _LiveNode] = {
        label: _LiveNode(net.tensors[label], [(label, i) for i in range(net.tensors[label].rank)])
        for label in net.labels
    }
    owner = {slot: label for label in net.labels for slot in live[label].slots}
    sign = 1

    def slot_pos(node: _LiveNode, slot) -> int:
        return node.slots.index(slot)

    for eid in plan:
        (sa, sb) = net.edges[eid]
        la, lb = owner[sa], owner[sb]
        if la == lb:
            node = live[la]
            i, j = slot_pos(node, sa), slot_pos(node, sb)
            node.tensor = node.tensor.self_contract(i, j)
            slots = list(node.slots)
            for s in sorted((i, j), reverse=True):
                slots.pop(s)
            node.slots = slots
            continue
        pa, pb = order.index(la), order.index(lb)
        # bring the in-node immediately to the right of the out-node,
        # charging a node-level Koszul sign for every odd node passed
        if pa < pb:
            passed = order[pa + 1:pb]
            if live[lb].tensor.parity:
                for mid in passed:
                    if live[mid].tensor.parity:
                        sign = -sign
            order.pop(pb)
            order.insert(pa + 1, lb)
        else:
            passed = order[pb:pa]
            if live[la].tensor.parity:
                for mid in passed:
                    if live[mid].tensor.parity:
                        sign = -sign
            order.pop(pa)
            order.insert(pb, la)
        na, nb = live[la], live[lb]
        i, j = slot_pos(na, sa), slot_pos(nb, sb)
        merged = contract_edge(na.tensor, i, nb.tensor, j)
        a_slots = [s for k, s in enumerate(na.slots) if k != i]
        b_slots = [s for k, s in enumerate(nb.slots) if k != j]
        new_slots = a_slots + b_slots
        na.tensor = merged
        na.slots = new_slots
        for s in new_slots:
            owner[s] = la
        order.remove(lb)
        del live[lb]

    # multiply any disconnected remainders, left to right
    result = None
    for label in order:
        t = live[label].tensor
        result = t if result is None else result.tensor(t)
    if result is None:
        result = GradedTensor.scalar(net.order, Cyclo.one(net.order))
    if sign < 0:
        result = result.scale(Cyclo.from_rational(net.order, -1))
    return result
