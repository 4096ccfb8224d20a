"""Hopf (super-)algebras given by structure constants, and axiom checking.

A HopfAlgebraData holds the five structure tensors as sparse dicts over an
exact cyclotomic field:

    mult[(i, j, k)]   coefficient of b_k in b_i * b_j
    comult[(i, j, k)] coefficient of b_j (x) b_k in Delta(b_i)
    unit[i]           coefficients of 1
    counit[i]         eps(b_i)
    antipode[(i, j)]  coefficient of b_j in S(b_i)

All five tensors must be even with respect to the Z/2 grading.  Graded
products of tensor factors pick up Koszul signs:
(a (x) b)(c (x) d) = (-1)**(|b||c|) ac (x) bd.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

from .exactfield import Cyclo, FieldDescriptor
from .gradedtensor import GradedSpace


class ShapeMismatch(ValueError):
    pass


class InvalidAlgebraFile(ValueError):
    """The file parsed but its tensors fail the Hopf axioms."""

    def __init__(self, report):
        super().__init__("algebra file fails axiom verification")
        self.report = report


class HopfAlgebraData:
    """Immutable bundle of structure constants; hashable by identity."""

    __slots__ = (
        "name", "field", "space", "mult", "comult", "unit", "counit",
        "antipode", "basis_labels", "_derived_cache",
    )

    def __init__(self, name, field, space, mult, comult, unit, counit,
                 antipode, basis_labels=None):
        self.name = name
        self.field: FieldDescriptor = field
        self.space: GradedSpace = space
        self.mult = dict(mult)
        self.comult = dict(comult)
        self.unit = dict(unit)
        self.counit = dict(counit)
        self.antipode = dict(antipode)
        self.basis_labels = tuple(basis_labels) if basis_labels else tuple(
            f"b{i}" for i in range(space.dim)
        )
        self._derived_cache = None
        self._check_shapes()

    # identity-based hashing: the object is treated as immutable
    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other

    def __repr__(self):
        return f"HopfAlgebraData({self.name!r}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def order(self) -> int:
        return self.field.order

    def parity(self, i: int) -> int:
        return self.space.parity[i]

    def zero(self) -> Cyclo:
        return Cyclo.zero(self.order)

    def one(self) -> Cyclo:
        return Cyclo.one(self.order)

    def _check_shapes(self):
        d = self.dim
        for (i, j, k) in self.mult:
            if not (0 <= i < d and 0 <= j < d and 0 <= k < d):
                raise ShapeMismatch(f"mult index {(i, j, k)} out of range")
        for (i, j, k) in self.comult:
            if not (0 <= i < d and 0 <= j < d and 0 <= k < d):
                raise ShapeMismatch(f"comult index {(i, j, k)} out of range")
        for i in list(self.unit) + list(self.counit):
            if not 0 <= i < d:
                raise ShapeMismatch("unit/counit index out of range")
        for (i, j) in self.antipode:
            if not (0 <= i < d and 0 <= j < d):
                raise ShapeMismatch("antipode index out of range")

    # -- element operations (elements are sparse dicts {index: Cyclo}) ----

    def unit_vec(self) -> dict:
        return dict(self.unit)

    def basis_vec(self, i: int) -> dict:
        return {i: self.one()}

    def multiply(self, x: dict, y: dict) -> dict:
        out = {}
        for i, xi in x.items():
            if not xi:
                continue
            for j, yj in y.items():
                if not yj:
                    continue
                c = xi * yj
                for (a, b, k), m in self._mult_rows.get((i, j), ()):
                    v = out.get(k)
                    w = c * m
                    out[k] = w if v is None else v + w
        return {k: v for k, v in out.items() if v}

    @property
    def _mult_rows(self):
        # cache: (i, j) -> tuple of ((i, j, k), coeff)
        cache = self._derived_cache
        if cache is None:
            cache = {}
            setattr(self, "_derived_cache", cache)
        if "mult_rows" not in cache:
            rows = {}
            for (i, j, k), c in self.mult.items():
                rows.setdefault((i, j), []).append(((i, j, k), c))
            cache["mult_rows"] = {k: tuple(v) for k, v in rows.items()}
        return cache["mult_rows"]

    @property
    def _comult_rows(self):
        cache = self._derived_cache
        if cache is None:
            cache = {}
            setattr(self, "_derived_cache", cache)
        if "comult_rows" not in cache:
            rows = {}
            for (i, j, k), c in self.comult.items():
                rows.setdefault(i, []).append((j, k, c))
            cache["comult_rows"] = {k: tuple(v) for k, v in rows.items()}
        return cache["comult_rows"]

    @property
    def _antipode_rows(self):
        cache = self._derived_cache
        if cache is None:
            cache = {}
            setattr(self, "_derived_cache", cache)
        if "antipode_rows" not in cache:
            rows = {}
            for (i, j), c in self.antipode.items():
                rows.setdefault(i, []).append((j, c))
            cache["antipode_rows"] = {k: tuple(v) for k, v in rows.items()}
        return cache["antipode_rows"]

    def comultiply(self, x: dict) -> dict:
        """Delta(x) as a sparse dict over index pairs."""
        out = {}
        for i, xi in x.items():
            if not xi:
                continue
            for (j, k, c) in self._comult_rows.get(i, ()):
                key = (j, k)
                v = out.get(key)
                w = xi * c
                out[key] = w if v is None else v + w
        return {k: v for k, v in out.items() if v}

    def apply_antipode(self, x: dict, power: int = 1) -> dict:
        if power < 0:
            raise ValueError("use DerivedStructure.s_inv for negative powers")
        out = dict(x)
        for _ in range(power):
            nxt = {}
            for i, xi in out.items():
                if not xi:
                    continue
                for (j, c) in self._antipode_rows.get(i, ()):
                    v = nxt.get(j)
                    w = xi * c
                    nxt[j] = w if v is None else v + w
            out = {k: v for k, v in nxt.items() if v}
        return out

    def counit_of(self, x: dict) -> Cyclo:
        acc = self.zero()
        for i, xi in x.items():
            c = self.counit.get(i)
            if c and xi:
                acc = acc + xi * c
        return acc

    def mult_tensor_square(self, xy: dict, zw: dict) -> dict:
        """(x (x) y) * (z (x) w) on pair dicts, with the Koszul sign."""
        par = self.space.parity
        out = {}
        for (a, b), c1 in xy.items():
            for (c, d), c2 in zw.items():
                sign = -1 if (par[b] and par[c]) else 1
                coeff = c1 * c2 if sign > 0 else -(c1 * c2)
                left = self.multiply({a: self.one()}, {c: self.one()})
                right = self.multiply({b: self.one()}, {d: self.one()})
                for k1, v1 in left.items():
                    for k2, v2 in right.items():
                        key = (k1, k2)
                        w = coeff * v1 * v2
                        v = out.get(key)
                        out[key] = w if v is None else v + w
        return {k: v for k, v in out.items() if v}


def vec_equal(x: dict, y: dict) -> bool:
    keys = set(x) | set(y)
    for k in keys:
        a, b = x.get(k), y.get(k)
        if a is None:
            if b:
                return False
        elif b is None:
            if a:
                return False
        elif a != b:
            return False
    return True


@dataclass
class AxiomReport:
    """Pass/fail per axiom with the first counterexample for failures."""

    results: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.results.append((name, ok, detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def failing(self) -> list[str]:
        return [name for name, ok, _ in self.results if not ok]

    def __str__(self):
        lines = []
        for name, ok, detail in self.results:
            mark = "pass" if ok else "FAIL"
            line = f"{mark}  {name}"
            if detail and not ok:
                line += f"  ({detail})"
            lines.append(line)
        return "\n".join(lines)


def verify_axioms(h: HopfAlgebraData) -> AxiomReport:
    """Check every Hopf axiom plus the basic derived identities.

    The derived identities (ladder invertibility, eps(unit) = 1, the
    antipode being an anti-endomorphism for both structures and fixing the
    unit and counit) hold in any Hopf object, so a failure localizes a bad
    structure tensor rather than a theory violation.
    """
    rep = AxiomReport()
    d = h.dim
    par = h.space.parity
    one = h.one()

    # evenness / homogeneity of all five tensors
    bad = None
    for (i, j, k), c in h.mult.items():
        if c and (par[i] ^ par[j]) != par[k]:
            bad = f"mult[{i},{j},{k}]"
            break
    if bad is None:
        for (i, j, k), c in h.comult.items():
            if c and par[i] != (par[j] ^ par[k]):
                bad = f"comult[{i},{j},{k}]"
                break
    if bad is None:
        for i, c in h.unit.items():
            if c and par[i]:
                bad = f"unit[{i}]"
                break
    if bad is None:
        for i, c in h.counit.items():
            if c and par[i]:
                bad = f"counit[{i}]"
                break
    if bad is None:
        for (i, j), c in h.antipode.items():
            if c and par[i] != par[j]:
                bad = f"antipode[{i},{j}]"
                break
    rep.add("evenness", bad is None, bad or "")

    # associativity
    bad = None
    for i in range(d):
        if bad:
            break
        for j in range(d):
            ij = h.multiply(h.basis_vec(i), h.basis_vec(j))
            for k in range(d):
                left = h.multiply(ij, h.basis_vec(k))
                right = h.multiply(h.basis_vec(i), h.multiply(h.basis_vec(j), h.basis_vec(k)))
                if not vec_equal(left, right):
                    bad = f"(b{i} b{j}) b{k}"
                    break
            if bad:
                break
    rep.add("associativity", bad is None, bad or "")

    # unit
    bad = None
    u = h.unit_vec()
    for i in range(d):
        b = h.basis_vec(i)
        if not vec_equal(h.multiply(u, b), b) or not vec_equal(h.multiply(b, u), b):
            bad = f"b{i}"
            break
    rep.add("unit", bad is None, bad or "")

    # coassociativity: (Delta (x) id) Delta = (id (x) Delta) Delta
    bad = None
    for i in range(d):
        left = {}
        right = {}
        for (a, b), c in h.comultiply(h.basis_vec(i)).items():
            for (x, y, cc) in h._comult_rows.get(a, ()):
                key = (x, y, b)
                w = c * cc
                left[key] = left.get(key, h.zero()) + w
            for (x, y, cc) in h._comult_rows.get(b, ()):
                key = (a, x, y)
                w = c * cc
                right[key] = right.get(key, h.zero()) + w
        if not vec_equal(left, right):
            bad = f"b{i}"
            break
    rep.add("coassociativity", bad is None, bad or "")

    # counit
    bad = None
    for i in range(d):
        acc_l, acc_r = {}, {}
        for (a, b), c in h.comultiply(h.basis_vec(i)).items():
            e = h.counit.get(a)
            if e:
                acc_l[b] = acc_l.get(b, h.zero()) + c * e
            e = h.counit.get(b)
            if e:
                acc_r[a] = acc_r.get(a, h.zero()) + c * e
        if not vec_equal(acc_l, h.basis_vec(i)) or not vec_equal(acc_r, h.basis_vec(i)):
            bad = f"b{i}"
            break
    rep.add("counit", bad is None, bad or "")

    # bialgebra compatibility
    bad = None
    for i in range(d):
        if bad:
            break
        di = h.comultiply(h.basis_vec(i))
        for j in range(d):
            lhs = h.comultiply(h.multiply(h.basis_vec(i), h.basis_vec(j)))
            rhs = h.mult_tensor_square(di, h.comultiply(h.basis_vec(j)))
            if not vec_equal(lhs, rhs):
                bad = f"Delta(b{i} b{j})"
                break
    if bad is None:
        if not vec_equal(h.comultiply(u), {(a, b): ca * cb for a, ca in u.items() for b, cb in u.items()}):
            bad = "Delta(1)"
    if bad is None:
        for i in range(d):
            for j in range(d):
                lhs = h.counit_of(h.multiply(h.basis_vec(i), h.basis_vec(j)))
                rhs = (h.counit.get(i, h.zero())) * (h.counit.get(j, h.zero()))
                if lhs != rhs:
                    bad = f"eps(b{i} b{j})"
                    break
            if bad:
                break
    rep.add("bialgebra", bad is None, bad or "")

    # eps(unit) = 1
    rep.add("counit_of_unit", h.counit_of(u) == one, "eps(1) != 1")

    # antipode axiom: both convolution sides equal unit . counit
    bad = None
    for i in range(d):
        acc_l, acc_r = {}, {}
        for (a, b), c in h.comultiply(h.basis_vec(i)).items():
            for (x, cs) in h._antipode_rows.get(a, ()):
                for k, v in h.multiply({x: one}, {b: one}).items():
                    acc_l[k] = acc_l.get(k, h.zero()) + c * cs * v
            for (x, cs) in h._antipode_rows.get(b, ()):
                for k, v in h.multiply({a: one}, {x: one}).items():
                    acc_r[k] = acc_r.get(k, h.zero()) + c * cs * v
        target = {k: h.counit.get(i, h.zero()) * v for k, v in u.items()}
        if not vec_equal(acc_l, target) or not vec_equal(acc_r, target):
            bad = f"b{i}"
            break
    rep.add("antipode", bad is None, bad or "")

    # ladder invertibility: (x,y) -> (x y1, y2) has inverse (x,y) -> (x S(y1), y2)
    bad = None
    for i in range(d):
        if bad:
            break
        for j in range(d):
            v = {(i, j): one}
            fwd = _ladder(h, v, twist=False)
            back = _ladder(h, fwd, twist=True)
            if not vec_equal(back, v):
                bad = f"(b{i}, b{j})"
                break
    rep.add("ladder_invertibility", bad is None, bad or "")

    # antipode is an anti-endomorphism for both structures (with signs)
    bad = None
    for i in range(d):
        if bad:
            break
        for j in range(d):
            lhs = h.apply_antipode(h.multiply(h.basis_vec(i), h.basis_vec(j)))
            rhs = h.multiply(h.apply_antipode(h.basis_vec(j)), h.apply_antipode(h.basis_vec(i)))
            if par[i] and par[j]:
                rhs = {k: -v for k, v in rhs.items()}
            if not vec_equal(lhs, rhs):
                bad = f"S(b{i} b{j})"
                break
    if bad is None:
        for i in range(d):
            lhs = h.comultiply(h.apply_antipode(h.basis_vec(i)))
            rhs = {}
            for (a, b), c in h.comultiply(h.basis_vec(i)).items():
                sa, sb = h.apply_antipode({a: one}), h.apply_antipode({b: one})
                sign = -1 if (par[a] and par[b]) else 1
                for x, vx in sb.items():
                    for y, vy in sa.items():
                        key = (x, y)
                        w = c * vx * vy
                        if sign < 0:
                            w = -w
                        rhs[key] = rhs.get(key, h.zero()) + w
            if not vec_equal(lhs, rhs):
                bad = f"Delta(S(b{i}))"
                break
    rep.add("antipode_antihomomorphism", bad is None, bad or "")

    # S fixes unit and counit
    ok = vec_equal(h.apply_antipode(u), u)
    if ok:
        for i in range(d):
            if h.counit_of(h.apply_antipode(h.basis_vec(i))) != h.counit.get(i, h.zero()):
                ok = False
                break
    rep.add("antipode_fixes_unit_counit", ok, "" if ok else "S breaks unit or counit")

    return rep


def _ladder(h: HopfAlgebraData, pair_vec: dict, twist: bool) -> dict:
    """(x, y) -> (x y1 (x) y2), with y1 antipoded when twist is set."""
    one = h.one()
    out = {}
    for (i, j), c in pair_vec.items():
        for (a, b, cc) in h._comult_rows.get(j, ()):
            first = {a: one}
            if twist:
                first = h.apply_antipode(first)
            prod = h.multiply({i: one}, first)
            for k, v in prod.items():
                key = (k, b)
                w = c * cc * v
                out[key] = out.get(key, h.zero()) + w
    return {k: v for k, v in out.items() if v}


# -- algebra files -----------------------------------------------------


def algebra_to_json(h: HopfAlgebraData) -> dict:
    def s(c: Cyclo) -> str:
        return c.to_string()

    return {
        "name": h.name,
        "dim": h.dim,
        "cyclotomic_order": h.order,
        "parity": list(h.space.parity),
        "basis": list(h.basis_labels),
        "mult": [[i, j, k, s(c)] for (i, j, k), c in sorted(h.mult.items())],
        "comult": [[i, j, k, s(c)] for (i, j, k), c in sorted(h.comult.items())],
        "unit": [[i, s(c)] for i, c in sorted(h.unit.items())],
        "counit": [[i, s(c)] for i, c in sorted(h.counit.items())],
        "antipode": [[i, j, s(c)] for (i, j), c in sorted(h.antipode.items())],
    }


def algebra_from_json(data: dict, verify: bool = True) -> HopfAlgebraData:
    order = int(data.get("cyclotomic_order", 1))
    dim = int(data["dim"])
    parity = tuple(int(p) for p in data.get("parity", [0] * dim))
    space = GradedSpace(dim, parity)
    fd = FieldDescriptor(order)

    def c(txt) -> Cyclo:
        return Cyclo.parse(order, txt)

    h = HopfAlgebraData(
        name=data.get("name", "algebra"),
        field=fd,
        space=space,
        mult={(int(i), int(j), int(k)): c(v) for i, j, k, v in data.get("mult", [])},
        comult={(int(i), int(j), int(k)): c(v) for i, j, k, v in data.get("comult", [])},
        unit={int(i): c(v) for i, v in data.get("unit", [])},
        counit={int(i): c(v) for i, v in data.get("counit", [])},
        antipode={(int(i), int(j)): c(v) for i, j, v in data.get("antipode", [])},
        basis_labels=data.get("basis"),
    )
    if verify:
        rep = verify_axioms(h)
        if not rep.ok:
            print(str(rep), file=sys.stderr)
            raise InvalidAlgebraFile(rep)
    return h


def save_algebra(h: HopfAlgebraData, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(algebra_to_json(h), f, indent=1)
        f.write("\n")


def load_algebra(path, verify: bool = True) -> HopfAlgebraData:
    with open(path, "r", encoding="utf-8") as f:
        return algebra_from_json(json.load(f), verify=verify)
