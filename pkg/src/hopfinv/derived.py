"""Derived structure of a verified Hopf algebra.

From the five structure tensors this module derives, exactly:

* the right integral mu_R and right cointegral e_R (each the unique
  solution of a linear system, up to scale), normalized so mu_R(e_R) = 1;
* the distinguished group-likes: the phase element a and its dual alpha,
  with q = alpha(a);
* the left pair mu_L, e_L through the half-integer-indexed family
  mu_n, e_n, normalized so that mu_L(e_L) = 1/q;
* the antipode inverse, the tilt T = S^2 . Ad_{a^-1}, and the Nakayama
  twist N with mu_R(x y) = mu_R(y N(x)), computed from the Gram matrix
  of mu_R;
* the sign sigma = (-1)**parity(e_R) governing odd integral bookkeeping.

Every identity the derivation relies on is re-verified on the concrete
data (Radford's S^4 formula, the eigenvalue-q action of S^2 on all four
integrals, the quasi-trace property, tilt being a bialgebra automorphism
fixing the integrals).  A failure means the input was not a Hopf algebra
or a convention constant is wrong, and raises immediately.

Side conventions that the source material leaves to pictures (which slot
of the coproduct absorbs powers of alpha, which side multiplies powers of
a, whether a is read off directly or through the antipode) are captured
in AlgebraConventions.  The shipped default is the unique assignment that
survives calibration against all test algebras; see calibration.py.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactfield import Cyclo
from .hopf import HopfAlgebraData, vec_equal
from . import linalg


class DerivationError(ValueError):
    pass


class DegenerateIntegralSpace(DerivationError):
    pass


class NormalizationImpossible(DerivationError):
    pass


class NonHomogeneousIntegral(DerivationError):
    pass


class NotGrouplike(DerivationError):
    pass


class SingularGramMatrix(DerivationError):
    pass


class TiltNotAutomorphism(DerivationError):
    pass


class ConventionViolation(DerivationError):
    pass


@dataclass(frozen=True)
class AlgebraConventions:
    """Resolved side/inverse choices for the integral machinery.

    a_from_antipode: the group-like read off from (mu_R (x) id) Delta is
        a^-1 rather than a, so apply S to it.
    mu_side / mu_exp: mu_n(x) = mu_R(a**(mu_exp*s) * x) for side "left",
        or mu_R(x * a**(mu_exp*s)) for side "right", where s = n + 1/2.
    e_slot / e_exp: e_n = (id (x) alpha**(e_exp*s))(Delta(e_R)) for slot
        "second", or the mirrored first-slot version.
    """

    a_from_antipode: bool = True
    mu_side: str = "left"
    mu_exp: int = -1
    e_slot: str = "second"
    e_exp: int = 1

    def key(self):
        return (self.a_from_antipode, self.mu_side, self.mu_exp, self.e_slot, self.e_exp)


DEFAULT_CONVENTIONS = AlgebraConventions()


def _solve_unique_kernel(rows, dim: int, order: int, what: str):
    """Solve a homogeneous system whose kernel must be exactly 1-dimensional.

    rows is an iterable of sparse dicts.  Once the rank reaches dim-1 the
    kernel candidate is extracted and the remaining rows only verified
    against it, which keeps large systems cheap.
    """
    solver = linalg.KernelSolver(order, dim)
    pending = iter(rows)
    candidate = None
    for row in pending:
        if not row:
            continue
        if candidate is not None:
            if solver.satisfies(row, candidate):
                continue
            raise DegenerateIntegralSpace(f"{what}: solution space is 0-dimensional")
        solver.add_row(row)
        if solver.rank == dim:
            raise DegenerateIntegralSpace(f"{what}: solution space is 0-dimensional")
        if solver.rank == dim - 1:
            candidate = solver.kernel_basis()[0]
    if candidate is None:
        k = solver.kernel_basis()
        if len(k) != 1:
            raise DegenerateIntegralSpace(
                f"{what}: solution space is {len(k)}-dimensional"
            )
        candidate = k[0]
    return candidate


def _scale_first_nonzero(vec):
    for c in vec:
        if c:
            inv = c.inv()
            return tuple(x * inv for x in vec)
    raise DegenerateIntegralSpace("kernel vector is zero")


def right_cointegral_rows(h: HopfAlgebraData):
    """Equations of e * b_j = eps(b_j) e, one row per output slot (j, k)."""
    rows: dict[tuple, dict] = {}
    for (i, j, k), c in h.mult.items():
        rows.setdefault((j, k), {})[i] = rows.get((j, k), {}).get(i, h.zero()) + c
    for j, e in h.counit.items():
        if e:
            for k in range(h.dim):
                row = rows.setdefault((j, k), {})
                row[k] = row.get(k, h.zero()) - e
    return rows.values()


def left_cointegral_rows(h: HopfAlgebraData):
    rows: dict[tuple, dict] = {}
    for (j, i, k), c in h.mult.items():
        rows.setdefault((j, k), {})[i] = rows.get((j, k), {}).get(i, h.zero()) + c
    for j, e in h.counit.items():
        if e:
            for k in range(h.dim):
                row = rows.setdefault((j, k), {})
                row[k] = row.get(k, h.zero()) - e
    return rows.values()


def right_integral_rows(h: HopfAlgebraData):
    """Equations of (id (x) lam)(Delta(b_i)) = lam(b_i) * unit."""
    rows: dict[tuple, dict] = {}
    for (i, a, j), c in h.comult.items():
        rows.setdefault((i, a), {})[j] = rows.get((i, a), {}).get(j, h.zero()) + c
    for a, u in h.unit.items():
        if u:
            for i in range(h.dim):
                row = rows.setdefault((i, a), {})
                row[i] = row.get(i, h.zero()) - u
    return rows.values()


def left_integral_rows(h: HopfAlgebraData):
    rows: dict[tuple, dict] = {}
    for (i, j, a), c in h.comult.items():
        rows.setdefault((i, a), {})[j] = rows.get((i, a), {}).get(j, h.zero()) + c
    for a, u in h.unit.items():
        if u:
            for i in range(h.dim):
                row = rows.setdefault((i, a), {})
                row[i] = row.get(i, h.zero()) - u
    return rows.values()


def solve_right_cointegral(h: HopfAlgebraData):
    vec = _solve_unique_kernel(right_cointegral_rows(h), h.dim, h.order, "right cointegral")
    vec = _scale_first_nonzero(vec)
    par = {h.space.parity[i] for i, c in enumerate(vec) if c}
    if len(par) != 1:
        raise NonHomogeneousIntegral("right cointegral is not parity-homogeneous")
    return vec


def solve_right_integral(h: HopfAlgebraData):
    vec = _solve_unique_kernel(right_integral_rows(h), h.dim, h.order, "right integral")
    return _scale_first_nonzero(vec)


def solve_left_cointegral(h: HopfAlgebraData):
    vec = _solve_unique_kernel(left_cointegral_rows(h), h.dim, h.order, "left cointegral")
    return _scale_first_nonzero(vec)


def solve_left_integral(h: HopfAlgebraData):
    vec = _solve_unique_kernel(left_integral_rows(h), h.dim, h.order, "left integral")
    return _scale_first_nonzero(vec)


def is_left_integral(h: HopfAlgebraData, cov) -> bool:
    for row in left_integral_rows(h):
        acc = h.zero()
        for j, c in row.items():
            if cov[j]:
                acc = acc + c * cov[j]
        if acc:
            return False
    return True


def is_left_cointegral(h: HopfAlgebraData, vec) -> bool:
    for row in left_cointegral_rows(h):
        acc = h.zero()
        for j, c in row.items():
            if vec[j]:
                acc = acc + c * vec[j]
        if acc:
            return False
    return True


# -- small dense helpers -------------------------------------------------


def dense(h: HopfAlgebraData, sparse: dict):
    out = [h.zero()] * h.dim
    for i, c in sparse.items():
        out[i] = out[i] + c
    return tuple(out)


def sparse(vec) -> dict:
    return {i: c for i, c in enumerate(vec) if c}


def pair(cov, vec) -> Cyclo:
    acc = None
    for a, b in zip(cov, vec):
        if a and b:
            acc = a * b if acc is None else acc + a * b
    if acc is None:
        return cov[0] - cov[0]
    return acc


def left_mult_matrix(h: HopfAlgebraData, vec):
    """Row-convention matrix of x -> v * x."""
    rows = []
    for i in range(h.dim):
        rows.append(dense(h, h.multiply(sparse(vec), h.basis_vec(i))))
    return tuple(rows)


def right_mult_matrix(h: HopfAlgebraData, vec):
    rows = []
    for i in range(h.dim):
        rows.append(dense(h, h.multiply(h.basis_vec(i), sparse(vec))))
    return tuple(rows)


def antipode_matrix(h: HopfAlgebraData):
    z = h.zero()
    rows = [[z] * h.dim for _ in range(h.dim)]
    for (i, j), c in h.antipode.items():
        rows[i][j] = rows[i][j] + c
    return tuple(tuple(r) for r in rows)


def convolve_characters(h: HopfAlgebraData, phi, psi):
    """(phi * psi)(x) = sum phi(x1) psi(x2) for even characters."""
    out = [h.zero()] * h.dim
    for (i, a, b), c in h.comult.items():
        if phi[a] and psi[b]:
            out[i] = out[i] + c * phi[a] * psi[b]
    return tuple(out)


def character_power(h: HopfAlgebraData, alpha, s: int):
    eps = dense(h, dict(h.counit))
    if s == 0:
        return eps
    base = alpha if s > 0 else linalg.precompose_covector(antipode_matrix(h), alpha)
    out = eps
    for _ in range(abs(s)):
        out = convolve_characters(h, out, base)
    return out


def grouplike_power(h: HopfAlgebraData, a, s: int):
    one = dense(h, h.unit_vec())
    if s == 0:
        return one
    base = sparse(a)
    if s < 0:
        base = h.apply_antipode(base)
    out = h.unit_vec()
    for _ in range(abs(s)):
        out = h.multiply(out, base)
    return dense(h, out)


def is_grouplike(h: HopfAlgebraData, vec) -> bool:
    target = {}
    for i, a in enumerate(vec):
        if not a:
            continue
        for j, b in enumerate(vec):
            if b:
                target[(i, j)] = a * b
    if not vec_equal(h.comultiply(sparse(vec)), target):
        return False
    return h.counit_of(sparse(vec)) == h.one()


def is_character(h: HopfAlgebraData, cov) -> bool:
    for (i, j), rows in h._mult_rows.items():
        acc = h.zero()
        for (_, _, k), c in rows:
            if cov[k]:
                acc = acc + c * cov[k]
        if acc != cov[i] * cov[j]:
            return False
    u = h.unit_vec()
    acc = h.zero()
    for i, c in u.items():
        if cov[i]:
            acc = acc + c * cov[i]
    return acc == h.one()


# -- the derived structure -----------------------------------------------


@dataclass
class DerivedStructure:
    h: HopfAlgebraData
    conventions: AlgebraConventions
    mu_R: tuple
    e_R: tuple
    mu_L: tuple
    e_L: tuple
    a: tuple
    alpha: tuple
    q: Cyclo
    sigma: int
    s_mat: tuple
    s_inv: tuple
    tilt: tuple
    nakayama: tuple

    @property
    def q_inv(self) -> Cyclo:
        return self.q.inv()

    @property
    def integral_parity(self) -> int:
        return 0 if self.sigma == 1 else 1

    def is_balanced(self) -> bool:
        return self.tilt == linalg.identity_matrix(self.h.order, self.h.dim)

    def is_involutory(self) -> bool:
        s2 = linalg.mat_mul(self.s_mat, self.s_mat)
        return s2 == linalg.identity_matrix(self.h.order, self.h.dim)

    def antipode_power(self, m: int):
        """Matrix of S**m, negative powers through the inverse."""
        h = self.h
        cache = h._derived_cache.setdefault("s_powers", {})
        if m not in cache:
            base = self.s_mat if m >= 0 else self.s_inv
            cache[m] = linalg.mat_pow(base, abs(m))
        return cache[m]

    def tilt_power(self, m: int):
        h = self.h
        cache = h._derived_cache.setdefault("t_powers", {})
        if m not in cache:
            if m >= 0:
                cache[m] = linalg.mat_pow(self.tilt, m)
            else:
                inv = linalg.invert_matrix(self.tilt)
                if inv is None:
                    raise TiltNotAutomorphism("tilt is singular")
                cache[m] = linalg.mat_pow(inv, -m)
        return cache[m]

    # -- integral family -----------------------------------------------

    def integral_family(self, n2: int):
        """(mu_n, e_n) for half-integer n with n2 = 2n (n2 must be odd).

        mu_{-1/2} = mu_R, mu_{1/2} = mu_L and likewise for e; the family
        satisfies mu_L(e_L) = 1/q under this normalization.
        """
        if n2 % 2 == 0:
            raise ConventionViolation("family index n2 = 2n must be odd")
        h = self.h
        cache = h._derived_cache.setdefault("family", {})
        if n2 not in cache:
            conv = self.conventions
            s = (n2 + 1) // 2
            apow = grouplike_power(h, self.a, conv.mu_exp * s)
            if conv.mu_side == "left":
                m = left_mult_matrix(h, apow)
            else:
                m = right_mult_matrix(h, apow)
            mu_n = linalg.precompose_covector(m, self.mu_R)
            alph = character_power(h, self.alpha, conv.e_exp * s)
            e_n = [h.zero()] * h.dim
            for (i, jj, kk), c in h.comult.items():
                if not self.e_R[i]:
                    continue
                if conv.e_slot == "second":
                    if alph[kk]:
                        e_n[jj] = e_n[jj] + self.e_R[i] * c * alph[kk]
                else:
                    if alph[jj]:
                        e_n[kk] = e_n[kk] + self.e_R[i] * c * alph[jj]
            cache[n2] = (mu_n, tuple(e_n))
        return cache[n2]

    def mu_eval(self, n2: int):
        """mu_n rescaled so that mu_eval(n)(e_R) = 1 for every n.

        This is the normalization under which a once-crossing isolated
        circle pair contributes exactly 1 and a degree shift contributes
        exactly q.
        """
        s = (n2 + 1) // 2
        mu_n, _ = self.integral_family(n2)
        c = self.q ** s
        return tuple(x * c for x in mu_n)

    def e_eval(self, n2: int):
        s = (n2 + 1) // 2
        _, e_n = self.integral_family(n2)
        c = self.q ** s
        return tuple(x * c for x in e_n)

    def grouplike_order(self) -> int:
        """Multiplicative order of the phase element a."""
        h = self.h
        one = dense(h, h.unit_vec())
        cur = self.a
        for k in range(1, 4 * h.dim + 1):
            if cur == one:
                return k
            cur = dense(h, h.multiply(sparse(cur), sparse(self.a)))
        raise NotGrouplike("phase element has unreasonably large order")


def trace_s_power(h: HopfAlgebraData, m: int) -> Cyclo:
    """Graded trace of S**m."""
    der = derive_all(h)
    mat = der.antipode_power(m)
    acc = h.zero()
    for i in range(h.dim):
        c = mat[i][i]
        if c:
            acc = acc - c if h.space.parity[i] else acc + c
    return acc


def derive_all(h: HopfAlgebraData, conventions: AlgebraConventions = DEFAULT_CONVENTIONS,
               verify: bool = True) -> DerivedStructure:
    """Derive and verify the full intrinsic structure; results are cached."""
    if h._derived_cache is None:
        setattr(h, "_derived_cache", {})
    key = ("derived", conventions.key(), verify)
    cached = h._derived_cache.get(key)
    if cached is not None:
        return cached
    der = _derive(h, conventions, verify)
    h._derived_cache[key] = der
    return der


def apply_rows_sparse(mat, vec: dict, order: int) -> dict:
    """Image of a sparse vector under a row-convention matrix, sparsely."""
    out: dict = {}
    for i, c in vec.items():
        if not c:
            continue
        row = mat[i]
        for j, m in enumerate(row):
            if m:
                w = c * m
                v = out.get(j)
                out[j] = w if v is None else v + w
    return {k: v for k, v in out.items() if v}


def _derive(h: HopfAlgebraData, conv: AlgebraConventions, verify: bool) -> DerivedStructure:
    d = h.dim

    e_r = solve_right_cointegral(h)
    mu_r = solve_right_integral(h)
    c = pair(mu_r, e_r)
    if not c:
        raise NormalizationImpossible("mu_R(e_R) = 0")
    ci = c.inv()
    mu_r = tuple(x * ci for x in mu_r)

    # phase element: (mu_R (x) id)(Delta(x)) = mu_R(x) a_raw for all x
    a_raw = [h.zero()] * d
    x0 = next(i for i in range(d) if mu_r[i])
    for (i, aa, bb), cc in h.comult.items():
        if i == x0 and mu_r[aa]:
            a_raw[bb] = a_raw[bb] + cc * mu_r[aa]
    s = mu_r[x0].inv()
    a_raw = tuple(x * s for x in a_raw)
    if verify:
        for i in range(d):
            got = [h.zero()] * d
            for (ii, aa, bb), cc in h.comult.items():
                if ii == i and mu_r[aa]:
                    got[bb] = got[bb] + cc * mu_r[aa]
            want = tuple(mu_r[i] * x for x in a_raw)
            if tuple(got) != want:
                raise NotGrouplike("phase element equation fails; convention error")
    a_vec = dense(h, h.apply_antipode(sparse(a_raw))) if conv.a_from_antipode else a_raw
    if not is_grouplike(h, a_vec):
        raise NotGrouplike("phase element is not group-like")

    # dual phase element: x e_R = alpha(x) e_R
    ref = next(i for i in range(d) if e_r[i])
    alpha = [h.zero()] * d
    for i in range(d):
        v = dense(h, h.multiply(h.basis_vec(i), sparse(e_r)))
        lam = v[ref] * e_r[ref].inv()
        if tuple(x * lam for x in e_r) != v:
            raise NotGrouplike(f"left action of b{i} does not scale e_R")
        alpha[i] = lam
    alpha = tuple(alpha)
    if not is_character(h, alpha):
        raise NotGrouplike("dual phase element is not an algebra character")

    q = pair(alpha, a_vec)
    if not q:
        raise NotGrouplike("q = alpha(a) vanishes")

    sigma = -1 if h.space.parity[ref] else 1

    s_mat = antipode_matrix(h)
    s_inv = linalg.invert_matrix(s_mat)
    if s_inv is None:
        raise DerivationError("antipode matrix is singular")

    a_inv = dense(h, h.apply_antipode(sparse(a_vec)))
    ad_a_inv = _conjugation_matrix(h, a_inv)
    s2 = linalg.mat_mul(s_mat, s_mat)
    tilt = linalg.mat_mul(ad_a_inv, s2)  # x -> S^2(a^-1 x a), row convention

    z = h.zero()
    gram_rows = [[z] * d for _ in range(d)]
    for (i, j, k), c in h.mult.items():
        if mu_r[k]:
            gram_rows[i][j] = gram_rows[i][j] + c * mu_r[k]
    gram = tuple(tuple(r) for r in gram_rows)
    gram_t = tuple(tuple(gram[j][i] for j in range(d)) for i in range(d))
    gram_t_inv = linalg.invert_matrix(gram_t)
    if gram_t_inv is None:
        raise SingularGramMatrix("Gram matrix of mu_R is singular")
    nakayama = linalg.mat_mul(gram, gram_t_inv)

    der = DerivedStructure(
        h=h, conventions=conv, mu_R=mu_r, e_R=e_r, mu_L=(), e_L=(),
        a=a_vec, alpha=alpha, q=q, sigma=sigma, s_mat=s_mat, s_inv=s_inv,
        tilt=tilt, nakayama=nakayama,
    )
    mu_l, e_l = der.integral_family(1)
    der.mu_L = mu_l
    der.e_L = e_l

    if verify:
        _verify_derivation(h, der)
    return der


def _conjugation_matrix(h: HopfAlgebraData, g_inv):
    """Row matrix of x -> g_inv x g where g is the antipode-inverse of g_inv."""
    g = dense(h, h.apply_antipode(sparse(g_inv)))
    rows = []
    for i in range(h.dim):
        v = h.multiply(sparse(g_inv), h.basis_vec(i))
        v = h.multiply(v, sparse(g))
        rows.append(dense(h, v))
    return tuple(rows)


def ad_alpha_star_matrix(h: HopfAlgebraData, alpha):
    """Row matrix of x -> sum alpha(x1) x2 alpha^{-1}(x3)."""
    alpha_inv = linalg.precompose_covector(antipode_matrix(h), alpha)
    d = h.dim
    rows = [[h.zero()] * d for _ in range(d)]
    for (i, aa, bb), c1 in h.comult.items():
        if not alpha[aa]:
            continue
        for (mid, cc, c2) in h._comult_rows.get(bb, ()):
            if alpha_inv[cc]:
                rows[i][mid] = rows[i][mid] + c1 * c2 * alpha[aa] * alpha_inv[cc]
    return tuple(tuple(r) for r in rows)


def _verify_derivation(h: HopfAlgebraData, der: DerivedStructure) -> None:
    d = h.dim
    ident = linalg.identity_matrix(h.order, d)
    q = der.q

    # left pair really solves the left systems, with the stated pairing
    if not is_left_integral(h, der.mu_L):
        raise ConventionViolation("mu_{1/2} is not a left integral")
    if not is_left_cointegral(h, der.e_L):
        raise ConventionViolation("e_{1/2} is not a left cointegral")
    if pair(der.mu_L, der.e_L) != q.inv():
        raise ConventionViolation("mu_L(e_L) != 1/q")
    if pair(der.mu_R, der.e_R) != h.one():
        raise ConventionViolation("mu_R(e_R) != 1")

    # endpoints of the family
    mu_m, e_m = der.integral_family(-1)
    if mu_m != der.mu_R or e_m != der.e_R:
        raise ConventionViolation("family endpoints do not reproduce mu_R, e_R")

    # S S' = S' S = id
    if linalg.mat_mul(der.s_mat, der.s_inv) != ident:
        raise DerivationError("antipode inverse is wrong")
    if linalg.mat_mul(der.s_inv, der.s_mat) != ident:
        raise DerivationError("antipode inverse is wrong")

    # S^2 eigenvalue law on all four integrals
    s2 = der.antipode_power(2)
    if linalg.apply_row_matrix(s2, der.e_R) != tuple(q * x for x in der.e_R):
        raise DerivationError("S^2(e_R) != q e_R")
    if linalg.apply_row_matrix(s2, der.e_L) != tuple(q * x for x in der.e_L):
        raise DerivationError("S^2(e_L) != q e_L")
    if linalg.precompose_covector(s2, der.mu_R) != tuple(q * x for x in der.mu_R):
        raise DerivationError("mu_R . S^2 != q mu_R")
    if linalg.precompose_covector(s2, der.mu_L) != tuple(q * x for x in der.mu_L):
        raise DerivationError("mu_L . S^2 != q mu_L")

    # Radford: Ad_alpha* after Ad_a equals S^4
    ad_a = _conjugation_matrix(h, der.a)  # x -> a x a^-1 needs g_inv = a^-1...
    # _conjugation_matrix(g_inv) maps x -> g_inv x g; for Ad_a(x) = a x a^-1
    # feed g_inv = a.
    ad_alpha = ad_alpha_star_matrix(h, der.alpha)
    lhs = linalg.mat_mul(ad_a, ad_alpha)  # first Ad_a, then Ad_alpha*
    if lhs != der.antipode_power(4):
        raise DerivationError("Radford identity Ad_alpha* . Ad_a = S^4 fails")

    # alpha^n(a^k) = q^(n k)
    for n in range(-2, 3):
        an = character_power(h, der.alpha, n)
        for k in range(-2, 3):
            ak = grouplike_power(h, der.a, k)
            if pair(an, ak) != q ** (n * k):
                raise DerivationError(f"alpha^{n}(a^{k}) != q^{n * k}")

    # tilt: bialgebra automorphism fixing integrals, commuting with S^2
    t = der.tilt
    if linalg.mat_mul(t, s2) != linalg.mat_mul(s2, t):
        raise TiltNotAutomorphism("tilt does not commute with S^2")
    if apply_rows_sparse(t, h.unit_vec(), h.order) != h.unit_vec():
        raise TiltNotAutomorphism("tilt moves the unit")
    if linalg.precompose_covector(t, dense(h, dict(h.counit))) != dense(h, dict(h.counit)):
        raise TiltNotAutomorphism("tilt moves the counit")
    t_rows = [sparse(t[i]) for i in range(d)]
    if not _is_algebra_map(h, t_rows):
        raise TiltNotAutomorphism("tilt breaks multiplication")
    if not _is_coalgebra_map(h, t_rows):
        raise TiltNotAutomorphism("tilt breaks comultiplication")
    for vec in (der.e_R, der.e_L):
        if tuple(dense(h, apply_rows_sparse(t, sparse(vec), h.order))) != vec:
            raise TiltNotAutomorphism("tilt moves a cointegral")
    for cov in (der.mu_R, der.mu_L):
        if linalg.precompose_covector(t, cov) != cov:
            raise TiltNotAutomorphism("tilt moves an integral")

    # Nakayama: quasi-trace identity and automorphism property
    n_mat = der.nakayama
    n_rows = [sparse(n_mat[i]) for i in range(d)]
    for i in range(d):
        for j in range(d):
            lhs_s = h.zero()
            for (_, _, k), c in h._mult_rows.get((i, j), ()):
                if der.mu_R[k]:
                    lhs_s = lhs_s + c * der.mu_R[k]
            rhs_s = h.zero()
            for m, cm in n_rows[i].items():
                for (_, _, k), c in h._mult_rows.get((j, m), ()):
                    if der.mu_R[k]:
                        rhs_s = rhs_s + cm * c * der.mu_R[k]
            if lhs_s != rhs_s:
                raise DerivationError(f"quasi-trace identity fails at ({i},{j})")
    if not _is_algebra_map(h, n_rows):
        raise DerivationError("Nakayama twist is not an algebra map")

    # sigma bookkeeping
    if all(p == 0 for p in h.space.parity) and der.sigma != 1:
        raise DerivationError("sigma must be +1 for trivial grading")
