"""Finitely generated free Lambda-chain complexes and their maps.

Conventions, fixed once for the whole library:

* A morphism of free left Lambda-modules is stored as a matrix of shape
  (target rank x source rank); column j holds the coefficients of the image
  of source basis element j.
* Coefficients multiply module elements from the left, so applying a matrix
  to a coefficient vector reads (M x)_i = sum_j x_j * M[i][j], with the ring
  product in exactly that order, and the matrix of a composite g.f is
  compose(M_g, M_f)[k][j] = sum_i M_f[i][j] * M_g[k][i].  Over a commutative
  group ring this is the ordinary product; over a noncommutative one the
  order matters and this is the one that makes d.d = 0 hold for cellular
  complexes of universal covers.
* Boundary matrices are indexed by their source degree: boundary[d] maps
  degree d to degree d-1.
* Cohomological degree k is stored as homological degree -k; the dual of a
  complex is its degree-negated bar-conjugate transpose.
* A chain map of shift n satisfies d.f = (-1)^n f.d degreewise.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import GroupModel, RingElem
from .intlinalg import IntMatrix, LinearSolver, homology_at


class ChainError(ValueError):
    """Raised for malformed complexes, maps, or mismatched models."""


# ---------------------------------------------------------------------------
# Matrices over the group ring


class LambdaMatrix:
    __slots__ = ("model", "rows", "cols", "data")

    def __init__(self, model: GroupModel, rows: int, cols: int, data=None):
        self.model = model
        self.rows = rows
        self.cols = cols
        if data is None:
            data = [[model.zero() for _ in range(cols)] for _ in range(rows)]
        self.data = data

    @classmethod
    def zero(cls, model, rows, cols):
        return cls(model, rows, cols)

    @classmethod
    def identity(cls, model, n):
        m = cls(model, n, n)
        for i in range(n):
            m.data[i][i] = model.one()
        return m

    @classmethod
    def from_rows(cls, model, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        for r in rows_list:
            if len(r) != cols:
                raise ChainError("ragged matrix")
        return cls(model, rows, cols, [list(r) for r in rows_list])

    @classmethod
    def from_int_rows(cls, model, rows_list):
        return cls.from_rows(model, [[model.from_int(x) for x in row]
                                     for row in rows_list])

    def copy(self):
        return LambdaMatrix(self.model, self.rows, self.cols,
                            [row[:] for row in self.data])

    def column(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self):
        return all(e.is_zero() for row in self.data for e in row)

    def __eq__(self, other):
        return (isinstance(other, LambdaMatrix) and other.model == self.model
                and other.rows == self.rows and other.cols == self.cols
                and other.data == self.data)

    def __add__(self, other):
        if (other.rows, other.cols) != (self.rows, self.cols):
            raise ChainError("shape mismatch")
        return LambdaMatrix(self.model, self.rows, self.cols,
                            [[a + b for a, b in zip(r1, r2)]
                             for r1, r2 in zip(self.data, other.data)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c: int):
        return LambdaMatrix(self.model, self.rows, self.cols,
                            [[e * c for e in row] for row in self.data])

    def map_entries(self, fn):
        return LambdaMatrix(self.model, self.rows, self.cols,
                            [[fn(e) for e in row] for row in self.data])

    def bar_transpose(self):
        """Entry (i, j) of the result is bar of entry (j, i)."""
        return LambdaMatrix(self.model, self.cols, self.rows,
                            [[self.data[j][i].bar() for j in range(self.rows)]
                             for i in range(self.cols)])

    def to_int_plain(self) -> IntMatrix:
        """Apply the plain augmentation entrywise."""
        return IntMatrix(self.rows, self.cols,
                         [[e.aug() for e in row] for row in self.data])

    def to_int_signed(self) -> IntMatrix:
        """Apply the omega-twisted augmentation entrywise (Z^omega tensor)."""
        return IntMatrix(self.rows, self.cols,
                         [[e.aug_signed() for e in row] for row in self.data])

    def __repr__(self):
        return f"LambdaMatrix({self.rows}x{self.cols} over {self.model!r})"

    def pretty(self):
        return "[" + ", ".join(
            "[" + ", ".join(str(e) for e in row) + "]" for row in self.data
        ) + "]"


def compose(outer: LambdaMatrix, inner: LambdaMatrix) -> LambdaMatrix:
    """Matrix of the composite module map outer . inner."""
    if outer.model != inner.model:
        raise ChainError("model mismatch")
    if outer.cols != inner.rows:
        raise ChainError("shape mismatch in composition")
    model = outer.model
    out = LambdaMatrix(model, outer.rows, inner.cols)
    for k in range(outer.rows):
        for j in range(inner.cols):
            acc = model.zero()
            for i in range(outer.cols):
                e = inner.data[i][j]
                if not e.is_zero():
                    acc = acc + e * outer.data[k][i]
            out.data[k][j] = acc
    return out


def matmul(a: LambdaMatrix, b: LambdaMatrix) -> LambdaMatrix:
    """Plain ring product of matrices, entries multiplied in written order."""
    if a.model != b.model:
        raise ChainError("model mismatch")
    if a.cols != b.rows:
        raise ChainError("shape mismatch")
    model = a.model
    out = LambdaMatrix(model, a.rows, b.cols)
    for i in range(a.rows):
        for k in range(b.cols):
            acc = model.zero()
            for j in range(a.cols):
                e = a.data[i][j]
                if not e.is_zero():
                    acc = acc + e * b.data[j][k]
            out.data[i][k] = acc
    return out


def apply_matrix(m: LambdaMatrix, vec):
    """Image coefficients of the chain with coefficient vector vec."""
    if len(vec) != m.cols:
        raise ChainError("shape mismatch")
    model = m.model
    out = []
    for i in range(m.rows):
        acc = model.zero()
        for j in range(m.cols):
            x = vec[j]
            if isinstance(x, int):
                x = model.from_int(x)
            if not x.is_zero():
                acc = acc + x * m.data[i][j]
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# Linearization over finite models


def _finite_order(model: GroupModel):
    if not model.is_finite():
        raise ChainError("linearize: model is not finite")
    return model.ball(0)


def _left_block(model, elems, index, r: RingElem) -> IntMatrix:
    # column j = coordinates of r * g_j
    n = len(elems)
    out = IntMatrix.zero(n, n)
    for g, c in r.support.items():
        for j, gj in enumerate(elems):
            out.data[index[model.mul(g, gj)]][j] += c
    return out


def _right_block(model, elems, index, r: RingElem) -> IntMatrix:
    # column j = coordinates of g_j * r
    n = len(elems)
    out = IntMatrix.zero(n, n)
    for g, c in r.support.items():
        for j, gj in enumerate(elems):
            out.data[index[model.mul(gj, g)]][j] += c
    return out


PLAIN, BAR_LEFT, BAR_RIGHT = "plain", "bar-left", "bar-right"


def linearize(m: LambdaMatrix, twist: str = PLAIN) -> IntMatrix:
    """Expand a Lambda-matrix over a finite model into integer blocks.

    plain: each entry acts by left multiplication (a ring homomorphism on
    matrices, multiplicative for matmul).  bar-left / bar-right precompose
    the entry with the twisted involution and act by left / right
    multiplication, realizing the omega-twisted module structures.
    """
    model = m.model
    elems = _finite_order(model)
    index = {g: i for i, g in enumerate(elems)}
    n = len(elems)
    out = IntMatrix.zero(m.rows * n, m.cols * n)
    for i in range(m.rows):
        for j in range(m.cols):
            e = m.data[i][j]
            if e.is_zero():
                continue
            if twist == PLAIN:
                block = _left_block(model, elems, index, e)
            elif twist == BAR_LEFT:
                block = _left_block(model, elems, index, e.bar())
            elif twist == BAR_RIGHT:
                block = _right_block(model, elems, index, e.bar())
            else:
                raise ChainError(f"unknown twist {twist!r}")
            for r in range(n):
                row = out.data[i * n + r]
                brow = block.data[r]
                for c in range(n):
                    if brow[c]:
                        row[j * n + c] += brow[c]
    return out


def system_block_matrix(m: LambdaMatrix) -> IntMatrix:
    """Integer matrix whose column action mirrors apply_matrix.

    Entry blocks are right-multiplication operators, which is what the
    coefficients-on-the-left convention requires.
    """
    model = m.model
    elems = _finite_order(model)
    index = {g: i for i, g in enumerate(elems)}
    n = len(elems)
    out = IntMatrix.zero(m.rows * n, m.cols * n)
    for i in range(m.rows):
        for j in range(m.cols):
            e = m.data[i][j]
            if e.is_zero():
                continue
            block = _right_block(model, elems, index, e)
            for r in range(n):
                for c in range(n):
                    if block.data[r][c]:
                        out.data[i * n + r][j * n + c] += block.data[r][c]
    return out


def ring_vec_to_int(model, elems, index, vec):
    out = []
    for r in vec:
        coords = [0] * len(elems)
        for g, c in r.support.items():
            coords[index[g]] = c
        out.extend(coords)
    return out


def int_vec_to_ring(model, elems, vec, width):
    n = len(elems)
    out = []
    for j in range(width):
        support = {}
        for k in range(n):
            c = vec[j * n + k]
            if c:
                support[elems[k]] = c
        out.append(RingElem(model, support))
    return out


# ---------------------------------------------------------------------------
# Solving Lambda-linear systems: finite models exactly, infinite models by
# bounded-support search.


class LambdaColumnSolver:
    """Solve apply(M, x) = b repeatedly for a fixed matrix M.

    Finite models get the exact regular-representation system; infinite
    models get unknowns supported on a word-metric ball, so failure only
    means failure at this radius.
    """

    def __init__(self, m: LambdaMatrix, radius: int = 4):
        self.m = m
        self.model = m.model
        self.radius = radius
        if self.model.is_finite():
            self.elems = _finite_order(self.model)
            self.index = {g: i for i, g in enumerate(self.elems)}
            self.solver = LinearSolver(system_block_matrix(m))
            self.exact = True
        else:
            self.exact = False
            self.support = self.model.ball(radius)
            self._build_bounded()

    def _build_bounded(self):
        m, model = self.m, self.model
        support = self.support
        # row index: (i, group element) for every reachable element
        self.row_index = {}
        rows = []
        for i in range(m.rows):
            reach = set()
            for j in range(m.cols):
                for w in m.data[i][j].support:
                    for g in support:
                        reach.add(model.mul(g, w))
            for h in sorted(reach, key=model.sort_key):
                self.row_index[(i, h)] = len(rows)
                rows.append((i, h))
        self.rows_list = rows
        ncols = m.cols * len(support)
        mat = IntMatrix.zero(len(rows), ncols)
        for j in range(m.cols):
            for gi, g in enumerate(support):
                col = j * len(support) + gi
                for i in range(m.rows):
                    e = m.data[i][j]
                    for w, c in e.support.items():
                        r = self.row_index.get((i, model.mul(g, w)))
                        if r is not None:
                            mat.data[r][col] += c
            # zero columns are fine; LinearSolver handles them
        self.solver = LinearSolver(mat)

    def solve(self, b):
        """b: list of RingElem of length m.rows -> list of RingElem or None."""
        if self.exact:
            bi = ring_vec_to_int(self.model, self.elems, self.index, b)
            x = self.solver.solve(bi)
            if x is None:
                return None
            return int_vec_to_ring(self.model, self.elems, x, self.m.cols)
        rhs = [0] * len(self.rows_list)
        for i, r in enumerate(b):
            for h, c in r.support.items():
                idx = self.row_index.get((i, h))
                if idx is None:
                    return None  # unreachable at this radius
                rhs[idx] = c
        x = self.solver.solve(rhs)
        if x is None:
            return None
        ns = len(self.support)
        out = []
        for j in range(self.m.cols):
            support = {}
            for gi, g in enumerate(self.support):
                c = x[j * ns + gi]
                if c:
                    support[g] = c
            out.append(RingElem(self.model, support))
        return out

    def in_span(self, b) -> bool:
        return self.solve(b) is not None


class LambdaLinearSystem:
    """General linear constraints over Lambda in several matrix unknowns.

    Constraints have the form  sum_t  c_t * (P_t . X_{v_t} . Q_t) = RHS,
    with module composition throughout.  Unknown entries are supported on a
    word-metric ball (the whole group for finite models), and the compiled
    problem is one integer linear system.
    """

    def __init__(self, model: GroupModel, radius: int = 4):
        self.model = model
        if model.is_finite():
            self.support = model.ball(0)
        else:
            self.support = model.ball(radius)
        self.sindex = {g: i for i, g in enumerate(self.support)}
        self.vars = {}
        self.var_order = []
        self.constraints = []

    def add_var(self, name, rows, cols):
        if name in self.vars:
            raise ChainError(f"duplicate variable {name}")
        self.vars[name] = (rows, cols)
        self.var_order.append(name)

    def add_constraint(self, terms, rhs: LambdaMatrix):
        """terms: list of (int coeff, P or None, varname, Q or None)."""
        shape = None
        for c, P, v, Q in terms:
            vr, vc = self.vars[v]
            r = P.rows if P is not None else vr
            s = Q.cols if Q is not None else vc
            if P is not None and P.cols != vr:
                raise ChainError("term shape mismatch (P)")
            if Q is not None and Q.rows != vc:
                raise ChainError("term shape mismatch (Q)")
            if shape is None:
                shape = (r, s)
            elif shape != (r, s):
                raise ChainError("terms have differing shapes")
        if shape is None:
            shape = (rhs.rows, rhs.cols)
        if (rhs.rows, rhs.cols) != shape:
            raise ChainError("rhs shape mismatch")
        self.constraints.append((terms, rhs))

    def _var_offset(self):
        offsets = {}
        total = 0
        ns = len(self.support)
        for name in self.var_order:
            rows, cols = self.vars[name]
            offsets[name] = total
            total += rows * cols * ns
        return offsets, total

    def solve(self):
        model = self.model
        ns = len(self.support)
        offsets, ncols = self._var_offset()
        row_index = {}
        rows_meta = []
        entries = []  # (row, col, value)
        rhs_vals = []

        def row_of(cid, r, s, h):
            key = (cid, r, s, h)
            idx = row_index.get(key)
            if idx is None:
                idx = len(rows_meta)
                row_index[key] = idx
                rows_meta.append(key)
                rhs_vals.append(0)
            return idx

        for cid, (terms, rhs) in enumerate(self.constraints):
            shape_r = rhs.rows
            shape_s = rhs.cols
            for r in range(shape_r):
                for s in range(shape_s):
                    target = rhs.data[r][s]
                    for h, c in target.support.items():
                        rhs_vals[row_of(cid, r, s, h)] = c
            for coeff, P, vname, Q in terms:
                vr, vc = self.vars[vname]
                base = offsets[vname]
                for p in range(vr):
                    for q in range(vc):
                        if P is None:
                            # output row equals p
                            pr_list = [(p, model.identity(), 1)]
                        else:
                            pr_list = [(rr, w, cw)
                                       for rr in range(P.rows)
                                       for w, cw in P.data[rr][p].support.items()]
                        if Q is None:
                            qs_list = [(q, model.identity(), 1)]
                        else:
                            qs_list = [(ss, u, cu)
                                       for ss in range(Q.cols)
                                       for u, cu in Q.data[q][ss].support.items()]
                        if not pr_list or not qs_list:
                            continue
                        for gi, g in enumerate(self.support):
                            col = base + (p * vc + q) * ns + gi
                            for rr, w, cw in pr_list:
                                for ss, u, cu in qs_list:
                                    h = model.mul(model.mul(u, g), w)
                                    ridx = row_of(cid, rr, ss, h)
                                    entries.append((ridx, col,
                                                    coeff * cu * cw))
        from .intlinalg import sparse_solve
        row_dicts = [dict() for _ in rows_meta]
        for r, c, v in entries:
            nv = row_dicts[r].get(c, 0) + v
            if nv:
                row_dicts[r][c] = nv
            else:
                row_dicts[r].pop(c, None)
        x = sparse_solve(row_dicts, ncols, rhs_vals)
        if x is None:
            return None
        out = {}
        for name in self.var_order:
            vr, vc = self.vars[name]
            base = offsets[name]
            m = LambdaMatrix(model, vr, vc)
            for p in range(vr):
                for q in range(vc):
                    support = {}
                    for gi, g in enumerate(self.support):
                        c = x[base + (p * vc + q) * ns + gi]
                        if c:
                            support[g] = c
                    m.data[p][q] = RingElem(model, support)
            out[name] = m
        return out


# ---------------------------------------------------------------------------
# Complexes


class IntComplex:
    """Integer chain complex; boundary[d] maps degree d to d-1."""

    def __init__(self, ranks: dict, boundary: dict, check: bool = True):
        self.ranks = {d: r for d, r in ranks.items() if r}
        self.boundary = {d: m for d, m in boundary.items()
                         if m.rows or m.cols}
        if check:
            for d, m in self.boundary.items():
                if (m.rows, m.cols) != (self.rank(d - 1), self.rank(d)):
                    raise ChainError(f"boundary {d}: bad shape")

    def rank(self, d):
        return self.ranks.get(d, 0)

    def degrees(self):
        return sorted(self.ranks)

    def boundary_or_zero(self, d) -> IntMatrix:
        m = self.boundary.get(d)
        if m is None:
            return IntMatrix.zero(self.rank(d - 1), self.rank(d))
        return m

    def homology(self, d):
        return homology_at(self.boundary_or_zero(d + 1),
                           self.boundary_or_zero(d))

    def all_homology(self):
        degs = self.degrees()
        if not degs:
            return {}
        return {d: self.homology(d) for d in range(min(degs), max(degs) + 1)}


class LambdaComplex:
    """Finitely generated free complex of left Lambda-modules."""

    def __init__(self, model, ranks, boundary, augmentation=None,
                 basis_names=None, check=True):
        self.model = model
        self.ranks = {d: r for d, r in ranks.items() if r}
        self.boundary = {}
        for d, m in boundary.items():
            if isinstance(m, list):
                m = LambdaMatrix.from_rows(model, m)
            if m.rows or m.cols:
                self.boundary[d] = m
        self.augmentation = augmentation
        self.basis_names = dict(basis_names) if basis_names else None
        if check:
            self.validate()

    def validate(self):
        for d, m in self.boundary.items():
            if m.model != self.model:
                raise ChainError("boundary over wrong model")
            if (m.rows, m.cols) != (self.rank(d - 1), self.rank(d)):
                raise ChainError(
                    f"boundary {d}: shape {(m.rows, m.cols)} expected "
                    f"{(self.rank(d - 1), self.rank(d))}")
        for d in list(self.boundary):
            nxt = self.boundary.get(d + 1)
            if nxt is not None and not compose(self.boundary[d], nxt).is_zero():
                raise ChainError(f"d.d != 0 at degree {d + 1}")
        if self.augmentation is not None:
            if len(self.augmentation) != self.rank(0):
                raise ChainError("augmentation: wrong length")
            d1 = self.boundary.get(1)
            if d1 is not None:
                for j in range(d1.cols):
                    total = 0
                    for i in range(d1.rows):
                        total += (d1.data[i][j] * self.augmentation[i]).aug()
                    if total != 0:
                        raise ChainError("augmentation does not kill d1")

    def __eq__(self, other):
        return (isinstance(other, LambdaComplex)
                and other.model == self.model and other.ranks == self.ranks
                and all(other.boundary_or_zero(d) == self.boundary_or_zero(d)
                        for d in set(self.boundary) | set(other.boundary)))

    def __hash__(self):
        return hash((self.model, tuple(sorted(self.ranks.items()))))

    def rank(self, d):
        return self.ranks.get(d, 0)

    def degrees(self):
        return sorted(self.ranks)

    def top_degree(self):
        return max(self.ranks) if self.ranks else 0

    def boundary_or_zero(self, d) -> LambdaMatrix:
        m = self.boundary.get(d)
        if m is None:
            return LambdaMatrix.zero(self.model, self.rank(d - 1), self.rank(d))
        return m

    def name_of(self, d, i):
        if self.basis_names and d in self.basis_names:
            return self.basis_names[d][i]
        return f"c{d}_{i}"

    def cell_index(self, name):
        if not self.basis_names:
            raise ChainError("complex has no basis names")
        for d, names in self.basis_names.items():
            if name in names:
                return (d, names.index(name))
        raise ChainError(f"unknown cell {name!r}")

    def augment_chain(self, vec) -> int:
        if self.augmentation is None:
            raise ChainError("complex has no augmentation")
        total = 0
        for x, row in zip(vec, self.augmentation):
            if isinstance(x, int):
                total += x * row.aug()
            else:
                total += (x * row).aug()
        return total

    def hom_dual(self) -> "LambdaComplex":
        """Degree-negated complex of bar-conjugate transposes."""
        ranks = {-d: r for d, r in self.ranks.items()}
        boundary = {}
        for d in self.ranks:
            nxt = self.boundary.get(d + 1)
            if nxt is not None:
                boundary[-d] = nxt.bar_transpose()
        names = None
        if self.basis_names:
            names = {-d: tuple(f"{n}*" for n in ns)
                     for d, ns in self.basis_names.items()}
        return LambdaComplex(self.model, ranks, boundary, basis_names=names)

    def tensor_Zomega(self) -> IntComplex:
        return IntComplex(dict(self.ranks),
                          {d: m.to_int_signed() for d, m in self.boundary.items()},
                          check=False)

    def linearized(self) -> IntComplex:
        """Faithful integer form over a finite model (system blocks)."""
        n = len(_finite_order(self.model))
        return IntComplex({d: r * n for d, r in self.ranks.items()},
                          {d: system_block_matrix(m)
                           for d, m in self.boundary.items()},
                          check=False)

    def induce_to(self, target_model) -> "LambdaComplex":
        """Extension of scalars along a free-product factor inclusion."""
        embed = _embedding_fn(self.model, target_model)
        if embed is None:
            raise ChainError("factor not found in target free product")

        def conv(r: RingElem) -> RingElem:
            return RingElem(target_model,
                            {embed(g): c for g, c in r.support.items()})

        boundary = {d: m.map_entries(conv) for d, m in self.boundary.items()}
        aug = None
        if self.augmentation is not None:
            aug = [conv(r) for r in self.augmentation]
        return LambdaComplex(target_model, dict(self.ranks), boundary,
                             augmentation=aug, basis_names=self.basis_names,
                             check=False)


def _embedding_fn(source_model, target_model):
    if source_model == target_model:
        return lambda k: k
    from .groups import FreeProduct
    if isinstance(target_model, FreeProduct):
        return target_model.factor_embedding(source_model)
    return None


def induce_Lk(c: LambdaComplex, target_model) -> LambdaComplex:
    return c.induce_to(target_model)


def embed_ring(r: RingElem, target_model) -> RingElem:
    embed = _embedding_fn(r.model, target_model)
    if embed is None:
        raise ChainError("factor not found in target free product")
    return RingElem(target_model, {embed(g): c for g, c in r.support.items()})


class LambdaChainMap:
    """Degree-shifting chain map; components[d] maps C_d to D_{d+shift}."""

    def __init__(self, source, target, shift, components, check=True):
        self.source = source
        self.target = target
        self.shift = shift
        self.components = {d: m for d, m in components.items()
                           if m.rows or m.cols}
        if check:
            self.validate()

    def validate(self):
        n = self.shift
        for d, m in self.components.items():
            want = (self.target.rank(d + n), self.source.rank(d))
            if (m.rows, m.cols) != want:
                raise ChainError(f"component {d}: shape {(m.rows, m.cols)}"
                                 f" expected {want}")
        degs = set(self.source.ranks)
        for d in sorted(degs):
            lhs = compose(self.target.boundary_or_zero(d + n),
                          self.component(d))
            rhs = compose(self.component(d - 1),
                          self.source.boundary_or_zero(d)).scale((-1) ** (n % 2))
            if not (lhs - rhs).is_zero():
                raise ChainError(f"not a chain map at degree {d}")

    def component(self, d) -> LambdaMatrix:
        m = self.components.get(d)
        if m is None:
            return LambdaMatrix.zero(self.source.model,
                                     self.target.rank(d + self.shift),
                                     self.source.rank(d))
        return m

    def is_zero(self):
        return all(m.is_zero() for m in self.components.values())

    def __add__(self, other):
        if (other.source, other.target, other.shift) != \
                (self.source, self.target, self.shift):
            raise ChainError("chain map mismatch")
        degs = set(self.components) | set(other.components)
        return LambdaChainMap(self.source, self.target, self.shift,
                              {d: self.component(d) + other.component(d)
                               for d in degs}, check=False)

    def scale(self, c: int):
        return LambdaChainMap(self.source, self.target, self.shift,
                              {d: m.scale(c) for d, m in self.components.items()},
                              check=False)

    def __sub__(self, other):
        return self + other.scale(-1)

    def compose_with(self, inner: "LambdaChainMap") -> "LambdaChainMap":
        """self . inner (apply inner first)."""
        if inner.target is not self.source and inner.target != self.source:
            raise ChainError("composition mismatch")
        comps = {}
        for d in inner.source.ranks:
            m = compose(self.component(d + inner.shift), inner.component(d))
            comps[d] = m
        return LambdaChainMap(inner.source, self.target,
                              self.shift + inner.shift, comps, check=False)

    def dual_map(self) -> "LambdaChainMap":
        """phi -> phi . f between the dual complexes; same shift."""
        src_dual = self.target.hom_dual()
        tgt_dual = self.source.hom_dual()
        comps = {}
        for d, m in self.components.items():
            # f_d : C_d -> D_{d+n} dualizes to (D*)_{-(d+n)} -> (C*)_{-d}
            comps[-(d + self.shift)] = m.bar_transpose()
        return LambdaChainMap(src_dual, tgt_dual, self.shift, comps)

    def tensor_Zomega(self):
        return {d: m.to_int_signed() for d, m in self.components.items()}

    @classmethod
    def identity(cls, c: LambdaComplex):
        return cls(c, c, 0, {d: LambdaMatrix.identity(c.model, r)
                             for d, r in c.ranks.items()}, check=False)


class ChainHomotopy:
    """h with f - g = d.h + (-1)^shift h.d."""

    def __init__(self, f: LambdaChainMap, g: LambdaChainMap, components,
                 check=True):
        self.f = f
        self.g = g
        self.components = components
        if check:
            self.validate()

    def component(self, d):
        m = self.components.get(d)
        if m is None:
            return LambdaMatrix.zero(self.f.source.model,
                                     self.f.target.rank(d + self.f.shift + 1),
                                     self.f.source.rank(d))
        return m

    def validate(self):
        f, g = self.f, self.g
        n = f.shift
        sign = (-1) ** (n % 2)
        for d in set(f.source.ranks):
            lhs = f.component(d) - g.component(d)
            rhs = compose(f.target.boundary_or_zero(d + n + 1),
                          self.component(d)) + \
                compose(self.component(d - 1),
                        f.source.boundary_or_zero(d)).scale(sign)
            if not (lhs - rhs).is_zero():
                raise ChainError(f"not a homotopy at degree {d}")


@dataclass
class NullHomotopyVerdict:
    status: str  # "homotopic" | "no" | "unknown"
    homotopy: ChainHomotopy | None = None
    obstruction: str | None = None

    def found(self):
        return self.status == "homotopic"


def is_nullhomotopic(f: LambdaChainMap, radius: int = 4) -> NullHomotopyVerdict:
    """Decide (finite models) or search (bounded support) f ~ 0.

    A nonvanishing induced map on Z^omega homology refutes soundly for any
    model; otherwise finite models are decided exactly and infinite models
    report unknown when the radius is exhausted.
    """
    if f.is_zero():
        zero = f.scale(0)
        return NullHomotopyVerdict("homotopic", ChainHomotopy(f, zero, {}))
    # Sound refutation for every model: a nullhomotopic map kills homology
    # of the Z^omega reduction, so any generator sent to a non-boundary is
    # an obstruction.
    src_int = f.source.tensor_Zomega()
    tgt_int = f.target.tensor_Zomega()
    for d in f.source.degrees():
        h = src_int.homology(d)
        fm = f.component(d).to_int_signed()
        gens = h.free_generators + h.torsion_generators
        if not gens:
            continue
        boundary_solver = LinearSolver(
            tgt_int.boundary_or_zero(d + f.shift + 1))
        for gen in gens:
            img = [sum(a * b for a, b in zip(row, gen)) for row in fm.data]
            if any(img) and boundary_solver.solve(img) is None:
                return NullHomotopyVerdict(
                    "no", obstruction=f"nonzero on homology at degree {d}")
    model = f.source.model
    radii = [radius] if model.is_finite() else \
        sorted({r for r in (1, 2, radius) if r <= radius})
    for rad in radii:
        system = LambdaLinearSystem(model, rad)
        degs = sorted(f.source.ranks)
        n = f.shift
        for d in degs:
            rows = f.target.rank(d + n + 1)
            cols = f.source.rank(d)
            system.add_var(f"h{d}", rows, cols)
        sign = (-1) ** (n % 2)
        for d in degs:
            terms = []
            if f.target.rank(d + n + 1) and f.source.rank(d):
                terms.append((1, f.target.boundary_or_zero(d + n + 1),
                              f"h{d}", None))
            if d - 1 in f.source.ranks and f.target.rank(d + n):
                if f.source.rank(d):
                    terms.append((sign, None, f"h{d - 1}",
                                  f.source.boundary_or_zero(d)))
            rhs = f.component(d)
            if not terms:
                if not rhs.is_zero():
                    return NullHomotopyVerdict(
                        "no" if model.is_finite() else "unknown",
                        obstruction=f"no homotopy slots at degree {d}")
                continue
            system.add_constraint(terms, rhs)
        sol = system.solve()
        if sol is not None:
            comps = {d: sol[f"h{d}"] for d in degs if f"h{d}" in sol}
            zero = f.scale(0)
            return NullHomotopyVerdict(
                "homotopic", ChainHomotopy(f, zero, comps))
    if model.is_finite():
        return NullHomotopyVerdict("no", obstruction="exact system unsolvable")
    return NullHomotopyVerdict("unknown",
                               obstruction=f"radius {radius} exhausted")


def eta_matrix(model, rank: int) -> LambdaMatrix:
    """Evaluation map of a f.g. free module into its double twisted dual.

    In the twisted dual-dual coordinates the evaluation is the identity,
    which is the invertibility witness; naturality is what the tests check.
    """
    return LambdaMatrix.identity(model, rank)


def mapping_cone(f: LambdaChainMap) -> tuple:
    """Cone of a shift-n chain map, with the block bookkeeping.

    Cone_d = A_{d-n-1} (+) B_d, boundary (a, b) ->
    (-(-1)^n dA a, f(a) + dB b).  Returns (cone, layout) where layout maps
    degree -> (a_rank, b_rank).
    """
    A, B, n = f.source, f.target, f.shift
    model = A.model
    sign = -((-1) ** (n % 2))
    ranks = {}
    layout = {}
    degs = set()
    for d in A.ranks:
        degs.add(d + n + 1)
    for d in B.ranks:
        degs.add(d)
    for d in degs:
        ar = A.rank(d - n - 1)
        br = B.rank(d)
        if ar + br:
            ranks[d] = ar + br
            layout[d] = (ar, br)
    boundary = {}
    for d in sorted(ranks):
        if d - 1 not in ranks and (A.rank(d - n - 2) + B.rank(d - 1)) == 0:
            continue
        ar, br = layout[d]
        ar1 = A.rank(d - n - 2)
        br1 = B.rank(d - 1)
        if ar1 + br1 == 0:
            continue
        m = LambdaMatrix.zero(model, ar1 + br1, ar + br)
        dA = A.boundary_or_zero(d - n - 1)
        for i in range(ar1):
            for j in range(ar):
                m.data[i][j] = dA.data[i][j] * sign
        fc = f.component(d - n - 1)
        for i in range(br1):
            for j in range(ar):
                m.data[ar1 + i][j] = fc.data[i][j]
        dB = B.boundary_or_zero(d)
        for i in range(br1):
            for j in range(br):
                m.data[ar1 + i][ar + j] = dB.data[i][j]
        boundary[d] = m
    cone = LambdaComplex(model, ranks, boundary, check=False)
    return cone, layout


def find_contraction(cone: LambdaComplex, radius: int = 4):
    """Inductive contracting homotopy d h + h d = 1 of an exact complex.

    Solves degree by degree, column by column, against cached solvers.
    Returns dict degree -> LambdaMatrix, or None when some solve fails
    (for infinite models that only means failure at this radius).
    """
    model = cone.model
    degs = sorted(cone.ranks)
    if not degs:
        return {}
    h = {}
    prev_h = None
    prev_d = None
    for d in degs:
        rank_d = cone.rank(d)
        nxt = cone.boundary_or_zero(d + 1)
        # residual R = 1 - h_{d-1} . boundary_d
        ident = LambdaMatrix.identity(model, rank_d)
        if prev_h is not None and prev_d == d - 1:
            R = ident - compose(prev_h, cone.boundary_or_zero(d))
        else:
            R = ident
        if cone.rank(d + 1) == 0:
            if not R.is_zero():
                return None
            prev_h, prev_d = None, d
            continue
        solver = LambdaColumnSolver(nxt, radius)
        cols = []
        for j in range(rank_d):
            x = solver.solve(R.column(j))
            if x is None:
                return None
            cols.append(x)
        hd = LambdaMatrix(model, cone.rank(d + 1), rank_d,
                          [[cols[j][i] for j in range(rank_d)]
                           for i in range(cone.rank(d + 1))])
        h[d] = hd
        prev_h, prev_d = hd, d
    return h


def verify_contraction(cone: LambdaComplex, h: dict) -> bool:
    model = cone.model
    for d in cone.degrees():
        ident = LambdaMatrix.identity(model, cone.rank(d))
        hd = h.get(d)
        term1 = (compose(cone.boundary_or_zero(d + 1), hd)
                 if hd is not None else
                 LambdaMatrix.zero(model, cone.rank(d), cone.rank(d)))
        hprev = h.get(d - 1)
        term2 = (compose(hprev, cone.boundary_or_zero(d))
                 if hprev is not None and cone.rank(d - 1) else
                 LambdaMatrix.zero(model, cone.rank(d), cone.rank(d)))
        if not (term1 + term2 - ident).is_zero():
            return False
    return True
