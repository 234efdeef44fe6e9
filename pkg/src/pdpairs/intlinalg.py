"""Exact integer matrix kernels.

Everything here is pure arbitrary-precision integer arithmetic: Smith normal
form with unimodular witnesses, kernel bases, integral linear solving, and
homology of integer chain complexes.  Matrices are dense lists of rows; the
desk-scale problems this library targets stay well inside that regime, and
a LinearSolver caches one SNF so repeated solves against the same matrix are
cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class IntMatrix:
    rows: int
    cols: int
    data: list

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n):
        m = cls.zero(n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def from_rows(cls, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        for r in rows_list:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        return cls(rows, cols, [list(r) for r in rows_list])

    @classmethod
    def from_columns(cls, cols_list, rows=None):
        if not cols_list:
            return cls(rows or 0, 0, [[] for _ in range(rows or 0)])
        rows = len(cols_list[0])
        return cls(rows, len(cols_list),
                   [[c[i] for c in cols_list] for i in range(rows)])

    def copy(self):
        return IntMatrix(self.rows, self.cols, [row[:] for row in self.data])

    def column(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         [[self.data[i][j] for i in range(self.rows)]
                          for j in range(self.cols)])

    def is_zero(self):
        return all(all(x == 0 for x in row) for row in self.data)

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and other.rows == self.rows
                and other.cols == self.cols and other.data == self.data)

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols})"


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.cols != b.rows:
        raise ValueError("shape mismatch")
    bt = b.transpose().data
    out = [[sum(x * y for x, y in zip(row, col)) for col in bt]
           for row in a.data]
    return IntMatrix(a.rows, b.cols, out)


def mat_vec(a: IntMatrix, v) -> list:
    if a.cols != len(v):
        raise ValueError("shape mismatch")
    return [sum(x * y for x, y in zip(row, v)) for row in a.data]


@dataclass
class SnfResult:
    """U * A * V = D with D diagonal in divisibility order.

    diag lists only the nonzero invariant factors; rank == len(diag).
    Uinv and Vinv are maintained alongside so witnesses can be verified and
    inverted without any further elimination.
    """

    diag: list
    U: IntMatrix
    V: IntMatrix
    Uinv: IntMatrix
    Vinv: IntMatrix
    shape: tuple

    @property
    def rank(self):
        return len(self.diag)

    def diagonal_matrix(self) -> IntMatrix:
        m = IntMatrix.zero(*self.shape)
        for i, d in enumerate(self.diag):
            m.data[i][i] = d
        return m


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def snf(A: IntMatrix) -> SnfResult:
    """Smith normal form with two-sided unimodular witnesses.

    Each round moves the globally smallest nonzero entry of the working
    block to the pivot and clears by division, leaving remainders in place
    for the next round; this is the classical growth-tamed scheme.  The
    divisibility chain is then enforced with closed-form Bezout 2x2
    transforms, so no Euclidean loop ever runs on grown entries.
    """
    m, n = A.rows, A.cols
    D = [row[:] for row in A.data]
    U = IntMatrix.identity(m)
    Uinv = IntMatrix.identity(m)
    V = IntMatrix.identity(n)
    Vinv = IntMatrix.identity(n)

    def row_add(i, k, q):  # row i += q * row k
        D[i] = [x + q * y for x, y in zip(D[i], D[k])]
        U.data[i] = [x + q * y for x, y in zip(U.data[i], U.data[k])]
        for r in range(m):
            Uinv.data[r][k] -= q * Uinv.data[r][i]

    def row_swap(i, k):
        D[i], D[k] = D[k], D[i]
        U.data[i], U.data[k] = U.data[k], U.data[i]
        for r in range(m):
            Uinv.data[r][i], Uinv.data[r][k] = Uinv.data[r][k], Uinv.data[r][i]

    def row_neg(i):
        D[i] = [-x for x in D[i]]
        U.data[i] = [-x for x in U.data[i]]
        for r in range(m):
            Uinv.data[r][i] = -Uinv.data[r][i]

    def col_add(j, k, q):  # col j += q * col k
        for r in range(m):
            D[r][j] += q * D[r][k]
        for r in range(n):
            V.data[r][j] += q * V.data[r][k]
        Vinv.data[k] = [x - q * y for x, y in zip(Vinv.data[k], Vinv.data[j])]

    def col_swap(j, k):
        for r in range(m):
            D[r][j], D[r][k] = D[r][k], D[r][j]
        for r in range(n):
            V.data[r][j], V.data[r][k] = V.data[r][k], V.data[r][j]
        Vinv.data[j], Vinv.data[k] = Vinv.data[k], Vinv.data[j]

    def row_mix(i, j, t):  # rows (i, j) <- t . rows (i, j), det t = 1
        a, b, c, d = t
        D[i], D[j] = ([a * x + b * y for x, y in zip(D[i], D[j])],
                      [c * x + d * y for x, y in zip(D[i], D[j])])
        U.data[i], U.data[j] = (
            [a * x + b * y for x, y in zip(U.data[i], U.data[j])],
            [c * x + d * y for x, y in zip(U.data[i], U.data[j])])
        for r in range(m):
            x, y = Uinv.data[r][i], Uinv.data[r][j]
            Uinv.data[r][i] = x * d - y * c
            Uinv.data[r][j] = -x * b + y * a
    def col_mix(i, j, t):  # cols (i, j) <- cols (i, j) . t^T style, det 1
        a, b, c, d = t
        for r in range(m):
            x, y = D[r][i], D[r][j]
            D[r][i] = a * x + c * y
            D[r][j] = b * x + d * y
        for r in range(n):
            x, y = V.data[r][i], V.data[r][j]
            V.data[r][i] = a * x + c * y
            V.data[r][j] = b * x + d * y
        Vinv.data[i], Vinv.data[j] = (
            [d * x - b * y for x, y in zip(Vinv.data[i], Vinv.data[j])],
            [-c * x + a * y for x, y in zip(Vinv.data[i], Vinv.data[j])])

    def find_pivot(s):
        best = None
        for i in range(s, m):
            row = D[i]
            for j in range(s, n):
                x = row[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if abs(x) == 1:
                        return best
        return best

    s = 0
    while s < m and s < n:
        piv = find_pivot(s)
        if piv is None:
            break
        _, pi, pj = piv
        if pi != s:
            row_swap(s, pi)
        if pj != s:
            col_swap(s, pj)
        clean = True
        for i in range(s + 1, m):
            if D[i][s] != 0:
                row_add(i, s, -(D[i][s] // D[s][s]))
                if D[i][s] != 0:
                    clean = False
        if not clean:
            continue  # a strictly smaller remainder exists; re-pivot
        for j in range(s + 1, n):
            if D[s][j] != 0:
                col_add(j, s, -(D[s][j] // D[s][s]))
                if D[s][j] != 0:
                    clean = False
        if not clean:
            continue
        if D[s][s] < 0:
            row_neg(s)
        s += 1

    # Enforce the divisibility chain with one Bezout transform per bad pair.
    r = s
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            a, b = D[i][i], D[i + 1][i + 1]
            if a != 0 and b % a != 0:
                g, x, y = _xgcd(a, b)
                # diag(a, b) -> diag(g, a b / g) by unimodular 2x2 mixes
                row_mix(i, i + 1, (x, y, -(b // g), a // g))
                col_mix(i, i + 1, (1, -(b // g) * y, 1, (a // g) * x))
                if D[i][i] < 0:
                    row_neg(i)
                if D[i + 1][i + 1] < 0:
                    row_neg(i + 1)
                changed = True
    diag = [D[i][i] for i in range(r) if D[i][i] != 0]
    return SnfResult(diag, U, V, Uinv, Vinv, (m, n))


class LinearSolver:
    """Repeated exact solving of A x = b against a fixed A."""

    def __init__(self, A: IntMatrix):
        self.A = A
        self.res = snf(A)

    @property
    def rank(self):
        return self.res.rank

    def solve(self, b):
        """One integral solution of A x = b, or None."""
        res = self.res
        if len(b) != self.A.rows:
            raise ValueError("shape mismatch")
        c = mat_vec(res.U, b)
        y = [0] * self.A.cols
        for i in range(self.A.rows):
            if i < res.rank:
                d = res.diag[i]
                if c[i] % d != 0:
                    return None
                if i < self.A.cols:
                    y[i] = c[i] // d
            elif c[i] != 0:
                return None
        return mat_vec(res.V, y)

    def kernel_basis(self):
        """Columns of V past the rank span ker(A) as a lattice."""
        res = self.res
        return [res.V.column(j) for j in range(res.rank, self.A.cols)]


def solve_integral(A: IntMatrix, b):
    return LinearSolver(A).solve(b)


@dataclass
class HomologyGroup:
    free_rank: int
    torsion: list
    free_generators: list = field(default_factory=list)
    torsion_generators: list = field(default_factory=list)

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def is_infinite_cyclic(self):
        return self.free_rank == 1 and not self.torsion

    def describe(self):
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def homology_at(d_in: IntMatrix, d_out: IntMatrix) -> HomologyGroup:
    """ker(d_out) / im(d_in) for integer matrices with d_out * d_in = 0.

    Presented in invariant-factor form with explicit generating cycles.
    """
    if d_in.rows != d_out.cols:
        raise ValueError("shape mismatch: d_out . d_in undefined")
    if not mat_mul(d_out, d_in).is_zero():
        raise ValueError("not a complex: d_out . d_in != 0")
    out_solver = LinearSolver(d_out)
    kernel = out_solver.kernel_basis()
    k = len(kernel)
    if k == 0:
        return HomologyGroup(0, [])
    K = IntMatrix.from_columns(kernel, rows=d_out.cols)
    ksolver = LinearSolver(K)
    ycols = []
    for j in range(d_in.cols):
        y = ksolver.solve(d_in.column(j))
        if y is None:
            raise ValueError("image does not lie in kernel")
        ycols.append(y)
    Y = IntMatrix.from_columns(ycols, rows=k)
    yres = snf(Y)
    free_rank = k - yres.rank
    torsion = [d for d in yres.diag if d > 1]
    # Generators in the new coordinates are columns of Uinv; pull back via K.
    free_gens = []
    torsion_gens = []
    for i in range(k):
        gen = mat_vec(K, yres.Uinv.column(i))
        if i >= yres.rank:
            free_gens.append(gen)
        elif yres.diag[i] > 1:
            torsion_gens.append(gen)
    return HomologyGroup(free_rank, torsion, free_gens, torsion_gens)


def rank_of(A: IntMatrix) -> int:
    return snf(A).rank


def sparse_solve(rows, ncols, rhs):
    """One integral solution of a sparse system, or None.

    rows: list of dicts col -> coefficient.  Unit pivots are eliminated by
    substitution first (these systems are mostly incidence-like), then the
    dense Smith engine finishes the residual core.
    """
    rows = [dict(r) for r in rows]
    b = list(rhs)
    col_rows = {}
    for ri, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(ri)
    alive_rows = set(range(len(rows)))
    alive_cols = set(col_rows)
    eliminated = []  # (col, sign, row-dict snapshot, b-value)

    def pick_pivot():
        # deterministic scan order keeps reports byte-stable
        best = None
        for ri in sorted(alive_rows):
            row = rows[ri]
            if not row:
                continue
            for c in sorted(row):
                val = row[c]
                if val in (1, -1):
                    score = (len(row) - 1) * (len(col_rows.get(c, ())) - 1)
                    if best is None or score < best[0]:
                        best = (score, ri, c, val)
                        if score == 0:
                            return best
        return best

    while True:
        # drop empty rows, checking consistency
        for ri in list(alive_rows):
            if not rows[ri]:
                if b[ri] != 0:
                    return None
                alive_rows.discard(ri)
        piv = pick_pivot()
        if piv is None:
            break
        _, ri, c, val = piv
        row = rows[ri]
        snapshot = {cc: vv for cc, vv in row.items() if cc != c}
        eliminated.append((c, val, snapshot, b[ri]))
        users = col_rows.pop(c, set())
        users.discard(ri)
        alive_rows.discard(ri)
        alive_cols.discard(c)
        for rj in users:
            if rj not in alive_rows:
                continue
            other = rows[rj]
            beta = other.pop(c, 0)
            if not beta:
                continue
            factor = beta * val
            for cc, vv in snapshot.items():
                nv = other.get(cc, 0) - factor * vv
                if nv:
                    other[cc] = nv
                    col_rows.setdefault(cc, set()).add(rj)
                else:
                    other.pop(cc, None)
                    s = col_rows.get(cc)
                    if s is not None:
                        s.discard(rj)
            b[rj] -= factor * b[ri]
        rows[ri] = {}
    # dense core
    core_cols = sorted(alive_cols)
    col_pos = {c: i for i, c in enumerate(core_cols)}
    core_rows = [ri for ri in sorted(alive_rows) if rows[ri]]
    solution = [0] * ncols
    if core_rows:
        mat = IntMatrix.zero(len(core_rows), len(core_cols))
        vec = []
        for k, ri in enumerate(core_rows):
            for c, vv in rows[ri].items():
                mat.data[k][col_pos[c]] = vv
            vec.append(b[ri])
        core = LinearSolver(mat).solve(vec)
        if core is None:
            return None
        for c, x in zip(core_cols, core):
            solution[c] = x
    for ri in alive_rows:
        if not rows[ri] and b[ri] != 0:
            return None
    for c, val, snapshot, bval in reversed(eliminated):
        acc = bval
        for cc, vv in snapshot.items():
            acc -= vv * solution[cc]
        solution[c] = val * acc  # val is +-1, so this is division
    return solution


def in_column_span(solver: LinearSolver, v) -> bool:
    return solver.solve(v) is not None


def class_coordinates(hom: HomologyGroup, boundary_in: IntMatrix, cycle):
    """Coordinates of a cycle's class over the free generators, or None.

    Only meaningful for torsion-free homology; returns the integer vector c
    with cycle ~ sum c_i * free_gen_i modulo im(boundary_in).
    """
    cols = [list(g) for g in hom.free_generators]
    n = len(cycle)
    aug_cols = cols + boundary_in.columns()
    if not aug_cols:
        return None if any(cycle) else []
    M = IntMatrix.from_columns(aug_cols, rows=n)
    x = LinearSolver(M).solve(list(cycle))
    if x is None:
        return None
    return x[:len(cols)]
