"""Delta-complex ingestion: labeled simplices to equivariant chain pairs.

Simplices carry ordered vertex lists; gluing is by explicit face maps
(face j deletes vertex j).  Edges are labeled by group elements, labels
must compose consistently around every triangle, and the equivariant
boundary lifts so that every simplex's canonical lift starts at the
canonical lift of its leading vertex:

    d sigma = label(v0 -> v1) . face_0  +  sum_{i>=1} (-1)^i face_i

The Alexander-Whitney diagonal pairs front faces with translated back
faces and satisfies the counit and chain-map laws by construction; the
pair constructor re-checks them anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chains import LambdaComplex, LambdaMatrix
from .groups import GroupModel
from .pairs import ChainPairData, LambdaTensor, _auto_components


class DeltaError(ValueError):
    pass


@dataclass
class Simplex:
    name: str
    dim: int
    faces: tuple          # names of the (dim-1)-faces, face j drops vertex j
    label: object = None  # edges only: group key


@dataclass
class DeltaComplexInput:
    model: GroupModel
    vertices: list
    simplices: dict                  # name -> Simplex (dims >= 1)
    sub_names: set = field(default_factory=set)
    name: str = "delta"

    def dimension(self):
        dims = [s.dim for s in self.simplices.values()]
        return max(dims, default=0)

    def by_dim(self, d):
        if d == 0:
            return list(self.vertices)
        return sorted(n for n, s in self.simplices.items() if s.dim == d)

    def simplex(self, name) -> Simplex:
        if name in self.simplices:
            return self.simplices[name]
        raise DeltaError(f"unknown simplex {name!r}")

    def validate(self):
        for name, s in self.simplices.items():
            if len(s.faces) != s.dim + 1:
                raise DeltaError(f"{name}: wrong number of faces")
            for f in s.faces:
                if s.dim == 1:
                    if f not in self.vertices:
                        raise DeltaError(f"{name}: unknown vertex {f!r}")
                elif f not in self.simplices or \
                        self.simplices[f].dim != s.dim - 1:
                    raise DeltaError(f"{name}: bad face {f!r}")
            if s.dim == 1 and s.label is None:
                raise DeltaError(f"edge {name} is unlabeled")
        for name, s in self.simplices.items():
            if s.dim == 2:
                e12, e02, e01 = s.faces
                g01 = self.simplex(e01).label
                g12 = self.simplex(e12).label
                g02 = self.simplex(e02).label
                if self.model.mul(g01, g12) != g02:
                    raise DeltaError(
                        f"labels around triangle {name} do not compose: "
                        f"{e01} * {e12} != {e02}")
                # endpoints must match up
                if self.simplex(e01).faces[0] != self.simplex(e02).faces[0]:
                    raise DeltaError(f"triangle {name}: leading vertices of "
                                     f"{e01} and {e02} differ")
                if self.simplex(e01).faces[1] != self.simplex(e12).faces[0]:
                    raise DeltaError(f"triangle {name}: {e01} does not end "
                                     f"where {e12} starts")
        closure = set(self.sub_names)
        for name in list(closure):
            stack = [name]
            while stack:
                cur = stack.pop()
                if cur in self.vertices:
                    continue
                s = self.simplex(cur)
                for f in s.faces:
                    if f not in closure:
                        closure.add(f)
                        stack.append(f)
        if closure != set(self.sub_names):
            missing = sorted(closure - set(self.sub_names))
            raise DeltaError(f"subcomplex marking is not closed; missing "
                             f"{missing}")

    # -- face navigation ---------------------------------------------------

    def sub_simplex(self, name, keep):
        """The face spanned by the kept vertex positions (sorted tuple)."""
        cur = name
        dim = self.simplex(name).dim if name not in self.vertices else 0
        positions = list(range(dim + 1))
        for pos in reversed(range(dim + 1)):
            if pos in keep:
                continue
            idx = positions.index(pos)
            if cur in self.vertices:
                raise DeltaError("cannot take a face of a vertex")
            cur = self.simplex(cur).faces[idx]
            positions.remove(pos)
        return cur

    def translation(self, name, i):
        """Edge-path label from vertex 0 to vertex i of a simplex."""
        if i == 0:
            return self.model.identity()
        edge = self.sub_simplex(name, (0, i))
        return self.simplex(edge).label


def build_equivariant_complex(d: DeltaComplexInput) -> LambdaComplex:
    d.validate()
    model = d.model
    names = {}
    index = {}
    for dim in range(d.dimension() + 1):
        cells = d.by_dim(dim)
        if cells:
            names[dim] = tuple(cells)
            for i, n in enumerate(cells):
                index[n] = (dim, i)
    ranks = {dim: len(ns) for dim, ns in names.items()}
    boundary = {}
    for dim in range(1, d.dimension() + 1):
        m = LambdaMatrix.zero(model, ranks.get(dim - 1, 0), ranks.get(dim, 0))
        for j, cname in enumerate(names.get(dim, ())):
            s = d.simplex(cname)
            for pos, fname in enumerate(s.faces):
                _, row = index[fname]
                coeff = 1 if pos % 2 == 0 else -1
                if pos == 0:
                    g = d.translation(cname, 1)
                    entry = model.unit(g, coeff)
                else:
                    entry = model.from_int(coeff)
                m.data[row][j] = m.data[row][j] + entry
        boundary[dim] = m
    aug = [model.one()] * ranks.get(0, 0)
    return LambdaComplex(model, ranks, boundary, augmentation=aug,
                         basis_names=names)


def aw_diagonal(d: DeltaComplexInput, complex_: LambdaComplex) -> dict:
    """Front-face (x) translated back-face diagonal for every cell."""
    model = d.model
    diag = {}
    for dim in complex_.degrees():
        for i, cname in enumerate(complex_.basis_names[dim]):
            tensor = LambdaTensor(model)
            for cut in range(dim + 1):
                front = d.sub_simplex(cname, tuple(range(cut + 1))) \
                    if dim else cname
                back = d.sub_simplex(cname, tuple(range(cut, dim + 1))) \
                    if dim else cname
                g = d.translation(cname, cut) if dim else model.identity()
                fcell = complex_.cell_index(front)
                bcell = complex_.cell_index(back)
                tensor.add_term(fcell, g, bcell, model.one())
            diag[(dim, i)] = tensor
            # counit failures surface here with the offending simplex
            left = tensor.left_counit(complex_)
            right = tensor.right_counit(complex_)
            expect = {(dim, i): model.one()}
            if left != expect or right != expect:
                raise DeltaError(f"counit law fails on simplex {cname}")
    return diag


def build_equivariant_pair(d: DeltaComplexInput) -> ChainPairData:
    complex_ = build_equivariant_complex(d)
    diag = aw_diagonal(d, complex_)
    sub = {}
    for n in d.sub_names:
        dim, i = complex_.cell_index(n)
        sub.setdefault(dim, []).append(i)
    sub = {k: tuple(sorted(v)) for k, v in sub.items()}
    comps = _auto_components(complex_, sub, diag)
    return ChainPairData(complex_, sub, diag, boundary_components=comps,
                         name=d.name)
