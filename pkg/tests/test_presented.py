"""Presented modules, cokernel functors, derived equivalence."""

import pytest

from pdpairs.chains import LambdaComplex, LambdaMatrix, compose
from pdpairs.groups import (
    FiniteTable,
    FreeProduct,
    InfiniteCyclic,
    TrivialGroup,
)
from pdpairs.presented import (
    F_functor,
    Factorization,
    G_functor,
    Factorization,
    ModuleError,
    ModuleMorphism,
    PresentedModule,
    augmentation_ideal,
    augmentation_ideal_generators,
    derived_equivalence,
    express_in_ideal,
    search_factorization,
    verify_factorization,
)


def relative_solid_torus():
    """The quotient complex C(X, dX) of the solid torus: m in deg 2, E in 3."""
    z = InfiniteCyclic("t")
    t = z.unit(1)
    d3 = LambdaMatrix.from_rows(z, [[t - 1]])
    return LambdaComplex(z, {2: 1, 3: 1}, {3: d3}, check=False)


def test_G_functor_zero_boundaries_free():
    z = InfiniteCyclic("t")
    c = LambdaComplex(z, {0: 2, 1: 1}, {}, check=False)
    g = G_functor(c, 0)
    assert g.ngens == 2 and g.relations.cols == 0


def test_F_functor_solid_torus_relative():
    c = relative_solid_torus()
    f2 = F_functor(c, 2)
    assert f2.ngens == 1 and f2.relations.cols == 0  # free of rank one
    f3 = F_functor(c, 3)
    # relations = barT(d3) = t^-1 - 1
    assert f3.ngens == 1 and f3.relations.cols == 1
    assert f3.relations.data[0][0] == c.model.unit(-1) - 1


def test_F_functor_vanishes_where_no_cochains():
    z = TrivialGroup()
    c = LambdaComplex(z, {3: 1}, {}, check=False)
    assert F_functor(c, 2).ngens == 0


def test_augmentation_ideal_infinite_cyclic_free():
    z = InfiniteCyclic("t")
    ideal = augmentation_ideal(z)
    assert ideal.ngens == 1 and ideal.relations.cols == 0
    gens = augmentation_ideal_generators(z)
    assert gens[0] == z.unit(1) - 1


def test_augmentation_ideal_cyclic_p():
    g3 = FiniteTable.cyclic(3, "g")
    ideal = augmentation_ideal(g3)
    assert ideal.ngens == 1
    # relation lattice of lambda (g - 1) = 0 is spanned by the norm
    norm = g3.one() + g3.unit(1) + g3.unit(2)
    assert ideal.relations.cols >= 1
    cols = [ideal.relations.column(j) for j in range(ideal.relations.cols)]
    assert any(c[0] == norm or c[0] == -norm for c in cols)


def test_augmentation_ideal_free_product_direct_sum():
    prod = FreeProduct(InfiniteCyclic("t"), InfiniteCyclic("u"))
    ideal = augmentation_ideal(prod)
    assert ideal.ngens == 2 and ideal.relations.cols == 0
    gens = augmentation_ideal_generators(prod)
    assert gens[0] == prod.unit(((0, 1),)) - 1
    assert gens[1] == prod.unit(((1, 1),)) - 1


def test_express_in_ideal():
    z = InfiniteCyclic("t")
    t = z.unit(1)
    coeffs = express_in_ideal(z, t * t - 1)
    assert len(coeffs) == 1
    assert coeffs[0] * (t - 1) == t * t - 1
    with pytest.raises(ModuleError):
        express_in_ideal(z, z.one())


def test_morphism_well_definedness():
    g2 = FiniteTable.cyclic(2, "s")
    norm = g2.one() + g2.unit(1)
    ideal = augmentation_ideal(g2)  # Lambda/(norm)
    free = PresentedModule(g2, 1)
    # 1 -> s - 1 defines free -> ideal; the reverse does not (norm not killed)
    ModuleMorphism(free, ideal, LambdaMatrix.from_rows(g2, [[g2.one()]]))
    with pytest.raises(ModuleError):
        ModuleMorphism(ideal, free, LambdaMatrix.from_rows(g2, [[g2.one()]]))


def test_derived_equivalence_identity():
    g3 = FiniteTable.cyclic(3, "g")
    ideal = augmentation_ideal(g3)
    v = derived_equivalence(ModuleMorphism.identity(ideal))
    assert v.is_equivalence()


def test_derived_equivalence_zero_on_ideal_refuted():
    g2 = FiniteTable.cyclic(2, "s")
    ideal = augmentation_ideal(g2)
    zero = ModuleMorphism(ideal, ideal,
                          LambdaMatrix.zero(g2, ideal.ngens, ideal.ngens),
                          check=False)
    v = derived_equivalence(zero)
    assert v.status == "not"


def test_derived_equivalence_solid_torus_nu_shape():
    # Lambda -> I(Z), 1 -> t^-1 - 1 is an isomorphism
    z = InfiniteCyclic("t")
    free = PresentedModule(z, 1)
    ideal = augmentation_ideal(z)
    tinv = z.unit(-1)
    f = ModuleMorphism(free, ideal, LambdaMatrix.from_rows(z, [[-tinv]]),
                       check=False)
    # image t^-1 - 1 = (-t^-1) * (t - 1): coefficient -t^-1 over the generator
    v = derived_equivalence(f)
    assert v.is_equivalence()
    # witnesses compose to the identity up to projectives
    from pdpairs.presented import morphism_null_in_derived
    gi = v.inverse
    comp = gi.compose_with(f)
    diff = comp - ModuleMorphism.identity(free)
    assert morphism_null_in_derived(diff) == "yes"


def test_derived_equivalence_on_free_modules_is_trivial():
    # free modules are zero objects in the projective homotopy category,
    # so even multiplication by 2 on Lambda is an equivalence there
    z = InfiniteCyclic("t")
    free = PresentedModule(z, 1)
    two = ModuleMorphism(free, free,
                         LambdaMatrix.from_int_rows(z, [[2]]), check=False)
    v = derived_equivalence(two)
    assert v.is_equivalence()


def test_derived_equivalence_unknown_for_infinite_trivial_module():
    # the trivial module over Z[t, t^-1] has no bounded-support inverse
    # certificate; the engine must stay honest and report unknown
    z = InfiniteCyclic("t")
    t = z.unit(1)
    triv = PresentedModule(z, 1, LambdaMatrix.from_rows(z, [[t - 1]]))
    zero = ModuleMorphism(triv, triv, LambdaMatrix.zero(z, 1, 1),
                          check=False)
    v = derived_equivalence(zero, radius=2)
    assert v.status == "unknown"


def test_factorization_iso_case():
    z = InfiniteCyclic("t")
    free = PresentedModule(z, 1)
    f = ModuleMorphism(free, free,
                       LambdaMatrix.from_rows(z, [[z.unit(3)]]), check=False)
    fact = search_factorization(f)
    assert fact is not None
    assert fact.free_rank == 0 and fact.q_rank == 0
    assert verify_factorization(fact)


def test_factorization_projection_off_free_summand():
    g3 = FiniteTable.cyclic(3, "g")
    ideal = augmentation_ideal(g3)
    # A = I + Lambda presented jointly, f = projection to I
    model = g3
    rel = ideal.relations
    a_rel = LambdaMatrix(model, ideal.ngens + 1, rel.cols,
                         [list(rel.data[i]) for i in range(ideal.ngens)]
                         + [[model.zero()] * rel.cols])
    A = PresentedModule(model, ideal.ngens + 1, a_rel, label="I+L")
    fmat = LambdaMatrix.zero(model, ideal.ngens, ideal.ngens + 1)
    for i in range(ideal.ngens):
        fmat.data[i][i] = model.one()
    f = ModuleMorphism(A, ideal, fmat, check=False)
    fact = search_factorization(f)
    assert fact is not None
    assert fact.q_rank == 1
    assert verify_factorization(fact)


def test_factorization_respects_composite():
    z = InfiniteCyclic("t")
    free = PresentedModule(z, 2)
    fmat = LambdaMatrix.from_rows(
        z, [[z.one(), z.zero()], [z.unit(1), z.one()]])
    f = ModuleMorphism(free, free, fmat, check=False)
    fact = search_factorization(f)
    assert fact is not None and verify_factorization(fact)


def test_G_on_map_of_homotopic_maps_is_derived_equal():
    # f = id and g = id + boundary-homotopy term induce the same morphism
    # of cokernels in the derived category (free targets)
    from pdpairs.chains import LambdaChainMap
    from pdpairs.presented import G_on_map, morphism_null_in_derived
    z = InfiniteCyclic("t")
    t = z.unit(1)
    c = LambdaComplex(z, {0: 1, 1: 1},
                      {1: LambdaMatrix.from_rows(z, [[t - 1]])}, check=False)
    f = LambdaChainMap.identity(c)
    # g = f + d h + h d with h: C_0 -> C_1 given by 1
    h0 = LambdaMatrix.identity(z, 1)
    comp0 = f.component(0) + compose(c.boundary_or_zero(1), h0)
    comp1 = f.component(1) + compose(h0, c.boundary_or_zero(1))
    g = LambdaChainMap(c, c, 0, {0: comp0, 1: comp1})
    gf = G_on_map(f, 0)
    gg = G_on_map(g, 0)
    assert morphism_null_in_derived(gf - gg) == "yes"
    # the generator matrices genuinely differ; equality only holds in the
    # quotient and the derived category
    assert gf.matrix != gg.matrix
