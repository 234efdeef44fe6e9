"""Fundamental triples, nu, derived equivalence as an oracle."""

import pytest

from pdpairs.catalog import (
    build_d3,
    build_lens,
    build_solid_torus,
    build_solid_torus_collared,
)
from pdpairs.chains import LambdaChainMap, LambdaMatrix
from pdpairs.groups import InfiniteCyclic
from pdpairs.invariants import (
    InvariantError,
    check_realisation_necessity,
    compute_nu,
    extract_triple,
    nu_difference_is_null,
    nu_of_pair,
    nu_verdict,
    triples_isomorphic_under,
)
from pdpairs.pairs import verify_pd
from pdpairs.presented import G_functor, ModuleMorphism, morphism_null_in_derived


def verified(builder):
    pair = builder()
    verdict = verify_pd(pair)
    assert verdict.passed()
    return pair, verdict


def test_extract_triple_requires_verified():
    pair = build_d3()
    from pdpairs.pairs import PDVerdict
    with pytest.raises(InvariantError):
        extract_triple(pair, PDVerdict("fail"))


def test_extract_triple_d3():
    pair, verdict = verified(build_d3)
    t = extract_triple(pair, verdict)
    assert [c.name for c in t.system] == ["sphere"]
    assert t.mu == [1]
    assert t.level == "pair"


def test_extract_triple_solid_torus_kappa():
    pair, verdict = verified(build_solid_torus)
    t = extract_triple(pair, verdict)
    comp = t.system[0]
    assert comp.name == "torus"
    assert comp.kappa_names(pair.model) == {"x": "1", "y": "t"}


def test_triples_isomorphic_identity():
    pair, verdict = verified(build_solid_torus)
    t = extract_triple(pair, verdict)
    ident = lambda k: k
    assert triples_isomorphic_under(ident, ident, t, t)


def test_triples_isomorphic_meridian_inversion_needs_flag():
    # t -> t^-1 with mu negated: true with the orientation flag, else false
    pair1, v1 = verified(build_solid_torus)
    t1 = extract_triple(pair1, v1)
    # build the relabeled pair: apply t -> t^-1 to all boundary entries
    import pdpairs.catalog as cat
    pair2 = cat.build_solid_torus()
    model = pair2.model
    inv = lambda k: model.inv(k)
    for d, m in list(pair2.P.boundary.items()):
        pair2.P.boundary[d] = m.map_entries(
            lambda r: type(r)(model, {model.inv(g): c
                                      for g, c in r.support.items()}))
    diag = {}
    for cell, tensor in pair2.diagonal.items():
        out = type(tensor)(model)
        for (a, g, b), coeff in tensor.terms.items():
            moved = type(coeff)(model, {model.inv(k): c
                                        for k, c in coeff.support.items()})
            out.add_term(a, model.inv(g), b, moved)
        diag[cell] = out
    kappa = {g: model.inv(k) for g, k in
             pair2.boundary_components[0].kappa.items()}
    pair2.boundary_components[0].kappa = kappa
    pair2.diagonal = diag
    pair2._build_quotient()
    pair2.validate()
    v2 = verify_pd(pair2)
    assert v2.passed()
    t2 = extract_triple(pair2, v2)
    t2.mu = [-c for c in t2.mu]
    assert triples_isomorphic_under(inv, inv, t1, t2, orientation_flip=True)
    assert not triples_isomorphic_under(inv, inv, t1, t2)


def test_triples_with_different_omega_fail():
    pair1, v1 = verified(build_solid_torus)
    t1 = extract_triple(pair1, v1)
    # the same pair viewed over the orientation-twisted ring is not even a
    # homomorphic match for omega
    zflip = InfiniteCyclic("t", omega_gen=1)
    t2 = extract_triple(pair1, v1)
    t2.model = zflip
    ident = lambda k: k
    assert not triples_isomorphic_under(ident, ident, t1, t2)


def test_nu_solid_torus_matches_hand_witness():
    pair, verdict = verified(build_solid_torus)
    nu = nu_of_pair(pair, verdict.fundamental_class)
    model = pair.model
    assert nu.raw_images == [model.unit(-1) - 1]  # t^-1 - 1
    nu = nu_verdict(nu)
    assert nu.verdict.is_equivalence()


def test_nu_d3_vacuous():
    pair, verdict = verified(build_d3)
    nu = nu_of_pair(pair, verdict.fundamental_class)
    assert nu.source.ngens == 0 and nu.target.ngens == 0
    nu = nu_verdict(nu)
    assert nu.verdict.is_equivalence()


def test_nu_is_additive_and_odd():
    pair, verdict = verified(build_solid_torus)
    x = verdict.fundamental_class
    nu1 = nu_of_pair(pair, x)
    nu2 = nu_of_pair(pair, [-c for c in x])
    assert (nu1.morphism + nu2.morphism).is_zero()
    double = nu_of_pair(pair, [2 * c for c in x])
    assert double.morphism.equals(nu1.morphism.scale(2))


def test_nu_rejects_non_cycles():
    pair = build_solid_torus()
    rel = pair.D
    # in the broken fixture the top chain is not a cycle
    from pdpairs.catalog import build_broken_boundary_sign
    broken = build_broken_boundary_sign()
    with pytest.raises(InvariantError, match="cycle"):
        compute_nu(broken.D, 2, [1])


def test_nu_natural_under_relative_equivalence():
    """Two chain-level models of the solid torus give compatible nu."""
    marked, vm = verified(build_solid_torus)
    collared, vc = verified(build_solid_torus_collared)
    model = marked.model
    # g: marked relative complex -> collared relative complex
    src = marked.D
    tgt = collared.D
    comp2 = LambdaMatrix.zero(model, tgt.rank(2), src.rank(2))
    comp2.data[tgt.cell_index("m")[1]][0] = model.one()
    comp3 = LambdaMatrix.zero(model, tgt.rank(3), src.rank(3))
    comp3.data[tgt.cell_index("E1")[1]][0] = model.one()
    comp3.data[tgt.cell_index("E2")[1]][0] = model.one()
    g = LambdaChainMap(src, tgt, 0, {2: comp2, 3: comp3})
    # mu transports to the collared class
    assert vc.fundamental_class == [1, 1]
    nu_marked = nu_of_pair(marked, vm.fundamental_class)
    nu_collared = nu_of_pair(collared, vc.fundamental_class)
    # F^2(g): collared F^2 -> marked F^2 via the bar-transposed component
    from pdpairs.presented import F_functor
    f2_src = F_functor(tgt, 2)
    f2_tgt = F_functor(src, 2)
    induced = ModuleMorphism(f2_src, f2_tgt, comp2.bar_transpose(),
                             check=True)
    composed = nu_marked.morphism.compose_with(induced)
    diff = composed - nu_collared.morphism
    assert morphism_null_in_derived(diff) == "yes"


def test_check_realisation_necessity_all_catalog():
    for builder in (build_d3, build_solid_torus, lambda: build_lens(3)):
        pair, verdict = verified(builder)
        rep = check_realisation_necessity(pair, verdict)
        assert rep.status() == "homotopy-equivalence", pair.name
        assert not rep.contradiction


def test_nu_difference_null_reflexive():
    pair, verdict = verified(lambda: build_lens(3))
    nu1 = nu_of_pair(pair, verdict.fundamental_class)
    nu2 = nu_of_pair(pair, verdict.fundamental_class)
    assert nu_difference_is_null(nu1, nu2) == "yes"


def test_derived_equivalence_witnesses_compose():
    pair, verdict = verified(lambda: build_lens(3))
    nu = nu_verdict(nu_of_pair(pair, verdict.fundamental_class))
    assert nu.verdict.is_equivalence()
    g = nu.verdict.inverse
    comp = g.compose_with(nu.morphism)
    ident = ModuleMorphism.identity(nu.source)
    assert morphism_null_in_derived(comp - ident) == "yes"
