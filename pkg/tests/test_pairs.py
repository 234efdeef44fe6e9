"""The duality engine: diagonals, slant, cap, ladder, verdicts, sums."""

import random

import pytest

from pdpairs.catalog import (
    build_broken_boundary_sign,
    build_broken_doubled,
    build_broken_noncycle,
    build_d3,
    build_d3_collared,
    build_lens,
    build_solid_torus,
    build_solid_torus_collared,
)
from pdpairs.chains import LambdaComplex, LambdaMatrix, apply_matrix, is_nullhomotopic
from pdpairs.groups import InfiniteCyclic, TrivialGroup
from pdpairs.intlinalg import mat_vec
from pdpairs.pairs import (
    ChainPairData,
    LambdaTensor,
    PairError,
    TensorChain,
    algebraic_sum,
    boundary_pair,
    cap_top_identity,
    check_cap_top_identity,
    evaluation_square_maps,
    slant,
    solve_diagonal_cell,
    tensor_of_chains,
    twisted_to_chain,
    verify_ladder,
    verify_pd,
)


PASS_BUILDERS = [build_d3, build_d3_collared, build_solid_torus,
                 build_solid_torus_collared, lambda: build_lens(2),
                 lambda: build_lens(3)]


def random_ring(model, rng, radius=2, terms=2):
    ball = model.ball(radius)
    out = model.zero()
    for _ in range(terms):
        out = out + model.unit(ball[rng.randrange(len(ball))],
                               rng.randint(-2, 2))
    return out


def test_pair_constructor_rejects_bad_counit():
    triv = TrivialGroup()
    one = triv.one()
    c = LambdaComplex(triv, {0: 1, 2: 1}, {}, augmentation=[one],
                      basis_names={0: ("v",), 2: ("F",)})
    diag = {
        (0, 0): LambdaTensor(triv, {((0, 0), (), (0, 0)): one}),
        (2, 0): LambdaTensor(triv, {((0, 0), (), (2, 0)): one}),  # one side only
    }
    with pytest.raises(PairError, match="counit"):
        ChainPairData(c, {}, diag)


def test_pair_constructor_rejects_incompatible_subdiagonal():
    pair = build_d3()
    diag = dict(pair.diagonal)
    t = diag[(2, 0)].copy()
    t.add_term((2, 0), (), (0, 0), pair.model.one())  # breaks counit too
    # move the boundary 2-cell's diagonal outside the subcomplex instead
    bad = LambdaTensor(pair.model)
    bad.add_term((0, 0), (), (2, 0), pair.model.one())
    bad.add_term((2, 0), (), (0, 0), pair.model.one())
    # retarget: F's diagonal referencing the interior 3-cell is impossible
    # degree-wise, so break compatibility via a subcomplex that omits v
    with pytest.raises(PairError):
        ChainPairData(pair.P, {2: (0,)}, dict(pair.diagonal))


def test_relative_diagonal_d3():
    pair = build_d3()
    cell = pair.cell("E")
    rel = pair.relative_diagonal(cell, "left")
    assert ((0, 0), (), (3, 0)) in rel.terms  # v (x) E survives
    relr = pair.relative_diagonal(cell, "right")
    assert ((3, 0), (), (0, 0)) in relr.terms


def test_relative_diagonal_empty_sub_is_full_diagonal():
    pair = build_lens(3)
    cell = pair.cell("E")
    assert pair.relative_diagonal(cell, "left") == pair.diagonal[cell]


def test_tensor_chain_boundary_squares_to_zero():
    pair = build_solid_torus()
    x, _ = pair.fundamental_class_candidate()
    z = pair.class_tensor(x, "left")
    dz = z.boundary(pair.P, pair.D)
    ddz = dz.boundary(pair.P, pair.D)
    assert ddz.is_zero()


def test_class_tensor_is_cycle():
    for builder in (build_solid_torus, build_d3, lambda: build_lens(3)):
        pair = builder()
        x, _ = pair.fundamental_class_candidate()
        z = pair.class_tensor(x, "left")
        assert z.boundary(pair.P, pair.D).is_zero()
        z2 = pair.class_tensor(x, "right")
        assert z2.boundary(pair.D, pair.P).is_zero()


def test_slant_zero_cochain():
    pair = build_solid_torus()
    x, _ = pair.fundamental_class_candidate()
    z = pair.class_tensor(x, "left")
    out = slant(pair.model, 2, lambda i: pair.model.zero(), z)
    assert out == {}


def test_slant_degree_zero_picks_component():
    # phi = augmentation dual at the basepoint: slant returns the d-part
    pair = build_d3()
    x, _ = pair.fundamental_class_candidate()
    z = pair.class_tensor(x, "left")
    out = slant(pair.model, 0, lambda i: pair.model.one(), z)
    assert list(out) == [(3, 0)]


def test_slant_is_chain_map_random():
    """d(phi/z) = (-1)^{k+1} (phi.d)/z + (-1)^k phi/(dz), in chain form."""
    pair = build_solid_torus()
    model = pair.model
    rng = random.Random(4)
    P, D = pair.P, pair.D
    for k in (0, 1, 2, 3):
        for _ in range(6):
            # random (not closed) tensor of total degree n in P (x) D form
            z = TensorChain(model)
            ball = model.ball(1)
            for _ in range(3):
                da = rng.choice([d for d in P.degrees()])
                db_opts = [d for d in D.degrees()]
                db = rng.choice(db_opts)
                ia = rng.randrange(P.rank(da))
                ib = rng.randrange(D.rank(db))
                g = ball[rng.randrange(len(ball))]
                z.add_term(((da, ia), g, (db, ib)), rng.randint(-2, 2))
            phi_row = [random_ring(model, rng, 1) for _ in range(P.rank(k))]

            def phi(i, row=phi_row):
                return row[i]

            lhs_tw = slant(model, k, phi, z)
            lhs = twisted_to_chain(lhs_tw)
            # d of the chain, per degree of the second factor
            dm = {}
            for (db, ib), val in lhs.items():
                bd = D.boundary_or_zero(db)
                for r in range(bd.rows):
                    e = bd.data[r][ib]
                    if e.is_zero():
                        continue
                    key = (db - 1, r)
                    dm[key] = dm.get(key, model.zero()) + val * e
            dm = {kk: v for kk, v in dm.items() if not v.is_zero()}
            # rhs: (-1)^{k+1} (phi . d)/z + (-1)^k phi/(dz)
            d_next = P.boundary_or_zero(k + 1)

            def phi_d(i):
                col = d_next.column(i) if d_next.cols else []
                out = model.zero()
                for j, e in enumerate(col):
                    if not e.is_zero():
                        out = out + e * phi_row[j]
                return out

            s1 = twisted_to_chain(slant(model, k + 1, phi_d, z))
            s2 = twisted_to_chain(slant(model, k, phi,
                                        z.boundary(P, D)))
            sign1 = -1 if (k + 1) % 2 else 1
            sign2 = -1 if k % 2 else 1
            rhs = {}
            for src, sgn in ((s1, sign1), (s2, sign2)):
                for kk, v in src.items():
                    rhs[kk] = rhs.get(kk, model.zero()) + v * sgn
            rhs = {kk: v for kk, v in rhs.items() if not v.is_zero()}
            assert dm == rhs


def test_phi_d_formula_matches_dual_boundary():
    # the cochain differential used above is the bar-transpose convention
    pair = build_solid_torus()
    P = pair.P
    dual = P.hom_dual()
    m = dual.boundary_or_zero(-2)
    assert m == P.boundary_or_zero(3).bar_transpose()


def test_cap_with_is_chain_map_and_rejects_noncycle():
    pair = build_solid_torus()
    x, _ = pair.fundamental_class_candidate()
    cap = pair.cap_with(x, side="P")
    cap.validate()
    capd = pair.cap_with(x, side="D")
    capd.validate()
    broken = build_broken_noncycle()
    with pytest.raises(PairError, match="cycle"):
        broken.cap_with(broken.class_override, side="P")


def test_cap_d3_generator_to_generator():
    pair = build_d3()
    x, _ = pair.fundamental_class_candidate()
    cap = pair.cap_with(x, side="P")
    # H^0(P) -> H_3(D): the vertex dual maps to the top cell
    m = cap.component(0)
    assert m.rows == 1 and m.cols == 1
    assert abs(m.data[0][0].aug()) == 1


def test_connecting_map_is_chain_map_and_hits_boundary_class():
    pair = build_solid_torus()
    w = pair.connecting_map()
    w.validate()
    x, _ = pair.fundamental_class_candidate()
    delta = pair.boundary_class(x)
    # the boundary torus class is the full surface cycle T + d
    names = [pair.Q.name_of(2, i) for i in range(pair.Q.rank(2))]
    got = dict(zip(names, delta))
    assert got == {"T": 1, "d": 1}


def test_connecting_of_sub_cycle_is_zero():
    # a cycle supported on the subcomplex maps to zero through the quotient
    pair = build_solid_torus()
    w = pair.connecting_map()
    n = pair.dimension
    proj = pair.projection_map()
    intp = proj.component(2).to_int_signed()
    # image under projection of the boundary cycle T + d is zero
    qcells = pair._q_cells[2]
    vec = [0] * pair.P.rank(2)
    for i, name in ((i, pair.P.name_of(2, i)) for i in qcells):
        vec[i] = 1
    assert all(v == 0 for v in mat_vec(intp, vec))


def test_dual_connecting_map_is_chain_map():
    pair = build_solid_torus()
    pair.dual_connecting_map().validate()


def test_verify_pd_catalog_passes():
    for builder in PASS_BUILDERS:
        pair = builder()
        v = verify_pd(pair)
        assert v.passed(), (pair.name, v.reason)


def test_verify_pd_broken_fixtures_fail():
    v = verify_pd(build_broken_boundary_sign())
    assert v.status == "fail" and "infinite cyclic" in v.reason
    v = verify_pd(build_broken_doubled())
    assert v.status == "fail"
    v = verify_pd(build_broken_noncycle())
    assert v.status == "fail" and "cycle" in v.reason


def test_verify_pd_doubled_fails_duality_even_without_delta_check():
    # strip the component marking so the failure reaches the cap stage
    pair = build_broken_doubled()
    pair.boundary_components = []
    v = verify_pd(pair)
    assert v.status == "fail"
    assert "cone" in v.reason or "cap" in v.reason


def test_pass_implies_ladder_passes():
    for builder in PASS_BUILDERS:
        pair = builder()
        v = verify_pd(pair)
        assert v.passed()
        rep = verify_ladder(pair, v.fundamental_class)
        assert rep.status == "pass", (pair.name, rep.sign_table())


def test_ladder_degenerate_for_closed_pairs():
    rep = verify_ladder(build_lens(5))
    assert rep.status == "pass"
    assert all(sq.method == "degenerate" for sq in rep.squares)


def test_ladder_sign_table_stable():
    pair = build_solid_torus()
    t1 = verify_ladder(pair).sign_table()
    t2 = verify_ladder(pair).sign_table()
    assert t1 == t2


def test_cap_top_identity_exact_on_random_cocycles():
    rng = random.Random(9)
    for builder in (build_d3, build_solid_torus, lambda: build_lens(3),
                    build_d3_collared):
        pair = builder()
        v = verify_pd(pair)
        x = v.fundamental_class
        w1 = cap_top_identity(pair, x)
        assert w1 is not None, pair.name
        for _ in range(20):
            phi = [random_ring(pair.model, rng) for _ in
                   range(pair.D.rank(pair.dimension))]
            assert check_cap_top_identity(pair, x, w1, phi), pair.name


def test_evaluation_square_commutes_exactly():
    for builder in (build_d3, build_solid_torus, lambda: build_lens(3)):
        pair = builder()
        v = verify_pd(pair)
        a, b = evaluation_square_maps(pair, v.fundamental_class)
        assert is_nullhomotopic(a - b, 3).found(), pair.name


def test_boundary_pair_of_solid_torus_is_closed_torus():
    pair = build_solid_torus()
    bp = boundary_pair(pair)
    assert bp.dimension == 2
    h = bp.P.tensor_Zomega().homology(2)
    assert h.is_infinite_cyclic()


def test_tensor_of_chains_normalization():
    z = InfiniteCyclic("t")
    t = z.unit(1)
    left = [t - 1]
    right = [z.unit(2)]
    out = tensor_of_chains(z, left, 2, right, 1)
    # (t c - c) (x) t^2 e  =  t (c (x) t e) - (c (x) t^2 e)
    assert out.terms[((2, 0), 1, (1, 0))] == t
    assert out.terms[((2, 0), 2, (1, 0))] == z.from_int(-1)


def test_solve_diagonal_cell_reproduces_known_diagonal():
    pair = build_solid_torus()
    partial = {c: t for c, t in pair.diagonal.items() if c[0] < 3}
    cell = pair.cell("E")
    solved = solve_diagonal_cell(pair.P, partial, cell, radius=2)
    assert solved is not None
    # must satisfy the same chain-map law as the stored diagonal
    full = dict(partial)
    full[cell] = solved
    ChainPairData(pair.P, dict(pair.sub_cells), full,
                  boundary_components=pair.boundary_components,
                  name="resolved")


def test_algebraic_sum_two_of_three_on_interior_model():
    l3, r3 = build_d3_collared(), build_d3_collared()
    from pdpairs.sums import SumRecipe, interior_sum
    out = interior_sum(SumRecipe("interior", l3, r3, top_cells=("E2", "E2")),
                       (verify_pd(l3), verify_pd(r3)))
    pair = out.pair
    assign = {}
    for d in pair.P.degrees():
        for i in range(pair.P.rank(d)):
            nm = pair.P.name_of(d, i)
            if nm in ("v", "Fm.2"):
                assign[nm] = 0
            elif nm.endswith(".1") or nm == "Esum":
                assign[nm] = 1
            else:
                assign[nm] = 2
    conds = algebraic_sum(pair, assign)
    assert conds.all_pass()
    assert all(im["confirmed"] for im in conds.implications)


def test_algebraic_sum_rejects_open_partition():
    pair = build_d3_collared()
    assign = {nm: 1 for d in pair.P.degrees()
              for i in range(pair.P.rank(d))
              for nm in [pair.P.name_of(d, i)]}
    assign["Fm"] = 2  # E1's boundary now crosses sides
    with pytest.raises(PairError, match="not closed"):
        algebraic_sum(pair, assign)


def test_verdict_json_shape():
    v = verify_pd(build_solid_torus())
    data = v.to_json_dict()
    assert set(data) >= {"status", "degree_certificates", "witnesses",
                         "fundamental_class"}


def test_connecting_map_d3_hits_sphere_class():
    pair = build_d3()
    x, _ = pair.fundamental_class_candidate()
    delta = pair.boundary_class(x)
    assert delta == [1]  # the boundary sphere's fundamental cycle


def test_boundary_class_lives_in_expected_degree():
    pair = build_d3_collared()
    x, _ = pair.fundamental_class_candidate()
    delta = pair.boundary_class(x)
    assert len(delta) == pair.Q.rank(2)
    assert any(delta)
