use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use gck::graphs::{Graph, StagedGraph, VertexSet};
use gck::ktheory::k_groups;
use gck::sixterm::{ksix_from_graph, verify_exactness, Invariant};
use gck::synth::{glue, realize_pi_simple, verify_pi, GlueProblem};
use gck::zlin::{snf, FgAbelianGroup, IntMatrix};

fn matrix(max_r: usize, max_c: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_r, 1..=max_c).prop_flat_map(move |(r, c)| {
        prop::collection::vec(lo..=hi, r * c)
            .prop_map(move |v| IntMatrix::from_fn(r, c, |i, j| BigInt::from(v[i * c + j])))
    })
}

fn counts(n: usize, hi: u64) -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0..=hi, n), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_is_a_unimodular_diagonalisation(m in matrix(6, 6, -12, 12)) {
        let s = snf(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn snf_of_transpose_has_the_same_factors(m in matrix(5, 5, -9, 9)) {
        prop_assert_eq!(snf(&m).diagonal(), snf(&m.transpose()).diagonal());
    }

    #[test]
    fn cokernel_reduce_and_lift_are_inverse(m in matrix(4, 4, -6, 6), x in prop::collection::vec(-20i64..=20, 4)) {
        let g = FgAbelianGroup::from_presentation(&m);
        let x: Vec<BigInt> = x[..m.rows()].iter().map(|&v| BigInt::from(v)).collect();
        let c = g.class_of(&x);
        prop_assert!(g.eq_elements(&g.class_of(&g.lift(&c)), &c));
        // relation columns are zero
        for col in m.columns() {
            prop_assert!(g.is_zero(&g.class_of(&col)));
        }
    }

    #[test]
    fn k_groups_ignore_vertex_order(adj in (1usize..=5).prop_flat_map(|n| counts(n, 3)), seed in any::<u64>()) {
        let n = adj.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&i| (seed.rotate_left(i as u32 * 7) ^ i as u64, i));
        let permuted: Vec<Vec<u64>> = perm.iter().map(|&i| perm.iter().map(|&j| adj[i][j]).collect()).collect();
        let a = k_groups(&Graph::from_counts(&adj));
        let b = k_groups(&Graph::from_counts(&permuted));
        prop_assert!(a.k0.same_canonical_form(&b.k0));
        prop_assert!(a.k1.same_canonical_form(&b.k1));
    }

    #[test]
    fn graph_text_round_trips(adj in (1usize..=5).prop_flat_map(|n| counts(n, 4))) {
        let g = Graph::from_counts(&adj);
        let again = Graph::parse(&g.to_text()).unwrap();
        prop_assert_eq!(again.adjacency(), g.adjacency());
        let s = StagedGraph::from_graph(g);
        prop_assert_eq!(StagedGraph::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn glued_graphs_are_exact_and_round_trip(
        a in counts(3, 3),
        b in counts(3, 3),
        y in counts(3, 2),
        n1 in 1usize..=3,
        n3 in 1usize..=3,
    ) {
        let n = n1 + n3;
        let mut adj = vec![vec![0u64; n]; n];
        for v in 0..n {
            for w in 0..n {
                adj[v][w] = match (v < n1, w < n1) {
                    (true, true) => a[v][w] + 1 + u64::from(v == w),
                    (true, false) => 0,
                    (false, true) => y[v - n1][w],
                    (false, false) => b[v - n1][w - n1] + 1 + u64::from(v == w),
                };
            }
        }
        prop_assume!(adj[n1..].iter().any(|r| r[..n1].iter().any(|&m| m > 0)));
        let g = Graph::from_counts(&adj);
        let h = VertexSet::from_indices(n, &(0..n1).collect::<Vec<_>>());
        let inv = ksix_from_graph(&g, &h).unwrap();
        prop_assert!(verify_exactness(&inv).passed());
        prop_assert!(inv.hom("d0").is_zero());
        let again = Invariant::parse(&inv.to_text()).unwrap();
        prop_assert_eq!(again.to_text(), inv.to_text());
    }

    #[test]
    fn glue_meets_its_postconditions(
        a in matrix(3, 3, -3, 3),
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 3),
        gaps in prop::collection::vec(1i64..=3, 3),
        y in prop::collection::vec(-3i64..=3, 9),
        zb in prop::collection::vec(0i64..=6, 9),
        n3 in 2usize..=3,
    ) {
        let n1 = a.rows().min(a.cols());
        let a = a.submatrix(&(0..n1).collect::<Vec<_>>(), &(0..n1).collect::<Vec<_>>());
        let mut b = IntMatrix::from_fn(n3, n3, |i, j| BigInt::from(rows[i][j]));
        for k in 0..n3 {
            b[(1, k)] = &b[(0, k)] + BigInt::from(gaps[k]);
        }
        let y = IntMatrix::from_fn(n1, n3, |i, j| BigInt::from(y[i * 3 + j]));
        let zb = IntMatrix::from_fn(n1, n3, |i, j| BigInt::from(zb[i * 3 + j]));
        let m = IntMatrix::block_upper(&a, &y, &b);
        let g2 = FgAbelianGroup::from_presentation(&m);
        let pi2 = g2.reduce_matrix().clone();
        let mut yv = vec![BigInt::zero(); n1];
        yv.extend(std::iter::repeat_n(BigInt::one(), n3));
        let target = g2.reduce_coords(&pi2.mul_vec(&yv));
        let p = GlueProblem {
            a: a.clone(), b: b.clone(), y: y.clone(), z: zb.clone(), x: vec![BigInt::zero(); n1],
            dominance: (0, 1), g2: g2.clone(), pi2, target_g2: target,
        };
        let r = glue(&p).unwrap();
        prop_assert_eq!(&r.y_prime, &y.add(&r.q.mul(&b)));
        for i in 0..n1 {
            for k in 0..n3 {
                prop_assert!(r.y_prime[(i, k)] >= zb[(i, k)]);
            }
        }
        prop_assert_eq!(r.q.mul_vec(&vec![BigInt::one(); n3]), r.lift.clone());
        let m2 = IntMatrix::block_upper(&a, &r.y_prime, &b);
        prop_assert!(FgAbelianGroup::from_presentation(&m2).same_canonical_form(&g2));
        prop_assert!(r.alpha2.is_isomorphism());
    }

    #[test]
    fn pi_realizations_have_the_requested_k_theory(
        chain in prop::collection::vec(1i64..=3, 0..=2),
        free in 0usize..=2,
        f3 in 0usize..=2,
        unit in prop::collection::vec(-4i64..=4, 4),
    ) {
        // each factor a multiple of the previous one
        let mut torsion = Vec::new();
        let mut d = BigInt::one();
        for c in &chain {
            d *= BigInt::from(*c + 1);
            torsion.push(d.clone());
        }
        let g3 = FgAbelianGroup::canonical(&torsion, free).unwrap();
        let unit: Vec<BigInt> = g3.reduce_coords(&unit[..g3.ngens()].iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        match realize_pi_simple(&g3, &unit, f3) {
            Ok(p) => {
                prop_assert!(f3 <= free);
                verify_pi(&p, &g3, &unit, f3).unwrap();
                let k = k_groups(&p.graph);
                prop_assert!(k.k0.same_canonical_form(&g3));
                prop_assert_eq!(k.k1.free_rank(), f3);
                let n = p.graph.vertex_count();
                prop_assert!(g3.eq_elements(&g3.reduce_coords(&p.alpha.mul_vec(&vec![BigInt::one(); n])), &unit));
            }
            Err(e) => prop_assert!(f3 > free, "{e}"),
        }
    }
}
