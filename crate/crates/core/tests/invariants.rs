use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use steinberg_core::exactalg::{cokernel_of_span, quotient_structure, snf, IntMatrix};
use steinberg_core::matrix2::Mat2;
use steinberg_core::modsym::{chain_edge_vector, cusp_path_to_unimodular, psi_class, Cusp};
use steinberg_core::projline::P1List;
use steinberg_core::psi::EchelonSpan;
use steinberg_core::voronoi::cached_homology;
use steinberg_core::{FgAbGroup, GammaFlavor};

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> IntMatrix {
    let rows: Vec<Vec<i64>> = entries.chunks(cols).take(rows).map(<[i64]>::to_vec).collect();
    IntMatrix::from_rows(cols, &rows)
}

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(-9i64..=9, r * c).prop_map(move |e| matrix(r, c, &e))
    })
}

/// Words in `T = [1 1; 0 1]` and `L = [1 0; n 1]`, which lie in `Gamma_0(n)`.
fn gamma0_word(n: i64) -> impl Strategy<Value = Mat2> {
    prop::collection::vec((any::<bool>(), -3i64..=3), 1..6).prop_map(move |word| {
        word.into_iter().fold(Mat2::identity(), |acc, (t, k)| {
            let g = if t { Mat2::new(1, k, 0, 1) } else { Mat2::new(1, 0, n * k, 1) };
            &acc * &g
        })
    })
}

fn add_mod(moduli: &[BigInt], x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    x.iter()
        .zip(y)
        .zip(moduli)
        .map(|((a, b), m)| if m.is_zero() { a + b } else { (a + b).mod_floor(m) })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_form_is_a_decomposition(a in small_matrix()) {
        let d = snf(&a);
        prop_assert_eq!(&(&d.u * &a) * &d.v, d.s.clone());
        prop_assert!(d.u.determinant().abs().is_one());
        prop_assert!(d.v.determinant().abs().is_one());
        let diag = d.diagonal();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn smith_form_ignores_row_order(a in small_matrix()) {
        let mut rows = a.to_rows();
        rows.reverse();
        let b = IntMatrix::from_rows(a.cols(), &rows);
        prop_assert_eq!(snf(&a).diagonal(), snf(&b).diagonal());
    }

    #[test]
    fn group_text_roundtrips(free in 0usize..4, orders in prop::collection::vec(1u64..60, 0..5)) {
        let g = FgAbGroup::from_cyclic_orders(free, &orders);
        let back: FgAbGroup = g.to_string().parse().unwrap();
        prop_assert_eq!(&back, &g);
        let product: u64 = orders.iter().product();
        prop_assert_eq!(g.torsion_order(), BigInt::from(product));
    }

    #[test]
    fn p1_normalisation_is_projective(n in 1u64..200, c in -500i64..500, d in -500i64..500, u in 1u64..200) {
        let list = P1List::new(n);
        prop_assume!(u.gcd(&n) == 1);
        let (bc, bd) = (BigInt::from(c), BigInt::from(d));
        if let Ok(p) = list.normalize(&bc, &bd) {
            let scaled = list.normalize(&(&bc * u + n as i64 * 7), &(&bd * u)).unwrap();
            prop_assert_eq!(p.index, scaled.index);
            prop_assert_eq!(list.point(p.index).index, p.index);
        } else {
            prop_assert!(BigInt::from(n).gcd(&bc).gcd(&bd) != BigInt::one());
        }
    }

    #[test]
    fn p1_action_composes(n in 2u64..120, g in gamma0_word(1), h in gamma0_word(1), i in 0usize..1000) {
        let list = P1List::new(n);
        let p = list.point(i % list.len());
        let gh = &g * &h;
        prop_assert_eq!(list.act(list.act(p, &g), &h).index, list.act(p, &gh).index);
    }

    #[test]
    fn echelon_span_matches_direct_cokernel(
        moduli in prop::collection::vec(prop_oneof![Just(0i64), 1i64..7], 1..5),
        vectors in prop::collection::vec(prop::collection::vec(-6i64..=6, 5), 0..6),
    ) {
        let d = moduli.len();
        let moduli: Vec<BigInt> = moduli.into_iter().map(BigInt::from).collect();
        let mut span = EchelonSpan::new(&moduli);
        let vectors: Vec<Vec<BigInt>> = vectors
            .into_iter()
            .map(|v| v[..d].iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        for v in &vectors {
            span.insert(v.clone());
        }
        let relations: Vec<Vec<BigInt>> = moduli
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, m)| {
                let mut r = vec![BigInt::zero(); d];
                r[i] = m.clone();
                r
            })
            .collect();
        let expected = cokernel_of_span(&IntMatrix::from_rows(d, &relations), &vectors);
        prop_assert_eq!(span.cokernel(), expected.clone());
        prop_assert_eq!(quotient_structure(d, &IntMatrix::from_rows(d, &span.basis())), expected);
    }

    #[test]
    fn psi_is_additive_at_level_eleven(g in gamma0_word(11), h in gamma0_word(11)) {
        let hom = cached_homology(11, GammaFlavor::Gamma0Pm).unwrap();
        let pg = psi_class(&g, &hom).unwrap();
        let ph = psi_class(&h, &hom).unwrap();
        prop_assert_eq!(psi_class(&(&g * &h), &hom).unwrap(), add_mod(hom.moduli(), &pg, &ph));
    }

    #[test]
    fn unimodular_paths_telescope(
        a in (-40i64..40, 1i64..40),
        b in (-40i64..40, 1i64..40),
        c in (-40i64..40, 1i64..40),
    ) {
        let hom = cached_homology(15, GammaFlavor::Gamma0).unwrap();
        let cusp = |(p, q): (i64, i64)| Cusp::new(p, q).unwrap();
        let (u, v, w) = (cusp(a), cusp(b), cusp(c));
        let edges = |x: &Cusp, y: &Cusp| chain_edge_vector(&cusp_path_to_unimodular(x, y), &hom.complex).unwrap();
        let (uv, vw, uw) = (edges(&u, &v), edges(&v, &w), edges(&u, &w));
        let loop_: Vec<BigInt> = uv.iter().zip(&vw).zip(&uw).map(|((x, y), z)| x + y - z).collect();
        prop_assert!(hom.reduce(&loop_).unwrap().iter().all(Zero::is_zero));
    }
}
