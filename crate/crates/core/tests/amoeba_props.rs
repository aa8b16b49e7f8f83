use proptest::prelude::*;
use schreier_lab::amoeba::{Amoeba, Move};
use schreier_lab::hyperfinite::{partition_heuristic, HeuristicStrategy};

fn pick(a: &Amoeba, choice: usize) -> Move {
    let cycles: Vec<usize> = (0..a.cycles().len()).filter(|&i| !a.cycles()[i].is_loop()).collect();
    let loops: Vec<usize> = (0..a.vertex_count()).filter(|&v| (0..4).any(|l| a.neighbor(v, l) == v)).collect();
    let i = choice % (cycles.len() + loops.len());
    if i < cycles.len() {
        Move::Cycle(cycles[i])
    } else {
        Move::Loop(loops[i - cycles.len()])
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn doublings_preserve_the_invariants(choices in prop::collection::vec(any::<usize>(), 1..8)) {
        let mut a = Amoeba::minimal();
        let mut total: Option<schreier_lab::amoeba::Covering> = None;
        let mut radius = a.tree_radius(0);
        for c in choices {
            let (b, cov) = a.double(pick(&a, c)).unwrap();
            prop_assert!(b.verify().is_ok());
            prop_assert_eq!(b.vertex_count(), 2 * a.vertex_count());
            prop_assert!(cov.verify(&b, &a).is_ok());
            prop_assert_eq!(cov.apply(0), 0);
            let r = b.tree_radius(0);
            prop_assert!(r >= radius);
            radius = r;
            let g = b.to_graph();
            prop_assert_eq!(&Amoeba::from_graph(&g).unwrap(), &b);
            total = Some(match total {
                None => cov,
                Some(prev) => cov.then(&prev),
            });
            a = b;
        }
        let base = Amoeba::minimal();
        let fold = a.vertex_count() / base.vertex_count();
        prop_assert!(total.unwrap().verify_fold(&a, &base, fold).is_ok());
    }

    #[test]
    fn separator_certificates_verify_on_amoebas(choices in prop::collection::vec(any::<usize>(), 1..9), k in 1usize..12) {
        let mut a = Amoeba::minimal();
        for c in choices {
            a = a.double(pick(&a, c)).unwrap().0;
        }
        let g = a.to_graph();
        let cert = partition_heuristic(&g, k, HeuristicStrategy::PlanarSeparator, None).unwrap();
        prop_assert!(cert.verify(&g).is_ok());
    }
}
