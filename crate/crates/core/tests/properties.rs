mod common;

use common::*;
use modgsp::community::{z_scores, Partition};
use modgsp::denoise::{denoise, objective};
use modgsp::filters::{apply_window, SpectralWindow};
use modgsp::graph::{Graph, GraphSignal, ShiftKind, ShiftOperator};
use modgsp::io::{read_edge_list, read_signal, write_edge_list, write_signal};
use modgsp::sampling::{reconstruct, sample, BandlimitingOperator, SamplingSet, DEFAULT_RANK_TOL};
use modgsp::spectral::{decompose, SpectralBasis};
use modgsp::surrogate::{generate_surrogate, realization_rng, SurrogateMode};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::seq::index::sample as sample_indices;
use rand::Rng;

fn graph_from(seed: u64, lo: usize, hi: usize) -> Graph {
    random_graph(&mut rng(seed), lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn files_round_trip_exactly(seed in any::<u64>(), scale in 1e-6f64..1e6) {
        let g = graph_from(seed, 2, 40);
        let x: Vec<f64> = random_vec(&mut rng(seed ^ 1), g.node_count()).iter().map(|v| v * scale).collect();
        let dir = tempfile::tempdir().unwrap();
        let (ge, se) = (dir.path().join("g.csv"), dir.path().join("s.csv"));
        write_edge_list(&ge, &g).unwrap();
        write_signal(&se, &g, &x).unwrap();
        let back = read_edge_list(&ge).unwrap();
        prop_assert_eq!(back.content_hash(), g.content_hash());
        let s = read_signal(&se, &back).unwrap();
        prop_assert_eq!(s.values(), x.as_slice());
    }

    #[test]
    fn basis_binary_round_trip(seed in any::<u64>()) {
        let g = graph_from(seed, 2, 30);
        let b = decompose(&ShiftOperator::modularity(&g)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("q.bin");
        b.write_binary(&p).unwrap();
        let back = SpectralBasis::read_binary(&p).unwrap();
        prop_assert_eq!(back.eigenvalues(), b.eigenvalues());
        prop_assert_eq!(back.eigenvectors(), b.eigenvectors());
        prop_assert_eq!(back.kind(), ShiftKind::Modularity);
    }

    #[test]
    fn laplacian_and_modularity_identities(seed in any::<u64>()) {
        let g = graph_from(seed, 2, 30);
        let n = g.node_count();
        let a = dense_adjacency(&g);
        let x = random_vec(&mut rng(seed ^ 2), n);
        let ones = vec![1.0; n];
        let l = ShiftOperator::laplacian(&g);
        let q = ShiftOperator::modularity(&g);
        prop_assert!(max_abs_diff(&l.apply(&ones).unwrap(), &vec![0.0; n]) < 1e-12);
        prop_assert!(max_abs_diff(&q.apply(&ones).unwrap(), &vec![0.0; n]) < 1e-12);
        prop_assert!(l.quadratic_form(&x).unwrap() >= -1e-12);
        let mut smooth = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                smooth += a[(i, j)] * (x[i] - x[j]).powi(2);
            }
        }
        prop_assert!((smooth - l.quadratic_form(&x).unwrap()).abs() <= 1e-10 * smooth.max(1.0));
        // L + Q = D - kkᵀ/2M
        let k = dense_degrees(&a);
        let lx = l.apply(&x).unwrap();
        let qx = q.apply(&x).unwrap();
        let kx: f64 = k.iter().zip(&x).map(|(a, b)| a * b).sum();
        for i in 0..n {
            let expect = k[i] * x[i] - k[i] * kx / k.sum();
            prop_assert!((lx[i] + qx[i] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn operators_are_symmetric_and_shifts_psd(seed in any::<u64>()) {
        let g = graph_from(seed, 2, 30);
        let q = decompose(&ShiftOperator::modularity(&g)).unwrap();
        let (lmin, lmax) = (q.min_eigenvalue(), q.max_eigenvalue());
        let ops = [
            ShiftOperator::laplacian(&g),
            ShiftOperator::modularity(&g),
            ShiftOperator::modularity_plus(&g, lmax),
            ShiftOperator::modularity_minus(&g, lmin),
        ];
        let mut r = rng(seed ^ 3);
        let (x, y) = (random_vec(&mut r, g.node_count()), random_vec(&mut r, g.node_count()));
        for op in &ops {
            let yx: f64 = y.iter().zip(op.apply(&x).unwrap().iter()).map(|(a, b)| a * b).sum();
            let xy: f64 = x.iter().zip(op.apply(&y).unwrap().iter()).map(|(a, b)| a * b).sum();
            prop_assert!((xy - yx).abs() < 1e-10);
            if op.kind() != ShiftKind::Modularity {
                let b = match op.kind() {
                    ShiftKind::Laplacian => decompose(op).unwrap(),
                    k => q.shifted(k, if k == ShiftKind::ModularityPlus { lmax } else { lmin }).unwrap(),
                };
                prop_assert!(b.min_eigenvalue() >= -1e-9 * b.spectral_radius().max(1.0));
                prop_assert!(op.quadratic_form(&x).unwrap() >= -1e-10);
            }
        }
    }

    #[test]
    fn reconstruction_matches_dense_pseudo_inverse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 6, 30);
        let n = g.node_count();
        let basis = decompose(&ShiftOperator::laplacian(&g)).unwrap();
        let k = r.random_range(1..=n / 2);
        let band = sample_indices(&mut r, n, k).into_vec();
        let m = r.random_range(1..=n);
        let nodes = sample_indices(&mut r, n, m).into_vec();
        let b = BandlimitingOperator::new(&basis, band.clone()).unwrap();
        let set = SamplingSet::new(nodes.clone(), n).unwrap();
        let y = random_vec(&mut r, n);
        let xs = sample(&set, &y).unwrap();
        let rec = reconstruct(&b, &set, &xs, DEFAULT_RANK_TOL).unwrap();
        // x = B (B R B)⁺ x_s with B the band projector
        let u = basis.eigenvectors();
        let mut bp = DMatrix::<f64>::zeros(n, n);
        for &f in &band {
            bp += u.column(f) * u.column(f).transpose();
        }
        let mut rd = DMatrix::<f64>::zeros(n, n);
        for &i in &nodes {
            rd[(i, i)] = 1.0;
        }
        let system = &bp * &rd * &bp;
        // pseudo-inverse from an eigendecomposition of the n x n system
        let eig = nalgebra::SymmetricEigen::new(system);
        let cutoff = (DEFAULT_RANK_TOL * eig.eigenvalues.max()).max(n as f64 * f64::EPSILON);
        let mut pinv = DMatrix::<f64>::zeros(n, n);
        for (c, &l) in eig.eigenvalues.iter().enumerate() {
            if l > cutoff {
                pinv += eig.eigenvectors.column(c) * eig.eigenvectors.column(c).transpose() / l;
            }
        }
        let oracle = &bp * pinv * DVector::from_column_slice(&xs);
        let kept: Vec<f64> = eig.eigenvalues.iter().copied().filter(|&l| l > cutoff).collect();
        let cond = kept.iter().copied().fold(0.0, f64::max) / kept.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = oracle.norm().max(norm(&y)).max(1.0);
        prop_assert!(max_abs_diff(&rec.signal, oracle.as_slice()) <= 1e-12 * cond.max(1.0) * scale);
    }

    #[test]
    fn surrogates_keep_norm(seed in any::<u64>(), r in 0u64..1000) {
        let g = graph_from(seed, 3, 40);
        let q = decompose(&ShiftOperator::modularity(&g)).unwrap();
        let x = random_vec(&mut rng(seed ^ 4), g.node_count());
        let nx = norm(&x);
        for mode in [SurrogateMode::AllModularity, SurrogateMode::ModularOnly, SurrogateMode::AntiModularOnly] {
            let s = generate_surrogate(&q, &x, mode, &mut realization_rng(seed, r)).unwrap();
            prop_assert!((s.norm() - nx).abs() <= 1e-10 * nx);
            let again = generate_surrogate(&q, &x, mode, &mut realization_rng(seed, r)).unwrap();
            prop_assert_eq!(s.values(), again.values());
        }
    }

    #[test]
    fn z_scores_ignore_community_names(seed in any::<u64>(), c in 2usize..5) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 6, 40);
        let n = g.node_count();
        let labels: Vec<usize> = (0..n).map(|i| if i < c { i } else { r.random_range(0..c) }).collect();
        let perm: Vec<usize> = sample_indices(&mut r, c, c).into_vec();
        let relabeled: Vec<usize> = labels.iter().map(|&l| perm[l]).collect();
        let a = z_scores(&g, &Partition::new(labels).unwrap()).unwrap();
        let b = z_scores(&g, &Partition::new(relabeled).unwrap()).unwrap();
        for i in 0..n {
            for (p, q) in [(a.z_in[i], b.z_in[i]), (a.z_out[i], b.z_out[i])] {
                match (p, q) {
                    (Some(p), Some(q)) => prop_assert!((p - q).abs() < 1e-12),
                    (None, None) => {}
                    _ => prop_assert!(false, "definedness differs at {}", i),
                }
            }
        }
    }

    #[test]
    fn denoising_lowers_objective_and_shrinks(seed in any::<u64>(), mu in 1e-3f64..1e3) {
        let g = graph_from(seed, 3, 40);
        let q = decompose(&ShiftOperator::modularity(&g)).unwrap();
        let lmax = q.max_eigenvalue();
        let basis = q.shifted(ShiftKind::ModularityPlus, lmax).unwrap();
        let op = ShiftOperator::modularity_plus(&g, lmax);
        let mut r = rng(seed ^ 5);
        let y = random_vec(&mut r, g.node_count());
        let x = denoise(&basis, &y, mu).unwrap();
        let best = objective(&op, &x, &y, mu).unwrap();
        prop_assert!(best <= objective(&op, &y, &y, mu).unwrap() + 1e-12);
        let nudge: Vec<f64> = x.iter().map(|v| v + 1e-3 * r.random_range(-1.0..1.0)).collect();
        prop_assert!(best <= objective(&op, &nudge, &y, mu).unwrap() + 1e-12);
        let heavier = denoise(&basis, &y, 2.0 * mu).unwrap();
        prop_assert!(op.quadratic_form(&heavier).unwrap() <= op.quadratic_form(&x).unwrap() + 1e-12);
        prop_assert!(heavier.norm() <= x.norm() + 1e-12);
    }

    #[test]
    fn windows_are_linear_and_projections_idempotent(seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 3, 40);
        let n = g.node_count();
        let basis = decompose(&ShiftOperator::laplacian(&g)).unwrap();
        let w = SpectralWindow::new(random_vec(&mut r, n)).unwrap();
        let (x, y) = (random_vec(&mut r, n), random_vec(&mut r, n));
        let mix: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + b).collect();
        let lhs = apply_window(&basis, &w, &mix).unwrap();
        let (wx, wy) = (apply_window(&basis, &w, &x).unwrap(), apply_window(&basis, &w, &y).unwrap());
        let rhs: Vec<f64> = wx.iter().zip(wy.iter()).map(|(a, b)| alpha * a + b).collect();
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
        let binary = SpectralWindow::new((0..n).map(|_| f64::from(u8::from(r.random_bool(0.5)))).collect()).unwrap();
        let once = apply_window(&basis, &binary, &x).unwrap();
        let twice = apply_window(&basis, &binary, &once).unwrap();
        prop_assert!(max_abs_diff(&once, &twice) < 1e-9);
        prop_assert!(GraphSignal::new(once.values().to_vec()).unwrap().norm() <= norm(&x) + 1e-12);
    }
}
