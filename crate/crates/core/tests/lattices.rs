use sphere_bounds::frames::{fp_bound_report, weighted_frame_potential};
use sphere_bounds::lattices::{cubic_window, hexagonal_window, window_delta, window_fp, window_scan, Lattice, DEFAULT_GAMMAS};

#[test]
fn hexagonal_window_saturates_low_orders() {
    let s = 1.0;
    let ws = hexagonal_window(4.0 * s, s, [0.0, 0.0]).unwrap();
    for gamma in DEFAULT_GAMMAS {
        for l in 1..=5 {
            let d = window_delta(&ws, gamma, l).unwrap();
            assert!(d.abs() <= 1e-10, "gamma={gamma} l={l}: {d}");
        }
        assert!(window_delta(&ws, gamma, 6).unwrap() > 1e-6);
    }
}

#[test]
fn cubic_cell_center_saturates_order_two() {
    let lat = Lattice::cubic(1.5);
    for k in 1..=3 {
        let ws = lat.window(k as f64 * 1.5, &lat.cell_center()).unwrap();
        for gamma in DEFAULT_GAMMAS {
            let d = window_delta(&ws, gamma, 2).unwrap();
            assert!(d.abs() <= 1e-10, "r={k} gamma={gamma}: {d}");
        }
    }
}

#[test]
fn inversion_symmetric_windows_vanish_at_odd_order() {
    let ws = cubic_window(3.2, 1.0, [0.5, 0.5, 0.5]).unwrap();
    for gamma in [0.0, 0.7, 3.0] {
        for l in [1, 3, 5, 7] {
            assert!(window_fp(&ws, gamma, l).unwrap().abs() < 1e-12 * ws.len() as f64);
        }
    }
}

#[test]
fn matches_weighted_frame_potential() {
    let ws = hexagonal_window(3.3, 0.8, [0.13, -0.41]).unwrap();
    let (config, weights) = ws.directions(1.3).unwrap();
    for l in 0..8 {
        let a = window_fp(&ws, 1.3, l).unwrap();
        let b = weighted_frame_potential(&config, &weights, l).unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        assert!(fp_bound_report(&config, Some(&weights), l).unwrap().holds());
    }
}

#[test]
fn off_lattice_windows_respect_the_bound() {
    for lat in [Lattice::hexagonal(1.0), Lattice::cubic(1.0)] {
        let centers = lat.random_cell_points(100, 17);
        for l in [2, 3, 4, 6] {
            let stats = window_scan(&lat, 3.0, 1.0, l, &centers).unwrap();
            assert!(stats.min >= -1e-12, "{:?} l={l}: {}", lat.kind, stats.min);
            assert!(stats.entries.iter().all(|e| e.error.is_none()));
        }
    }
}

#[test]
fn lattice_translations_leave_the_scan_flat() {
    let lat = Lattice::hexagonal(1.0);
    let centers: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()], vec![-3.0, 0.0]];
    let stats = window_scan(&lat, 4.0, 2.0, 6, &centers).unwrap();
    assert!(stats.std_dev < 1e-12);
    assert!(stats.max - stats.min < 1e-12);
    let same = window_scan(&lat, 4.0, 2.0, 6, &vec![vec![0.3, 0.2]; 5]).unwrap();
    assert_eq!(same.std_dev, 0.0);
}
