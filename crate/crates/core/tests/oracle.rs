mod common;

use cdhdg::hdg::{solve_hdg, Method};
use common::{compare, random_problem, small_meshes, solve_monolithic, tau1, tau2, Space};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn oracle_setup(method: Method) -> (Space, fn(f64, f64, f64) -> f64) {
    match method {
        Method::Hdg1 => (Space::Pk, tau1),
        Method::Hdg2 => (Space::Pk, tau2),
        Method::Hdg3 => (Space::Rt, tau1),
    }
}

#[test]
fn condensed_matches_monolithic_on_small_meshes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for draw in 0..5 {
        for method in Method::ALL {
            let (space, tau) = oracle_setup(method);
            let p = random_problem(&mut rng, tau);
            let spec = p.spec();
            for (name, mesh) in small_meshes() {
                for k in 0..=2 {
                    let sol = solve_hdg(&mesh, &spec, &method.config(k)).unwrap();
                    let reference = solve_monolithic(&mesh, k, space, &p);
                    let d = compare(&mesh, &sol, &reference);
                    let m = d.iter().copied().fold(0.0, f64::max);
                    worst = worst.max(m);
                    assert!(m <= TOL, "draw {draw} {method} {name} k={k} eps={:e}: q {:e} u {:e} trace {:e}", p.eps, d[0], d[1], d[2]);
                }
            }
        }
    }
    eprintln!("largest relative difference {worst:e}");
}

#[test]
fn scaled_solve_matches_monolithic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = random_problem(&mut rng, tau2);
    let mesh = &small_meshes()[5].1;
    let mut config = Method::Hdg2.config(2);
    config.scaled = true;
    let sol = solve_hdg(mesh, &p.spec(), &config).unwrap();
    let d = compare(mesh, &sol, &solve_monolithic(mesh, 2, Space::Pk, &p));
    assert!(d.iter().all(|&v| v <= TOL), "{d:?}");
}
