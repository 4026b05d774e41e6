//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::SQRT_2;
use std::num::NonZeroUsize;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gauss_quad::legendre::GaussLegendre;
use h2e_core::basis::primitive_norm;
use h2e_core::bell::{
    chsh_from, chsh_from_abs, chsh_max_closed_form, chsh_max_grid, chsh_value, mean_product, product_updown, singlet,
    MeasurementSettings, TwoQubitState, UnitVector3,
};
use h2e_core::correlation::{minimal_basis_corr, MinimalBasisInputs};
use h2e_core::integrals::boys::boys;
use h2e_core::integrals::oracle::{quadrature_oracle, quadrature_oracle_eri, OneElectronKind};
use h2e_core::integrals::{eri, kinetic, nuclear_attraction, overlap};
use h2e_core::scan::{emit, run_scan, OutputFormat, ScanConfig};
use h2e_core::{
    build_ao_basis, compute_all, correlation_report, run_fci, run_rhf, Atom, BasisFunction, BasisSet, CIResult,
    CorrelationReport, Molecule, ScfSettings,
};
use nalgebra::{Complex, Matrix4, Vector3};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Point {
    r: f64,
    ci: CIResult,
    report: CorrelationReport,
}

fn solve(r: f64, basis: &BasisSet) -> Point {
    let mol = Molecule::h2(r).unwrap();
    let ao = build_ao_basis(&mol, basis).unwrap();
    let ints = compute_all(&ao, &mol).unwrap();
    let scf = run_rhf(&ints, &mol, &ScfSettings::default()).unwrap();
    let ci = run_fci(&ints, &scf, &mol).unwrap();
    let report = correlation_report(&ci).unwrap();
    Point { r, ci, report }
}

/// 40 linear points on [0.7, 20] Bohr.
fn scan_grid() -> Vec<f64> {
    (0..40).map(|i| 0.7 + (20.0 - 0.7) * i as f64 / 39.0).collect()
}

fn random_primitive(rng: &mut StdRng) -> BasisFunction {
    let exponent = rng.random_range(0.2..3.0);
    let cartesian = match rng.random_range(0..4) {
        0 => [0, 0, 0],
        1 => [1, 0, 0],
        2 => [0, 1, 0],
        _ => [0, 0, 1],
    };
    BasisFunction {
        atom_index: 0,
        center: Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
        cartesian,
        shell_index: 0,
        exponents: vec![exponent],
        coefficients: vec![primitive_norm(exponent, cartesian.iter().sum())],
    }
}

fn integral_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(101);
    let kinds = [
        OneElectronKind::Overlap,
        OneElectronKind::Kinetic,
        OneElectronKind::Nuclear,
    ];
    let mut worst_one: f64 = 0.0;
    for case in 0..24 {
        let f = random_primitive(&mut rng);
        let g = random_primitive(&mut rng);
        let mol = Molecule::new(
            vec![
                Atom::new("H", Vector3::from_fn(|_, _| rng.random_range(-1.5..1.5))).unwrap(),
                Atom::new("He", Vector3::from_fn(|_, _| rng.random_range(-1.5..1.5))).unwrap(),
            ],
            2,
        )
        .unwrap();
        let kind = kinds[case % 3];
        let analytic = match kind {
            OneElectronKind::Overlap => overlap(&f, &g),
            OneElectronKind::Kinetic => kinetic(&f, &g),
            OneElectronKind::Nuclear => nuclear_attraction(&f, &g, &mol),
        };
        worst_one = worst_one.max((analytic - quadrature_oracle(&f, &g, kind, &mol)).abs());
    }
    let mut worst_eri: f64 = 0.0;
    for _ in 0..12 {
        let fs: Vec<_> = (0..4).map(|_| random_primitive(&mut rng)).collect();
        let analytic = eri(&fs[0], &fs[1], &fs[2], &fs[3]);
        worst_eri = worst_eri.max((analytic - quadrature_oracle_eri(&fs[0], &fs[1], &fs[2], &fs[3])).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst_one <= 1e-6 && worst_eri <= 1e-5 && elapsed < Duration::from_secs(30),
        format!("24 one-electron max err {worst_one:.2e}, 12 ERI max err {worst_eri:.2e}, {elapsed:.1?}"),
    )
}

/// ∫₀¹ t^{2m} e^{-x t²} dt by composite Gauss–Legendre.
fn boys_by_quadrature(m: i32, x: f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(24).unwrap());
    let panels = 64;
    let h = 1.0 / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = p as f64 * h;
            rule.iter()
                .map(|(node, w)| {
                    let t = lo + 0.5 * h * (node + 1.0);
                    0.5 * h * w * t.powi(2 * m) * (-x * t * t).exp()
                })
                .sum::<f64>()
        })
        .sum()
}

fn boys_endpoints() -> Outcome {
    let exact_zero = (0..=8).all(|m| boys(m, 0.0).unwrap() == 1.0 / (2 * m + 1) as f64);
    let worst = (0..=8)
        .map(|m| (boys(m, 30.0).unwrap() - boys_by_quadrature(m as i32, 30.0)).abs())
        .fold(0.0, f64::max);
    check(
        exact_zero && worst <= 1e-13,
        format!("F_m(0) exact for m<=8: {exact_zero}; max |F_m(30) - quadrature| = {worst:.2e}"),
    )
}

fn variational_ordering(sto: &[Point], pople: &[Point], elapsed: Duration) -> Outcome {
    let fci_below_hf = sto.iter().all(|p| p.report.e_fci <= p.report.e_hf + 1e-10);
    let larger_basis_lower = sto
        .iter()
        .zip(pople)
        .all(|(s, p)| p.report.e_hf <= s.report.e_hf + 1e-10 && p.report.e_fci <= s.report.e_fci + 1e-10);
    check(
        fci_below_hf && larger_basis_lower && elapsed < Duration::from_secs(20),
        format!("E_FCI <= E_HF at 40 points: {fci_below_hf}; 6-31G** <= STO-3G: {larger_basis_lower}; {elapsed:.1?}"),
    )
}

fn closed_form(sto: &[Point]) -> Outcome {
    let worst = sto
        .iter()
        .map(|p| {
            let (_, e) = minimal_basis_corr(&MinimalBasisInputs::from_ci(&p.ci).unwrap());
            ((p.report.e_hf - p.report.e_fci) - e.abs()).abs()
        })
        .fold(0.0, f64::max);
    check(
        worst <= 1e-9,
        format!("max |E_corr - |Δ - √(Δ²+K²)|| = {worst:.2e} Hartree"),
    )
}

fn dissociation_limits(far: &Point) -> Outcome {
    let occ = &far.report.occupations.0;
    let occ_ok = occ.len() == 2 && occ.iter().all(|n| (n - 1.0).abs() <= 1e-3);
    let s_ok = (far.report.entropy - 1.0).abs() <= 1e-3;
    let k12 = far.ci.mo_integrals.exchange(0, 1);
    let k_ok = (far.report.e_corr - k12).abs() <= 1e-4;
    check(
        occ_ok && s_ok && k_ok,
        format!(
            "R = {}: occupations {:?}, S = {:.6}, E_corr - K12 = {:.2e}",
            far.r,
            occ,
            far.report.entropy,
            far.report.e_corr - k12
        ),
    )
}

fn monotonicity(sto: &[Point]) -> Outcome {
    let s_ok = sto
        .windows(2)
        .all(|w| w[1].report.entropy >= w[0].report.entropy - 1e-12);
    let e_ok = sto.windows(2).all(|w| w[1].report.e_corr >= w[0].report.e_corr - 1e-12);
    check(
        s_ok && e_ok,
        format!("entropy nondecreasing: {s_ok}; E_corr nondecreasing: {e_ok}"),
    )
}

fn small_r(sto_basis: &BasisSet, pople_basis: &BasisSet) -> Outcome {
    let p = solve(0.5, pople_basis);
    let pople_ok = p.report.entropy > 0.0 && p.report.e_corr > 0.0;
    let s: Vec<f64> = [0.5, 0.6, 0.7]
        .iter()
        .map(|&r| solve(r, sto_basis).report.entropy)
        .collect();
    let sto_ok = s[2] < 0.15 && s[0] < s[1] && s[1] < s[2];
    check(
        pople_ok && sto_ok,
        format!(
            "6-31G** R=0.5: S = {:.4}, E_corr = {:.4}; STO-3G S(0.5, 0.6, 0.7) = {:.4}, {:.4}, {:.4}",
            p.report.entropy, p.report.e_corr, s[0], s[1], s[2]
        ),
    )
}

fn random_unit(rng: &mut StdRng) -> UnitVector3 {
    loop {
        let v = Vector3::from_fn(|_, _| StandardNormal.sample(rng));
        if let Ok(u) = UnitVector3::normalized(v) {
            return u;
        }
    }
}

fn random_state(rng: &mut StdRng) -> TwoQubitState {
    let g = Matrix4::from_fn(|_, _| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let rho = g * g.adjoint();
    let trace = rho.trace();
    TwoQubitState::new(rho / trace).unwrap()
}

fn chsh() -> Outcome {
    let start = Instant::now();
    let textbook = chsh_value(&singlet(), &MeasurementSettings::textbook());
    let textbook_ok = (textbook - 2.0 * SQRT_2).abs() <= 1e-12;
    let grid = chsh_max_grid(&singlet(), 1.0).unwrap().value;
    let grid_ok = grid >= 2.8284;

    let mut rng = StdRng::seed_from_u64(808);
    let product = product_updown();
    let (up, down) = (h2e_core::bell::Spinor::up(), h2e_core::bell::Spinor::down());
    let mut worst_product = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let s = MeasurementSettings {
            a: random_unit(&mut rng),
            b: random_unit(&mut rng),
            c: random_unit(&mut rng),
            d: random_unit(&mut rng),
        };
        let factorized = |u: &UnitVector3, w: &UnitVector3| mean_product(&up, &down, u, w);
        worst_product = worst_product
            .max(chsh_value(&product, &s).abs())
            .max(chsh_from_abs(factorized, &s))
            .max(chsh_from(factorized, &s));
    }
    let product_ok = worst_product <= 2.0 + 1e-9;

    let mut worst_gap: f64 = 0.0;
    for _ in 0..20 {
        let state = random_state(&mut rng);
        worst_gap = worst_gap.max((chsh_max_closed_form(&state) - chsh_max_grid(&state, 0.5).unwrap().value).abs());
    }
    let gap_ok = worst_gap <= 1e-3;
    let elapsed = start.elapsed();
    check(
        textbook_ok && grid_ok && product_ok && gap_ok && elapsed < Duration::from_secs(60),
        format!(
            "textbook {textbook:.15}, grid(1°) {grid:.6}, product max {worst_product:.12}, closed-vs-grid {worst_gap:.1e}, {elapsed:.1?}"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = ScanConfig {
        rescale: true,
        ..Default::default()
    };
    let paths = [dir.path().join("first.csv"), dir.path().join("second.csv")];
    for path in &paths {
        let outcome = run_scan(&config, None).unwrap();
        emit(&outcome.points, OutputFormat::Csv, path).unwrap();
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    let rows = a.iter().filter(|&&c| c == b'\n').count() - 1;
    check(
        a == b && rows == 41,
        format!("{rows} rows, {} bytes, identical: {}", a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sto_basis = BasisSet::builtin("sto-3g").unwrap();
    let pople_basis = BasisSet::builtin("6-31G**").unwrap();

    let mut results: Vec<(&str, Outcome)> = vec![
        ("integral oracle", integral_oracle()),
        ("Boys endpoints", boys_endpoints()),
    ];

    let scan_start = Instant::now();
    let sto: Vec<Point> = scan_grid().into_iter().map(|r| solve(r, &sto_basis)).collect();
    let pople: Vec<Point> = scan_grid().into_iter().map(|r| solve(r, &pople_basis)).collect();
    let scan_time = scan_start.elapsed();
    let far = sto.iter().find(|p| p.r == 20.0).expect("grid ends at 20 Bohr");

    results.push(("variational ordering", variational_ordering(&sto, &pople, scan_time)));
    results.push(("closed-form correlation", closed_form(&sto)));
    results.push(("dissociation limits", dissociation_limits(far)));
    results.push(("monotonicity", monotonicity(&sto)));
    results.push(("small-R behavior", small_r(&sto_basis, &pople_basis)));
    results.push(("CHSH", chsh()));
    results.push(("determinism", determinism()));

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{status}] {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1?}",
        results.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
