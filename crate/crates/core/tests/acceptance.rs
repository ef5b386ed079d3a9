//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p kadapt --test acceptance`. Takes a few minutes.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::*;
use kadapt::adapt::{
    ansatz_report, assumed_quantum_calls, format_reduction, operator_gradient, prepare_state, quantum_call_report, run_adapt,
    AdaptConfig, AdaptResult, CHEMICAL_ACCURACY,
};
use kadapt::cli::{execute, RunManifest};
use kadapt::pool::{build_pool, ExcitationOperator};
use kadapt::problem::Problem;
use kadapt::statevector::Statevector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Suite {
    results: Vec<(String, bool)>,
    problems: BTreeMap<PathBuf, (Problem, f64)>,
    /// Every ADAPT final energy produced, for the variational check.
    finals: Vec<(String, f64, f64)>,
}

impl Suite {
    fn record(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.results.push((name.to_string(), pass));
    }

    /// Problem and its exact sector energy, loaded once.
    fn problem(&mut self, path: &Path) -> &(Problem, f64) {
        self.problems.entry(path.to_path_buf()).or_insert_with(|| {
            let p = Problem::load(path).unwrap();
            let fci = p.fci_energy().unwrap();
            (p, fci)
        })
    }

    fn adapt(&mut self, path: &Path, cfg: &AdaptConfig) -> (AdaptResult, f64) {
        let (p, fci) = self.problem(path);
        let fci = *fci;
        let r = run_adapt(&p.hamiltonian, &p.pool, &p.hf_state, cfg).unwrap();
        self.finals.push((stem(path), r.final_energy, fci));
        (r, fci)
    }
}

fn stem(p: &Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn paper_config(k: usize, per_step: usize) -> AdaptConfig {
    AdaptConfig {
        k,
        max_operators: 25,
        vqe_iterations_per_step: per_step,
        total_iteration_budget: Some(1000),
        ..AdaptConfig::default()
    }
}

fn pool_counting(s: &mut Suite) {
    let t = Instant::now();
    let sizes: Vec<usize> = [("h2", 2, 4), ("lih", 4, 12), ("beh2", 6, 14)]
        .iter()
        .map(|&(_, ne, nso)| build_pool(ne, nso).unwrap().len())
        .collect();
    let elapsed = t.elapsed();
    let from_files: Vec<usize> = ["h2_0.74.fcidump", "lih_1.60.fcidump", "beh2_1.30.fcidump"]
        .iter()
        .map(|f| kadapt::cli::cmd_pool_info(&fixture(f)).unwrap().size)
        .collect();
    // the 180·25/5 screening term of the 5-chunk cost
    let screening_term = assumed_quantum_calls(3, 800, sizes[2], 25 / 5) - 3 * 800;
    let pass = sizes == [1, 76, 180] && from_files == sizes && screening_term == 180 * 25 / 5 && elapsed < Duration::from_secs(1);
    s.record(
        "pool counting",
        pass,
        format!(
            "H2 {}, LiH {}, BeH2 {} (files agree: {}); screening term {screening_term} = 180*25/5; {}",
            sizes[0],
            sizes[1],
            sizes[2],
            from_files == sizes,
            secs(elapsed)
        ),
    );
}

fn mapping_correctness(s: &mut Suite) {
    let t = Instant::now();
    let mut worst_image = 0.0f64;
    let mut images = 0;
    for n in 4..=6 {
        for p in 0..n {
            for q in p + 1..n {
                for r in 0..n {
                    for s_ in r + 1..n {
                        if [r, s_].iter().any(|v| *v == p || *v == q) {
                            continue;
                        }
                        let op = ExcitationOperator::new(n, (p, q), (r, s_)).unwrap();
                        let diff = max_abs_diff(&sum_matrix(op.qubit_image()), &double_excitation_matrix(n, p, q, r, s_));
                        worst_image = worst_image.max(diff);
                        images += 1;
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 6;
    let d = 1usize << n;
    let mut worst_exp = 0.0f64;
    for _ in 0..10 {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        let occ = (idx[0].min(idx[1]), idx[0].max(idx[1]));
        let virt = (idx[2].min(idx[3]), idx[2].max(idx[3]));
        let theta: f64 = rng.gen_range(-3.0..3.0);
        let op = ExcitationOperator::new(n, occ, virt).unwrap();
        let unitary = (double_excitation_matrix(n, occ.0, occ.1, virt.0, virt.1) * c(theta, 0.0)).exp();
        let mut product = Mat::identity(d, d);
        for f in op.rotation_factors() {
            let a = f.angle(theta);
            product = (Mat::identity(d, d) * c(a.cos(), 0.0) + term_matrix(&f.string) * c(0.0, a.sin())) * product;
        }
        worst_exp = worst_exp.max(max_abs_diff(&product, &unitary));
        for b in 0..d {
            let mut st = Statevector::basis_state(n, b).unwrap();
            st.apply_excitation(&op, theta).unwrap();
            let diff = (dense(&st) - unitary.column(b)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            worst_exp = worst_exp.max(diff);
        }
    }
    let elapsed = t.elapsed();
    let pass = worst_image < 1e-12 && worst_exp < 1e-12 && elapsed < Duration::from_secs(10);
    s.record(
        "mapping correctness",
        pass,
        format!(
            "{images} double-excitation images on 4-6 qubits, max deviation {worst_image:.1e}; \
             10 random (operator, theta) exponentials, max deviation {worst_exp:.1e}; {}",
            secs(elapsed)
        ),
    );
}

fn gradient_identity(s: &mut Suite, files: &[PathBuf]) {
    // load outside the timed region: building commutators is setup, not the check
    for f in files {
        s.problem(f);
    }
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut checks = 0;
    let h = 1e-5;
    for f in files {
        let (p, _) = &s.problems[f];
        let grouped = p.hamiltonian.grouped();
        for _ in 0..20 {
            let (ops, params, state) = random_ansatz_state(&p.hf_state, &p.pool, 6, &mut rng);
            for _ in 0..3 {
                let idx = rng.gen_range(0..p.pool.len());
                let g = operator_gradient(&state, &p.pool.operators()[idx]).unwrap();
                let energy = |theta: f64| {
                    let mut o = ops.clone();
                    let mut th = params.clone();
                    o.push(idx);
                    th.push(theta);
                    prepare_state(&p.hf_state, &p.pool, &o, &th).unwrap().energy(&grouped).unwrap()
                };
                let fd = (energy(h) - energy(-h)) / (2.0 * h);
                worst = worst.max((g - fd).abs());
                checks += 1;
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = worst < 1e-6 && elapsed < Duration::from_secs(60);
    s.record(
        "gradient identity",
        pass,
        format!(
            "{} fixtures x 20 random ansatz states, {checks} operator checks, max |analytic - central FD| = {worst:.1e}; {}",
            files.len(),
            secs(elapsed)
        ),
    );
}

fn h2_end_to_end(s: &mut Suite) {
    let path = fixture("h2_0.74.fcidump");
    s.problem(&path);
    let t = Instant::now();
    let cfg = AdaptConfig {
        k: 1,
        ..AdaptConfig::default()
    };
    let (r, fci) = s.adapt(&path, &cfg);
    let elapsed = t.elapsed();
    let err = r.final_energy - fci;
    let pass = err.abs() < 1e-6 && r.ansatz.len() == 1 && elapsed < Duration::from_secs(5);
    s.record(
        "H2 end-to-end",
        pass,
        format!(
            "E = {:.10}, FCI = {fci:.10}, error {err:.1e} Ha with {} operator; {}",
            r.final_energy,
            r.ansatz.len(),
            secs(elapsed)
        ),
    );
}

fn scan_line(name: &str, bond: &str, err: f64, floor: f64) -> String {
    let mark = if err < CHEMICAL_ACCURACY { "ok" } else { "above 1 mHa" };
    format!("    {name} {bond} A: error {err:.2e} Ha ({mark}); lowest error any doubles-only ansatz can reach {floor:.2e}")
}

/// Error of the even-excitation floor, and whether it leaves chemical accuracy reachable.
fn floor_error(s: &mut Suite, path: &Path) -> (f64, bool) {
    let (p, fci) = s.problem(path);
    let e = even_excitation_floor(p) - fci;
    (e, e < CHEMICAL_ACCURACY)
}

/// Returns the 1.3 Å runs for the comparison and call-accounting checks.
fn beh2_headline(s: &mut Suite) -> (AdaptResult, f64) {
    let t = Instant::now();
    let (headline, fci) = s.adapt(&fixture("beh2_1.30.fcidump"), &paper_config(5, 200));
    let head_err = headline.final_energy - fci;
    let mut lines = Vec::new();
    let mut accurate = 0;
    let mut reachable = 0;
    let bonds = ["1.00", "1.20", "1.40", "1.60", "1.80", "2.00", "2.20", "2.40"];
    for b in bonds {
        let path = fixture(&format!("beh2_{b}.fcidump"));
        let (r, e) = s.adapt(&path, &paper_config(5, 200));
        let err = r.final_energy - e;
        if err < CHEMICAL_ACCURACY {
            accurate += 1;
        }
        let (floor, ok) = floor_error(s, &path);
        reachable += usize::from(ok);
        lines.push(scan_line("BeH2", b, err, floor));
    }
    let pass = head_err < CHEMICAL_ACCURACY && accurate >= 6;
    s.record(
        "BeH2 headline",
        pass,
        format!(
            "k=5, 25 operators, 200/step, 1000 total: 1.30 A error {head_err:.2e} Ha, {} iterations; \
             scan chemically accurate at {accurate}/8 (need 6, at most {reachable} reachable by this pool); {}",
            headline.total_iterations(),
            secs(t.elapsed())
        ),
    );
    for l in lines {
        println!("{l}");
    }
    let report = ansatz_report(&headline, &s.problem(&fixture("beh2_1.30.fcidump")).0.pool);
    let sizes: Vec<usize> = report.chunks.iter().map(|c| c.operators.len()).collect();
    let overlapping = report.chunks.iter().filter(|c| !c.overlaps.is_empty()).count();
    let same_spin = report.chunks.iter().flat_map(|c| &c.operators).filter(|o| o.same_spin).count();
    println!(
        "    1.30 A ansatz: chunk sizes {sizes:?}, {overlapping} chunks with overlapping supports, {same_spin} same-spin operators"
    );
    (headline, fci)
}

fn one_vs_five(s: &mut Suite, five: &AdaptResult, fci: f64) -> AdaptResult {
    let t = Instant::now();
    let (one, _) = s.adapt(&fixture("beh2_1.30.fcidump"), &paper_config(1, 40));
    let e1 = one.final_energy - fci;
    let e5 = five.final_energy - fci;
    let ratio = e1 / e5;
    let (floor, _) = floor_error(s, &fixture("beh2_1.30.fcidump"));
    s.record(
        "1-vs-5 comparison",
        ratio >= 3.0,
        format!(
            "BeH2 1.30 A, 1000 iterations each: k=1 (40/step) error {e1:.2e} Ha over {} iterations, \
             k=5 error {e5:.2e} Ha (pool floor {floor:.2e}); ratio {ratio:.2} (need >= 3); {}",
            one.total_iterations(),
            secs(t.elapsed())
        ),
    );
    one
}

fn call_accounting(s: &mut Suite, five: &AdaptResult, one: &AdaptResult, fci: f64) {
    let t = Instant::now();
    let a5 = assumed_quantum_calls(3, 800, 180, 25 / 5);
    let a1 = assumed_quantum_calls(3, 3200, 180, 25);
    let shown = format_reduction(a1 as f64 / a5 as f64);
    let formula_time = t.elapsed();
    let mut consistent = true;
    let mut logged = Vec::new();
    for r in [five, one] {
        let report = quantum_call_report(r, 3, Some(fci));
        let w = &report.whole_run;
        consistent &= w.energy_evaluations == r.steps.iter().map(|st| st.evaluations).sum::<usize>()
            && w.screening_evaluations == 180 * r.steps.len()
            && w.assumed_total == 3 * w.vqe_iterations + 180 * w.screening_steps;
        let acc = report
            .to_chemical_accuracy
            .as_ref()
            .map_or("not reached".to_string(), |c| {
                format!("{} iterations, assumed {}, measured {}", c.vqe_iterations, c.assumed_total, c.measured_total)
            });
        logged.push(format!(
            "    k={}: {} iterations, {} screenings, assumed {} calls, measured {} (energy {} + screening {}); to 1 mHa: {acc}",
            r.k,
            w.vqe_iterations,
            w.screening_steps,
            w.assumed_total,
            w.measured_total,
            w.energy_evaluations,
            w.screening_evaluations
        ));
    }
    let pass = a5 == 3300 && a1 == 14100 && shown == "~4.3" && consistent && formula_time < Duration::from_secs(1);
    s.record(
        "call accounting",
        pass,
        format!("3*800 + 180*5 = {a5}, 3*3200 + 180*25 = {a1}, reduction {shown}; measured ledgers consistent: {consistent}"),
    );
    for l in logged {
        println!("{l}");
    }
}

fn lih_scan(s: &mut Suite, files: &[PathBuf]) {
    let t = Instant::now();
    let mut accurate = 0;
    let mut reachable = 0;
    let mut lines = Vec::new();
    for f in files {
        let (r, e) = s.adapt(f, &paper_config(5, 200));
        let err = r.final_energy - e;
        if err < CHEMICAL_ACCURACY {
            accurate += 1;
        }
        let (floor, ok) = floor_error(s, f);
        reachable += usize::from(ok);
        let name = stem(f);
        lines.push(scan_line("LiH", name.trim_start_matches("lih_"), err, floor));
    }
    // six of eight, applied as the same fraction of the grid on disk
    let needed = (6 * files.len()).div_ceil(8);
    s.record(
        "LiH scan",
        accurate >= needed,
        format!(
            "k=5, 25 operators, 200/step, 1000 total over {} geometries in 1.0-2.6 A: chemically accurate at {accurate} (need {needed}, at most {reachable} reachable by this pool); {}",
            files.len(),
            secs(t.elapsed())
        ),
    );
    for l in lines {
        println!("{l}");
    }
}

fn h2_runs(s: &mut Suite) {
    let cfg = AdaptConfig {
        k: 1,
        ..AdaptConfig::default()
    };
    for f in fixtures_matching("h2_") {
        s.adapt(&f, &cfg);
    }
}

fn variational_bound(s: &mut Suite) {
    let mut worst: (f64, String) = (f64::INFINITY, String::new());
    for (name, e, fci) in &s.finals {
        let margin = e - fci;
        if margin < worst.0 {
            worst = (margin, name.clone());
        }
    }
    let covered: std::collections::BTreeSet<&String> = s.finals.iter().map(|f| &f.0).collect();
    let all = fixtures_matching("").len();
    let pass = worst.0 >= -1e-10 && covered.len() == all;
    s.record(
        "variational bound",
        pass,
        format!(
            "{} runs over {}/{all} fixtures; smallest E_adapt - E_fci = {:.2e} Ha ({})",
            s.finals.len(),
            covered.len(),
            worst.0,
            worst.1
        ),
    );
}

fn determinism(s: &mut Suite) {
    let m = RunManifest {
        fcidump: fixture("lih_2.00.fcidump"),
        k: 5,
        max_operators: 25,
        iters_per_step: 200,
        total_iterations: Some(1000),
        ..RunManifest::default()
    };
    let echoed: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    let a = execute(&m).unwrap();
    let b = execute(&echoed).unwrap();
    let same = a.result.energy_trace == b.result.energy_trace && a.result == b.result;
    s.record(
        "determinism",
        same && echoed == m,
        format!(
            "two runs from one manifest (second via its JSON echo): {} trace points, identical: {same}",
            a.result.energy_trace.len()
        ),
    );
}

fn sidecar_agreement(s: &mut Suite) {
    let mut worst_hf = 0.0f64;
    let mut worst_fci = 0.0f64;
    let files = fixtures_matching("");
    for f in &files {
        let meta = kadapt::problem::load_metadata(f).unwrap().unwrap();
        let (p, fci) = s.problem(f);
        worst_hf = worst_hf.max((p.hf_energy().unwrap() - meta.hf_energy).abs());
        worst_fci = worst_fci.max((fci - meta.fci_energy.unwrap()).abs());
    }
    s.record(
        "[secondary] fixture sidecars",
        worst_hf < 1e-8 && worst_fci < 1e-6,
        format!(
            "{} fixtures parse; max |HF - sidecar| = {worst_hf:.1e}, max |FCI - sidecar| = {worst_fci:.1e}",
            files.len()
        ),
    );
}

fn main() {
    let mut s = Suite {
        results: Vec::new(),
        problems: BTreeMap::new(),
        finals: Vec::new(),
    };
    let all = fixtures_matching("");
    let lih = fixtures_matching("lih_");

    pool_counting(&mut s);
    mapping_correctness(&mut s);
    gradient_identity(&mut s, &all);
    h2_end_to_end(&mut s);
    let (five, fci) = beh2_headline(&mut s);
    let one = one_vs_five(&mut s, &five, fci);
    call_accounting(&mut s, &five, &one, fci);
    lih_scan(&mut s, &lih);
    h2_runs(&mut s);
    variational_bound(&mut s);
    determinism(&mut s);
    sidecar_agreement(&mut s);

    let failed: Vec<&str> = s.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        s.results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
