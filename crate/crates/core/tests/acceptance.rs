//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trigsum::constructions::{consecutive, erdos_turan_sidon, random_set, rounded_exponential, Seed};
use trigsum::density::{
    conj_dirichlet_l1, density_report, fit_log_growth, min_cutoff_for_count, sine_inner_count, CutoffOutcome,
    KernelOrder,
};
use trigsum::numeric::sin_cos_scaled;
use trigsum::perturb::{
    apply_perturbation, choose_signs, run_theorem, select_x0, PerturbationCase, DEFAULT_X0_BUDGET,
};
use trigsum::{
    eval_grid, eval_point, m1, m2, parseval_floor, ExtremumCertificate, ExtremumOptions, FrequencySet, GridSpec,
    SignVector, Spectrum, SumKind,
};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($arg)*));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_signs(n: usize, r: &mut ChaCha8Rng) -> SignVector {
    SignVector::new((0..n).map(|_| if r.gen::<bool>() { 1 } else { -1 }).collect()).unwrap()
}

fn opts() -> ExtremumOptions {
    ExtremumOptions::with_tol(1e-6)
}

struct CorpusEntry {
    name: String,
    set: FrequencySet,
    m1: ExtremumCertificate,
}

fn build_corpus() -> Vec<CorpusEntry> {
    let mut sets: Vec<(String, FrequencySet)> = Vec::new();
    for n in [1u64, 2, 10, 100, 1000, 2000] {
        sets.push((format!("consecutive n={n}"), consecutive(n).unwrap()));
    }
    for (n, seed) in [(10usize, 1u64), (100, 2), (1000, 3), (2000, 4)] {
        sets.push((format!("random n={n}"), random_set(n, 11, 1_000_000, Seed(seed)).unwrap()));
    }
    for p in [5u64, 11, 31, 61] {
        let d = erdos_turan_sidon(p).unwrap().differences().unwrap();
        sets.push((format!("sidon-diff p={p}"), d));
    }
    for n in [10u64, 100, 1000, 2000] {
        sets.push((format!("rounded-exp n={n}"), rounded_exponential(n).unwrap()));
    }
    sets.into_iter()
        .map(|(name, set)| {
            let m1 = m1(&set, &opts()).unwrap();
            CorpusEntry { name, set, m1 }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = r.gen_range(5..=200);
        let set = random_set(n, 11, r.gen_range(1_000..=1_000_000), Seed(100 + i)).unwrap();
        let eps = random_signs(n, &mut r);
        let p = apply_perturbation(&set, &eps).unwrap();
        for _ in 0..1000 {
            let x = r.gen_range(0.0..TAU);
            let (sx, cx) = x.sin_cos();
            let mut ii_sine = 0.0;
            let mut ii_cos = 0.0;
            for (l, &e) in set.iter().zip(eps.as_slice()) {
                let (s, c) = sin_cos_scaled(l as f64, x);
                ii_sine += e as f64 * c;
                ii_cos += e as f64 * s;
            }
            let lhs = eval_point(&p, SumKind::Sine, x).unwrap();
            let rhs = cx * eval_point(&set, SumKind::Sine, x).unwrap() + sx * ii_sine;
            let lhs_c = eval_point(&p, SumKind::Cosine, x).unwrap();
            let rhs_c = cx * eval_point(&set, SumKind::Cosine, x).unwrap() - sx * ii_cos;
            let dev = (lhs - rhs).abs().max((lhs_c - rhs_c).abs()) / n as f64;
            worst = worst.max(dev);
            ensure!(dev <= 1e-9, "angle addition off by {dev:e}·N at x = {x}, set {i}");
        }
    }
    let mut worst_count = 0.0f64;
    for i in 0..20 {
        let n = r.gen_range(1..=300);
        let set = random_set(n, 1, r.gen_range(300..=100_000), Seed(200 + i)).unwrap();
        let m = KernelOrder::new(r.gen_range(1..=set.max() + 10)).unwrap();
        let (count, numeric) = sine_inner_count(&set, m).unwrap();
        let dev = (numeric - count as f64).abs();
        worst_count = worst_count.max(dev);
        ensure!(dev <= 1e-6, "inner product {numeric} vs count {count} at m = {}", m.get());
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?} (limit 30 s)");
    Ok(format!(
        "max identity deviation {worst:.1e}·N, max count deviation {worst_count:.1e}, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2(corpus: &[CorpusEntry]) -> Outcome {
    let mut min_ratio = f64::INFINITY;
    for e in corpus {
        let floor = parseval_floor(e.set.len() as u64);
        ensure!(
            e.m1.value >= floor - 1e-6,
            "{}: m1 {} below sqrt(N/2) = {floor}",
            e.name,
            e.m1.value
        );
        min_ratio = min_ratio.min(e.m1.value / floor);
    }
    Ok(format!("{} sets, min m1/sqrt(N/2) = {min_ratio:.3}", corpus.len()))
}

fn theorem_runs(case: PerturbationCase) -> Outcome {
    let mut min_ii = f64::INFINITY;
    let mut min_c = f64::INFINITY;
    let mut slowest = Duration::ZERO;
    for seed in 0..20u64 {
        let start = Instant::now();
        let set = random_set(1000, 11, 1_000_000, Seed(seed)).unwrap();
        let n = set.len() as f64;
        let r = run_theorem(&set, case, &opts()).map_err(|e| format!("seed {seed}: {e}"))?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure!(
            r.rectified_sum >= 0.5 * n && r.term_ii >= 0.5 * n,
            "seed {seed}: rectified sum {} below N/2",
            r.rectified_sum
        );
        ensure!(
            r.perturbed_extremum.value >= 0.3 * n,
            "seed {seed}: perturbed extremum {} below 0.3·N",
            r.perturbed_extremum.value
        );
        if case == PerturbationCase::SineCase {
            ensure!(
                r.perturbed_extremum.value >= r.chain_lower_bound() - 1e-6,
                "seed {seed}: extremum {} below sin(x0)·II − |I| = {}",
                r.perturbed_extremum.value,
                r.chain_lower_bound()
            );
        }
        ensure!(
            (r.perturbed_value_at_x0 - r.decomposition()).abs() <= 1e-9 * n,
            "seed {seed}: report decomposition mismatch"
        );
        ensure!(elapsed < Duration::from_secs(60), "seed {seed} took {elapsed:?} (limit 60 s)");
        min_ii = min_ii.min(r.term_ii / n);
        min_c = min_c.min(r.c_empirical);
    }
    Ok(format!(
        "20 seeds, min term_II/N = {min_ii:.3}, min extremum/N = {min_c:.3}, slowest {:.1} s",
        slowest.as_secs_f64()
    ))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut doubles = 0usize;
    for _ in 0..10_000 {
        let n = r.gen_range(1..=40);
        let hi = r.gen_range(n as u64 + 1..=3 * n as u64 + 4);
        let set = random_set(n, 2, hi, Seed(r.gen())).unwrap();
        let eps = random_signs(n, &mut r);
        let p = apply_perturbation(&set, &eps).unwrap();
        ensure!(p.max_multiplicity() <= 2, "multiplicity {} for {set:?}", p.max_multiplicity());
        ensure!(p.total() == n as u64, "multiplicities do not sum to N");
        doubles += p.collisions().len();
    }
    let forced = apply_perturbation(
        &FrequencySet::new(vec![5, 7]).unwrap(),
        &SignVector::new(vec![1, -1]).unwrap(),
    )
    .unwrap();
    ensure!(forced.collisions() == vec![(6, 2)], "{{5,7}} with (+1,−1) gave {:?}", forced.collisions());
    ensure!(doubles > 0, "no fuzzed case collided");
    Ok(format!("10^4 fuzzed perturbations, {doubles} double values, none higher"))
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    for p in [11u64, 31, 61, 101] {
        let d = erdos_turan_sidon(p).unwrap().differences().unwrap();
        let n = d.len() as f64;
        let c = m2(&d, &opts()).map_err(|e| format!("p = {p}: {e}"))?;
        let half = p as f64 / 2.0;
        ensure!(c.value <= half + 1e-6, "p = {p}: m2 {} above p/2", c.value);
        ensure!(c.certified_bound <= half + 1e-6, "p = {p}: bound {} above p/2", c.certified_bound);
        let ratio = c.certified_bound / n.sqrt();
        ensure!(ratio <= 0.75, "p = {p}: M2/sqrt(N) = {ratio}");
        let packing = d.max() as f64 / n;
        ensure!(packing <= 4.5, "p = {p}: λ_N/N = {packing}");
        parts.push(format!("p={p}: M2={:.4} M2/√N={ratio:.3} λN/N={packing:.2}", c.value));
    }
    Ok(parts.join("; "))
}

fn criterion_7() -> Outcome {
    let l1 = |m: u64| conj_dirichlet_l1(KernelOrder::new(m).unwrap(), 1e-9).unwrap();
    let one = l1(1);
    ensure!((one - 4.0 / std::f64::consts::PI).abs() <= 1e-6, "l1(1) = {one}");
    let pts: Vec<(u64, f64)> = (3..=12).map(|k| (1u64 << k, l1(1 << k))).collect();
    for w in pts.windows(2) {
        ensure!(w[1].1 > w[0].1, "not increasing: l1({}) = {} ≥ l1({}) = {}", w[0].0, w[0].1, w[1].0, w[1].1);
    }
    let fit = fit_log_growth(&pts).map_err(|e| e.to_string())?;
    ensure!(fit.r_squared >= 0.99, "R² = {}", fit.r_squared);
    Ok(format!(
        "l1(1) = {one:.9}, fit a = {:.4}, b = {:.4}, R² = {:.6}",
        fit.a, fit.b, fit.r_squared
    ))
}

fn criterion_8(corpus: &[CorpusEntry]) -> Outcome {
    let mut checks = 0;
    let mut tightest = f64::INFINITY;
    for e in corpus {
        let (lo, hi) = (e.set.min() as f64, e.set.max() as f64 + 1.0);
        for i in 0..10 {
            let m = (lo * (hi / lo).powf(i as f64 / 9.0)).round().max(1.0) as u64;
            let m = KernelOrder::new(m).unwrap();
            let r = density_report(Some(&e.set), None, m, 1e-9).map_err(|err| err.to_string())?;
            let count = r.count_exact.unwrap() as f64;
            let bound = e.m1.certified_bound * r.l1_norm;
            ensure!(count <= bound + 1e-6, "{}: count {count} > bound {bound} at m = {}", e.name, m.get());
            if count > 0.0 {
                tightest = tightest.min(bound / count);
            }
            checks += 1;
        }
    }

    let mut sweep = Vec::new();
    for n in [100u64, 1000, 10_000] {
        let m1_value = (n as f64).powf(2.0 / 3.0);
        let out = min_cutoff_for_count(n, m1_value, 1e-9).map_err(|e| e.to_string())?;
        sweep.push(((n as f64).cbrt(), (out.m_lower_bound() as f64).ln(), out));
    }
    let mut slopes = Vec::new();
    for w in sweep.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        ensure!(
            slope >= 0.5,
            "ln M grows by only {slope:.3} per unit of n^(1/3) between n^(1/3) = {:.2} and {:.2}",
            w[0].0,
            w[1].0
        );
        slopes.push(format!("{slope:.2}"));
    }
    let cutoffs: Vec<String> = sweep
        .iter()
        .map(|(_, lnm, o)| match o {
            CutoffOutcome::Found { .. } => format!("ln M = {lnm:.2}"),
            CutoffOutcome::Exceeds { .. } => format!("ln M > {lnm:.2}"),
        })
        .collect();
    Ok(format!(
        "{checks} prefix counts bounded (tightest bound/count {tightest:.2}); cutoffs {}; secant slopes {}",
        cutoffs.join(", "),
        slopes.join(", ")
    ))
}

fn criterion_9() -> Outcome {
    const M1_ORACLE: f64 = 7.596_287_611_588_777;
    const M2_ORACLE: f64 = 2.798_465_050_837_219;
    let s = consecutive(10).unwrap();
    let c1 = m1(&s, &opts()).map_err(|e| e.to_string())?;
    let c2 = m2(&s, &opts()).map_err(|e| e.to_string())?;
    ensure!((c1.value - M1_ORACLE).abs() <= 5e-2, "m1 = {} vs {M1_ORACLE}", c1.value);
    ensure!((c2.value - M2_ORACLE).abs() <= 5e-2, "m2 = {} vs {M2_ORACLE}", c2.value);

    let set = random_set(100, 1, 100_000, Seed(9)).unwrap();
    let n = set.len() as f64;
    let grid = GridSpec::full_period(1 << 16).unwrap();
    let values = eval_grid(&set, SumKind::Sine, &grid).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        let direct: f64 = set.iter().map(|l| (l as f64 * grid.point(i as u64)).sin()).sum();
        let pointwise = eval_point(&set, SumKind::Sine, grid.point(i as u64)).unwrap();
        worst = worst.max((v - pointwise).abs()).max((v - direct).abs());
    }
    ensure!(worst <= 1e-8 * n, "grid deviation {worst:e} > 1e-8·N");
    Ok(format!(
        "m1 = {:.10} (Δ {:.1e}), m2 = {:.10} (Δ {:.1e}), grid deviation {:.1e}·N",
        c1.value,
        (c1.value - M1_ORACLE).abs(),
        c2.value,
        (c2.value - M2_ORACLE).abs(),
        worst / n
    ))
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let mut runs = 0;
    for trial in 0..60 {
        let n = r.gen_range(1..=12);
        let set = random_set(n, 1, r.gen_range(50..=5000), Seed(1000 + trial)).unwrap();
        for case in [PerturbationCase::SineCase, PerturbationCase::CosineCase] {
            let x0 = select_x0(&set, case, DEFAULT_X0_BUDGET).unwrap();
            let eps = choose_signs(&set, x0, case).unwrap();
            let terms: Vec<f64> = set
                .iter()
                .map(|l| {
                    let (s, c) = sin_cos_scaled(l as f64, x0);
                    if case == PerturbationCase::SineCase {
                        c
                    } else {
                        s
                    }
                })
                .collect();
            let chosen: f64 = terms.iter().zip(eps.as_slice()).map(|(t, &e)| e as f64 * t).sum();
            let mut best = f64::NEG_INFINITY;
            for mask in 0u32..(1 << n) {
                let v: f64 = terms
                    .iter()
                    .enumerate()
                    .map(|(j, t)| if mask >> j & 1 == 1 { *t } else { -*t })
                    .sum();
                best = best.max(v);
            }
            ensure!(chosen >= best - 1e-12, "trial {trial}: chosen {chosen} < brute force {best}");
            runs += 1;
        }
    }
    Ok(format!("{runs} (set, case) pairs match the exhaustive maximum"))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: u32, title: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {title}: {detail} [{secs:.1} s]"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {title}: {why} [{secs:.1} s]");
            }
        }
    };

    report(1, "exact identities", &criterion_1);
    let corpus_start = Instant::now();
    let corpus = build_corpus();
    eprintln!("corpus certificates computed in {:.1} s", corpus_start.elapsed().as_secs_f64());
    report(2, "Parseval floor", &|| criterion_2(&corpus));
    report(3, "sine-case perturbation", &|| theorem_runs(PerturbationCase::SineCase));
    report(4, "cosine-case perturbation", &|| theorem_runs(PerturbationCase::CosineCase));
    report(5, "collision multiplicity", &criterion_5);
    report(6, "Sidon-difference cosine floor", &criterion_6);
    report(7, "Dirichlet L1 growth", &criterion_7);
    report(8, "density soundness and cutoff growth", &|| criterion_8(&corpus));
    report(9, "oracle spot values", &criterion_9);
    report(10, "sign optimality", &criterion_10);

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
