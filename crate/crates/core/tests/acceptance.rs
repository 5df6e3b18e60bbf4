//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use jacobi_mv::cap_operators::{verify_adjoints, verify_quantum_decomposition, CapOperatorSet};
use jacobi_mv::closed_forms::{creation_power, pipeline_creation_factor, specialization_report, verify_family, FamilySpec, StatedFormula};
use jacobi_mv::jacobi_sequences::{compute, detect_atoms, rank_profile, reconstruct_moments, sequences_for, AtomDetection, JacobiSequencePair};
use jacobi_mv::linalg::QMatrix;
use jacobi_mv::moments::{Atom, MomentFunctional};
use jacobi_mv::multiindex::MultiIndex;
use jacobi_mv::orthodecomp::decompose;
use jacobi_mv::polyring::monomial_basis;
use jacobi_mv::rational::{q, qf, rising, Q};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn factorial_q(m: &MultiIndex) -> Q {
    Q::from_integer(m.factorial())
}

/// Pipeline Omega/alpha at levels `0..=max_level` against an independent
/// per-class diagonal formula.
fn diagonal_against(
    seq: &JacobiSequencePair,
    max_level: usize,
    omega: impl Fn(&MultiIndex) -> Q,
    alpha: impl Fn(&MultiIndex, usize) -> Q,
) -> Result<(), String> {
    for n in 0..=max_level {
        let classes = seq.classes(n).classes();
        let want = QMatrix::diagonal(&classes.iter().map(&omega).collect::<Vec<_>>());
        check(seq.omega(n) == &want, || format!("Omega_{n} = {:?}", seq.omega(n).to_string_rows()))?;
        for j in 0..seq.d() {
            let want = QMatrix::diagonal(&classes.iter().map(|c| alpha(c, j)).collect::<Vec<_>>());
            check(seq.alpha(n, j) == &want, || format!("alpha_{}|{n} = {:?}", j + 1, seq.alpha(n, j).to_string_rows()))?;
        }
    }
    Ok(())
}

fn family_pass(spec: &FamilySpec, max_level: usize) -> Result<(), String> {
    let report = e(verify_family(spec, max_level))?;
    check(report.pass, || format!("{spec}: pipeline disagrees with the master formula"))
}

fn criterion_1() -> Outcome {
    for d in 1..=3 {
        let spec = e(FamilySpec::hermite(d))?;
        let seq = e(sequences_for(&e(spec.functional())?, 4))?;
        diagonal_against(
            &seq,
            4,
            |c| factorial_q(c) / Q::from_integer(2.into()).pow(c.degree() as i32),
            |_, _| Q::zero(),
        )
        .map_err(|m| format!("d={d}: {m}"))?;
        family_pass(&spec, 4)?;
    }
    Ok("d in {1,2,3}, n <= 4".into())
}

fn criterion_2() -> Outcome {
    for alpha in [vec![q(0), q(0)], vec![qf(1, 2), qf(3, 2)]] {
        let spec = e(FamilySpec::laguerre(alpha.clone()))?;
        let seq = e(sequences_for(&e(spec.functional())?, 3))?;
        diagonal_against(
            &seq,
            3,
            |c| {
                c.entries()
                    .iter()
                    .zip(&alpha)
                    .fold(factorial_q(c), |acc, (&k, a)| acc * rising(&(a + q(1)), k as u64))
            },
            |c, l| q(2 * c.get(l) as i64) + &alpha[l] + q(1),
        )
        .map_err(|m| format!("alpha={alpha:?}: {m}"))?;
        family_pass(&spec, 3)?;
    }
    Ok("alpha in {(0,0),(1/2,3/2)}, n <= 3".into())
}

fn criterion_3() -> Outcome {
    let cases = [
        (vec![q(0)], vec![q(0)]),
        (vec![qf(1, 2)], vec![qf(-1, 2)]),
        (vec![q(0), q(1)], vec![q(1), q(0)]),
    ];
    for (a, b) in cases {
        family_pass(&e(FamilySpec::jacobi(a, b))?, 3)?;
    }
    Ok("3 parameter sets, n <= 3".into())
}

fn criterion_4() -> Outcome {
    let mut specs = vec![
        e(FamilySpec::gegenbauer(vec![qf(1, 4)]))?,
        e(FamilySpec::gegenbauer(vec![q(1), qf(3, 2)]))?,
        e(FamilySpec::gegenbauer(vec![qf(1, 2), q(2)]))?,
    ];
    for d in 1..=2 {
        specs.push(e(FamilySpec::chebyshev2(d))?);
    }
    for spec in &specs {
        for c in e(specialization_report(spec, 3))? {
            if matches!(c.formula, StatedFormula::Gegenbauer | StatedFormula::Chebyshev2) {
                check(c.matches, || format!("{spec} {:?} class {:?}: {} vs {}", c.formula, c.class, c.master, c.stated))?;
            }
        }
        family_pass(spec, 3)?;
    }
    let legendre = e(FamilySpec::legendre(1))?;
    family_pass(&legendre, 3)?;
    let report: Vec<_> = e(specialization_report(&legendre, 3))?
        .into_iter()
        .filter(|c| c.formula == StatedFormula::Legendre)
        .collect();
    check(report.len() == 4, || "Legendre report incomplete".into())?;
    let mismatched: Vec<String> = report.iter().filter(|c| !c.matches).map(|c| format!("n={}", c.class[0])).collect();
    for c in &report {
        println!(
            "    legendre n={}: master {} | stated {} | {}",
            c.class[0],
            c.master,
            c.stated,
            if c.matches { "match" } else { "MISMATCH" }
        );
    }
    Ok(format!(
        "Gegenbauer and Chebyshev-2 coherent for n <= 3, d <= 2; stated Legendre formula mismatches at {} (pipeline sides with the master formula)",
        mismatched.join(", ")
    ))
}

fn two_atoms() -> MomentFunctional {
    MomentFunctional::atomic(
        2,
        vec![
            Atom { point: vec![q(0), q(0)], weight: qf(1, 2) },
            Atom { point: vec![q(1), q(1)], weight: qf(1, 2) },
        ],
    )
    .unwrap()
}

fn three_atoms() -> MomentFunctional {
    MomentFunctional::atomic(
        2,
        vec![
            Atom { point: vec![q(0), q(0)], weight: qf(1, 2) },
            Atom { point: vec![q(1), qf(-1, 2)], weight: qf(1, 3) },
            Atom { point: vec![qf(-2, 3), q(2)], weight: qf(1, 6) },
        ],
    )
    .unwrap()
}

fn all_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::hermite(2).unwrap(),
        FamilySpec::laguerre(vec![q(0), qf(1, 2)]).unwrap(),
        FamilySpec::jacobi(vec![q(0), qf(1, 2)], vec![q(1), qf(-1, 2)]).unwrap(),
        FamilySpec::gegenbauer(vec![qf(3, 2), qf(1, 4)]).unwrap(),
        FamilySpec::chebyshev1(2).unwrap(),
        FamilySpec::chebyshev2(2).unwrap(),
        FamilySpec::legendre(2).unwrap(),
    ]
}

fn criterion_5() -> Outcome {
    let mut functionals: Vec<(String, MomentFunctional, bool)> = all_families()
        .into_iter()
        .map(|s| (s.to_string(), s.functional().unwrap(), true))
        .collect();
    functionals.push(("gaussian d=1".into(), MomentFunctional::gaussian(1).unwrap(), true));
    functionals.push(("two atoms".into(), two_atoms(), false));
    functionals.push(("three atoms".into(), three_atoms(), false));
    let mut notes = Vec::new();
    for (name, f, family) in &functionals {
        let ops = e(CapOperatorSet::build(&e(decompose(f, 5))?))?;
        let dec = verify_quantum_decomposition(&ops);
        check(dec.pass, || format!("{name}: quantum decomposition {:?}", dec.witness))?;
        check(*family <= dec.exact, || format!("{name}: residual not exactly zero"))?;
        if !dec.exact {
            notes.push(format!("{name} residual lies in the null space"));
        }
        let adj = verify_adjoints(&ops);
        check(adj.pass, || format!("{name}: adjoint identities {:?}", adj.witness))?;
        let seq = e(compute(&ops, 4))?;
        for n in 0..=4 {
            let omega = seq.omega(n);
            check(omega.is_symmetric(), || format!("{name}: Omega_{n} not symmetric"))?;
            check(seq.omega_ldl(n).reconstruct() == *omega, || format!("{name}: LDL^T of Omega_{n}"))?;
            for j in 0..seq.d() {
                check(omega.mul(seq.alpha(n, j)).is_symmetric(), || format!("{name}: alpha_{}|{n} not Gram-symmetric", j + 1))?;
                if *family {
                    check(seq.alpha(n, j).is_diagonal(), || format!("{name}: alpha_{}|{n} not diagonal", j + 1))?;
                }
            }
            if *family {
                check(omega.is_diagonal(), || format!("{name}: Omega_{n} not diagonal"))?;
            }
        }
    }
    Ok(format!("{} functionals, n <= 4; {}", functionals.len(), notes.join("; ")))
}

fn random_atomic(rng: &mut ChaCha8Rng) -> (MomentFunctional, usize, usize) {
    let d = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=3);
    let mut points: Vec<Vec<Q>> = Vec::new();
    while points.len() < k {
        let p: Vec<Q> = (0..d).map(|_| qf(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect();
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    let atoms = points.into_iter().zip(&raw).map(|(point, &w)| Atom { point, weight: qf(w, total) }).collect();
    (MomentFunctional::atomic(d, atoms).unwrap(), d, k)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a70d);
    let max_level = 4;
    let mut summary = Vec::new();
    for t in 0..10 {
        let (f, d, k) = random_atomic(&mut rng);
        let AtomDetection::Atomic { n0, atom_bound } = e(detect_atoms(&f, max_level))? else {
            return Err(format!("measure {t} (d={d}, k={k}): no vanishing level"));
        };
        let seq = e(compute(&e(CapOperatorSet::build(&e(decompose(&f, max_level + 1))?))?, max_level))?;
        for n in 0..=max_level {
            check(seq.omega(n).is_zero() == (n >= n0), || format!("measure {t}: Omega_{n} vs n0={n0}"))?;
        }
        check(k as u64 <= atom_bound, || format!("measure {t}: {k} atoms > bound {atom_bound}"))?;
        let rp = rank_profile(&seq);
        check(rp.deficiency_propagates && rp.zero_propagates && rp.kernel_inclusion, || {
            format!("measure {t}: rank profile {rp:?}")
        })?;
        summary.push(format!("d{d}k{k}:n0={n0}"));
    }
    Ok(summary.join(" "))
}

fn criterion_7() -> Outcome {
    let cases = vec![
        ("gaussian d=2", MomentFunctional::gaussian(2).unwrap()),
        ("gamma (0,1/2)", MomentFunctional::gamma(vec![q(0), qf(1, 2)]).unwrap()),
        ("beta (0,0)", MomentFunctional::beta(vec![q(0), q(0)], vec![q(0), q(0)]).unwrap()),
        ("three atoms", three_atoms()),
    ];
    let mut count = 0;
    for (name, f) in cases {
        let seq = e(sequences_for(&f, 2))?;
        for beta in e(monomial_basis(2, 4))? {
            let got = e(reconstruct_moments(&seq, &beta))?;
            let want = e(f.moment(&beta))?;
            check(got == want, || format!("{name} beta={beta:?}: {got} vs {want}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} moments reproduced exactly"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let signs = [-1i64, 1];
    for spec in all_families() {
        let basis = e(decompose(&e(spec.functional())?, 4))?;
        let factors: Vec<Vec<Q>> = basis
            .blocks()
            .iter()
            .map(|b| {
                (0..b.dim())
                    .map(|_| qf(signs.choose(&mut rng).unwrap() * rng.gen_range(1..=9), rng.gen_range(1..=7)))
                    .collect()
            })
            .collect();
        let plain = e(compute(&e(CapOperatorSet::build(&basis))?, 3))?;
        let scaled = e(compute(&e(CapOperatorSet::build(&e(basis.rescaled(&factors))?))?, 3))?;
        for n in 0..=3 {
            check(plain.omega(n) == scaled.omega(n), || format!("{spec}: Omega_{n} changed"))?;
            for j in 0..spec.d() {
                check(plain.alpha(n, j) == scaled.alpha(n, j), || format!("{spec}: alpha_{}|{n} changed", j + 1))?;
            }
        }
    }
    Ok("7 family functionals, random rational rescaling, n <= 3".into())
}

fn criterion_9() -> Outcome {
    let specs = [
        FamilySpec::hermite(1).unwrap(),
        FamilySpec::laguerre(vec![qf(1, 2)]).unwrap(),
        FamilySpec::jacobi(vec![qf(1, 2)], vec![qf(-1, 2)]).unwrap(),
        FamilySpec::gegenbauer(vec![qf(3, 2)]).unwrap(),
        FamilySpec::chebyshev1(1).unwrap(),
        FamilySpec::chebyshev2(1).unwrap(),
        FamilySpec::legendre(1).unwrap(),
    ];
    let mut count = 0;
    for spec in &specs {
        let ops = e(CapOperatorSet::build(&e(decompose(&e(spec.functional())?, 4))?))?;
        for start in 0..=1u32 {
            let base = MultiIndex::new(vec![start]);
            for m in 1..=3 {
                let (closed, _) = e(creation_power(spec, &base, 1, m))?;
                let piped = e(pipeline_creation_factor(spec, &ops, &base, 1, m))?;
                check(piped.as_ref() == Some(&closed), || format!("{spec} base {start} m={m}: {closed} vs {piped:?}"))?;
                if m > 1 {
                    let (prev, _) = e(creation_power(spec, &base, 1, m - 1))?;
                    let (step, _) = e(creation_power(spec, &MultiIndex::new(vec![start + m as u32 - 1]), 1, 1))?;
                    check(prev * step == closed, || format!("{spec}: induction step m={m}"))?;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} creation-power factors, m <= 3, 7 families"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Hermite closed form", criterion_1),
        ("Laguerre closed form", criterion_2),
        ("Jacobi closed form", criterion_3),
        ("specialization coherence", criterion_4),
        ("structural identities", criterion_5),
        ("atomic detection", criterion_6),
        ("Favard round trip", criterion_7),
        ("basis independence", criterion_8),
        ("creation-power factors", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.2}s) - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.2}s) - {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
