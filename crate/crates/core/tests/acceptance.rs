//! Acceptance suite: one line per criterion.

use std::time::{Duration, Instant};

use qvacheck::cartan_data::{Gcm, Level};
use qvacheck::classical_affine::check_classical;
use qvacheck::qheisenberg::{check_deformation_cartan, check_exp_field, check_qheisenberg};
use qvacheck::report::Report;
use qvacheck::series::bridge::check_bridge;
use qvacheck::smatrix::{check_ideal_scalars, check_unitarity, check_ybe, ybe_trunc};
use qvacheck::tau_group::{check_group, PaperTau};
use qvacheck::Trunc;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn tau_identities() -> Outcome {
    let cases = [
        (Gcm::a1(), 0),
        (Gcm::a1(), 1),
        (Gcm::a1(), 2),
        (Gcm::a2(), 1),
        (Gcm::a2(), 2),
        (Gcm::a1xa1(), 1),
    ];
    let trunc = Trunc::new(6, 12);
    let start = Instant::now();
    for (gcm, l) in cases {
        let p = PaperTau::new(&gcm, &Level::int(l), trunc).map_err(|e| format!("{gcm} level {l}: {e}"))?;
        for r in [p.check_tech0(), p.check_tech1()] {
            let r = r.map_err(|e| format!("{gcm} level {l}: {e}"))?;
            if !r.pass {
                return Err(format!("{gcm} level {l}:\n{r}"));
            }
        }
    }
    within(start, Duration::from_secs(10))
}

fn tau_group() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (gcm, l) in [(Gcm::a1(), 1), (Gcm::a2(), 1)] {
        let samples = if gcm.rank() == 1 { 100 } else { 50 };
        let r = check_group(&gcm, &Level::int(l), Trunc::new(6, 12), samples, &mut rng).map_err(|e| e.to_string())?;
        if !r.pass {
            return Err(r.to_string());
        }
    }
    Ok(())
}

fn require(r: Report) -> Outcome {
    if r.pass {
        Ok(())
    } else {
        Err(r.to_string())
    }
}

fn s_matrix() -> Outcome {
    let trunc = Trunc::new(5, 10);
    let start = Instant::now();
    for gcm in [Gcm::a1(), Gcm::a2()] {
        let p = PaperTau::new(&gcm, &Level::int(1), ybe_trunc(trunc)).map_err(|e| e.to_string())?;
        require(check_unitarity(p.tuple(), true).map_err(|e| e.to_string())?)?;
        let r = check_ybe(p.tuple(), trunc.m_z).map_err(|e| e.to_string())?;
        let triples = (3 * gcm.rank()).pow(3);
        if r.pairs.len() != triples {
            return Err(format!("{gcm}: {} triples checked, expected {triples}", r.pairs.len()));
        }
        require(r)?;
    }
    within(start, Duration::from_secs(60))
}

fn ideal_scalars() -> Outcome {
    let gcm = Gcm::a2();
    let p = PaperTau::new(&gcm, &Level::int(1), Trunc::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let r = check_ideal_scalars(&p, 20, &mut rng).map_err(|e| e.to_string())?;
    let sing = r.pairs.iter().find(|e| e.label == "sing identities").map_or(0, |e| e.checks.len());
    if sing < 40 {
        return Err(format!("only {sing} Sing checks"));
    }
    for (i, j) in gcm.pairs() {
        let Some(m) = gcm.m_ij(i, j) else { continue };
        let entry = r.pairs.iter().find(|e| e.i == Some(i) && e.j == Some(j)).ok_or(format!("pair ({i},{j}) missing"))?;
        let tele = entry.checks.iter().filter(|c| c.name.starts_with("telescoping")).count() as i64;
        if tele != m + 1 {
            return Err(format!("pair ({i},{j}): {tele} telescoping checks, expected {}", m + 1));
        }
    }
    require(r)
}

fn classical_affine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = check_classical(&Gcm::a1(), &Level::int(1), Trunc::default(), 6, 500, &mut rng).map_err(|e| e.to_string())?;
    let dims = r.pairs.iter().find(|e| e.label == "graded dimensions").ok_or("graded dimensions missing")?;
    for (w, d) in [1, 3, 9].iter().enumerate() {
        let want = format!("graded dim {w} = {d}");
        if !dims.checks.iter().any(|c| c.name == want && c.pass) {
            return Err(format!("{want} not reproduced"));
        }
    }
    let loc = r.pairs.iter().find(|e| e.label == "locality").ok_or("locality missing")?;
    for name in ["N(h,h) = 2 at 0", "N(x+,x-) = 2 at 0"] {
        if !loc.checks.iter().any(|c| c.name == name) {
            return Err(format!("{name} not checked"));
        }
    }
    require(r)
}

fn quantum_heisenberg() -> Outcome {
    for gcm in [Gcm::a1(), Gcm::a2()] {
        let r = check_qheisenberg(&gcm, &Level::int(1), Trunc::new(6, 12), 4, 8).map_err(|e| format!("{gcm}: {e}"))?;
        require(r)?;
    }
    Ok(())
}

fn exp_field() -> Outcome {
    let start = Instant::now();
    for gcm in [Gcm::a1(), Gcm::a2()] {
        let r = check_exp_field(&gcm, &Level::int(1), Trunc::new(6, 12), 4).map_err(|e| format!("{gcm}: {e}"))?;
        require(r)?;
    }
    within(start, Duration::from_secs(120))
}

fn deformation() -> Outcome {
    let r = check_deformation_cartan(&Gcm::a1(), &Level::int(1), Trunc::new(4, 8), 3).map_err(|e| e.to_string())?;
    let eps = r.pairs.iter().find(|e| e.label == "identity tuple").ok_or("identity tuple missing")?;
    if !eps.checks.iter().all(|c| c.pass) {
        return Err("identity tuple does not give the classical field".into());
    }
    require(r)
}

fn bridge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let r = check_bridge(Trunc::new(6, 12), 3, 100, &mut rng).map_err(|e| e.to_string())?;
    require(r)
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Outcome)> = vec![
        (1, "tau identities", tau_identities),
        (2, "tau group", tau_group),
        (3, "s-matrix axioms", s_matrix),
        (4, "ideal scalars", ideal_scalars),
        (5, "classical affine", classical_affine),
        (6, "quantum heisenberg", quantum_heisenberg),
        (7, "exponential field", exp_field),
        (8, "deformed cartan", deformation),
        (9, "bridge", bridge),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let start = Instant::now();
        let res = f();
        let t = start.elapsed();
        match res {
            Ok(()) => println!("criterion {n}: PASS ({name}, {:.2}s)", t.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {n}: FAIL ({name}, {:.2}s)\n{e}", t.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
