//! Acceptance run: one line per criterion, then a non-zero exit if any
//! criterion fails that is not listed in `KNOWN_UNMET`.
//!
//! `KNOWN_UNMET` criteria still run and print their measured values; the
//! run fails if one of them starts passing, so the list stays honest.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use codecraft_core::basis::{build_joint_intermediates, optimize_basis, verify_witnesses};
use codecraft_core::bb::{bundled_spec, Side};
use codecraft_core::craft::{ancilla_progression, Measurement};
use codecraft_core::distance::{min_weight, oracle_distance, ErrorSide};
use codecraft_core::paint::{constrained_kernel_basis, min_weight_constrained, paint_with, PaintConfig};
use codecraft_core::pipeline::{paint_measurement, Session, Shape, Target};
use codecraft_core::schedule::{plan, verify, LogicalId, MeasurementCode, Network, PlanRequest, SCHEDULE_SCHEMA_VERSION};
use codecraft_core::{build_planar_bb, css_distance, BitMatrix, CssCode, Error, Pauli, SearchConfig};

/// Criteria whose stated values this implementation does not reach; see
/// the decision ledger for the analysis.
const KNOWN_UNMET: &[usize] = &[9];

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t0: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = t0.elapsed();
    ensure(t < limit, format!("{what} took {t:.1?}, limit {limit:?}"))
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn session54() -> Session {
    Session::new(bundled_spec("54").unwrap(), &SearchConfig::default()).unwrap()
}

/// Every deformed code is also checked for the measurement-channel
/// and independence conditions (criterion 5).
struct Soundness {
    checked: usize,
    failures: Vec<String>,
}

impl Soundness {
    fn check(&mut self, m: &Measurement, target: &str) {
        self.checked += 1;
        let f = m.deformed.frame();
        let lifted = f.lift(&m.channel.target).unwrap();
        if !f.h_x.in_rowspace(&lifted).unwrap() {
            self.failures.push(format!("{target}: target not in rowspace"));
        }
        let un = f.lift_rows(&m.unmeasured).unwrap();
        if f.h_x.vstack(&un).rank() != f.h_x.rank() + un.rows() {
            self.failures.push(format!("{target}: unmeasured logicals depend on the checks"));
        }
    }
}

fn c1() -> Check {
    let mut parts = Vec::new();
    for (name, n, k) in [("54", 54, 6), ("180", 180, 6), ("162", 162, 8)] {
        let t0 = Instant::now();
        let (code, _) = build_planar_bb(&bundled_spec(name).unwrap()).map_err(e2s)?;
        within(t0, Duration::from_secs(1), name)?;
        ensure(code.validate_css(), format!("{name}: checks do not commute"))?;
        let got = (code.n(), code.logical_count());
        ensure(got == (n, k), format!("{name}: (n,k) = {got:?}"))?;
        parts.push(format!("[[{n},{k}]] in {:.0?}", t0.elapsed()));
    }
    Ok(parts.join(", "))
}

fn c2() -> Check {
    let (code, _) = build_planar_bb(&bundled_spec("54").unwrap()).map_err(e2s)?;
    let t0 = Instant::now();
    let r = css_distance(&code, &SearchConfig::default()).map_err(e2s)?;
    within(t0, Duration::from_secs(120), "distance")?;
    ensure(r.value == 4 && r.exact, format!("d = {} exact = {}", r.value, r.exact))?;
    Ok(format!("d = 4 exact in {:.1?}", t0.elapsed()))
}

/// Smallest ancilla in the progression of `pauli`/`side` (up to `limit`)
/// at which painting to 4 gives an exact dressed distance of 4.
fn c3(sound: &mut Soundness) -> Check {
    let s = session54();
    let search = SearchConfig::default();
    let t0 = Instant::now();
    let mut cells = Vec::new();
    for (pauli, side, limit) in [(Pauli::X, Side::Left, 50), (Pauli::Z, Side::Bottom, 33)] {
        let prog = ancilla_progression(&s.code, pauli, side, 4).map_err(e2s)?;
        for i in 0..6 {
            let t = Target { pauli, blocks: vec![vec![i]] };
            let mut reached = None;
            for &(columns, anc) in prog.iter().filter(|p| p.1 <= limit) {
                let m = s.measure(&t, Shape::Single { side, columns }).map_err(e2s)?;
                sound.check(&m, &t.to_string());
                let r = paint_measurement(&m, &t, 4, &search).map_err(e2s)?;
                if let Some(after) = r.after {
                    ensure(after.value >= r.before.value, format!("{t} at {anc}: orange < blue"))?;
                    if after.value == 4 && after.exact {
                        reached = Some(anc);
                        break;
                    }
                }
            }
            let anc = reached.ok_or_else(|| format!("{t} never reaches 4 within ancilla {limit}"))?;
            cells.push(format!("{t}@{anc}"));
        }
    }
    within(t0, Duration::from_secs(1800), "painting table")?;
    Ok(format!("{} in {:.1?}", cells.join(" "), t0.elapsed()))
}

fn c4(sound: &mut Soundness) -> Check {
    let s = session54();
    let search = SearchConfig::default();
    let t0 = Instant::now();
    let mut parts = Vec::new();
    for (target, anc) in [("X0,X1", 78), ("Z2,Z3", 54)] {
        let t: Target = target.parse().map_err(e2s)?;
        let m = s.measure(&t, s.shape(&t, Some(anc), None).map_err(e2s)?).map_err(e2s)?;
        sound.check(&m, target);
        let r = paint_measurement(&m, &t, 4, &search).map_err(e2s)?;
        let after = r.after.ok_or_else(|| format!("{target}: {}", r.failure.unwrap_or_default()))?;
        ensure(after.value == 4, format!("{target} at {anc}: post-paint distance {}", after.value))?;
        parts.push(format!("{target}@{anc}: {} -> {}", r.before.value, after.value));
    }
    within(t0, Duration::from_secs(900), "two-block")?;
    Ok(parts.join(", "))
}

fn c5(sound: &Soundness) -> Check {
    ensure(sound.checked > 0, "no deformed codes were generated")?;
    ensure(sound.failures.is_empty(), sound.failures.join("; "))?;
    Ok(format!("{} deformed codes sound", sound.checked))
}

fn c6() -> Check {
    let s = session54();
    let search = SearchConfig::default();
    let mut iterations = 0;
    let mut storages = 0;
    for (pauli, side, i, step) in [(Pauli::X, Side::Left, 3, 2), (Pauli::Z, Side::Bottom, 0, 1), (Pauli::X, Side::Left, 1, 2)] {
        let (columns, _) = ancilla_progression(&s.code, pauli, side, step + 1).map_err(e2s)?[step];
        let t = Target { pauli, blocks: vec![vec![i]] };
        let m = s.measure(&t, Shape::Single { side, columns }).map_err(e2s)?;
        let init = constrained_kernel_basis(&m.deformed, &m.unmeasured).map_err(e2s)?;
        let mut bad = 0;
        let cfg = PaintConfig { d_th: 4, search };
        let (set, _) = paint_with(&m.deformed, &init, &cfg, &mut |st| {
            iterations += 1;
            if st.pairing() != BitMatrix::identity(st.u.rows()) {
                bad += 1;
            }
        })
        .map_err(e2s)?;
        ensure(bad == 0, format!("{t}: pairing broken in {bad} iterations"))?;
        let h_z = m.deformed.frame().h_z;
        for u in set.u.iter_rows() {
            let w = min_weight_constrained(&h_z, u, &search).map_err(e2s)?.map_or(usize::MAX, |c| c.weight);
            ensure(w >= 4, format!("{t}: storage with a weight-{w} error"))?;
            storages += 1;
        }
    }
    // adversarial: the first stretch of X1 has a light error no gauge vector fixes
    let (columns, _) = ancilla_progression(&s.code, Pauli::X, Side::Left, 1).map_err(e2s)?[0];
    let t = Target { pauli: Pauli::X, blocks: vec![vec![1]] };
    let m = s.measure(&t, Shape::Single { side: Side::Left, columns }).map_err(e2s)?;
    let init = constrained_kernel_basis(&m.deformed, &m.unmeasured).map_err(e2s)?;
    let r = paint_with(&m.deformed, &init, &PaintConfig { d_th: 4, search }, &mut |_| {});
    ensure(matches!(r, Err(Error::PaintFailure { .. })), "adversarial fixture did not fail")?;
    Ok(format!("{iterations} iterations keep the pairing, {storages} storages >= 4, failure path hit"))
}

fn c7() -> Check {
    let t0 = Instant::now();
    let search = SearchConfig::default();
    let mut parts = Vec::new();
    for name in ["54", "180", "162"] {
        let spec = bundled_spec(name).unwrap();
        let seps = spec.separations.clone().ok_or("no separations")?;
        let (code, _) = build_planar_bb(&spec).map_err(e2s)?;
        let r = optimize_basis(&code, seps.xx, seps.zz, &search).map_err(e2s)?;
        let k = code.logical_count();
        ensure(r.basis.pairing() == BitMatrix::identity(k), format!("{name}: pairing is not the identity"))?;
        let ji = build_joint_intermediates(&code, seps.xx, seps.zz).map_err(e2s)?;
        ensure(verify_witnesses(&ji, &r.basis).map_err(e2s)?, format!("{name}: witnesses fail"))?;
        parts.push(format!("{name} (s_xx {}, s_zz {})", seps.xx, seps.zz));
    }
    within(t0, Duration::from_secs(600), "basis search")?;
    Ok(format!("{} in {:.1?}", parts.join(", "), t0.elapsed()))
}

fn oracle_fixtures() -> Vec<(&'static str, CssCode)> {
    let h = BitMatrix::parse(&["1010101", "0110011", "0001111"]);
    let steane = CssCode::new(h.clone(), h).unwrap();
    let surface2 = CssCode::new(BitMatrix::parse(&["1111"]), BitMatrix::parse(&["1100", "0011"])).unwrap();
    let surface3 = CssCode::new(
        BitMatrix::from_supports(9, &[vec![0, 1, 3, 4], vec![4, 5, 7, 8], vec![2, 5], vec![3, 6]]),
        BitMatrix::from_supports(9, &[vec![1, 2, 4, 5], vec![3, 4, 6, 7], vec![0, 1], vec![7, 8]]),
    )
    .unwrap();
    // [[15,7,3]] quantum Hamming code
    let hamming = BitMatrix::from_supports(
        15,
        &(0..4).map(|b| (0..15).filter(|c| (c + 1) >> b & 1 == 1).collect()).collect::<Vec<_>>(),
    );
    let hamming = CssCode::new(hamming.clone(), hamming).unwrap();
    vec![("[[7,1,3]]", steane), ("[[4,1,2]]", surface2), ("[[9,1,3]]", surface3), ("[[15,7,3]]", hamming)]
}

fn c8() -> Check {
    let mut agree = 0;
    for (name, code) in oracle_fixtures() {
        ensure(code.n() <= 24, format!("{name} too large"))?;
        let basis = code.canonical_logicals().map_err(e2s)?;
        for (side, h, l) in [(ErrorSide::X, &code.h_z, &basis.j_z), (ErrorSide::Z, &code.h_x, &basis.j_x)] {
            let want = oracle_distance(&code, side).map_err(e2s)?;
            for seed in 0..5 {
                let cfg = SearchConfig { exact_limit: 0, budget: 200, seed, ..SearchConfig::default() };
                let got = min_weight(h, l, &cfg).map_err(e2s)?.map(|c| c.weight);
                ensure(got == Some(want), format!("{name} {side:?} seed {seed}: {got:?} vs {want}"))?;
                agree += 1;
            }
        }
    }
    Ok(format!("{agree}/{agree} randomized runs match the exhaustive oracle"))
}

fn c9() -> Check {
    let t0 = Instant::now();
    let search = SearchConfig { budget: 10_000, ..SearchConfig::default() };
    let s = Session::new(bundled_spec("180").unwrap(), &search).map_err(e2s)?;
    let t: Target = "X2".parse().map_err(e2s)?;
    let m = s.measure(&t, s.shape(&t, Some(32), None).map_err(e2s)?).map_err(e2s)?;
    let r = paint_measurement(&m, &t, 7, &search).map_err(e2s)?;
    within(t0, Duration::from_secs(1800), "spot check")?;
    let summary = format!(
        "X2@32: before {}{}, paint to 7: {}",
        r.before.value,
        if r.before.exact { " (exact)" } else { "" },
        match (&r.after, &r.failure) {
            (Some(a), _) => format!("{} with {} updates", a.value, r.updates()),
            (None, f) => f.clone().unwrap_or_default(),
        }
    );
    ensure(r.before.value <= 7 && r.after.is_some() && r.updates() == 0, summary.clone())?;
    Ok(summary)
}

fn c10() -> Check {
    let t0 = Instant::now();
    let q = LogicalId::new;
    let code = |ops: &[LogicalId], pauli| MeasurementCode { operands: ops.to_vec(), pauli, rounds: 4 };
    let net = Network {
        schema_version: SCHEDULE_SCHEMA_VERSION,
        codes: vec![
            code(&[q(0, 0), q(1, 0)], Pauli::Z),
            code(&[q(1, 0), q(2, 0)], Pauli::X),
            code(&[q(1, 0)], Pauli::Z),
            code(&[q(0, 0), q(2, 0)], Pauli::Z),
            code(&[q(0, 0)], Pauli::X),
        ],
    };
    let mut parts = Vec::new();
    for req in [
        PlanRequest::Cnot { control: q(0, 0), target: q(2, 0), ancilla: q(1, 0) },
        PlanRequest::Transfer { source: q(0, 0), target: q(2, 0) },
    ] {
        let s = plan(&net, &req).map_err(e2s)?;
        let r = verify(&s).map_err(e2s)?;
        ensure(r.passed, r.mismatch.unwrap_or_default())?;
        parts.push(format!("{} steps, {} inputs x {} branches", s.steps.len(), r.pauli_inputs, r.outcome_branches));
    }
    within(t0, Duration::from_secs(1), "schedule oracle")?;
    Ok(format!("cnot {}; transfer {}", parts[0], parts[1]))
}

fn guarded(f: impl FnOnce() -> Check) -> Check {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
    })
}

fn main() {
    let mut sound = Soundness { checked: 0, failures: Vec::new() };
    let mut results: Vec<(usize, &str, Check)> = Vec::new();
    results.push((1, "construction fidelity", guarded(c1)));
    results.push((2, "exact base distance", guarded(c2)));
    results.push((3, "painting efficacy [[54]]", guarded(|| c3(&mut sound))));
    results.push((4, "two-block [[54]]", guarded(|| c4(&mut sound))));
    results.push((5, "deformation soundness", guarded(|| c5(&sound))));
    results.push((6, "painting invariants", guarded(c6)));
    results.push((7, "two-block basis", guarded(c7)));
    results.push((8, "distance oracle equivalence", guarded(c8)));
    results.push((9, "[[180]] spot check", guarded(c9)));
    results.push((10, "schedule oracle", guarded(c10)));

    let mut unexpected = 0;
    for (n, name, r) in &results {
        let known = KNOWN_UNMET.contains(n);
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let note = if known { " (known unmet)" } else { "" };
        println!("criterion {n:>2} {tag} {name}{note}: {detail}");
        if r.is_ok() == known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria differ from the expected outcome");
        std::process::exit(1);
    }
}
