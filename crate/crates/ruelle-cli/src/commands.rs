use std::path::PathBuf;

use anyhow::{bail, Context};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use ruelle_zero::congruence::prime_square::{log_deviation, prime_square_details, Variant};
use ruelle_zero::congruence::{congruence_report, level_invariants, DirichletCharacter};
use ruelle_zero::funceq::{h, h1};
use ruelle_zero::leadterm::{lead_term, ord_h1_at_zero};
use ruelle_zero::suites::{fried_fuzz, run_family, Family};
use ruelle_zero::torsion::{verify_fried_kitano, verify_fried_yamaguchi, KitanoRep, SeifertIndex, YamaguchiRep};

use crate::config::OrbifoldDoc;
use crate::render::{num, short, Report};

pub struct Globals {
    pub tolerance: f64,
    pub seed: u64,
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn complex_text(z: Complex64) -> String {
    format!("{} {} {}i", num(z.re), if z.im < 0.0 { '-' } else { '+' }, num(z.im.abs()))
}

pub fn orbifold(path: &PathBuf) -> anyhow::Result<Report> {
    let doc = OrbifoldDoc::load(path)?;
    let t = doc.surface()?;
    let lead = lead_term(&t)?;
    let mut r = Report::new(format!("orbifold {}", path.display()), &["quantity", "value"]);
    let sign = match lead.sign {
        Some(s) => s.to_string(),
        None => "unknown".into(),
    };
    r.rows.push(vec!["ord R(0)".into(), lead.order.to_string()]);
    r.rows.push(vec!["|lead|".into(), lead.magnitude.to_string()]);
    r.rows.push(vec!["|lead| numeric".into(), num(lead.magnitude.eval())]);
    r.rows.push(vec!["sign".into(), sign]);
    r.rows.push(vec!["tau0".into(), t.profile.tau0.to_string()]);
    r.rows.push(vec!["tilde tau0".into(), t.profile.tilde_tau0.to_string()]);
    r.rows.push(vec!["ord H1(0)".into(), ord_h1_at_zero(&t).to_string()]);
    let mut samples = Vec::new();
    for &[re, im] in &doc.samples {
        let s = Complex64::new(re, im);
        let (hv, h1v) = (h(&t, s)?, h1(&t, s)?);
        r.rows.push(vec![format!("H({re}{im:+}i)"), complex_text(hv)]);
        r.rows.push(vec![format!("H1({re}{im:+}i)"), complex_text(h1v)]);
        samples.push(json!({ "s": complex_json(s), "H": complex_json(hv), "H1": complex_json(h1v) }));
    }
    r.json = json!({
        "command": "orbifold",
        "document": path.display().to_string(),
        "lead": lead,
        "tau0": t.profile.tau0,
        "tilde_tau0": t.profile.tilde_tau0,
        "ord_h1": ord_h1_at_zero(&t),
        "samples": samples,
    });
    Ok(r)
}

pub enum FriedInstance {
    Kitano { genus: u32, fibers: Vec<(u32, i64)>, m: u32, a: i64, residues: Vec<Vec<u32>> },
    Yamaguchi { genus: u32, orders: Vec<u32>, n: u32, eta: Vec<i64> },
}

pub fn fried(instance: FriedInstance, fuzz: Option<usize>, g: &Globals) -> anyhow::Result<Report> {
    let kind = match instance {
        FriedInstance::Kitano { .. } => "kitano",
        FriedInstance::Yamaguchi { .. } => "yamaguchi",
    };
    if let Some(draws) = fuzz {
        let f = fried_fuzz(kind, draws, g.seed, g.tolerance)?;
        let mut r = Report::new(format!("fried {kind} fuzz (seed {})", g.seed), &["draws", "failures", "exact", "max deviation", "verdict"]);
        r.rows.push(vec![
            f.draws.to_string(),
            f.failures.to_string(),
            f.exact_matches.to_string(),
            short(f.max_deviation),
            verdict(f.pass),
        ]);
        r.pass = Some(f.pass);
        r.json = json!({ "command": "fried", "fuzz": f });
        return Ok(r);
    }
    let rep = match &instance {
        FriedInstance::Kitano { genus, fibers, m, a, residues } => {
            let idx = SeifertIndex::new(0, *genus, fibers)?;
            verify_fried_kitano(&idx, &KitanoRep::new(*m, *a, residues.clone())?)?
        }
        FriedInstance::Yamaguchi { genus, orders, n, eta } => {
            let idx = SeifertIndex::with_standard_fibers(*genus, orders)?;
            verify_fried_yamaguchi(&idx, &YamaguchiRep::new(*n, eta.clone())?)?
        }
    };
    let pass = rep.order_at_zero == 0 && rep.relative_deviation <= g.tolerance;
    let zeta_side = if kind == "kitano" { "|R(0)|^-1" } else { "|R(0)|" };
    let mut r = Report::new(format!("fried {kind}"), &["side", "factored", "value"]);
    r.rows.push(vec!["torsion".into(), rep.torsion.to_string(), num(rep.torsion_value)]);
    r.rows.push(vec![zeta_side.into(), rep.zeta.to_string(), num(rep.zeta_value)]);
    r.notes.push(format!(
        "ord R(0) = {}, relative deviation {}, exact match {}: {}",
        rep.order_at_zero,
        short(rep.relative_deviation),
        rep.exact_match,
        verdict(pass)
    ));
    r.pass = Some(pass);
    r.json = json!({ "command": "fried", "kind": kind, "report": rep, "tolerance": g.tolerance, "pass": pass });
    Ok(r)
}

fn verdict(pass: bool) -> String {
    if pass { "PASS" } else { "FAIL" }.into()
}

pub enum CharacterChoice {
    Trivial,
    Exponents(Vec<u64>),
    Sweep,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// ℓ when N = ℓ² with ℓ ≥ 5 prime.
fn prime_square_root(n: u64) -> Option<u64> {
    let l = (n as f64).sqrt().round() as u64;
    (l * l == n && l >= 5 && is_prime(l)).then_some(l)
}

struct Row {
    cells: Vec<String>,
    json: Value,
}

fn congruence_row(chi: &DirichletCharacter, ell: Option<u64>) -> anyhow::Result<Row> {
    let ident = chi.to_string();
    let cond = chi.conductor();
    let parity = if chi.is_even() { "+" } else { "-" };
    if !chi.is_even() {
        let inv = level_invariants(chi.modulus())?;
        let mut cells = vec![ident, cond.to_string(), parity.into(), inv.rho.to_string(), inv.tau.to_string(), inv.genus.to_string()];
        cells.extend(std::iter::repeat("-".to_string()).take(8));
        if ell.is_some() {
            cells.extend(["-".to_string(), "-".to_string()]);
        }
        return Ok(Row { cells, json: json!({ "character": chi, "odd": true }) });
    }
    let rep = congruence_report(chi)?;
    let sc = &rep.scattering;
    let mut cells = vec![
        ident,
        cond.to_string(),
        parity.into(),
        rep.invariants.rho.to_string(),
        rep.invariants.tau.to_string(),
        rep.invariants.genus.to_string(),
        rep.tau0.to_string(),
        rep.tilde_tau0.to_string(),
        sc.f_count.to_string(),
        sc.f0_count.to_string(),
        sc.n0.to_string(),
        sc.a_n0_d1_abs.to_string(),
        rep.lead.order.to_string(),
        num(rep.lead.magnitude.eval()),
    ];
    let mut dual = Value::Null;
    if let Some(l) = ell {
        let b = match cond {
            1 => 0,
            c if c == l => 1,
            _ => 2,
        };
        let ps = prime_square_details(l, b, chi, Variant::Corrected)?;
        let dev = log_deviation(&ps.lead.magnitude, &rep.lead.magnitude);
        cells.push(ps.lead.order.to_string());
        cells.push(short(dev.abs()));
        dual = json!({ "b": b, "order": ps.lead.order, "magnitude": ps.lead.magnitude, "log_deviation": dev });
    }
    Ok(Row { cells, json: json!({ "report": rep, "prime_square": dual }) })
}

pub fn congruence(level: u64, choice: CharacterChoice, g: &Globals) -> anyhow::Result<Report> {
    if level == 0 {
        bail!("--level must be ≥ 1");
    }
    let chars = match choice {
        CharacterChoice::Trivial => vec![DirichletCharacter::trivial(level)?],
        CharacterChoice::Exponents(e) => {
            let orders = DirichletCharacter::generator_orders(level);
            if e.len() != orders.len() || e.iter().zip(&orders).any(|(x, o)| x >= o) {
                bail!("--character: expected {} exponents below the generator orders {orders:?}, got {e:?}", orders.len());
            }
            vec![DirichletCharacter::from_exponents(level, &e).context("--character")?]
        }
        CharacterChoice::Sweep => DirichletCharacter::all(level)?,
    };
    let ell = prime_square_root(level);
    // collect() keeps the canonical character order regardless of scheduling
    let rows: Vec<Row> = chars.par_iter().map(|c| congruence_row(c, ell)).collect::<anyhow::Result<_>>()?;
    let mut cols = vec!["chi", "cond", "par", "rho", "tau", "g", "tau0", "ttau0", "#F", "#F0", "n0", "|a d(1)|", "ord", "|lead|"];
    if ell.is_some() {
        cols.extend(["ps ord", "ps dev"]);
    }
    let mut r = Report::new(format!("Gamma0({level})"), &cols);
    let mut worst = 0f64;
    let mut orders_match = true;
    for row in &rows {
        if let Some(ps) = row.json.get("prime_square").filter(|v| !v.is_null()) {
            worst = worst.max(ps["log_deviation"].as_f64().unwrap_or(f64::INFINITY).abs());
            orders_match &= ps["order"] == row.json["report"]["lead"]["order"];
        }
    }
    r.rows = rows.iter().map(|row| row.cells.clone()).collect();
    if ell.is_some() {
        let pass = orders_match && worst <= g.tolerance;
        r.notes.push(format!("prime-square dual path: max log deviation {}, orders agree: {orders_match}", short(worst)));
        r.pass = Some(pass);
    }
    r.json = json!({
        "command": "congruence",
        "level": level,
        "generator_orders": DirichletCharacter::generator_orders(level),
        "rows": rows.into_iter().map(|row| row.json).collect::<Vec<_>>(),
    });
    Ok(r)
}

pub fn identities(family: Option<String>, samples: Option<usize>, g: &Globals) -> anyhow::Result<Report> {
    let families = match family {
        Some(name) => vec![Family::parse(&name)?],
        None => Family::ALL.to_vec(),
    };
    let mut r = Report::new(format!("identity suites (seed {})", g.seed), &["family", "samples", "checks", "failures", "max deviation", "verdict"]);
    let mut all = Vec::new();
    let mut pass = true;
    for f in families {
        let rep = run_family(f, samples.unwrap_or(f.default_samples()), g.seed, g.tolerance)?;
        r.rows.push(vec![
            rep.family.into(),
            rep.samples.to_string(),
            rep.checks.to_string(),
            rep.failures.to_string(),
            short(rep.max_deviation),
            verdict(rep.pass),
        ]);
        pass &= rep.pass;
        all.push(rep);
    }
    r.pass = Some(pass);
    r.json = json!({ "command": "identities", "seed": g.seed, "tolerance": g.tolerance, "families": all, "pass": pass });
    Ok(r)
}
