use std::fmt;
use std::fs;
use std::path::Path;

use kontact::boeckx::boeckx_invariant;
use kontact::constructions::{build_target, ConstructionError, Target};
use kontact::contact::{
    check_kcontact, check_oracle, check_sasakian, check_structural_identities, derived_tensors, verify_axioms,
    ContactMetricStructure,
};
use kontact::deform::{apply_deformation, predict_kmu};
use kontact::kmu::{classify_structure, StructureKappaMu};
use kontact::registry::{builtin, load_spec_with, render_spec, LoadOptions, sweep_lie_family, SweepRow};
use kontact::report::{Check, VerificationReport};
use serde_json::{json, Value};

use crate::{OutputArgs, StructureArgs, TargetArg};

const ORACLE_STEP: f64 = 1e-4;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Gate(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Gate(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Gate(m) => write!(f, "refused: {m}"),
        }
    }
}

fn input_err(e: impl fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// `strict` rejects files that fail the contact metric axioms.
fn load(args: &StructureArgs, strict: bool) -> Result<ContactMetricStructure, CliError> {
    let mut s = match (&args.builtin, args.spec.as_ref().or(args.path.as_ref())) {
        (Some(name), _) => builtin(name).map_err(input_err)?,
        (None, Some(path)) => load_spec_with(path, LoadOptions { strict, ..LoadOptions::default() }).map_err(input_err)?,
        (None, None) => return Err(CliError::Input("give a structure file, --spec or --builtin".into())),
    };
    s.samples.seed = args.seed;
    if let Some(n) = args.samples {
        s.samples.count = n;
    }
    Ok(s)
}

fn check_tols(o: &OutputArgs) -> Result<(), CliError> {
    if !(o.tol > 0.0 && o.oracle_tol > 0.0) {
        return Err(CliError::Input("tolerances must be positive".into()));
    }
    Ok(())
}

fn emit(o: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &o.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn save(path: &Path, s: &ContactMetricStructure) -> Result<(), CliError> {
    fs::write(path, render_spec(s)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn check_json(c: &Check, mandatory: bool) -> Value {
    let mut v = serde_json::to_value(c).expect("serializable");
    v["mandatory"] = json!(mandatory);
    v
}

fn check_line(c: &Check) -> String {
    let status = if c.pass { "PASS" } else { "FAIL" };
    let cmp = match c.bound {
        kontact::report::Bound::Upper => "<",
        kontact::report::Bound::Lower => ">",
    };
    format!("{status}  {:<52} {:>11.3e} {cmp} {:.1e}\n", c.check_name, c.residual, c.tol)
}

/// Twelve decimals, without a sign on values that round to zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn backend_name(s: &ContactMetricStructure) -> &'static str {
    if s.is_frame() {
        "frame"
    } else {
        "chart"
    }
}

pub fn verify(args: &StructureArgs) -> Result<bool, CliError> {
    let o = &args.output;
    check_tols(o)?;
    let s = load(args, false)?;
    let tol = o.tol;
    let run = |f: &(dyn Fn(&kontact::chart::Point) -> Result<VerificationReport, kontact::contact::ContactError> + Sync)| {
        s.over_samples(&s.name, f).map_err(input_err)
    };
    let mut mandatory = verify_axioms(&s, tol).map_err(input_err)?;
    mandatory.extend(run(&|p| check_structural_identities(&s, p, tol))?);
    mandatory.extend(run(&|p| Ok(derived_tensors(&s, p)?.invariants(tol)))?);
    mandatory.extend(run(&|p| check_oracle(&s, p, ORACLE_STEP, o.oracle_tol))?);
    let mut info = run(&|p| Ok(check_sasakian(&s, p, tol)?.report))?;
    info.extend(run(&|p| check_kcontact(&s, p, tol))?);
    let pass = mandatory.passed();
    let text = if o.json {
        let arr: Vec<Value> = mandatory
            .checks
            .iter()
            .map(|c| check_json(c, true))
            .chain(info.checks.iter().map(|c| check_json(c, false)))
            .collect();
        pretty(&Value::Array(arr))
    } else {
        let mut t = format!(
            "structure {} ({}, dim {}, {} points)\n",
            s.name,
            backend_name(&s),
            s.dim(),
            s.sample_points().len()
        );
        mandatory.checks.iter().for_each(|c| t.push_str(&check_line(c)));
        t.push_str("-- classification (informational)\n");
        info.checks.iter().for_each(|c| t.push_str(&check_line(c)));
        t.push_str(if pass { "verdict: PASS\n" } else { "verdict: FAIL\n" });
        t
    };
    emit(o, &text)?;
    Ok(pass)
}

fn classify_value(s: &ContactMetricStructure, tol: f64) -> Result<(StructureKappaMu, Value, bool), CliError> {
    let cls = classify_structure(s, tol).map_err(input_err)?;
    let boeckx = boeckx_invariant(cls.kappa, cls.mu.unwrap_or(0.0));
    let weak = cls.is_weakly_kmu(tol);
    let v = json!({
        "structure": s.name,
        "weakly_kappa_mu": weak,
        "kappa_mu": cls,
        "boeckx": match &boeckx {
            Ok(b) => serde_json::to_value(b).expect("serializable"),
            Err(e) => json!({ "error": e.to_string() }),
        },
    });
    Ok((cls, v, weak && boeckx.is_ok()))
}

pub fn classify(args: &StructureArgs) -> Result<bool, CliError> {
    let o = &args.output;
    check_tols(o)?;
    let s = load(args, true)?;
    let (cls, v, pass) = classify_value(&s, o.tol)?;
    let text = if o.json {
        pretty(&v)
    } else {
        let opt = |x: Option<f64>| x.map_or("absent".to_string(), fixed);
        let b = &v["boeckx"];
        format!(
            "structure {}\nkappa           {}  (spread {:.1e})\nmu              {}  (spread {:.1e})\nlambda          {:.12}\nconstant        {}\nresidual weak   {:.3e}\nresidual strong {:.3e} at {:?}\nI               {}\nregime          {}\nweakly (kappa, mu): {}\n",
            s.name,
            fixed(cls.kappa),
            cls.kappa_spread,
            opt(cls.mu),
            cls.mu_spread,
            cls.lambda,
            cls.constant,
            cls.residual_weak,
            cls.residual_strong,
            cls.strong_witness,
            b["I_M"].as_f64().map_or("undefined".to_string(), fixed),
            b["regime"].as_str().unwrap_or("n/a"),
            if cls.is_weakly_kmu(o.tol) { "yes" } else { "no" },
        )
    };
    emit(o, &text)?;
    Ok(pass)
}

pub fn deform(args: &StructureArgs, a: f64) -> Result<bool, CliError> {
    let o = &args.output;
    check_tols(o)?;
    let s = load(args, true)?;
    let d = apply_deformation(&s, a).map_err(input_err)?;
    let before = classify_structure(&s, o.tol).map_err(input_err)?;
    let after = classify_structure(&d, o.tol).map_err(input_err)?;
    let axioms = verify_axioms(&d, o.tol).map_err(input_err)?;
    let (kp, mp) = predict_kmu(before.kappa, before.mu.unwrap_or(0.0), a).map_err(input_err)?;
    let mp = before.mu.map(|_| mp);
    let kappa_ok = (after.kappa - kp).abs() < o.tol;
    let mu_ok = match (mp, after.mu) {
        (Some(p), Some(m)) => (m - p).abs() < o.tol,
        (None, None) => true,
        _ => false,
    };
    let pass = axioms.passed() && kappa_ok && mu_ok;
    if let Some(path) = &o.out {
        save(path, &d)?;
    }
    let text = if o.json {
        pretty(&json!({
            "structure": d.name,
            "a": a,
            "axioms_pass": axioms.passed(),
            "predicted": { "kappa": kp, "mu": mp },
            "measured": { "kappa": after.kappa, "mu": after.mu },
            "pass": pass,
        }))
    } else {
        let opt = |x: Option<f64>| x.map_or("absent".to_string(), |m| format!("{m:.12}"));
        format!(
            "deformed {} by a = {a}\naxioms: {}\n{:<8}{:>20}{:>20}\n{:<8}{:>20.12}{:>20.12}\n{:<8}{:>20}{:>20}\n",
            s.name,
            if axioms.passed() { "pass" } else { "FAIL" },
            "",
            "predicted",
            "measured",
            "kappa",
            kp,
            after.kappa,
            "mu",
            opt(mp),
            opt(after.mu),
        )
    };
    print!("{text}");
    Ok(pass)
}

pub fn construct(args: &StructureArgs, target: TargetArg) -> Result<bool, CliError> {
    let o = &args.output;
    check_tols(o)?;
    let s = load(args, true)?;
    let target = match target {
        TargetArg::Kcontact => Target::Kcontact,
        TargetArg::Mu2 => Target::Mu2,
    };
    let c = build_target(&s, target, o.tol).map_err(|e| match e {
        ConstructionError::RegimeGate { .. } | ConstructionError::AlreadyKcontact => CliError::Gate(e.to_string()),
        other => CliError::Input(other.to_string()),
    })?;
    if let Some(path) = &o.out {
        save(path, &c.structure)?;
    }
    let pass = c.report.passed();
    let text = if o.json {
        pretty(&json!({
            "structure": c.structure.name,
            "target": target.as_str(),
            "plan": c.plan,
            "checks": c.report.checks,
            "pass": pass,
        }))
    } else {
        let mut t = format!("{} from {} (I = {:.12})\n", target.as_str(), s.name, c.plan.i_m);
        c.report.checks.iter().for_each(|ch| t.push_str(&check_line(ch)));
        t.push_str(if pass { "verdict: PASS\n" } else { "verdict: FAIL\n" });
        t
    };
    print!("{text}");
    Ok(pass)
}

/// `lo:hi:step`, inclusive of `hi` up to rounding.
pub fn parse_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("range `{spec}` must be lo:hi:step with step > 0 and lo <= hi"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0 && lo <= hi && lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

pub fn sweep(c1: &str, c2: &str, o: &OutputArgs) -> Result<bool, CliError> {
    check_tols(o)?;
    let rows = sweep_lie_family(&parse_range(c1)?, &parse_range(c2)?, o.tol).map_err(input_err)?;
    let text = if o.json {
        pretty(&serde_json::to_value(&rows).expect("serializable"))
    } else {
        let mut t = String::from(SweepRow::CSV_HEADER);
        t.push('\n');
        for r in &rows {
            t.push_str(&r.to_csv());
            t.push('\n');
        }
        t
    };
    emit(o, &text)?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1:1:0.5").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(parse_range("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_range("1:0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
    }
}
