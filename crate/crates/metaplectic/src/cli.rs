//! Command line front end. Every subcommand prints one JSON document (or a
//! flat table) and maps library errors to exit status 1.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;

use serde_json::{json, Map, Value};

use crate::chars::{parse_field_elem, TameChar};
use crate::checks;
use crate::classify::{
    dual_basis_form, galois_of_cycle, normalize_cyclic, simulate_dual_frobenius, simulate_dual_gamma, ss_data,
};
use crate::coeff::{field_make, Field, FieldElem};
use crate::error::{Error, Result};
use crate::galois::{iso_test, twist_invariant_class, reduce_odd_exponent, InducedParams};
use crate::laurent::{random_one_unit, GammaUnit, LaurentSeries};
use crate::meta::{
    invert_ss_image, meta_irred_test, ps_image, ss_image, verify_bijection, MetaBase, MetaPhiGamma, SSRep,
};
use crate::metagroup::{chi_z, cocycle, hilbert, kappa_split, parse_rational, PMatrix};
use crate::phigamma::{
    dual, etale_check, make_induced, make_rank1, module_json, twist, CyclicForm, PhiGammaModule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "metaplectic", version, about = "Metaplectic GL2(Qp) parameters, (phi, Gamma)-modules and Galois images")]
pub struct Cli {
    /// Odd prime.
    #[arg(long, global = true, default_value_t = 5)]
    pub p: u32,
    /// Degree of the coefficient field over F_p.
    #[arg(long, global = true, default_value_t = 1)]
    pub m: u32,
    /// X-adic working precision.
    #[arg(long, global = true)]
    pub prec: Option<i64>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

/// A module given either by a character or by induction data.
#[derive(Debug, Args)]
pub struct ModuleArgs {
    /// Induction degree; 1 with h = 0 gives the rank-one module of --chi.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub h: i64,
    /// Character such as `mu(2)*omega^3`.
    #[arg(long, default_value = "1")]
    pub chi: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hilbert symbol (a, b).
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Cocycle sigma(g1, g2); matrices as `a,b,c,d`.
    Cocycle {
        #[arg(allow_hyphen_values = true)]
        g1: String,
        #[arg(allow_hyphen_values = true)]
        g2: String,
    },
    /// Image of g in GL2(Z_p) under the splitting.
    Split {
        #[arg(allow_hyphen_values = true)]
        g: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        zeta: i8,
    },
    /// Quadratic character describing conjugation by the central lift of z.
    ChiZ {
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Rank-one module of a tame character.
    BuildRank1 {
        #[arg(long, default_value = "1")]
        chi: String,
    },
    /// Induced module.
    BuildInduced {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        h: i64,
        #[arg(long, default_value = "1")]
        chi: String,
    },
    /// Twist a module by a character.
    Twist {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        by: String,
    },
    /// Dual module.
    Dual {
        #[command(flatten)]
        module: ModuleArgs,
    },
    /// Apply psi to a coordinate vector, coordinates separated by `;`, terms as `exp:coeff`.
    Psi {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Normal form of a cyclic module; lists are comma separated.
    Normalize {
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Add seeded random one-unit noise before normalizing.
        #[arg(long)]
        noise: bool,
    },
    /// Supersingular cycle data through the whole classification pipeline.
    ClassifySs {
        #[arg(long)]
        r: u32,
    },
    /// Finite-level simulation of Frobenius and Gamma on the dual basis.
    SimulateDual {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 4)]
        digits: i64,
        #[arg(long, default_value_t = 2)]
        gamma: u64,
    },
    /// Reduce Ind(omega_4^{(p^2+1)/2 h}) to a twist of a small exponent.
    GaloisReduce {
        #[arg(long, allow_hyphen_values = true)]
        h: i64,
    },
    /// Isomorphism test of two induced parameters.
    GaloisIso {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        h1: i64,
        #[arg(long, allow_hyphen_values = true)]
        h2: i64,
        #[arg(long, default_value = "1")]
        lam1: String,
        #[arg(long, default_value = "1")]
        lam2: String,
    },
    /// Image of a principal series.
    PsImage {
        #[arg(long, default_value = "1")]
        chi1: String,
        #[arg(long, default_value = "1")]
        chi2: String,
    },
    /// Image of a supersingular representation.
    SsImage {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value = "1")]
        eta: String,
    },
    /// Enumerate both sides of the supersingular correspondence.
    VerifyBijection,
    /// Run the invariant suite.
    Selftest {
        /// Reduced sample sizes.
        #[arg(long)]
        quick: bool,
    },
}

fn field_of(cli: &Cli) -> Result<Field> {
    field_make(cli.p, cli.m)
}

fn precision(cli: &Cli) -> Result<i64> {
    let n = cli.prec.unwrap_or(2 * (cli.p as i64).pow(2).max(30));
    if n < (cli.p as i64).pow(2) {
        return Err(Error::Invalid(format!("--prec must be at least p^2 = {}", cli.p * cli.p)));
    }
    Ok(n)
}

fn parse_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Invalid(format!("bad integer {:?}", x))))
        .collect()
}

fn build_module(args: &ModuleArgs, field: &Field, prec: i64) -> Result<PhiGammaModule> {
    let chi = TameChar::parse(&args.chi, field)?;
    if args.n == 1 && args.h == 0 {
        Ok(make_rank1(&chi, prec))
    } else {
        make_induced(args.n, args.h, &chi, prec)
    }
}

fn gamma_samples(p: u32) -> Vec<u64> {
    vec![2 % p as u64 + if p == 2 { 1 } else { 0 }, 1 + p as u64]
}

/// Parses `exp:coeff exp:coeff; ...`.
fn parse_vector(s: &str, field: &Field, prec: i64) -> Result<Vec<LaurentSeries>> {
    s.split(';')
        .map(|coord| {
            let mut terms = Vec::new();
            for t in coord.split_whitespace() {
                let (e, c) = t.split_once(':').ok_or_else(|| Error::Invalid(format!("bad term {:?}", t)))?;
                let e: i64 = e.parse().map_err(|_| Error::Invalid(format!("bad exponent {:?}", e)))?;
                terms.push((e, parse_field_elem(c, field)?));
            }
            Ok(LaurentSeries::from_terms(field, &terms, prec))
        })
        .collect()
}

fn meta_json(m: &MetaPhiGamma) -> Result<Value> {
    let base = match &m.base {
        MetaBase::Params(x) => json!({"induced": x, "label": format!("{:?}", x)}),
        MetaBase::Module(d) => json!({"module_rank": d.rank(), "characters": m.base.key()?}),
    };
    let summands: Vec<Value> = m
        .summands
        .iter()
        .map(|s| s.key().map(|k| serde_json::to_value(k).unwrap()))
        .collect::<Result<_>>()?;
    Ok(json!({
        "s_char": m.s_char,
        "base": base,
        "summands": summands,
        "irreducible": meta_irred_test(m).map(Value::Bool).unwrap_or_else(|e| Value::String(e.to_string())),
    }))
}

fn execute(cli: &Cli) -> Result<Value> {
    let p = cli.p;
    Ok(match &cli.command {
        Command::Hilbert { a, b } => json!({"hilbert": hilbert(&parse_rational(a)?, &parse_rational(b)?, p)?}),
        Command::Cocycle { g1, g2 } => json!({"cocycle": cocycle(&PMatrix::parse(g1)?, &PMatrix::parse(g2)?, p)}),
        Command::Split { g, zeta } => json!({"split": kappa_split(&PMatrix::parse(g)?, *zeta, p)?}),
        Command::ChiZ { z } => json!({"chi_z": chi_z(&parse_rational(z)?, p)?}),
        Command::BuildRank1 { chi } => {
            let field = field_of(cli)?;
            let d = make_rank1(&TameChar::parse(chi, &field)?, precision(cli)?);
            json!({"module": module_json(&d, &gamma_samples(p))?, "etale": etale_check(&d)})
        }
        Command::BuildInduced { n, h, chi } => {
            let field = field_of(cli)?;
            let d = make_induced(*n, *h, &TameChar::parse(chi, &field)?, precision(cli)?)?;
            json!({"module": module_json(&d, &gamma_samples(p))?, "etale": etale_check(&d)})
        }
        Command::Twist { module, by } => {
            let field = field_of(cli)?;
            let d = build_module(module, &field, precision(cli)?)?;
            let t = twist(&d, &TameChar::parse(by, &field)?);
            json!({"module": module_json(&t, &gamma_samples(p))?})
        }
        Command::Dual { module } => {
            let field = field_of(cli)?;
            let d = dual(&build_module(module, &field, precision(cli)?)?)?;
            json!({"module": module_json(&d, &gamma_samples(p))?})
        }
        Command::Psi { module, vector } => {
            let field = field_of(cli)?;
            let prec = precision(cli)?;
            let d = build_module(module, &field, prec)?;
            let v = parse_vector(vector, &field, prec)?;
            if v.len() != d.rank() {
                return Err(Error::Invalid(format!("vector has {} coordinates, module rank is {}", v.len(), d.rank())));
            }
            json!({"psi": d.psi(&v)?, "output_precision": d.psi_precision(prec)?})
        }
        Command::Normalize { d, t, b, noise } => {
            let field = field_of(cli)?;
            let prec = precision(cli)?;
            let ds = parse_list(d)?.into_iter().map(|x| FieldElem::from_int(&field, x)).collect::<Vec<_>>();
            let n = ds.len();
            let noise_terms: Vec<LaurentSeries> = if *noise {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
                (0..n).map(|_| random_one_unit(&mut rng, &field, prec)).collect()
            } else {
                vec![LaurentSeries::one(&field); n]
            };
            let form = CyclicForm::new(ds, parse_list(t)?, parse_list(b)?, noise_terms)?;
            let norm = normalize_cyclic(&form, prec)?;
            json!({
                "normal_form": norm.form,
                "params": norm.form.params()?,
                "change_of_basis": norm.change_of_basis,
                "seed": cli.seed,
            })
        }
        Command::ClassifySs { r } => {
            let field = field_of(cli)?;
            let data = ss_data(&field, *r)?;
            let cycle = data.cycle();
            let form = dual_basis_form(&cycle)?;
            let norm = normalize_cyclic(&form, precision(cli)?)?;
            let params = galois_of_cycle(&cycle)?;
            json!({
                "ss_data": data,
                "cyclic_form": {"d": form.d, "t": form.t, "b": form.b},
                "normal_form": norm.form,
                "induced": params,
                "summary": {"H": params.h, "Lam": params.lam.to_string()},
            })
        }
        Command::SimulateDual { r, i, digits, gamma } => {
            let field = field_of(cli)?;
            let data = ss_data(&field, *r)?.cycle();
            let idx = i.checked_sub(1).ok_or_else(|| Error::Invalid("--i counts from 1".into()))?;
            let phi = simulate_dual_frobenius(&data, idx, *digits)?;
            let g = GammaUnit::new(*gamma, p)?;
            let gam = simulate_dual_gamma(&data, idx, g, *digits)?;
            json!({
                "i": i,
                "level": phi.level,
                "phi_exponent": phi.exponent,
                "phi_unit": phi.unit,
                "phi_leading_times_c": phi.unit.coeff(0).mul(&data.c[idx]).to_string(),
                "gamma": *gamma,
                "gamma_series": gam,
            })
        }
        Command::GaloisReduce { h } => {
            let (a, hp) = reduce_odd_exponent(*h, p)?;
            json!({"twist": a, "h_prime": hp})
        }
        Command::GaloisIso { n, h1, h2, lam1, lam2 } => {
            let field = field_of(cli)?;
            let a = InducedParams::new(*n, *h1 as i128, parse_field_elem(lam1, &field)?)?;
            let b = InducedParams::new(*n, *h2 as i128, parse_field_elem(lam2, &field)?)?;
            json!({"isomorphic": iso_test(&a, &b)?, "first": a, "second": b})
        }
        Command::PsImage { chi1, chi2 } => {
            let field = field_of(cli)?;
            let img = ps_image(&TameChar::parse(chi1, &field)?, &TameChar::parse(chi2, &field)?, precision(cli)?);
            json!({"image": meta_json(&img)?})
        }
        Command::SsImage { r, eta } => {
            let field = field_of(cli)?;
            let rep = SSRep::new(*r, TameChar::parse(eta, &field)?)?;
            let img = ss_image(&rep)?;
            let label = match &img.base {
                MetaBase::Params(x) => twist_invariant_class(x),
                _ => None,
            };
            let back = match &img.base {
                MetaBase::Params(x) => Some(invert_ss_image(x)?),
                _ => None,
            };
            json!({"image": meta_json(&img)?, "h_prime": label, "inverse": back})
        }
        Command::VerifyBijection => {
            let field = field_of(cli)?;
            json!({"report": verify_bijection(&field)?})
        }
        Command::Selftest { quick } => {
            let outcomes = if *quick { quick_suite(cli.seed) } else { checks::acceptance_suite(cli.seed) };
            let passed = outcomes.iter().all(|o| o.passed);
            json!({"seed": cli.seed, "passed": passed, "checks": outcomes})
        }
    })
}

fn quick_suite(seed: u64) -> Vec<checks::CheckOutcome> {
    vec![
        checks::cocycle_suite(&[3, 5], 500, seed),
        checks::conjugation_law(&[3, 5], 200, seed),
        checks::phigamma_suite(&[(3, 30)], &[5], 10, seed),
        checks::normalization_roundtrip(20, seed),
        checks::closed_form_agreement(&[3, 5, 7]),
        checks::oracle_crosscheck(&[(3, 0), (5, 1)], 4),
        checks::reduction_exhaustive(3),
        checks::bijection_check(&[(3, 4)]),
        checks::principal_series_check(3, 1),
    ]
}

/// Short text for values shaped like a field element or a Laurent series.
fn compact(v: &Value) -> Option<String> {
    let obj = v.as_object()?;
    if obj.len() == 3 && obj.contains_key("p") && obj.contains_key("m") {
        let digits: Vec<u64> = obj.get("coeffs")?.as_array()?.iter().filter_map(Value::as_u64).collect();
        if digits.iter().skip(1).all(|&d| d == 0) {
            return Some(digits.first().copied().unwrap_or(0).to_string());
        }
        let parts: Vec<String> = digits.iter().map(u64::to_string).collect();
        return Some(format!("[{}]", parts.join(",")));
    }
    if obj.contains_key("valuation") && obj.contains_key("precision") {
        let mut terms: Vec<(i64, String)> = obj
            .get("coeffs")?
            .as_object()?
            .iter()
            .map(|(e, c)| Some((e.parse().ok()?, compact(c)?)))
            .collect::<Option<_>>()?;
        terms.sort();
        let mut out: Vec<String> = terms
            .into_iter()
            .map(|(e, c)| match e {
                0 => c,
                1 => format!("{}*X", c),
                _ => format!("{}*X^{}", c, e),
            })
            .collect();
        if out.is_empty() {
            out.push("0".into());
        }
        if let Some(n) = obj["precision"].as_i64() {
            out.push(format!("O(X^{})", n));
        }
        return Some(out.join(" + "));
    }
    None
}

fn render_table(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
        let line = |text: String| if prefix.is_empty() { text } else { format!("{}: {}", prefix, text) };
        if let Some(text) = compact(v) {
            out.push(line(text));
            return;
        }
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{}.{}", prefix, k) };
                    walk(&key, x, out);
                }
            }
            Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
                out.push(line(Value::Array(xs.clone()).to_string()));
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    walk(&format!("{}[{}]", prefix, i), x, out);
                }
            }
            Value::String(s) => out.push(line(s.clone())),
            other => out.push(line(other.to_string())),
        }
    }
    let mut out = Vec::new();
    if let Value::Object(map) = v {
        let fields: Vec<(&String, &Value)> = map.iter().filter(|(k, _)| k.as_str() != "schema").collect();
        // single scalar results print bare
        if fields.len() == 1 && !fields[0].1.is_object() && !fields[0].1.is_array() {
            walk("", fields[0].1, &mut out);
            return out.join("\n");
        }
        for (k, x) in fields {
            walk(k, x, &mut out);
        }
    } else {
        walk("", v, &mut out);
    }
    out.join("\n")
}

/// Runs the tool; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(body) => {
            let selftest_failed = matches!(cli.command, Command::Selftest { .. })
                && body.get("passed") == Some(&Value::Bool(false));
            let mut doc = Map::new();
            doc.insert("schema".into(), json!(1));
            if let Value::Object(m) = body {
                doc.extend(m);
            }
            let doc = Value::Object(doc);
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&doc).expect("json values serialize"),
                Format::Table => match (&cli.command, doc.get("checks")) {
                    (Command::Selftest { .. }, Some(Value::Array(xs))) => xs
                        .iter()
                        .filter_map(|x| serde_json::from_value::<checks::CheckOutcome>(x.clone()).ok())
                        .map(|o| o.line())
                        .collect::<Vec<_>>()
                        .join("\n"),
                    _ => render_table(&doc),
                },
            };
            // a closed pipe downstream is not an error for us
            let _ = writeln!(std::io::stdout().lock(), "{}", text);
            if selftest_failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            1
        }
    }
}
