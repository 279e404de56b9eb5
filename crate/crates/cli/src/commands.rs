use std::io::Write;
use std::path::Path;

use brjuno::brjuno::{self as bj, BrjunoValue};
use brjuno::dynamics::{self, CycleSet};
use brjuno::grid::{self, Tail};
use brjuno::linearization::{self, conformal_radius, LinearizeOptions, RadiusMethod};
use brjuno::upsilon::{self, UpsilonDiagnostics, UpsilonValue};
use brjuno::{AlphaSpec, CfFlavor, Rational};

use crate::args::{Command, PhiFlavor, RadiusChoice, SweepArgs, SweepFlavor};
use crate::config::Settings;
use crate::failure::{Failure, EXIT_PARTIAL};
use crate::output::{self, num, Plot};

/// Runs one subcommand; `Ok` carries a nonzero code for partial results.
pub fn run(command: &Command, settings: &Settings) -> Result<u8, Failure> {
    match command {
        Command::Upsilon { alpha } => cmd_upsilon(alpha, settings),
        Command::Phi { alpha, flavor } => cmd_phi(alpha, *flavor, settings),
        Command::Phitrunc { pq } => cmd_phitrunc(pq),
        Command::Radius { alpha, method } => cmd_radius(alpha, *method, settings),
        Command::Sweep(args) => cmd_sweep(args, settings),
        Command::Probe { target, count } => cmd_probe(target, *count, settings),
        Command::Cycle { pq, eps } => cmd_cycle(pq, *eps),
        Command::Dn { alpha, n_max } => cmd_dn(alpha, *n_max, settings),
    }
}

fn parse_alpha(text: &str) -> Result<AlphaSpec, Failure> {
    text.parse::<AlphaSpec>()
        .map_err(|e| Failure::usage(format!("`{text}`: {e}")))
}

fn parse_rational(text: &str) -> Result<Rational, Failure> {
    text.parse::<Rational>()
        .map_err(|e| Failure::usage(format!("`{text}`: {e}")))
}

fn print_upsilon(out: &mut impl Write, alpha: &AlphaSpec, v: &UpsilonValue) -> std::io::Result<()> {
    writeln!(out, "alpha           {alpha}")?;
    writeln!(out, "value           {}", num(v.value))?;
    writeln!(out, "method          {}", v.method)?;
    writeln!(out, "error_estimate  {}", num(v.error_estimate))?;
    match &v.diagnostics {
        UpsilonDiagnostics::Rational {
            phi_trunc,
            log_la,
            residual,
            precision,
        } => {
            writeln!(out, "phi_trunc       {}", num(*phi_trunc))?;
            writeln!(out, "log_la          {}", num(*log_la))?;
            writeln!(out, "residual        {}", num(*residual))?;
            writeln!(out, "precision_bits  {precision}")?;
        }
        UpsilonDiagnostics::Brjuno {
            phi,
            phi_tail,
            radius,
        } => {
            writeln!(out, "phi             {}", num(*phi))?;
            writeln!(out, "phi_tail        {}", num(*phi_tail))?;
            writeln!(out, "radius          {}", num(radius.value))?;
            writeln!(out, "radius_spread   {}", num(radius.spread))?;
            writeln!(out, "series_n        {}", radius.n_used)?;
        }
        UpsilonDiagnostics::Cremer {
            sequence,
            truncated,
            reason,
        } => {
            writeln!(out, "reason          {reason}")?;
            writeln!(out, "d_n stands in for the conformal radius r_n")?;
            writeln!(out, "truncated       {truncated}")?;
            writeln!(out, "n,q_n,phi_n,d_n,phi_n_plus_log_d_n")?;
            for t in sequence {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    t.n,
                    t.q_n,
                    num(t.phi_n),
                    num(t.d_n),
                    num(t.value)
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_upsilon(alpha: &str, settings: &Settings) -> Result<u8, Failure> {
    let spec = parse_alpha(alpha)?;
    let v = upsilon::upsilon(&spec, &settings.budget)?;
    let mut out = output::sink(settings.out.as_deref())?;
    print_upsilon(&mut out, &spec, &v)?;
    Ok(0)
}

fn print_phi(out: &mut dyn Write, label: &str, v: &BrjunoValue) -> std::io::Result<()> {
    writeln!(out, "{label:<16}{}", num(v.value))?;
    writeln!(out, "last_index      {}", v.terms_used)?;
    writeln!(out, "tail_bound      {}", num(v.tail_bound))?;
    writeln!(out, "tail_kind       {:?}", v.tail_kind)?;
    writeln!(out, "divergent       {}", v.divergence_suspected)
}

fn cmd_phi(alpha: &str, flavor: PhiFlavor, settings: &Settings) -> Result<u8, Failure> {
    let spec = parse_alpha(alpha)?;
    let (cf, label) = match flavor {
        PhiFlavor::Gauss => (CfFlavor::Gauss, "phi"),
        PhiFlavor::Nearest => (CfFlavor::NearestInteger, "phi_tilde"),
    };
    let b = &settings.budget;
    let v = bj::brjuno_sum(&spec, cf, b.tol, b.precision_bits)?;
    if !v.converged(b.tol) {
        let mut err = std::io::stderr().lock();
        print_phi(&mut err, label, &v)?;
        return Err(Failure::budget(format!(
            "tail bound {:e} above tolerance {:e}",
            v.tail_bound, b.tol
        )));
    }
    let mut out = output::sink(settings.out.as_deref())?;
    print_phi(&mut out, label, &v)?;
    Ok(0)
}

fn cmd_phitrunc(pq: &str) -> Result<u8, Failure> {
    let r = parse_rational(pq)?;
    let (euclid, variant) = bj::phi_trunc_both(&r);
    println!("phi_trunc          {}", num(euclid));
    println!("phi_trunc_variant  {}", num(variant));
    Ok(0)
}

fn cmd_radius(alpha: &str, method: RadiusChoice, settings: &Settings) -> Result<u8, Failure> {
    let spec = parse_alpha(alpha)?;
    let b = &settings.budget;
    let series = linearization::linearize_with(
        &spec,
        b.series_n,
        LinearizeOptions {
            precision: b.precision_bits.max(linearization::DIVISOR_PRECISION),
            ..Default::default()
        },
    )?;
    let method = match method {
        RadiusChoice::Slope => RadiusMethod::SlopeFit,
        RadiusChoice::Hadamard => RadiusMethod::Hadamard,
    };
    let r = conformal_radius(&series, method)?;
    let mut out = output::sink(settings.out.as_deref())?;
    writeln!(out, "radius          {}", num(r.value))?;
    writeln!(out, "log_radius      {}", num(r.value.ln()))?;
    writeln!(out, "hadamard        {}", num(r.hadamard))?;
    writeln!(out, "slope_half      {}", num(r.slope_half))?;
    writeln!(out, "slope_quarter   {}", num(r.slope_quarter))?;
    writeln!(out, "spread          {}", num(r.spread))?;
    writeln!(out, "series_n        {}", r.n_used)?;
    Ok(0)
}

#[derive(Debug, Clone, PartialEq)]
enum GridSpec {
    Farey(u64),
    Surd(usize, Tail),
}

fn parse_grid(text: &str) -> Result<GridSpec, Failure> {
    let bad = || {
        Failure::usage(format!(
            "grid `{text}`: expected farey:<max_q> or surd:<count>[:golden|silver]"
        ))
    };
    let mut parts = text.split(':');
    let kind = parts.next().ok_or_else(bad)?;
    let size = parts.next().ok_or_else(bad)?;
    match kind {
        "farey" if parts.next().is_none() => Ok(GridSpec::Farey(size.parse().map_err(|_| bad())?)),
        "surd" => {
            let count = size.parse().map_err(|_| bad())?;
            let tail = match parts.next() {
                None | Some("golden") => Tail::Golden,
                Some("silver") => Tail::Silver,
                Some(_) => return Err(bad()),
            };
            if parts.next().is_some() {
                return Err(bad());
            }
            Ok(GridSpec::Surd(count, tail))
        }
        _ => Err(bad()),
    }
}

struct Row {
    alpha: AlphaSpec,
    alpha_float: f64,
    value: Result<UpsilonValue, brjuno::Error>,
}

fn cmd_sweep(args: &SweepArgs, settings: &Settings) -> Result<u8, Failure> {
    let file = &settings.file;
    let lo = parse_rational(args.lo.as_deref().or(file.raw("lo")).unwrap_or("0/1"))?;
    let hi = parse_rational(args.hi.as_deref().or(file.raw("hi")).unwrap_or("1/1"))?;
    if lo.as_big() >= hi.as_big() {
        return Err(Failure::usage(format!("empty interval [{lo}, {hi}]")));
    }
    let flavor = match args.flavor {
        Some(f) => f,
        None => match file.raw("flavor") {
            None | Some("phi") => SweepFlavor::Phi,
            Some("phi_tilde") | Some("phi-tilde") => SweepFlavor::PhiTilde,
            Some(other) => return Err(Failure::usage(format!("unknown flavor `{other}`"))),
        },
    };
    let grid_texts: Vec<String> = if !args.grid.is_empty() {
        args.grid.clone()
    } else if let Some(g) = file.raw("grid") {
        g.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        vec!["surd:100".to_string()]
    };
    let mut points = Vec::new();
    for text in &grid_texts {
        match parse_grid(text)? {
            GridSpec::Farey(q) => {
                if flavor == SweepFlavor::PhiTilde {
                    return Err(Failure::usage(
                        "the phi_tilde flavor has no rational formula; use a surd grid",
                    ));
                }
                points.extend(
                    grid::farey(q, &lo, &hi)?
                        .into_iter()
                        .map(AlphaSpec::Rational),
                );
            }
            GridSpec::Surd(count, tail) => points.extend(grid::surd_grid(count, tail, &lo, &hi)?),
        }
    }
    if points.is_empty() {
        return Err(Failure::usage("the grid is empty"));
    }
    let budget = settings.budget;
    let mut rows: Vec<Row> = settings.exec.map(&points, |a| Row {
        alpha: a.clone(),
        alpha_float: a.approx_f64(),
        value: match flavor {
            SweepFlavor::Phi => upsilon::upsilon(a, &budget),
            SweepFlavor::PhiTilde => upsilon::upsilon_tilde(a, &budget),
        },
    });
    rows.sort_by(|a, b| a.alpha_float.total_cmp(&b.alpha_float));

    let mut w = output::csv_writer(settings.out.as_deref())?;
    w.write_record([
        "alpha_text",
        "alpha_float",
        "upsilon",
        "method",
        "error_estimate",
    ])?;
    let mut failed = 0;
    for row in &rows {
        let text = row.alpha.to_string();
        let x = num(row.alpha_float);
        match &row.value {
            Ok(v) => w.write_record([
                text.as_str(),
                &x,
                &num(v.value),
                v.method.as_str(),
                &num(v.error_estimate),
            ])?,
            Err(e) => {
                failed += 1;
                eprintln!("{text}: {e}");
                w.write_record([text.as_str(), &x, "", "failed", ""])?;
            }
        }
    }
    w.flush()?;
    if let Some(svg) = &settings.svg {
        let plot = Plot {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
            points: rows
                .iter()
                .filter_map(|r| r.value.as_ref().ok().map(|v| (r.alpha_float, v.value)))
                .collect(),
        };
        write_file(svg, &plot.render())?;
    }
    Ok(if failed > 0 { EXIT_PARTIAL } else { 0 })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(Failure::io)
}

fn cmd_probe(target: &str, count: Option<usize>, settings: &Settings) -> Result<u8, Failure> {
    let spec = parse_alpha(target)?;
    let count = settings.file.pick(count, "count", 6)?;
    let approach = upsilon::default_approach(&spec, count)?;
    let ks: Vec<u64> = if spec.is_rational() {
        (1..=count as u32).map(|j| 1u64 << j).collect()
    } else {
        (1..=count as u64).collect()
    };
    let result = upsilon::continuity_probe(&spec, &approach, &settings.budget, settings.exec);
    let target_value = result.target?;
    eprintln!(
        "target {spec}: {} ({})",
        num(target_value.value),
        target_value.method
    );
    let mut w = output::csv_writer(settings.out.as_deref())?;
    w.write_record(["k", "alpha_prime", "upsilon", "delta"])?;
    let mut failed = 0;
    for (k, p) in ks.iter().zip(&result.points) {
        let k = k.to_string();
        let alpha = p.alpha.to_string();
        match (&p.upsilon, p.delta) {
            (Ok(v), Some(d)) => w.write_record([k.as_str(), &alpha, &num(v.value), &num(d)])?,
            (res, _) => {
                failed += 1;
                if let Err(e) = res {
                    eprintln!("{alpha}: {e}");
                }
                w.write_record([k.as_str(), &alpha, "", ""])?;
            }
        }
    }
    w.flush()?;
    Ok(if failed > 0 { EXIT_PARTIAL } else { 0 })
}

fn print_cycle(cycle: &CycleSet) {
    println!("i,re,im,abs");
    for (i, p) in cycle.points.iter().enumerate() {
        println!("{i},{},{},{}", num(p.z.re), num(p.z.im), num(p.z.norm()));
    }
}

fn cmd_cycle(pq: &str, eps: f64) -> Result<u8, Failure> {
    let r = parse_rational(pq)?;
    let cycle = dynamics::explosion_cycle(&r, eps)?;
    println!("cycle of {r} at eps = {eps:e}: {} point(s)", cycle.len());
    print_cycle(&cycle);
    if eps != 0.0 {
        let check = dynamics::z_epsilon_check(&r, eps)?;
        println!("n0    {}", check.n0);
        println!("lhs   {}", num(check.lhs));
        println!("rhs   {}", num(check.rhs));
        println!("gap   {}", num(check.gap));
    }
    Ok(0)
}

fn cmd_dn(alpha: &str, n_max: Option<usize>, settings: &Settings) -> Result<u8, Failure> {
    let spec = parse_alpha(alpha)?;
    let n_max = settings.file.pick(n_max, "n-max", settings.budget.n_max)?;
    let seq = upsilon::cremer_sequence(&spec, n_max, settings.budget.q_cap)?;
    let mut w = output::csv_writer(settings.out.as_deref())?;
    w.write_record(["n", "q_n", "d_n", "phi_n", "phi_n_plus_log_d_n"])?;
    for t in &seq.terms {
        w.write_record([
            t.n.to_string(),
            t.q_n.to_string(),
            num(t.d_n),
            num(t.phi_n),
            num(t.value),
        ])?;
    }
    w.flush()?;
    if seq.truncated {
        eprintln!("truncated at q_n <= {}", settings.budget.q_cap);
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("farey:8").unwrap(), GridSpec::Farey(8));
        assert_eq!(
            parse_grid("surd:10").unwrap(),
            GridSpec::Surd(10, Tail::Golden)
        );
        assert_eq!(
            parse_grid("surd:3:silver").unwrap(),
            GridSpec::Surd(3, Tail::Silver)
        );
        for bad in [
            "farey",
            "farey:x",
            "surd:3:bronze",
            "grid:4",
            "farey:3:golden",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
