use std::time::Instant;

use anyhow::{Context, Result};
use log::info;
use serde_json::json;
use spherefft_core::norms::error_table_csv;
use spherefft_core::{
    builtin, convergence_table, integrate, rate_table, read_samples, sample, verify_range,
    write_samples, InterpolantBuilder, InterpolantCoefficients, NormQuadrature, SampleFormat,
    SphericalSamples,
};

use crate::output::emit;
use crate::{
    BenchArgs, ConvergenceArgs, CubatureArgs, Failed, Format, HypothesisArgs, InterpolateArgs,
    Source,
};

fn load_samples(source: &Source, n: Option<usize>, strict_poles: bool) -> Result<SphericalSamples> {
    if let Some(name) = &source.function {
        let n = n.ok_or_else(|| Failed("--N is required with --fn".into()))?;
        return Ok(sample(&builtin(name)?, n)?);
    }
    let path = source.input.as_ref().expect("clap enforces one source");
    if n.is_some() {
        return Err(
            Failed("--N applies to --fn only; a sample file fixes its own order".into()).into(),
        );
    }
    read_samples(path, strict_poles).with_context(|| format!("reading {}", path.display()))
}

fn pretty_json<T: serde::Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn interpolate(args: &InterpolateArgs) -> Result<()> {
    let samples = load_samples(&args.source, args.n, args.strict_poles)?;
    let coeffs = InterpolantCoefficients::build(&samples)?;
    info!(
        "N={}, pole defect {:.2e}",
        coeffs.order(),
        coeffs.pole_defect()
    );
    emit(args.out.as_deref(), &(coeffs.to_json() + "\n"))?;
    if let (Some(m), Some(path)) = (args.refine, &args.grid_out) {
        let grid = coeffs.evaluate_grid(m)?;
        write_samples(&grid, path, SampleFormat::from_path(path))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn convergence(args: &ConvergenceArgs) -> Result<()> {
    let f = builtin(&args.function)?;
    let quad = NormQuadrature::new(args.n_theta, args.n_phi)?;
    let rows = convergence_table(&f, &args.ns, &quad, !args.h0_only)?;
    let text = match args.format {
        Format::Csv => error_table_csv(&rows),
        Format::Json => pretty_json(&rows)?,
    };
    emit(args.out.as_deref(), &text)
}

pub fn cubature(args: &CubatureArgs) -> Result<()> {
    if let Some(name) = &args.source.function {
        if args.ns.is_empty() {
            return Err(Failed("--N is required with --fn".into()).into());
        }
        let table = rate_table(&builtin(name)?, &args.ns, &args.kappa)?;
        info!("reference order {}", table.n_ref);
        let text = match args.format {
            Format::Csv => table.to_csv(),
            Format::Json => pretty_json(&table)?,
        };
        return emit(args.out.as_deref(), &text);
    }

    let n = (!args.ns.is_empty()).then(|| args.ns[0]);
    let samples = load_samples(&args.source, n, args.strict_poles)?;
    let results = args
        .kappa
        .iter()
        .map(|&k| integrate(&samples, k))
        .collect::<spherefft_core::Result<Vec<_>>>()?;
    let text = match args.format {
        Format::Csv => {
            let mut out = String::from("N,kappa,re,im\n");
            for r in &results {
                out.push_str(&format!(
                    "{},{:e},{:.16e},{:.16e}\n",
                    r.n, r.kappa, r.value.re, r.value.im
                ));
            }
            out
        }
        Format::Json => pretty_json(&results)?,
    };
    emit(args.out.as_deref(), &text)
}

pub fn verify_hypothesis(args: &HypothesisArgs) -> Result<()> {
    let report = verify_range(args.n_max, &args.alpha)?;
    let text = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json() + "\n",
    };
    emit(args.out.as_deref(), &text)?;
    match report.first_failure() {
        Some(r) => Err(Failed(format!(
            "c_H(N={}, alpha={}) = {} is not below 1",
            r.n, r.alpha, r.c_h
        ))
        .into()),
        None => {
            info!("{} rows, all below 1", report.rows.len());
            Ok(())
        }
    }
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    if args.reps == 0 {
        return Err(Failed("--reps must be at least 1".into()).into());
    }
    let f = args.function.as_deref().map(builtin).transpose()?;
    let mut cases = Vec::with_capacity(args.ns.len());
    for &n in &args.ns {
        let samples = match &f {
            Some(f) => sample(f, n)?,
            None => SphericalSamples::random(n, args.seed)?,
        };
        let mut builder = InterpolantBuilder::new(n)?;
        let out = builder.build(&samples)?;
        cases.push((samples, builder, out, Vec::with_capacity(args.reps)));
    }

    // Orders are timed round-robin so that drifting load and cache state
    // affect all of them alike.
    for round in 0..args.warmup + args.reps {
        for (samples, builder, out, times) in cases.iter_mut() {
            let start = Instant::now();
            builder.build_into(std::hint::black_box(samples), out)?;
            std::hint::black_box(&out);
            if round >= args.warmup {
                times.push(start.elapsed().as_secs_f64());
            }
        }
    }

    let medians: Vec<(usize, f64)> = args
        .ns
        .iter()
        .zip(cases)
        .map(|(&n, (_, _, _, mut times))| {
            times.sort_by(f64::total_cmp);
            (n, times[times.len() / 2])
        })
        .collect();
    let text = match args.format {
        Format::Csv => {
            let mut out = String::from("N,build_seconds\n");
            for (n, t) in &medians {
                out.push_str(&format!("{n},{t:.6e}\n"));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = medians
                .iter()
                .map(|(n, t)| json!({ "N": n, "build_seconds": t }))
                .collect();
            pretty_json(&rows)?
        }
    };
    emit(args.out.as_deref(), &text)
}
