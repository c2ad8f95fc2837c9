use cartanpts::pipeline::{run_pipeline, RunConfig};
use clap::Parser;

/// Enumerate the integral points of the modular curve attached to the
/// normalizer of a non-split Cartan subgroup at prime level.
#[derive(Parser, Debug)]
#[command(name = "cartanpts", version)]
struct Args {
    /// Prime level (>= 7)
    #[arg(long)]
    p: u64,

    /// Galois subgroup H of F_p^*: "pm1" or a generator (joined with -1)
    #[arg(long, default_value = "pm1")]
    subgroup: String,

    /// Working precision in bits
    #[arg(long, default_value_t = 256)]
    bits: u32,

    /// Target for the slow-phase truncation error
    #[arg(long, default_value_t = 1e-10)]
    epsilon: f64,

    /// Initial T of the reduction step
    #[arg(long, default_value_t = 10.0)]
    t0: f64,

    /// Prime budget of the small-j trace filter
    #[arg(long, default_value_t = 500)]
    ell_budget: u64,

    /// Exponent lattice denominator (1 unless the unit index exceeds 1)
    #[arg(long, default_value_t = 1)]
    index: u32,

    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Checkpoint file for the slow phase
    #[arg(long)]
    checkpoint: Option<String>,

    /// Where to write the JSON report
    #[arg(long)]
    report: Option<String>,

    /// Unit-basis override file
    #[arg(long)]
    unit_basis: Option<String>,

    /// Run the identity validation suite and exit
    #[arg(long, default_value_t = false)]
    validate_only: bool,
}

fn main() {
    let args = Args::parse();
    let config = RunConfig {
        p: args.p,
        subgroup: args.subgroup,
        precision_bits: args.bits,
        nu_epsilon_target: args.epsilon,
        t0: args.t0,
        ell_budget: args.ell_budget,
        exponent_denominator: args.index,
        workers: args.workers,
        checkpoint_path: args.checkpoint,
        report_path: args.report.clone(),
        unit_basis_path: args.unit_basis,
        validate_only: args.validate_only,
    };
    match run_pipeline(&config) {
        Ok(report) => {
            if let Some(path) = &args.report {
                if let Err(e) = report.write_to(path) {
                    eprintln!("error: cannot write report: {e}");
                    std::process::exit(1);
                }
                eprintln!("report written to {path}");
            } else {
                println!("{}", report.to_json().unwrap());
            }
            eprintln!(
                "p = {}: {} integral point(s); {} candidate(s); small-j undetermined: {}",
                config.p,
                report.integral_points.len(),
                report.candidates.len(),
                report.small_j.undetermined.len()
            );
            for ip in &report.integral_points {
                eprintln!("  j = {} ({:?})", ip.j, ip.classification);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
