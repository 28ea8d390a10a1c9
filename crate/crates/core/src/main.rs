use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use grasp_equilibrium::arrangement::{enumerate_cells, slip_states_from_cells, EnumerationOptions};
use grasp_equilibrium::baselines::{brute_force_verdict, gws_l1, gws_slice, linear_compliance_verdict};
use grasp_equilibrium::io::{
    force_entries, parse_grasp_file, parse_wrench, Counts, GraspFile, GraspFileError, LoadedGrasp,
    Mode, ResultDocument,
};
use grasp_equilibrium::random::{seeded_grasp, RandomGraspOptions};
use grasp_equilibrium::stability::StabilityAnalyzer;
use grasp_equilibrium::{Verdict, Wrench};

#[derive(Parser)]
#[command(name = "grasp-eq", version, about = "Passive stability of planar frictional grasps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ModeFlags {
    /// Never let contacts detach
    #[arg(long)]
    no_detach: bool,
    /// Apply the normal spring law to every contact, including ones pulled
    /// away from the object (implies --no-detach)
    #[arg(long)]
    strict_eq4: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide stability under one wrench
    Check {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        wrench: String,
        #[command(flatten)]
        flags: ModeFlags,
    },
    /// Maximum resistible force per direction, as CSV
    Region {
        file: PathBuf,
        #[arg(long, default_value_t = 36)]
        directions: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 1e3)]
        cap: f64,
        #[command(flatten)]
        flags: ModeFlags,
    },
    /// Count slip states
    Enumerate {
        file: PathBuf,
        #[command(flatten)]
        flags: ModeFlags,
    },
    /// L1 grasp wrench space and one torque slice
    Gws {
        file: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        slice: f64,
    },
    /// Stability by trying every contact labeling
    Oracle {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        wrench: String,
        #[command(flatten)]
        flags: ModeFlags,
    },
    /// Stability under a purely linear contact compliance
    Linear {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        wrench: String,
        #[arg(long, default_value_t = 1.0)]
        tangent_stiffness: f64,
    },
    /// Write a random grasp file
    Gen {
        #[arg(long)]
        contacts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add a random self-balancing preload
        #[arg(long)]
        preload: bool,
        /// Enable detachment in the written file
        #[arg(long)]
        detachment: bool,
    },
}

enum Failure {
    Parse(String),
    Validation(String),
    Other(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Validation(m) | Failure::Other(m) => m,
        }
    }
}

fn load(path: &Path) -> Result<LoadedGrasp, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Other(format!("cannot read {}: {e}", path.display())))?;
    parse_grasp_file(&text).map_err(|e| match e {
        GraspFileError::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        GraspFileError::Validation(v) => Failure::Validation(format!("{}: {v}", path.display())),
    })
}

fn wrench(text: &str) -> Result<Wrench, Failure> {
    parse_wrench(text).map_err(Failure::Parse)
}

fn options(grasp: &LoadedGrasp, flags: ModeFlags) -> EnumerationOptions {
    EnumerationOptions {
        detachment: grasp.options.detachment && !flags.no_detach && !flags.strict_eq4,
    }
}

fn mode(method: &str, opts: EnumerationOptions, flags: ModeFlags) -> Mode {
    Mode {
        method: method.to_string(),
        detachment: opts.detachment,
        strict_eq4: flags.strict_eq4,
        solve: None,
    }
}

fn other<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Other(e.to_string())
}

fn verdict_document(
    command: &str,
    grasp: &LoadedGrasp,
    w: &Wrench,
    verdict: &Verdict,
    mode: Mode,
) -> ResultDocument {
    let mut doc = ResultDocument::new(command, &grasp.name, mode);
    doc.wrench = Some([w.fx, w.fy, w.torque]);
    doc.stable = Some(verdict.stable);
    if let Some(sol) = &verdict.witness {
        doc.set_solution(&grasp.model, w, sol);
    }
    doc
}

fn run(cli: Cli) -> Result<String, Failure> {
    let start = Instant::now();
    let mut doc = match cli.command {
        Command::Check { file, wrench: text, flags } => {
            let grasp = load(&file)?;
            let w = wrench(&text)?;
            let opts = options(&grasp, flags);
            let analyzer = StabilityAnalyzer::new(grasp.model.clone(), opts).map_err(other)?;
            let verdict = analyzer.check(&w).map_err(other)?;
            let mut doc = verdict_document("check", &grasp, &w, &verdict, mode("enumeration", opts, flags));
            doc.counts = Counts {
                states: Some(analyzer.states().len()),
                states_tried: Some(verdict.states_tried),
                cells: Some(analyzer.states().counts),
                dual: None,
            };
            doc
        }
        Command::Oracle { file, wrench: text, flags } => {
            let grasp = load(&file)?;
            let w = wrench(&text)?;
            let opts = options(&grasp, flags);
            let verdict = brute_force_verdict(&grasp.model, &w, opts.detachment).map_err(other)?;
            let mut doc = verdict_document("oracle", &grasp, &w, &verdict, mode("brute-force", opts, flags));
            doc.counts.states_tried = Some(verdict.states_tried);
            doc
        }
        Command::Linear { file, wrench: text, tangent_stiffness } => {
            let grasp = load(&file)?;
            let w = wrench(&text)?;
            let kt = vec![tangent_stiffness; grasp.model.len()];
            let v = linear_compliance_verdict(&grasp.model, &w, &kt).map_err(other)?;
            let flags = ModeFlags { no_detach: true, strict_eq4: false };
            let mut doc = ResultDocument::new(
                "linear",
                &grasp.name,
                mode("linear-compliance", EnumerationOptions { detachment: false }, flags),
            );
            doc.wrench = Some([w.fx, w.fy, w.torque]);
            doc.stable = Some(v.stable);
            if let Some(d) = v.d {
                doc.motion = Some([d.x, d.y, d.z]);
                doc.forces = Some(force_entries(&grasp.model, &v.forces));
            }
            doc.data = Some(json!({
                "tangent_stiffness": tangent_stiffness,
                "cone_violation": v.cone_violation,
                "min_normal": v.min_normal,
            }));
            doc
        }
        Command::Enumerate { file, flags } => {
            let grasp = load(&file)?;
            let opts = options(&grasp, flags);
            let cells = enumerate_cells(&grasp.model, opts).map_err(other)?;
            let set = slip_states_from_cells(&cells, grasp.model.len(), opts.detachment);
            let mut doc = ResultDocument::new("enumerate", &grasp.name, mode("enumeration", opts, flags));
            doc.counts = Counts {
                states: Some(set.cell_count()),
                states_tried: None,
                cells: Some(set.counts),
                dual: Some([cells.dual.vertices.len(), cells.dual.edges.len(), cells.dual.faces.len()]),
            };
            doc.data = Some(json!({
                "distinct_labelings": set.len(),
                "euler_characteristic": cells.dual.euler_characteristic(),
            }));
            doc
        }
        Command::Gws { file, slice } => {
            let grasp = load(&file)?;
            let poly = gws_l1(&grasp.model);
            let cut = gws_slice(&poly, slice).map_err(other)?;
            let flags = ModeFlags { no_detach: false, strict_eq4: false };
            let mut doc = ResultDocument::new(
                "gws",
                &grasp.name,
                mode("l1-gws", EnumerationOptions::default(), flags),
            );
            let origin_margin = if cut.degenerate { None } else { Some(cut.inradius_at(&Default::default())) };
            doc.data = Some(json!({
                "dimension": poly.dimension,
                "vertices": poly.vertices.iter().map(|v| [v.x, v.y, v.z]).collect::<Vec<_>>(),
                "facets": poly.facets.len(),
                "slice": {
                    "tau": cut.tau,
                    "polygon": cut.vertices.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
                    "degenerate": cut.degenerate,
                    "area": cut.area(),
                    "origin_margin": origin_margin,
                },
            }));
            doc
        }
        Command::Region { file, directions, tol, cap, flags } => {
            let grasp = load(&file)?;
            let opts = options(&grasp, flags);
            let analyzer = StabilityAnalyzer::new(grasp.model, opts).map_err(other)?;
            let sweep = analyzer.resistible_region(directions, tol, cap).map_err(other)?;
            for r in sweep.rows.iter().filter(|r| r.non_monotone) {
                eprintln!(
                    "warning: stability is not monotone along ({}, {})",
                    r.direction[0], r.direction[1]
                );
            }
            return Ok(sweep.to_csv());
        }
        Command::Gen { contacts, seed, preload, detachment } => {
            if contacts == 0 {
                return Err(Failure::Other("--contacts must be at least 1".into()));
            }
            let opts = RandomGraspOptions::new(contacts).with_preload(preload);
            let model = seeded_grasp(seed, &opts);
            let name = format!("random_m{contacts}_s{seed}");
            return Ok(GraspFile::from_model(&name, &model, detachment).to_toml());
        }
    };
    doc.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(doc.to_json() + "\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
