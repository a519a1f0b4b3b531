use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semiring_forge::characterize::{check_form, construct_box, BoxConstructionSpec, GeneratorPolicy, TheoremForm};
use semiring_forge::exec::Exec;
use semiring_forge::golden;
use semiring_forge::io::{self, SemimoduleJson, SemiringJson};
use semiring_forge::morphism::JoinMorphism;
use semiring_forge::order::Semilattice;
use semiring_forge::pipeline::{self, check_semiring};
use semiring_forge::semimodule::{case_tag, smallest_faithful};
use semiring_forge::semiring::{
    closure_semiring, cyclic_group, monico_sandwich, v_of_group, CaseTag, SandwichSpec, Semiring,
};

/// Largest enumeration size run without `--stretch`.
const DESK_MAX_SIZE: usize = 5;

#[derive(Parser)]
#[command(
    name = "semiring-forge",
    version,
    about = "Finite simple additively idempotent semirings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the axioms of a semiring file and classify it.
    Check {
        file: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List the simple additively idempotent semirings up to a size.
    Enumerate {
        #[arg(long)]
        max_size: usize,
        /// Keep one case: neither, right-not-left, left-not-right, absorbing,
        /// absorbing-star, absorbing-nostar, not-applicable.
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        run: RunArgs,
        /// Write each semiring as a `.sr` file plus `corpus.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Allow sizes above the desk-scale limit.
        #[arg(long)]
        stretch: bool,
    },
    /// Rebuild the worked example tables and compare with the transcription.
    Examples {
        /// Print the rendered tables.
        #[arg(long)]
        print: bool,
    },
    /// Build a semiring from a construction and verify it.
    Construct {
        #[command(subcommand)]
        kind: Construction,
        /// Emit JSON with the realizing morphisms instead of `.sr` text.
        #[arg(long, global = true)]
        json: bool,
        /// Write the result here instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Smallest faithful semimodule, its morphism realization and conditions.
    Embed { file: PathBuf },
    /// Run both conjecture suites over the enumerated corpus.
    Conjectures {
        #[arg(long)]
        max_size: usize,
        /// Largest semimodule enumerated per ring (defaults to the size limit).
        #[arg(long)]
        module_bound: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        /// Directory for `conjecture_counterexamples.json`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Exit with status 1 when a counterexample is found.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        stretch: bool,
    },
    /// List the congruences of a semiring.
    Congruences { file: PathBuf },
}

#[derive(Args, Clone, Copy)]
struct RunArgs {
    /// Worker threads (0 uses every core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Run on one thread without the parallel pool.
    #[arg(long)]
    sequential: bool,
}

impl RunArgs {
    fn exec(self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(Args, Clone)]
#[group(multiple = false)]
struct SemilatticeArgs {
    /// Chain with this many elements.
    #[arg(long)]
    chain: Option<usize>,
    /// Antichain of this many elements below a common top.
    #[arg(long)]
    flat: Option<usize>,
    #[arg(long, value_enum)]
    named: Option<Named>,
    /// A `.sl` file.
    #[arg(long)]
    semilattice: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum Named {
    Vee,
    Diamond,
}

#[derive(Subcommand)]
enum Construction {
    /// Closure of every `e_{a,b}` on a lattice.
    Zum(FormArgs),
    /// Closure of every `f_{a,0}` on a lattice.
    Res1(FormArgs),
    /// Closure of every `k_a`.
    Jm(FormArgs),
    /// Closure of every `f_{a,b}`.
    Jm1(FormArgs),
    /// The product construction on `L ⊠ K` with a free permutation group.
    Box {
        #[command(flatten)]
        l: SemilatticeArgs,
        /// Size of the antichain of `K`.
        #[arg(long)]
        n: usize,
        /// Group generator as a permutation of `0..n`, e.g. "1 0"; repeatable.
        #[arg(long = "perm")]
        perms: Vec<String>,
        /// Use the regular cyclic group of order n.
        #[arg(long)]
        cyclic: bool,
        #[arg(long, value_enum, default_value = "minimal")]
        policy: Policy,
    },
    /// Sandwich semigroup with constant addition.
    Monico {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Rows of P separated by ';', entries by spaces, e.g. "1 0;0 1".
        #[arg(long)]
        p: String,
    },
    /// `V(G)` for a cyclic group or a group table file.
    Vgroup {
        #[arg(long, group = "group")]
        cyclic: Option<usize>,
        /// Group table: size on the first line, then the rows.
        #[arg(long, group = "group")]
        table: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct FormArgs {
    #[command(flatten)]
    l: SemilatticeArgs,
    /// Extra generator given by its images, e.g. "0 1 2"; repeatable.
    #[arg(long = "gen")]
    generators: Vec<String>,
}

#[derive(ValueEnum, Clone, Copy)]
enum Policy {
    Minimal,
    Maximal,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Verification(String),
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_semiring(path: &Path) -> Result<Semiring, Failure> {
    Ok(io::read_semiring(&read(path)?)?)
}

fn parse_indices(s: &str) -> Result<Vec<usize>, Failure> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Failure::Input(format!("not an index: {t:?}")))
        })
        .collect()
}

fn semilattice(a: &SemilatticeArgs) -> Result<Semilattice, Failure> {
    let positive = |k: usize| {
        if k == 0 {
            Err(Failure::Input("size must be positive".into()))
        } else {
            Ok(k)
        }
    };
    if let Some(k) = a.chain {
        return Ok(Semilattice::chain(positive(k)?));
    }
    if let Some(k) = a.flat {
        return Ok(Semilattice::flat(k));
    }
    if let Some(n) = a.named {
        return Ok(match n {
            Named::Vee => Semilattice::vee(),
            Named::Diamond => Semilattice::diamond(),
        });
    }
    if let Some(p) = &a.semilattice {
        return Ok(io::parse_semilattice(&read(p)?)?);
    }
    Err(Failure::Input(
        "choose a semilattice with --chain, --flat, --named or --semilattice".into(),
    ))
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Input(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_check(file: &Path, json: bool) -> CmdResult {
    let (n, add, mul) = io::read_tables(&read(file)?)?;
    let r = Semiring::from_tables_unchecked(n, add, mul);
    let report = check_semiring(&r);
    if json {
        print!("{}", to_json(&report));
    } else {
        println!("size: {}", report.size);
        println!("axioms: {}", if report.axioms_ok { "ok" } else { "violated" });
        for v in &report.axiom_violations {
            println!("  {v}");
        }
        if let Some(s) = &report.structure {
            println!("additively idempotent: {}", s.additively_idempotent);
            println!("simple: {}", s.simple);
            println!("greatest left absorbing: {}", s.greatest_left_absorbing);
            println!("greatest right absorbing: {}", s.greatest_right_absorbing);
            println!("zero: {}", opt(s.zero));
            println!("additive neutral: {}", opt(s.additive_neutral));
            println!("multiplicative neutral: {}", opt(s.multiplicative_neutral));
        }
        if let Some(c) = report.case {
            println!("case: {c}");
        }
        if let Some(v) = &report.verdict {
            println!("round trip: {}", v.verdict);
            for w in &v.witnesses {
                println!("  {w}");
            }
        }
        if let Some(note) = &report.note {
            println!("note: {note}");
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification("check failed".into()))
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn check_size(max_size: usize, stretch: bool) -> CmdResult {
    if max_size == 0 {
        return Err(Failure::Input("--max-size must be at least 1".into()));
    }
    if max_size > DESK_MAX_SIZE && !stretch {
        return Err(Failure::Input(format!("sizes above {DESK_MAX_SIZE} need --stretch")));
    }
    Ok(())
}

fn cmd_enumerate(max_size: usize, case: Option<&str>, run: RunArgs, out: Option<&Path>, stretch: bool) -> CmdResult {
    check_size(max_size, stretch)?;
    let case = case
        .map(|c| CaseTag::parse(c).ok_or_else(|| Failure::Input(format!("unknown case {c:?}"))))
        .transpose()?;
    let mut opts = semiring_forge::enumerate::EnumerationOptions::simple(max_size);
    opts.case = case;
    opts.exec = run.exec();
    opts.jobs = run.jobs;
    let found = semiring_forge::enumerate::enumerate(&opts)?;
    let mut text = String::new();
    let mut index = Vec::new();
    for (i, e) in found.iter().enumerate() {
        let sr = io::write_semiring(&e.semiring);
        text.push_str(&format!("# {} size {} case {}\n{sr}", i + 1, e.semiring.size(), e.case));
        let name = format!("{:03}-size{}.sr", i + 1, e.semiring.size());
        index.push(serde_json::json!({"file": name, "size": e.semiring.size(), "case": e.case.as_str()}));
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(&name), sr)?;
        }
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("corpus.json"), to_json(&index))?;
    }
    text.push_str(&format!("total {}\n", found.len()));
    print!("{text}");
    Ok(())
}

fn cmd_examples(print_tables: bool) -> CmdResult {
    let rendered = golden::render()?;
    if print_tables {
        print!("{rendered}");
    }
    match golden::compare(golden::EXPECTED, &rendered) {
        Ok(()) => {
            eprintln!("examples: all tables match");
            Ok(())
        }
        Err(e) => Err(Failure::Verification(format!("examples: {e}"))),
    }
}

fn generators(form: TheoremForm, a: &FormArgs, l: &Semilattice) -> Result<Vec<JoinMorphism>, Failure> {
    let mut gens = form.generators(l)?;
    for g in &a.generators {
        gens.push(JoinMorphism::new(l, parse_indices(g)?)?);
    }
    Ok(gens)
}

fn construct_form(form: TheoremForm, a: &FormArgs, json: bool, out: Option<&Path>) -> CmdResult {
    let l = semilattice(&a.l)?;
    let ms = closure_semiring(&l, &generators(form, a, &l)?, None)?;
    let check = check_form(&l, &ms.morphisms, form)?;
    let structure = ms.semiring.structure();
    let expected_case = match form.case() {
        CaseTag::AbsorbingStar => CaseTag::Absorbing,
        c => c,
    };
    let case_ok = ms.size() <= 2 || structure.case == expected_case;
    eprintln!("size: {}", ms.size());
    eprintln!("form conditions: {}", if check.passed() { "hold" } else { "fail" });
    if !check.passed() {
        eprintln!("  failed conditions: {:?}", check.conditions.failed());
        eprintln!("  missing generators: {:?}", check.missing_generators);
        eprintln!("  semilattice requirements met: {}", check.semilattice_ok);
        eprintln!("  maps in {:?}: {}", form.class(), check.class_ok);
    }
    eprintln!("simple: {}", structure.simple);
    eprintln!("case: {}", structure.case);
    emit(&render_semiring(&ms.semiring, Some(&ms), json), out)?;
    if check.passed() && structure.simple && case_ok {
        Ok(())
    } else {
        Err(Failure::Verification("construction did not verify".into()))
    }
}

fn render_semiring(r: &Semiring, ms: Option<&semiring_forge::semiring::MorphismSemiring>, json: bool) -> String {
    if !json {
        return io::write_semiring(r);
    }
    let j = match ms {
        Some(ms) => SemiringJson::from_realized(ms),
        None => SemiringJson::from_semiring(r),
    };
    to_json(&j)
}

fn group_closure(n: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut set: std::collections::BTreeSet<Vec<usize>> = gens.iter().cloned().collect();
    set.insert((0..n).collect());
    loop {
        let cur: Vec<Vec<usize>> = set.iter().cloned().collect();
        let before = set.len();
        for a in &cur {
            for b in &cur {
                set.insert((0..n).map(|x| a[b[x]]).collect());
            }
        }
        if set.len() == before {
            return set.into_iter().collect();
        }
    }
}

fn cmd_construct(kind: &Construction, json: bool, out: Option<&Path>) -> CmdResult {
    match kind {
        Construction::Zum(a) => construct_form(TheoremForm::Zum, a, json, out),
        Construction::Res1(a) => construct_form(TheoremForm::Res1, a, json, out),
        Construction::Jm(a) => construct_form(TheoremForm::Jm, a, json, out),
        Construction::Jm1(a) => construct_form(TheoremForm::Jm1, a, json, out),
        Construction::Box {
            l,
            n,
            perms,
            cyclic,
            policy,
        } => {
            let l = semilattice(l)?;
            let mut gens = perms.iter().map(|p| parse_indices(p)).collect::<Result<Vec<_>, _>>()?;
            if gens.iter().any(|g| g.len() != *n || g.iter().any(|&x| x >= *n)) {
                return Err(Failure::Input(format!("every --perm needs {n} entries below {n}")));
            }
            if *cyclic && *n > 0 {
                gens.push((0..*n).map(|x| (x + 1) % n).collect());
            }
            let spec = BoxConstructionSpec {
                l,
                n: *n,
                group: group_closure(*n, &gens),
                policy: match policy {
                    Policy::Minimal => GeneratorPolicy::Minimal,
                    Policy::Maximal => GeneratorPolicy::Maximal,
                },
            };
            let b = construct_box(&spec)?;
            eprintln!("size: {}", b.semiring.size());
            eprintln!("conditions (a) (b) (c): {:?}", b.conditions_abc);
            eprintln!("simple: {}", b.simple);
            eprintln!("additively idempotent: {}", b.additively_idempotent);
            eprintln!("absorbing greatest element: {}", b.absorbing_greatest);
            eprintln!(
                "irreducible without (*): {}",
                b.irreducible_without_star
                    .map_or("not checked (|S| != n, or n = 1 with (*))".to_string(), |v| v
                        .to_string())
            );
            emit(&render_semiring(&b.semiring.semiring, Some(&b.semiring), json), out)?;
            if b.verified() {
                Ok(())
            } else {
                Err(Failure::Verification("construction did not verify".into()))
            }
        }
        Construction::Monico { m, n, p } => {
            let rows = p
                .split(';')
                .map(|row| {
                    row.split_whitespace()
                        .map(|t| {
                            t.parse::<u8>()
                                .map_err(|_| Failure::Input(format!("not 0 or 1: {t:?}")))
                        })
                        .collect::<Result<Vec<u8>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let r = monico_sandwich(&SandwichSpec { m: *m, n: *n, p: rows })?;
            eprintln!("size: {}", r.size());
            eprintln!("simple: {}", r.is_simple());
            emit(&render_semiring(&r, None, json), out)
        }
        Construction::Vgroup { cyclic, table } => {
            let (k, t) = match (cyclic, table) {
                (Some(k), _) => (*k, cyclic_group(*k)),
                (None, Some(p)) => {
                    let text = read(p)?;
                    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
                    let k: usize = lines
                        .next()
                        .and_then(|l| l.trim().parse().ok())
                        .ok_or_else(|| Failure::Input("group table needs its size first".into()))?;
                    let mut t = Vec::new();
                    for l in lines {
                        t.extend(parse_indices(l)?);
                    }
                    (k, t)
                }
                (None, None) => return Err(Failure::Input("give --cyclic K or --table FILE".into())),
            };
            let r = v_of_group(k, &t)?;
            eprintln!("size: {}", r.size());
            eprintln!("simple: {}", r.is_simple());
            emit(&render_semiring(&r, None, json), out)
        }
    }
}

fn cmd_embed(file: &Path) -> CmdResult {
    let r = read_semiring(file)?;
    let m = smallest_faithful(&r).map_err(|e| Failure::Verification(e.to_string()))?;
    let case = case_tag(&r).map_err(|e| Failure::Verification(e.to_string()))?;
    let emb = m.embedding_t()?;
    let conditions = match TheoremForm::for_case(case) {
        Some(form) => Some(check_form(&emb.semilattice, &emb.maps, form)?.conditions),
        None => None,
    };
    let value = serde_json::json!({
        "case": case.as_str(),
        "semimodule": SemimoduleJson::from_semimodule(&m)?,
        "morphisms": emb.maps.iter().map(|f| f.image().to_vec()).collect::<Vec<_>>(),
        "injective": emb.injective,
        "conditions": conditions.map(|c| c.outcomes),
    });
    print!("{}", to_json(&value));
    Ok(())
}

fn cmd_conjectures(
    max_size: usize,
    module_bound: Option<usize>,
    run: RunArgs,
    out: &Path,
    strict: bool,
    stretch: bool,
) -> CmdResult {
    check_size(max_size, stretch)?;
    if max_size < 3 {
        return Err(Failure::Input("--max-size must be at least 3".into()));
    }
    let bound = module_bound.unwrap_or(DESK_MAX_SIZE.min(max_size));
    let report = pipeline::run_conjectures(max_size, bound, run.exec(), run.jobs)?;
    fs::create_dir_all(out)?;
    let path = out.join("conjecture_counterexamples.json");
    fs::write(&path, to_json(&report.counterexamples))?;
    println!("rings checked: {}", report.rings_checked);
    println!(
        "semimodules checked (up to {} elements): {}",
        report.module_bound, report.modules_checked
    );
    println!("absorbing rings without (*) checked: {}", report.nostar_checked);
    for name in [pipeline::IRREDUCIBILITY_CONJECTURE, pipeline::BOX_CONJECTURE] {
        let k = report.counterexamples.iter().filter(|c| c.conjecture == name).count();
        println!("counterexamples to \"{name}\": {k}");
    }
    println!("findings written to {}", path.display());
    if strict && !report.counterexamples.is_empty() {
        return Err(Failure::Verification("counterexamples found".into()));
    }
    Ok(())
}

fn cmd_congruences(file: &Path) -> CmdResult {
    let r = read_semiring(file)?;
    let all = r.all_congruences();
    println!("congruences: {}", all.len());
    for p in &all {
        let labels: Vec<String> = (0..r.size()).map(|x| p.block_of(x).to_string()).collect();
        println!("{}", labels.join(" "));
    }
    println!("simple: {}", r.is_simple());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file, json } => cmd_check(file, *json),
        Command::Enumerate {
            max_size,
            case,
            run,
            out,
            stretch,
        } => cmd_enumerate(*max_size, case.as_deref(), *run, out.as_deref(), *stretch),
        Command::Examples { print } => cmd_examples(*print),
        Command::Construct { kind, json, out } => cmd_construct(kind, *json, out.as_deref()),
        Command::Embed { file } => cmd_embed(file),
        Command::Conjectures {
            max_size,
            module_bound,
            run,
            out,
            strict,
            stretch,
        } => cmd_conjectures(*max_size, *module_bound, *run, out, *strict, *stretch),
        Command::Congruences { file } => cmd_congruences(file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
