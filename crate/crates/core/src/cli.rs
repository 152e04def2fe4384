// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Exit codes: 0 success, 1 validation or
//! verification failure (reason on stderr), 2 usage error.

use std::fmt::Display;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use uuid::Uuid;

use crate::costmodel::{
    bench_signatures, cost_report, manifest_total, render_bench, render_cost_report, render_key_sizes, render_relative_costs,
    reproduce_relative_costs, transfer_cost, transfer_time, BenchConfig, Board, Format, HashChoice, PaperConstants, Table,
    UpdateCategory, DATASET_SHA256,
};
use crate::hashes::{bench_hash, digest, digest_reader, DigestAlg};
use crate::lms::{FileStore, HssParams};
use crate::manifest::{hex_dump, sign_envelope, verify_envelope_as, Manifest, SignedEnvelope, MANIFEST_VERSION};
use crate::sigsuite::{self, descriptor, keygen_with, KeyFile, KeygenOptions, PrivateKey, PrivateRef, SchemeId};
use crate::workflow::{
    attack_suite, fetch_and_update, serve, DeviceState, HttpSource, PackageSource, PublishMeta, RejectReason,
    Repository, TrustAnchor, UpdateOutcome,
};

pub const REPO_ENV: &str = "SUITPQ_REPO";

#[derive(Parser, Debug)]
#[command(name = "suitpq", version, about = "Signed firmware update manifests with classical and post-quantum signatures")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Fixed seed for key generation (64 hex digits, or any text, which is hashed).
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key pair: <out> (private), <out>.pub, and <out>.state for hss-lms.
    Keygen(KeygenArgs),
    /// Sign a manifest for an image and write the envelope.
    Sign(SignArgs),
    /// Verify an envelope, and optionally the image it describes.
    Verify(VerifyArgs),
    /// Sign an image and store it in the update repository.
    Publish(PublishArgs),
    /// Serve the repository over HTTP.
    Serve(ServeArgs),
    /// Commission a simulated device.
    DeviceInit(DeviceInitArgs),
    /// Fetch, verify and install an update on a simulated device.
    DeviceUpdate(DeviceUpdateArgs),
    /// Run tamper, replay, class-mismatch and forged-signature attacks.
    AttackSim(AttackArgs),
    /// Manifest size, transfer, flash and stack overhead per scheme.
    CostReport(CostArgs),
    /// Host sign/verify timings next to recorded MCU figures.
    Bench(BenchArgs),
    /// Digest a file, text or stdin.
    Hash(HashArgs),
}

#[derive(Args, Debug)]
struct KeygenArgs {
    #[arg(long)]
    scheme: SchemeId,
    #[arg(long)]
    out: PathBuf,
    /// hss-lms parameters, `L=2,h=5,w=4` or `h5w4/h5w8`.
    #[arg(long, default_value = "L=2,h=5,w=4")]
    hss_params: HssParams,
    /// Replace existing files.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct ManifestFields {
    #[arg(long)]
    seq: u64,
    #[arg(long)]
    vendor: Uuid,
    #[arg(long)]
    class: Uuid,
    #[arg(long, default_value_t = 0)]
    slot: u8,
    #[arg(long)]
    uri: Option<String>,
    #[arg(long, default_value = "sha3-256")]
    digest: DigestAlg,
}

#[derive(Args, Debug)]
struct SignArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to `<in>.suit`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    fields: ManifestFields,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Public or private key file.
    #[arg(long)]
    key: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    image: Option<PathBuf>,
    /// Also print a hex dump of the envelope.
    #[arg(long)]
    dump: bool,
}

#[derive(Args, Debug)]
struct RepoArg {
    /// Repository directory.
    #[arg(long, env = REPO_ENV)]
    repo: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PublishArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    name: String,
    #[command(flatten)]
    fields: ManifestFields,
    #[command(flatten)]
    repo: RepoArg,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[command(flatten)]
    repo: RepoArg,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: String,
}

#[derive(Args, Debug)]
struct DeviceInitArgs {
    #[arg(long)]
    device: PathBuf,
    /// Trusted public key file.
    #[arg(long)]
    key: PathBuf,
    #[arg(long)]
    vendor: Uuid,
    #[arg(long)]
    class: Uuid,
    /// Factory image for slot 0.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct SourceArgs {
    #[arg(long)]
    name: String,
    /// Repository service base URL; takes precedence over --repo.
    #[arg(long)]
    url: Option<String>,
    #[command(flatten)]
    repo: RepoArg,
}

#[derive(Args, Debug)]
struct DeviceUpdateArgs {
    #[arg(long)]
    device: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
    /// Verify only; leave the device file unchanged.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[arg(long)]
    device: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args, Debug)]
struct CostArgs {
    /// Regenerate the key-size table and the relative cost table from the
    /// embedded dataset, with tolerance verdicts.
    #[arg(long)]
    paper: bool,
    #[arg(long)]
    csv: bool,
    /// SHA3-256 build used by the post-quantum rows.
    #[arg(long, default_value = "sha3-256-fast")]
    hash: HashChoice,
    /// Also show transfer cost for one update category.
    #[arg(long)]
    category: Option<UpdateCategory>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Schemes to time; defaults to every scheme with a backend.
    #[arg(long = "scheme")]
    schemes: Vec<SchemeId>,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 32)]
    msg_bytes: usize,
    #[arg(long, default_value = "nrf52840")]
    board: Board,
    #[arg(long, default_value_t = 64.0)]
    tick_mhz: f64,
    #[arg(long, default_value = "L=2,h=5,w=4")]
    hss_params: HssParams,
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct HashArgs {
    #[arg(long, default_value = "sha3-256")]
    alg: DigestAlg,
    #[arg(long = "in", conflicts_with = "text")]
    input: Option<PathBuf>,
    text: Option<String>,
    /// Time the digest over a few input sizes instead.
    #[arg(long)]
    bench: bool,
}

enum CliError {
    Usage(String),
    Failed(String),
    Rejected(RejectReason),
}

type CliResult = Result<(), CliError>;

fn failed(e: impl Display) -> CliError {
    CliError::Failed(e.to_string())
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    json: bool,
    seed: Option<[u8; 32]>,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl Display) -> CliResult {
        writeln!(self.out, "{s}").map_err(failed)
    }

    fn emit_json(&mut self, v: &serde_json::Value) -> CliResult {
        self.line(serde_json::to_string_pretty(v).expect("json value serializes"))
    }

    fn table(&mut self, t: &Table, csv: bool) -> CliResult {
        let body = t.render(if csv { Format::Csv } else { Format::Text });
        write!(self.out, "{body}").map_err(failed)
    }
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let mut ctx = Ctx {
        out,
        json: cli.json,
        seed: cli.seed.as_deref().map(parse_seed),
    };
    let result = dispatch(&mut ctx, cli.command);
    let _ = ctx.out.flush();
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(CliError::Failed(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(CliError::Rejected(r)) => {
            let _ = writeln!(err, "rejected: {r}");
            1
        }
    }
}

fn parse_seed(s: &str) -> [u8; 32] {
    let mut seed = [0u8; 32];
    if s.len() == 64 && hex::decode_to_slice(s, &mut seed).is_ok() {
        return seed;
    }
    digest(DigestAlg::Sha2_256, s.as_bytes()).bytes
}

fn dispatch(ctx: &mut Ctx, cmd: Command) -> CliResult {
    match cmd {
        Command::Keygen(a) => keygen(ctx, a),
        Command::Sign(a) => sign(ctx, a),
        Command::Verify(a) => verify(ctx, a),
        Command::Publish(a) => publish(ctx, a),
        Command::Serve(a) => serve_cmd(ctx, a),
        Command::DeviceInit(a) => device_init(ctx, a),
        Command::DeviceUpdate(a) => device_update_cmd(ctx, a),
        Command::AttackSim(a) => attack_sim(ctx, a),
        Command::CostReport(a) => cost(ctx, a),
        Command::Bench(a) => bench(ctx, a),
        Command::Hash(a) => hash(ctx, a),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn key_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn load_private(path: &Path) -> Result<(SchemeId, PrivateKey), CliError> {
    let kf = KeyFile::load(path).map_err(failed)?;
    let key = kf.private_key(key_dir(path)).map_err(failed)?;
    Ok((kf.scheme, key))
}

fn keygen(ctx: &mut Ctx, a: KeygenArgs) -> CliResult {
    let pub_path = with_suffix(&a.out, ".pub");
    let state_path = with_suffix(&a.out, ".state");
    let mut targets = vec![a.out.clone(), pub_path.clone()];
    if a.scheme == SchemeId::HssLms {
        targets.push(state_path.clone());
    }
    if let Some(existing) = targets.iter().find(|p| p.exists()) {
        if !a.force {
            return Err(failed(format!("{} exists (use --force to replace)", existing.display())));
        }
    }
    if !descriptor(a.scheme).backend_available {
        return Err(failed(sigsuite::SigError::BackendUnavailable(a.scheme)));
    }

    let mut opts = KeygenOptions {
        seed: ctx.seed,
        hss_params: Some(a.hss_params.clone()),
        hss_store: None,
    };
    if a.scheme == SchemeId::HssLms {
        for p in [state_path.clone(), with_suffix(&state_path, ".hwm")] {
            if p.exists() {
                std::fs::remove_file(&p).map_err(failed)?;
            }
        }
        opts.hss_store = Some(Box::new(FileStore::new(&state_path)));
    }
    let kp = keygen_with(a.scheme, opts).map_err(failed)?;
    let private = match kp.private {
        PrivateKey::Bytes(b) => PrivateRef::Hex(b),
        PrivateKey::Stateful(_) => PrivateRef::StateFile(PathBuf::from(
            state_path.file_name().expect("state path has a file name"),
        )),
    };
    let kf = KeyFile::new(a.scheme, kp.public.clone(), Some(private));
    kf.save(&a.out).map_err(failed)?;
    kf.public_only().save(&pub_path).map_err(failed)?;

    let written: Vec<String> = targets.iter().map(|p| p.display().to_string()).collect();
    if ctx.json {
        return ctx.emit_json(&json!({
            "scheme": a.scheme,
            "public_key": hex::encode(&kp.public),
            "public_key_bytes": kp.public.len(),
            "written": written,
        }));
    }
    for w in &written {
        ctx.line(format!("wrote {w}"))?;
    }
    ctx.line(format!("{} public key ({} bytes): {}", a.scheme, kp.public.len(), hex::encode(&kp.public)))
}

fn build_manifest(f: &ManifestFields, image: &[u8], default_uri: String) -> Manifest {
    Manifest {
        manifest_version: MANIFEST_VERSION,
        sequence_number: f.seq,
        vendor_id: f.vendor,
        class_id: f.class,
        payload_digest: digest(f.digest, image),
        payload_size: image.len() as u64,
        payload_uri: f.uri.clone().unwrap_or(default_uri),
        slot: f.slot,
    }
}

fn sign(ctx: &mut Ctx, a: SignArgs) -> CliResult {
    let image = read(&a.input)?;
    let (scheme, key) = load_private(&a.key)?;
    let uri = a
        .input
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let m = build_manifest(&a.fields, &image, uri);
    let env = sign_envelope(&m, scheme, &key).map_err(failed)?;
    let wire = env.to_bytes();
    let out = a.out.unwrap_or_else(|| with_suffix(&a.input, ".suit"));
    std::fs::write(&out, &wire).map_err(|e| failed(format!("{}: {e}", out.display())))?;
    if ctx.json {
        return ctx.emit_json(&json!({
            "written": out.display().to_string(),
            "scheme": scheme,
            "envelope_bytes": wire.len(),
            "signature_bytes": env.signature.len(),
            "sequence": m.sequence_number,
            "payload_digest": m.payload_digest.to_hex(),
        }));
    }
    ctx.line(format!(
        "wrote {} ({} bytes, {} signature {} bytes, sequence {})",
        out.display(),
        wire.len(),
        scheme,
        env.signature.len(),
        m.sequence_number
    ))
}

fn verify(ctx: &mut Ctx, a: VerifyArgs) -> CliResult {
    let kf = KeyFile::load(&a.key).map_err(failed)?;
    let wire = read(&a.manifest)?;
    let env = SignedEnvelope::from_bytes(&wire).map_err(|_| CliError::Rejected(RejectReason::Malformed))?;
    let m = verify_envelope_as(&env, kf.scheme, &kf.public_key).map_err(|e| {
        CliError::Rejected(match e {
            crate::manifest::EnvelopeReject::Malformed(_) => RejectReason::Malformed,
            _ => RejectReason::BadSignature,
        })
    })?;
    if let Some(path) = &a.image {
        let image = read(path)?;
        if image.len() as u64 != m.payload_size {
            return Err(CliError::Rejected(RejectReason::SizeMismatch));
        }
        if digest(m.payload_digest.alg, &image) != m.payload_digest {
            return Err(CliError::Rejected(RejectReason::DigestMismatch));
        }
    }
    if ctx.json {
        return ctx.emit_json(&json!({
            "verified": true,
            "scheme": env.protected.scheme,
            "image_checked": a.image.is_some(),
            "manifest": manifest_json(&m),
        }));
    }
    ctx.line(format!(
        "signature ok ({}){}",
        env.protected.scheme,
        if a.image.is_some() { ", image matches" } else { "" }
    ))?;
    ctx.line(&m)?;
    if a.dump {
        write!(ctx.out, "{}", hex_dump(&wire)).map_err(failed)?;
    }
    Ok(())
}

fn manifest_json(m: &Manifest) -> serde_json::Value {
    json!({
        "manifest_version": m.manifest_version,
        "sequence_number": m.sequence_number,
        "vendor_id": m.vendor_id.to_string(),
        "class_id": m.class_id.to_string(),
        "payload_digest": { "alg": m.payload_digest.alg, "value": m.payload_digest.to_hex() },
        "payload_size": m.payload_size,
        "payload_uri": m.payload_uri,
        "slot": m.slot,
    })
}

fn repo_path(r: &RepoArg) -> Result<PathBuf, CliError> {
    r.repo
        .clone()
        .ok_or_else(|| CliError::Usage(format!("no repository: pass --repo or set {REPO_ENV}")))
}

fn publish(ctx: &mut Ctx, a: PublishArgs) -> CliResult {
    let repo = Repository::open(repo_path(&a.repo)?).map_err(failed)?;
    let image = read(&a.input)?;
    let (scheme, key) = load_private(&a.key)?;
    let meta = PublishMeta {
        name: a.name,
        sequence: a.fields.seq,
        vendor_id: a.fields.vendor,
        class_id: a.fields.class,
        slot: a.fields.slot,
        uri: a.fields.uri,
        digest_alg: a.fields.digest,
    };
    let p = repo.publish(&image, &meta, scheme, &key).map_err(failed)?;
    let files: Vec<String> = [crate::workflow::MANIFEST_FILE, crate::workflow::IMAGE_FILE, crate::workflow::META_FILE]
        .iter()
        .map(|f| p.dir.join(f).display().to_string())
        .collect();
    if ctx.json {
        return ctx.emit_json(&json!({
            "name": p.name,
            "scheme": scheme,
            "sequence": p.manifest.sequence_number,
            "envelope_bytes": p.envelope_bytes,
            "image_bytes": p.image_bytes,
            "written": files,
        }));
    }
    ctx.line(format!("wrote {} ({} bytes)", files[0], p.envelope_bytes))?;
    ctx.line(format!("wrote {} ({} bytes)", files[1], p.image_bytes))?;
    ctx.line(format!("wrote {}", files[2]))?;
    ctx.line(format!("published {} sequence {} signed with {scheme}", p.name, p.manifest.sequence_number))
}

fn serve_cmd(ctx: &mut Ctx, a: ServeArgs) -> CliResult {
    let root = repo_path(&a.repo)?;
    let repo = Repository::open_existing(&root).map_err(failed)?;
    let server = serve(repo, &a.bind).map_err(failed)?;
    if ctx.json {
        ctx.emit_json(&json!({ "repo": root.display().to_string(), "url": server.base_url() }))?;
    } else {
        ctx.line(format!("serving {} at {}", root.display(), server.base_url()))?;
    }
    ctx.out.flush().map_err(failed)?;
    server.join();
    Ok(())
}

fn device_init(ctx: &mut Ctx, a: DeviceInitArgs) -> CliResult {
    if a.device.exists() && !a.force {
        return Err(failed(format!("{} exists (use --force to replace)", a.device.display())));
    }
    let kf = KeyFile::load(&a.key).map_err(failed)?;
    let image = match &a.image {
        Some(p) => read(p)?,
        None => Vec::new(),
    };
    let anchor = TrustAnchor {
        scheme: kf.scheme,
        public_key: kf.public_key,
    };
    let dev = DeviceState::commission(a.vendor, a.class, anchor, &image);
    dev.save(&a.device).map_err(failed)?;
    if ctx.json {
        return ctx.emit_json(&json!({ "written": a.device.display().to_string(), "device": dev }));
    }
    ctx.line(format!(
        "wrote {} (vendor {}, class {}, trusts {})",
        a.device.display(),
        dev.vendor_id,
        dev.class_id,
        dev.trusted_public_key.scheme
    ))
}

fn source(s: &SourceArgs) -> Result<Box<dyn PackageSource>, CliError> {
    match &s.url {
        Some(url) => Ok(Box::new(HttpSource::new(url.clone()))),
        None => Ok(Box::new(Repository::open_existing(repo_path(&s.repo)?).map_err(failed)?)),
    }
}

fn device_update_cmd(ctx: &mut Ctx, a: DeviceUpdateArgs) -> CliResult {
    let dev = DeviceState::load(&a.device).map_err(failed)?;
    let src = source(&a.source)?;
    let fetched = fetch_and_update(&dev, src.as_ref(), &a.source.name).map_err(failed)?;
    let pc = PaperConstants::load().map_err(failed)?;
    // The link anchor is a firmware transfer time; the envelope is shown on top.
    let (lo, hi) = transfer_time(&pc, fetched.image_bytes as u64);
    let (total_lo, total_hi) = transfer_time(&pc, fetched.transfer_bytes());
    let after = match &fetched.outcome {
        UpdateOutcome::Installed(next) => {
            if !a.dry_run {
                next.save(&a.device).map_err(failed)?;
            }
            next
        }
        UpdateOutcome::Rejected(_) => &dev,
    };
    if ctx.json {
        ctx.emit_json(&json!({
            "outcome": fetched.outcome.code(),
            "source": src.describe(),
            "name": a.source.name,
            "manifest_bytes": fetched.manifest_bytes,
            "image_bytes": fetched.image_bytes,
            "transfer_bytes": fetched.transfer_bytes(),
            "image_transfer_time_s": [lo, hi],
            "transfer_time_s": [total_lo, total_hi],
            "installed_sequence": after.installed_sequence(),
            "active_slot": after.active_slot(),
            "written": matches!(fetched.outcome, UpdateOutcome::Installed(_)) && !a.dry_run,
        }))?;
    } else {
        ctx.line(format!(
            "fetched {} from {}: envelope {} bytes, image {} bytes",
            a.source.name,
            src.describe(),
            fetched.manifest_bytes,
            fetched.image_bytes
        ))?;
        ctx.line(format!(
            "estimated transfer on the reference link: image {lo:.0}-{hi:.0} s, with envelope {total_lo:.0}-{total_hi:.0} s"
        ))?;
        if let UpdateOutcome::Installed(next) = &fetched.outcome {
            ctx.line(format!(
                "installed sequence {} into slot {}",
                next.installed_sequence(),
                next.active_slot()
            ))?;
            if !a.dry_run {
                ctx.line(format!("wrote {}", a.device.display()))?;
            }
        }
    }
    match fetched.outcome {
        UpdateOutcome::Installed(_) => Ok(()),
        UpdateOutcome::Rejected(r) => Err(CliError::Rejected(r)),
    }
}

fn attack_sim(ctx: &mut Ctx, a: AttackArgs) -> CliResult {
    let dev = DeviceState::load(&a.device).map_err(failed)?;
    let src = source(&a.source)?;
    let report = attack_suite(&dev, src.as_ref(), &a.source.name).map_err(failed)?;
    if ctx.json {
        ctx.emit_json(&serde_json::to_value(&report).expect("report serializes"))?;
    } else {
        let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
        ctx.line(format!("attack simulation on {} from {}", report.update, report.source))?;
        ctx.line(format!(
            "  control           {:<16} sequence {} -> {}  {}",
            report.control.observed,
            report.control.sequence_before,
            report.control.sequence_after,
            verdict(report.control.pass)
        ))?;
        for r in &report.attacks {
            let name = serde_json::to_value(r.attack).expect("attack serializes");
            ctx.line(format!(
                "  {:<17} {:<16} expected {:<16} {}",
                name.as_str().unwrap_or_default(),
                r.observed,
                r.expected.code(),
                verdict(r.pass)
            ))?;
        }
    }
    if report.all_passed {
        Ok(())
    } else {
        Err(failed("attack simulation did not match expectations"))
    }
}

fn cost(ctx: &mut Ctx, a: CostArgs) -> CliResult {
    let pc = PaperConstants::load().map_err(failed)?;
    let report = cost_report(&pc, a.hash);
    let totals: Vec<_> = SchemeId::ALL.into_iter().map(|s| manifest_total(&pc, s)).collect();
    let category = a.category.map(|c| {
        SchemeId::ALL
            .into_iter()
            .map(|s| {
                let h = if s == SchemeId::Ed25519 { HashChoice::Sha256 } else { a.hash };
                (s, transfer_cost(&pc, c, s, h))
            })
            .collect::<Vec<_>>()
    });
    let cells = reproduce_relative_costs(&pc);
    let key_sizes = render_key_sizes(&pc);
    let paper_ok = cells.iter().all(|c| c.pass) && key_sizes.rows.iter().all(|r| r[4] == "match");

    if ctx.json {
        let mut v = json!({
            "dataset_sha256": DATASET_SHA256,
            "manifest_totals": totals,
            "report": report,
        });
        if let (Some(c), Some(rows)) = (a.category, &category) {
            v["category"] = json!({ "name": c.name(), "rows": rows.iter().map(|(_, t)| t).collect::<Vec<_>>() });
        }
        if a.paper {
            v["sizes"] = serde_json::to_value(&pc.sizes).expect("sizes serialize");
            v["relative_costs"] = serde_json::to_value(&cells).expect("cells serialize");
            v["all_within_tolerance"] = json!(paper_ok);
        }
        ctx.emit_json(&v)?;
    } else {
        if !a.csv {
            ctx.line(format!("dataset sha256 {DATASET_SHA256} (verified)"))?;
        }
        if a.paper {
            ctx.table(&key_sizes, a.csv)?;
            ctx.table(&render_relative_costs(&cells), a.csv)?;
        } else {
            ctx.table(&render_cost_report(&report), a.csv)?;
        }
        if let (Some(c), Some(rows)) = (a.category, &category) {
            let mut t = Table {
                title: format!("Transfer for {} ({} B nominal)", c.name(), c.nominal_bytes()),
                headers: ["scheme", "bytes", "baseline_b", "increase_pct", "time_s"]
                    .map(String::from)
                    .to_vec(),
                rows: Vec::new(),
            };
            for (s, tc) in rows {
                t.rows.push(vec![
                    s.to_string(),
                    tc.bytes.to_string(),
                    tc.baseline_bytes.to_string(),
                    format!("{:+.2}", tc.increase_pct),
                    format!("{:.0}-{:.0}", tc.time_s.0, tc.time_s.1),
                ]);
            }
            ctx.table(&t, a.csv)?;
        }
    }
    if a.paper && !paper_ok {
        return Err(failed("reproduction outside tolerance"));
    }
    Ok(())
}

fn bench(ctx: &mut Ctx, a: BenchArgs) -> CliResult {
    if a.reps == 0 || !(a.tick_mhz > 0.0) {
        return Err(CliError::Usage("--reps and --tick-mhz must be positive".into()));
    }
    let pc = PaperConstants::load().map_err(failed)?;
    let schemes: Vec<SchemeId> = if a.schemes.is_empty() {
        sigsuite::registry()
            .iter()
            .filter(|d| d.backend_available)
            .map(|d| d.id)
            .collect()
    } else {
        a.schemes.clone()
    };
    let cfg = BenchConfig {
        message_bytes: a.msg_bytes,
        repetitions: a.reps,
        tick_hz: a.tick_mhz * 1e6,
        board: a.board,
        hss_params: a.hss_params,
    };
    let rows = bench_signatures(&pc, &schemes, &cfg).map_err(failed)?;
    if ctx.json {
        return ctx.emit_json(&json!({ "config": cfg, "rows": rows }));
    }
    ctx.table(&render_bench(&rows, &cfg), a.csv)
}

fn hash(ctx: &mut Ctx, a: HashArgs) -> CliResult {
    if a.bench {
        let rows = bench_hash(a.alg, &[64, 1024, 52_485], 200);
        if ctx.json {
            return ctx.emit_json(&json!({ "alg": a.alg, "rows": rows }));
        }
        for r in rows {
            ctx.line(format!(
                "{} {:>6} B  {:>10.0} ns  {:>8.1} MB/s",
                a.alg, r.input_bytes, r.mean_ns, r.throughput_mb_s
            ))?;
        }
        return Ok(());
    }
    let (d, label) = match (&a.input, &a.text) {
        (Some(p), _) => {
            let f = std::fs::File::open(p).map_err(|e| failed(format!("{}: {e}", p.display())))?;
            (digest_reader(a.alg, f).map_err(failed)?, p.display().to_string())
        }
        (None, Some(t)) => (digest(a.alg, t.as_bytes()), format!("{t:?}")),
        (None, None) => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).map_err(failed)?;
            (digest(a.alg, &buf), "-".into())
        }
    };
    if ctx.json {
        return ctx.emit_json(&json!({ "alg": a.alg, "digest": d.to_hex(), "input": label }));
    }
    ctx.line(format!("{}  {label}", d.to_hex()))
}
