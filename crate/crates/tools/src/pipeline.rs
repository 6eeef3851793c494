//! The CLI verbs as library calls: each stage reads the configured space,
//! writes its artifacts under `out` and adds a section to the run report.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use qsunif::approx::{build_approximation, ApproximationLadder, KApproximation};
use qsunif::graph::ApproxGraph;
use qsunif::math;
use qsunif::mesh::TriMesh;
use qsunif::metric::{cross_ratio, eta0, min_cross_ratio, ContinuumSample, FiniteMetricSpace, FourTuple};
use qsunif::modulus::mod_q;
use qsunif::packing::{pack_triangulation, SphereTriangulation, SphericalPacking};
use qsunif::spaces::{self, MeshedSphere, MetricMode, SquareComplex};
use qsunif::uniformize::{
    distortion_fit, level_convergence, qs_distortion, spread_triple, suff_condition_scan, two_scale_consistency, uniformize_level,
    DiscreteMap, TwoScaleOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{MetricChoice, RunConfig, SpaceSpec};
use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Gen,
    Approx,
    Modulus,
    Pack,
    Uniformize,
    Verify,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Approx => "approx",
            Command::Modulus => "modulus",
            Command::Pack => "pack",
            Command::Uniformize => "uniformize",
            Command::Verify => "verify",
            Command::Report => "report",
        }
    }
}

/// Everything a run produced, minus timings. Serializes identically for
/// identical configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub seed: u64,
    pub config: RunConfig,
    pub results: BTreeMap<String, Value>,
    /// Artifact paths relative to `out`.
    pub files: Vec<String>,
}

/// Wall-clock seconds per stage, kept beside the report.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timings {
    pub stages: Vec<(String, f64)>,
}

pub struct Space {
    pub mesh: MeshedSphere,
    pub z: FiniteMetricSpace,
    pub snowball: Option<SquareComplex>,
}

fn metric_mode(c: MetricChoice) -> MetricMode {
    match c {
        MetricChoice::Chordal => MetricMode::Chordal,
        MetricChoice::Angular => MetricMode::Angular,
        MetricChoice::Geodesic => MetricMode::GraphGeodesic,
    }
}

pub fn build_space(cfg: &RunConfig) -> Result<Space> {
    let s = cfg.sample();
    let mode = metric_mode(cfg.metric);
    let mut snow = None;
    let mesh = match &cfg.space {
        SpaceSpec::RoundSphere {} => spaces::round_sphere(s).with_mode(mode),
        SpaceSpec::Snowball {} => {
            let c = spaces::snowball(s as u32)?;
            let m = c.mesh().with_mode(mode);
            snow = Some(c);
            m
        }
        SpaceSpec::AlphaPatch { alpha, cap } => spaces::alpha_patch_sphere(*alpha, s, *cap)?,
        SpaceSpec::Warp { lipschitz, seed } => spaces::bilipschitz_warp(&spaces::round_sphere(s), *lipschitz, *seed)?.with_mode(mode),
        SpaceSpec::Mesh { path } => io::load_off(path, mode)?,
    };
    let z = mesh.space()?;
    Ok(Space { mesh, z, snowball: snow })
}

pub struct Run {
    pub cfg: RunConfig,
    pub space: Space,
    approx: Option<Vec<KApproximation>>,
    results: BTreeMap<String, Value>,
    files: Vec<String>,
    timings: Timings,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

impl Run {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let t = Instant::now();
        let space = build_space(&cfg)?;
        let timings = Timings { stages: vec![("space".into(), t.elapsed().as_secs_f64())] };
        Ok(Run { cfg, space, approx: None, results: BTreeMap::new(), files: Vec::new(), timings })
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn write<T: Serialize>(&mut self, name: String, v: &T) -> Result<()> {
        io::write_json(&self.out(&name), v)?;
        self.files.push(name);
        Ok(())
    }

    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let r = f(self);
        self.timings.stages.push((name.to_string(), t.elapsed().as_secs_f64()));
        r
    }

    fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.cfg.levels[0]..=self.cfg.levels[1]
    }

    /// Approximations for the configured levels, built once.
    pub fn approximations(&mut self) -> Result<&[KApproximation]> {
        if self.approx.is_none() {
            let v = self
                .levels()
                .map(|l| build_approximation(&self.space.mesh, &self.space.z, l))
                .collect::<qsunif::Result<Vec<_>>>()?;
            self.approx = Some(v);
        }
        Ok(self.approx.as_deref().unwrap_or_default())
    }

    pub fn gen(&mut self) -> Result<()> {
        self.timed("gen", |r| {
            let off = io::mesh_to_off(&r.space.mesh)?;
            io::write_atomic(&r.out("space.off"), off.as_bytes())?;
            r.files.push("space.off".into());
            let mut sim = Value::Null;
            if let Some(c) = r.space.snowball.clone() {
                r.write("snowball.json".into(), &io::snowball_file(&c))?;
                sim = json!(spaces::snowball::similarity_dimension());
            }
            let m = &r.space.mesh;
            let counts: Vec<usize> = (0..=m.finest()).map(|l| m.count(l)).collect::<qsunif::Result<_>>()?;
            let v = json!({
                "label": m.label,
                "metric": to_value(&m.mode),
                "sample_level": r.cfg.sample(),
                "points": r.space.z.len(),
                "diam": r.space.z.diam(),
                "vertex_counts": counts,
                "similarity_dimension": sim,
            });
            r.results.insert("gen".into(), v);
            Ok(())
        })
    }

    pub fn approx(&mut self) -> Result<()> {
        self.timed("approx", |r| {
            let levels: Vec<usize> = r.levels().collect();
            let a = r.approximations()?.to_vec();
            let npts = r.space.z.len();
            let mut rows = Vec::new();
            for (l, a) in levels.iter().zip(&a) {
                r.write(format!("approx_{l}.json"), a)?;
                let rep = a.report.clone();
                rows.push(json!({
                    "level": l,
                    "vertices": a.len(),
                    "edges": a.graph.edge_count(),
                    "max_valence": a.graph.max_valence(),
                    "mesh_size": a.mesh_size()?,
                    "multiplicity": a.multiplicity(npts),
                    "k": rep.as_ref().and_then(|x| x.k),
                    "bounds": rep.as_ref().map(|x| to_value(&x.bounds)),
                    "violations": rep.as_ref().map_or(0, |x| x.violations.len()),
                }));
            }
            let ladder = ApproximationLadder::new(a).ok();
            let v = json!({ "levels": rows, "common_k": ladder.and_then(|l| l.common_k()) });
            r.results.insert("approx".into(), v);
            Ok(())
        })
    }

    /// Ball continua with centers at least `diam / 2` apart.
    fn sample_pairs(&self) -> (Vec<(ContinuumSample, ContinuumSample)>, Vec<[usize; 2]>) {
        let z = &self.space.z;
        let d = z.diam();
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut out = Vec::new();
        let mut centers = Vec::new();
        for _ in 0..50 * self.cfg.pairs {
            if out.len() == self.cfg.pairs {
                break;
            }
            let (c1, c2) = (rng.gen_range(0..z.len()), rng.gen_range(0..z.len()));
            let r = d * rng.gen_range(0.08..0.15);
            if z.dist(c1, c2) < d / 2.0 {
                continue;
            }
            if let (Ok(e), Ok(f)) = (ContinuumSample::ball_component(z, c1, r), ContinuumSample::ball_component(z, c2, r)) {
                out.push((e, f));
                centers.push([c1, c2]);
            }
        }
        (out, centers)
    }

    pub fn modulus(&mut self) -> Result<()> {
        self.timed("modulus", |r| {
            let ladder = ApproximationLadder::new(r.approximations()?.to_vec())?;
            let (pairs, centers) = r.sample_pairs();
            let opts = match (r.cfg.strict_separation, ladder.common_k()) {
                (true, Some(k)) => TwoScaleOptions::from_k(k),
                _ => TwoScaleOptions { min_sep: 2, star_l: 0 },
            };
            let z = &r.space.z;
            let two = two_scale_consistency(z, &ladder, &pairs, r.cfg.q, opts, r.cfg.tol)?;
            let suff = suff_condition_scan(z, &ladder, r.cfg.lambda, r.cfg.pairs, r.cfg.seed, r.cfg.tol)?;
            let tables = json!({ "pair_centers": centers, "two_scale": to_value(&two), "annulus": to_value(&suff) });
            r.write("modulus.json".into(), &tables)?;
            let v = json!({
                "pairs": pairs.len(),
                "dropped": two.dropped.len(),
                "two_scale_c_hat": two.c_hat,
                "annulus_c_hat": suff.c_hat,
                "annulus_flagged": suff.flagged,
                "q": r.cfg.q,
                "lambda": r.cfg.lambda,
            });
            r.results.insert("modulus".into(), v);
            Ok(())
        })
    }

    fn triangulation(a: &KApproximation) -> Result<SphereTriangulation> {
        let tris = a.graph.triangles().ok_or(qsunif::Error::NotATriangulation("approximation graph carries no triangles".into()))?;
        Ok(SphereTriangulation::new(a.len(), tris.to_vec())?)
    }

    fn packing_row(l: usize, t: &SphereTriangulation, p: &SphericalPacking) -> Value {
        json!({
            "level": l,
            "vertices": t.len(),
            "residual": p.residual,
            "sweeps": p.sweeps,
            "tangency_residual": p.tangency_residual(t),
            "overlap": p.overlap(t),
            "min_radius": p.radii.iter().copied().fold(f64::INFINITY, f64::min),
            "max_radius": p.radii.iter().copied().fold(0.0, f64::max),
        })
    }

    pub fn pack(&mut self) -> Result<()> {
        self.timed("pack", |r| {
            let levels: Vec<usize> = r.levels().collect();
            let a = r.approximations()?.to_vec();
            let mut rows = Vec::new();
            for (l, a) in levels.iter().zip(&a) {
                let t = Self::triangulation(a)?;
                let p = pack_triangulation(&t, r.cfg.pack_tol)?;
                r.write(format!("packing_{l}.json"), &p)?;
                rows.push(Self::packing_row(*l, &t, &p));
            }
            r.results.insert("pack".into(), json!({ "levels": rows }));
            Ok(())
        })
    }

    fn map_row(&self, l: usize, m: &DiscreteMap) -> Result<(Value, Value)> {
        let z = &self.space.z;
        let d = distortion_fit(z, m, self.cfg.tuples, self.cfg.seed)?;
        let t = qs_distortion(z, m, self.cfg.tuples, self.cfg.seed)?;
        let row = json!({
            "level": l,
            "points": m.len(),
            "triple": m.triple,
            "mesh": m.mesh,
            "tuples": d.count,
            "deviation_0.1_10": d.envelope.max_relative_deviation(0.1, 10.0),
            "eta_at": [d.envelope.eval(0.1), d.envelope.eval(1.0), d.envelope.eval(10.0)],
            "max_ratio_error": d.max_ratio_error(),
            "triple_ratio_error": t.max_ratio_error(),
        });
        Ok((row, json!({ "cross_ratio": to_value(&d), "triple_ratio": to_value(&t) })))
    }

    pub fn uniformize(&mut self) -> Result<()> {
        self.timed("uniformize", |r| {
            let levels: Vec<usize> = r.levels().collect();
            let a = r.approximations()?.to_vec();
            let mut rows = Vec::new();
            let mut maps = Vec::new();
            for (l, a) in levels.iter().zip(&a) {
                let z = &r.space.z;
                let tr = spread_triple(a, z);
                let (mut m, _) = uniformize_level(a, z, tr, r.cfg.pack_tol)?;
                m.level = *l;
                let (row, dist) = r.map_row(*l, &m)?;
                r.write(format!("map_{l}.json"), &m)?;
                r.write(format!("distortion_{l}.json"), &dist)?;
                rows.push(row);
                maps.push(m);
            }
            let v = json!({ "levels": rows, "level_convergence": level_convergence(&maps) });
            r.results.insert("uniformize".into(), v);
            Ok(())
        })
    }

    /// Invariant suites over the configured space; failures are listed by name.
    pub fn verify(&mut self) -> Result<Vec<String>> {
        self.timed("verify", |r| {
            let checks = r.checks()?;
            let failed: Vec<String> = checks.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
            let rows: Vec<Value> = checks.into_iter().map(|(n, ok, d)| json!({ "name": n, "pass": ok, "detail": d })).collect();
            r.results.insert("verify".into(), json!({ "checks": rows, "failed": failed }));
            Ok(failed)
        })
    }

    fn checks(&mut self) -> Result<Vec<(String, bool, Value)>> {
        let mut out = Vec::new();
        let m = self.space.mesh.clone();
        let mut bad_levels = Vec::new();
        for l in 0..=m.finest() {
            let ok = TriMesh::new(m.count(l)?, m.triangles(l)?.to_vec()).and_then(|t| t.check_sphere()).is_ok();
            if !ok {
                bad_levels.push(l);
            }
        }
        out.push(("mesh_is_sphere".into(), bad_levels.is_empty(), json!({ "failing_levels": bad_levels })));

        let a = self.approximations()?.to_vec();
        let ks: Vec<Option<u32>> = a.iter().map(|x| x.k_report()).collect();
        let viol: usize = a.iter().map(|x| x.report.as_ref().map_or(0, |r| r.violations.len())).sum();
        out.push(("k_approximation".into(), ks.iter().all(Option::is_some) && viol == 0, json!({ "k": ks, "violations": viol })));

        let z = &self.space.z;
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let (mut sym, mut cr2) = (0.0f64, true);
        let mut count = 0;
        while count < 2000 && z.len() >= 4 {
            let t: [usize; 4] = [0; 4].map(|_| rng.gen_range(0..z.len()));
            if (0..4).any(|i| (0..i).any(|j| t[i] == t[j])) {
                continue;
            }
            count += 1;
            let c = |a: usize, b: usize, x: usize, y: usize| cross_ratio(FourTuple::new(t[a], t[b], t[x], t[y]), z);
            let base = c(0, 1, 2, 3)?;
            sym = sym.max((base * c(1, 0, 2, 3)? - 1.0).abs()).max((base * c(0, 1, 3, 2)? - 1.0).abs());
            sym = sym.max((base - c(2, 3, 0, 1)?).abs() / base);
            cr2 &= min_cross_ratio(FourTuple::new(t[0], t[1], t[2], t[3]), z)? <= eta0(base);
        }
        out.push(("cross_ratio".into(), sym <= 1e-12 && cr2, json!({ "tuples": count, "symmetry_error": sym, "cr2_bound": cr2 })));

        let q = self.cfg.q;
        let mut path_err = 0.0f64;
        for n in 2..=6 {
            let e: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            let g = ApproxGraph::from_edges(n, &e)?;
            let v = mod_q(&g, &[0], &[n - 1], q, self.cfg.tol)?.value;
            path_err = path_err.max((v - (n as f64).powf(1.0 - q)).abs());
        }
        out.push(("modulus_path_law".into(), path_err <= 1e-6, json!({ "max_error": path_err })));

        let g = &a[0].graph;
        let mut least = f64::INFINITY;
        for _ in 0..10 {
            let shared = rng.gen_range(0..g.len());
            let mut sa = vec![shared, rng.gen_range(0..g.len())];
            let mut sb = vec![shared, rng.gen_range(0..g.len())];
            sa.sort_unstable();
            sa.dedup();
            sb.sort_unstable();
            sb.dedup();
            least = least.min(mod_q(g, &sa, &sb, q, self.cfg.tol)?.value);
        }
        out.push(("modulus_intersecting".into(), least >= 1.0 - 1e-9, json!({ "least": least })));

        let t = Self::triangulation(&a[0])?;
        let p = pack_triangulation(&t, self.cfg.pack_tol)?;
        let row = Self::packing_row(self.cfg.levels[0], &t, &p);
        let ok = p.tangency_residual(&t) <= 1e-6 && p.overlap(&t) <= 1e-6;
        out.push(("packing".into(), ok, row));

        let id = DiscreteMap::from_points(z, (0..z.len()).collect(), |x| math::scale(x, 3.0));
        let e = distortion_fit(z, &id, 400, self.cfg.seed)?;
        let ok = e.max_ratio_error() <= 1e-12 && e.envelope.is_nondecreasing() && e.inverse.is_nondecreasing();
        out.push(("similarity_distortion".into(), ok, json!({ "max_ratio_error": e.max_ratio_error() })));

        let mut rt = Vec::new();
        let back: KApproximation = serde_json::from_str(&io::to_json(&a[0])).map_err(|e| CliError::Format(e.to_string()))?;
        if back != a[0] {
            rt.push("approximation");
        }
        let back: SphericalPacking = serde_json::from_str(&io::to_json(&p)).map_err(|e| CliError::Format(e.to_string()))?;
        if back != p {
            rt.push("packing");
        }
        let (c, tris) = io::read_off(&io::mesh_to_off(&m)?)?;
        if c != m.coords()[..m.count(m.finest())?] || tris != m.triangles(m.finest())? {
            rt.push("off");
        }
        if let Some(s) = &self.space.snowball {
            let f: io::SnowballFile = serde_json::from_str(&io::to_json(&io::snowball_file(s))).map_err(|e| CliError::Format(e.to_string()))?;
            if io::snowball_from_file(&f)? != *s {
                rt.push("snowball");
            }
        }
        out.push(("round_trip".into(), rt.is_empty(), json!({ "failed": rt })));
        Ok(out)
    }

    /// Writes `<command>.json` and `<command>.timings.json`.
    pub fn finish(mut self, command: Command) -> Result<RunReport> {
        let name = command.name();
        self.files.push(format!("{name}.json"));
        let report = RunReport {
            tool: "qsunif".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            seed: self.cfg.seed,
            config: self.cfg.clone(),
            results: self.results,
            files: self.files,
        };
        io::write_json(&self.cfg.out.join(format!("{name}.json")), &report)?;
        io::write_json(&self.cfg.out.join(format!("{name}.timings.json")), &self.timings)?;
        Ok(report)
    }
}

/// Runs one verb end to end. A failed verification still writes its report.
pub fn run(cfg: RunConfig, command: Command) -> Result<RunReport> {
    let mut r = Run::new(cfg)?;
    let mut failed = Vec::new();
    match command {
        Command::Gen => r.gen()?,
        Command::Approx => r.approx()?,
        Command::Modulus => r.modulus()?,
        Command::Pack => r.pack()?,
        Command::Uniformize => r.uniformize()?,
        Command::Verify => failed = r.verify()?,
        Command::Report => {
            r.gen()?;
            r.approx()?;
            r.modulus()?;
            r.pack()?;
            r.uniformize()?;
        }
    }
    let report = r.finish(command)?;
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(CliError::VerifyFailed(failed))
    }
}
