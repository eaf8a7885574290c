use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use spherekern::harmonics::{
    ck_constant, dim_harmonic, eval_harmonic, jzero_count, parse_point_row, parse_points, polar_distance,
    random_points, tau_iter, tau_jzero_iter, zonal_sum,
};
use spherekern::kernels::{self, gram_matrix, kernel_eval, scheme_from_json, spd_witness_search, DEFAULT_TOL};
use spherekern::spd_analysis::{
    asympt_ratio_sequence, certify_haagerup, certify_harmonic_product, certify_lohofer, certify_ptilde,
    corollary_rate_check, isotropic_sufficiency, jacobi_ratio_sequence, trend_to_zero, weighted_complement_sum,
    BoundCertificate, DegreeSets, HaagerupGrid, HarmonicProductGrid, LohoferGrid, PtildeGrid, SufficiencyVerdict,
    TrendOptions,
};
use spherekern::{
    CoefficientScheme, JacobiParams, ManifoldFamily, ManifoldSpec, MultiIndex, PolarPoint, Verdict,
};

use crate::report::{render, write_output, Report};
use crate::{AdditionArgs, Bound, CertifyArgs, EvalArgs, Failure, Family, Global, RateKind, RatesArgs, TauArgs};

fn input<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Input(msg.into()))
}

fn finish<T: Serialize>(g: &Global, report: Report<T>) -> Result<(), Failure> {
    let text = render(&report, g.format)?;
    write_output(&text, g.out.as_deref())?;
    if report.failed {
        Err(Failure::Verdict)
    } else {
        Ok(())
    }
}

/// The global flags and the subcommand arguments as one JSON object.
fn config(g: &Global, args: impl Serialize) -> Map<String, Value> {
    let mut map = match serde_json::to_value(g) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    if let Ok(Value::Object(extra)) = serde_json::to_value(args) {
        map.extend(extra);
    }
    map
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_scheme(g: &Global) -> Result<CoefficientScheme, Failure> {
    let Some(path) = &g.scheme else {
        return input("this command needs --scheme FILE");
    };
    scheme_from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_points(g: &Global, d: usize) -> Result<Vec<PolarPoint>, Failure> {
    if let Some(path) = &g.points {
        let set = parse_points(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        if set.d != d {
            return input(format!("{} holds points for d = {}, expected d = {d}", path.display(), set.d));
        }
        return Ok(set.points);
    }
    match g.n {
        Some(n) => Ok(random_points(d, n, g.seed)),
        None => input("give --points FILE or --n COUNT for seeded random points"),
    }
}

/// `polar:t1,...` or `cart:x1,...`.
fn parse_point_spec(spec: &str) -> Result<PolarPoint, Failure> {
    let Some((tag, rest)) = spec.split_once(':') else {
        return input(format!("point `{spec}` must look like polar:t1,... or cart:x1,..."));
    };
    let fields = rest.split(',').count();
    let d = match tag {
        "polar" => fields + 1,
        "cart" => fields,
        other => return input(format!("point tag must be polar or cart, got `{other}`")),
    };
    if d < 3 {
        return input(format!("point `{spec}` has too few coordinates (d >= 3)"));
    }
    parse_point_row(&format!("{tag},{rest}"), d).map_err(|e| Failure::Input(format!("point `{spec}`: {e}")))
}

fn parse_index(text: &str) -> Result<MultiIndex, Failure> {
    let entries = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Input(format!("index `{text}` is not a comma-separated list of integers")))?;
    Ok(MultiIndex::new(entries)?)
}

fn require_d(g: &Global) -> Result<usize, Failure> {
    match g.d {
        Some(d) if d >= 3 => Ok(d),
        Some(d) => input(format!("--d must be >= 3, got {d}")),
        None => input("this command needs --d"),
    }
}

fn manifold(family: Family, d: usize) -> Result<ManifoldSpec, Failure> {
    let f = match family {
        Family::Sphere => ManifoldFamily::Sphere,
        Family::RealProjective => ManifoldFamily::RealProjective,
        Family::ComplexProjective => ManifoldFamily::ComplexProjective,
        Family::QuaternionProjective => ManifoldFamily::QuaternionProjective,
        Family::Cayley => ManifoldFamily::Cayley,
    };
    Ok(ManifoldSpec::new(f, d)?)
}

pub fn eval(g: &Global, a: &EvalArgs) -> Result<(), Failure> {
    let points = a.point.iter().map(|s| parse_point_spec(s)).collect::<Result<Vec<_>, _>>()?;
    let mut cfg = config(g, a);
    if let Some(text) = &a.index {
        let index = parse_index(text)?;
        if g.d.is_some_and(|d| d != index.d()) {
            return input(format!("index {index} is for d = {}, but --d is {}", index.d(), g.d.unwrap_or(0)));
        }
        if points.is_empty() {
            return input("eval --index needs at least one --point");
        }
        let mut rows = Vec::new();
        let mut csv = String::from("re,im\n");
        for p in &points {
            let v = eval_harmonic(&index, p)?.value;
            let _ = writeln!(csv, "{:e},{:e}", v.re, v.im);
            rows.push(json!({ "point": p.angles(), "value": v }));
        }
        cfg.insert("d".into(), json!(index.d()));
        let result = json!({ "index": index, "values": rows });
        return finish(g, Report { command: "eval", config: cfg, result, csv: Some(csv), failed: false });
    }
    let s = load_scheme(g)?;
    let [p, q] = points.as_slice() else {
        return input("eval with --scheme needs exactly two --point values");
    };
    let kpq = kernel_eval(&s, p, q)?;
    let kqp = kernel_eval(&s, q, p)?;
    let consistent = (kpq - kqp.conj()).norm() <= 1e-12 * kpq.norm().max(1.0);
    cfg.insert("d".into(), json!(s.d()));
    cfg.insert("k_max".into(), json!(s.k_max()));
    let csv = format!("pair,re,im\npq,{:e},{:e}\nqp,{:e},{:e}\n", kpq.re, kpq.im, kqp.re, kqp.im);
    let result = json!({ "k_pq": kpq, "k_qp": kqp, "hermitian_consistent": consistent });
    finish(g, Report { command: "eval", config: cfg, result, csv: Some(csv), failed: !consistent })
}

pub fn addition_test(g: &Global, a: &AdditionArgs) -> Result<(), Failure> {
    let d = require_d(g)?;
    let k_max = g.k_max.unwrap_or(20);
    let tol = g.tol.unwrap_or(1e-8);
    if a.pairs == 0 {
        return input("--pairs must be positive");
    }
    let m = ManifoldSpec::sphere(d)?;
    let params = JacobiParams::symmetric((d as f64 - 3.0) / 2.0)?;
    let pts = random_points(d, 2 * a.pairs, g.seed);
    let mut per_degree = vec![0.0f64; k_max + 1];
    for pair in pts.chunks(2) {
        let t = polar_distance(&pair[0], &pair[1]).cos();
        for (k, worst) in per_degree.iter_mut().enumerate() {
            let got = zonal_sum(d, k, &pair[0], &pair[1])?;
            let want = ck_constant(&m, k) * (1.0 + a.perturb) * spherekern::special_fn::jacobi_p(k, params, t)?;
            *worst = worst.max((got.re - want).hypot(got.im) / want.abs());
        }
    }
    let max_err = per_degree.iter().copied().fold(0.0, f64::max);
    let pass = max_err <= tol;
    let mut cfg = config(g, a);
    cfg.insert("k_max".into(), json!(k_max));
    cfg.insert("tol".into(), json!(tol));
    let mut csv = String::from("degree,max_relative_error\n");
    for (k, e) in per_degree.iter().enumerate() {
        let _ = writeln!(csv, "{k},{e:e}");
    }
    let result = json!({ "max_relative_error": max_err, "per_degree": per_degree, "pass": pass });
    finish(g, Report { command: "addition-test", config: cfg, result, csv: Some(csv), failed: !pass })
}

const TAU_LIST_LIMIT: u128 = 1_000_000;

pub fn tau(g: &Global, a: &TauArgs) -> Result<(), Failure> {
    let d = require_d(g)?;
    let Some(k) = g.k_max else {
        return input("tau needs --k-max (the degree k)");
    };
    let count = match a.j {
        Some(j) => jzero_count(d, k, j)?,
        None => dim_harmonic(d, k)?,
    };
    let indices: Option<Vec<MultiIndex>> = if a.count_only {
        None
    } else if count > TAU_LIST_LIMIT {
        return input(format!("{count} indices is too many to list; use --count-only"));
    } else {
        Some(match a.j {
            Some(j) => tau_jzero_iter(d, k, j)?.collect(),
            None => tau_iter(d, k).collect(),
        })
    };
    let csv = indices.as_ref().map(|list| {
        let mut out = String::new();
        for idx in list {
            let row: Vec<String> = idx.entries().iter().map(i64::to_string).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    });
    let result = json!({ "d": d, "k": k, "j": a.j, "count": count.to_string(), "indices": indices });
    finish(g, Report { command: "tau", config: config(g, a), result, csv, failed: false })
}

fn scheme_config(g: &Global, s: &CoefficientScheme, n: usize) -> Map<String, Value> {
    let mut cfg = config(g, ());
    cfg.insert("d".into(), json!(s.d()));
    cfg.insert("k_max".into(), json!(s.k_max()));
    cfg.insert("point_count".into(), json!(n));
    cfg
}

pub fn gram(g: &Global) -> Result<(), Failure> {
    let s = load_scheme(g)?;
    let pts = load_points(g, s.d())?;
    let m = gram_matrix(&s, &pts)?;
    let rows: Vec<Vec<_>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    let mut csv = String::from("i,j,re,im\n");
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let _ = writeln!(csv, "{i},{j},{:e},{:e}", z.re, z.im);
        }
    }
    let cfg = scheme_config(g, &s, pts.len());
    finish(g, Report { command: "gram", config: cfg, result: json!({ "matrix": rows }), csv: Some(csv), failed: false })
}

pub fn check_spd(g: &Global) -> Result<(), Failure> {
    let s = load_scheme(g)?;
    let pts = load_points(g, s.d())?;
    let tol = g.tol.unwrap_or(DEFAULT_TOL);
    let report = kernels::check_spd(&s, &pts, tol)?;
    let verdict = serde_json::to_value(report.verdict).unwrap_or(Value::Null);
    let csv = format!(
        "n,min_eigenvalue,max_eigenvalue,verdict\n{},{:e},{:e},{}\n",
        report.n,
        report.min_eigenvalue,
        report.max_eigenvalue,
        verdict.as_str().unwrap_or_default()
    );
    let mut cfg = scheme_config(g, &s, pts.len());
    cfg.insert("tol".into(), json!(tol));
    let failed = report.verdict != Verdict::PositiveDefinite;
    finish(g, Report { command: "check-spd", config: cfg, result: report, csv: Some(csv), failed })
}

pub fn witness(g: &Global) -> Result<(), Failure> {
    let s = load_scheme(g)?;
    let pts = load_points(g, s.d())?;
    let tol = g.tol.unwrap_or(DEFAULT_TOL);
    let search = spd_witness_search(&s, &pts, tol)?;
    let mut csv = String::from("point,re,im\n");
    for (i, z) in search.witness.iter().flatten().enumerate() {
        let _ = writeln!(csv, "{i},{:e},{:e}", z.re, z.im);
    }
    let mut cfg = scheme_config(g, &s, pts.len());
    cfg.insert("tol".into(), json!(tol));
    let failed = search.witness.is_none();
    finish(g, Report { command: "witness", config: cfg, result: search, csv: Some(csv), failed })
}

fn certificate_csv(c: &BoundCertificate) -> String {
    let header = match c.bound_name {
        spherekern::spd_analysis::BoundName::PtildeQuarterPower => "theta,empirical_c",
        spherekern::spd_analysis::BoundName::HarmonicProduct => "d_xi,empirical_d",
        _ => "degree,empirical_c",
    };
    let mut out = format!("{header}\n");
    for (x, y) in &c.profile {
        let _ = writeln!(out, "{x},{y:e}");
    }
    out
}

fn sibling(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn certify(g: &Global, a: &CertifyArgs) -> Result<(), Failure> {
    let mut cfg = config(g, a);
    let cert = match a.which {
        Bound::Lohofer => {
            let grid = LohoferGrid { m_max: a.degree_max.unwrap_or(60), ..LohoferGrid::default() };
            cfg.insert("grid".into(), json!(grid));
            certify_lohofer(&grid)?
        }
        Bound::Haagerup => {
            let grid = HaagerupGrid { n_max: a.degree_max.unwrap_or(100), ..HaagerupGrid::default() };
            cfg.insert("grid".into(), json!(grid));
            certify_haagerup(&grid)?
        }
        Bound::Ptilde => {
            let j = a.j.unwrap_or(3);
            let grid = PtildeGrid { l_max: a.degree_max.unwrap_or(40), ..PtildeGrid::default() };
            cfg.insert("j".into(), json!(j));
            cfg.insert("grid".into(), json!(grid));
            certify_ptilde(j, &grid)?
        }
        Bound::HarmonicProduct => {
            let d = g.d.unwrap_or(4);
            let j = a.j.unwrap_or(2);
            if d < 3 || j == 0 || j + 2 > d {
                return input(format!("need 1 <= j <= d-2, got d = {d}, j = {j}"));
            }
            let grid = HarmonicProductGrid::default_for(d, j, g.k_max.unwrap_or(12));
            cfg.insert("d".into(), json!(d));
            cfg.insert("j".into(), json!(j));
            cfg.insert("k_max".into(), json!(grid.k_max));
            certify_harmonic_product(j, d, &grid)?
        }
        Bound::Rates => return certify_rates(g, a, cfg),
    };
    let csv = certificate_csv(&cert);
    let failed = !cert.passed();
    finish(g, Report { command: "certify", config: cfg, result: cert, csv: Some(csv), failed })
}

fn certify_rates(g: &Global, a: &CertifyArgs, mut cfg: Map<String, Value>) -> Result<(), Failure> {
    let s = load_scheme(g)?;
    let Some(j) = a.j else {
        return input("certify rates needs --j");
    };
    let check = corollary_rate_check(&s, j)?;
    let even_path = sibling(&a.csv_prefix, "_even.csv");
    let odd_path = sibling(&a.csv_prefix, "_odd.csv");
    for (path, seq) in [(&even_path, &check.even), (&odd_path, &check.odd)] {
        write_output(&seq.to_csv(), Some(path))?;
    }
    cfg.insert("d".into(), json!(s.d()));
    cfg.insert("k_max".into(), json!(s.k_max()));
    let mut csv = String::from("parity,degree,value\n");
    for (tag, seq) in [("even", &check.even), ("odd", &check.odd)] {
        for (k, v) in seq.degrees.iter().zip(&seq.values) {
            let _ = writeln!(csv, "{tag},{k},{v:e}");
        }
    }
    let failed = !check.consistent_with_sufficiency;
    let result = json!({ "check": check, "even_csv": even_path, "odd_csv": odd_path });
    finish(g, Report { command: "certify", config: cfg, result, csv: Some(csv), failed })
}

pub fn rates(g: &Global, a: &RatesArgs) -> Result<(), Failure> {
    let mut cfg = config(g, a);
    match a.kind {
        RateKind::Asympt => {
            let s = load_scheme(g)?;
            let m = manifold(a.family, s.d())?;
            let pts = if a.point.is_empty() {
                load_points(g, s.d())?
            } else {
                a.point.iter().map(|p| parse_point_spec(p)).collect::<Result<Vec<_>, _>>()?
            };
            let [p, q, ..] = pts.as_slice() else {
                return input("rates asympt needs two points (--point twice, or a point file)");
            };
            let seq = asympt_ratio_sequence(&s, &m, p, q)?;
            cfg.insert("d".into(), json!(s.d()));
            cfg.insert("k_max".into(), json!(s.k_max()));
            let csv = seq.to_csv();
            finish(g, Report { command: "rates", config: cfg, result: seq, csv: Some(csv), failed: false })
        }
        RateKind::Jacobi => {
            let params = match (a.alpha, a.beta) {
                (Some(al), Some(be)) => JacobiParams::new(al, be)?,
                (None, None) => manifold(a.family, require_d(g)?)?.jacobi_params(),
                _ => return input("give both --alpha and --beta, or neither (then --family and --d)"),
            };
            let k_max = g.k_max.unwrap_or(200);
            let seq = jacobi_ratio_sequence(params, k_max)?;
            let trend = trend_to_zero(&seq.values, TrendOptions::default());
            cfg.insert("k_max".into(), json!(k_max));
            cfg.insert("params".into(), json!(params));
            let csv = seq.to_csv();
            let result = json!({ "sequence": seq, "trend": trend });
            finish(g, Report { command: "rates", config: cfg, result, csv: Some(csv), failed: false })
        }
        RateKind::Weighted => {
            let s = load_scheme(g)?;
            let Some(j) = a.j else {
                return input("rates weighted needs --j");
            };
            let w = weighted_complement_sum(&s, j)?;
            let mut csv = String::from("parity,degree,value,coarse_bound\n");
            for (tag, seq, bound) in [("even", &w.even, &w.even_bound), ("odd", &w.odd, &w.odd_bound)] {
                for ((k, v), b) in seq.degrees.iter().zip(&seq.values).zip(&bound.values) {
                    let _ = writeln!(csv, "{tag},{k},{v:e},{b:e}");
                }
            }
            cfg.insert("d".into(), json!(s.d()));
            cfg.insert("k_max".into(), json!(s.k_max()));
            finish(g, Report { command: "rates", config: cfg, result: w, csv: Some(csv), failed: false })
        }
        RateKind::Isotropic => {
            let s = load_scheme(g)?;
            let m = manifold(a.family, s.d())?;
            let sets = DegreeSets::from_scheme(&s);
            let verdict = isotropic_sufficiency(&sets, &m)?;
            cfg.insert("d".into(), json!(m.d));
            cfg.insert("k_max".into(), json!(s.k_max()));
            let label = serde_json::to_value(verdict).unwrap_or(Value::Null);
            let csv = format!("verdict\n{}\n", label.as_str().unwrap_or_default());
            let failed = verdict != SufficiencyVerdict::SufficientConditionMet;
            let result = json!({ "degree_sets": sets, "verdict": verdict });
            finish(g, Report { command: "rates", config: cfg, result, csv: Some(csv), failed })
        }
    }
}
