use std::fs;
use std::io::BufReader;

use malab::grid::{check_theorem1, ma_density, psh_violation_count, GridFunction};
use malab::hermitian::{garding_gap, minkowski_gap, HermitianMatrix};
use malab::measure::{
    canonical_approximation, domination_check, weak_star_bound, weak_star_gap, Atom, BoxDomain, Cube, Density,
    DiscreteMeasure, DominationReport, DominationVariant, TestFunction,
};
use malab::rational::{int, render_exact, to_f64};
use malab::toric::{
    counterexample_report, mixed_dirac_mass, polarization_terms, reduced_mass, Normalization, ToricFunction, Verdict,
};
use malab::{ExactMeasure, Rational};
use num_complex::Complex;
use num_traits::{Pow, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Provenance, Report, Status, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(malab::Error),
    Io(String, std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
        }
    }
}

impl From<malab::Error> for CliError {
    fn from(e: malab::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &str) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(path.to_string(), e))
}

/// How the second matrix of each pair is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PairMode {
    Independent,
    /// `B = A`; every gap is zero up to round-off.
    Equal,
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> CliResult<HermitianMatrix<f64>> {
    let m: Vec<Complex<f64>> = (0..n * n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Ok(HermitianMatrix::gram(n, &m)?)
}

pub fn verify_matrix(count: usize, n: usize, seed: u64, tol: f64, pairs: PairMode) -> CliResult<Report> {
    if !(1..=8).contains(&n) {
        return Err(CliError::Usage(format!("n must be between 1 and 8, got {n}")));
    }
    let mut report = Report::new("verify-matrix");
    report.input("count", count);
    report.input("n", n);
    report.input("seed", seed);
    report.input("tol", tol);
    report.input("pairs", format!("{pairs:?}").to_lowercase());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut garding_min = vec![f64::INFINITY; n.saturating_sub(1)];
    let mut garding_bad = vec![0usize; n.saturating_sub(1)];
    let mut mink_min = f64::INFINITY;
    let mut mink_bad = 0;
    for _ in 0..count {
        let a = random_psd(&mut rng, n)?;
        let b = match pairs {
            PairMode::Independent => random_psd(&mut rng, n)?,
            PairMode::Equal => a.clone(),
        };
        for k in 1..n {
            let gap = garding_gap(&a, &b, k)?;
            garding_min[k - 1] = garding_min[k - 1].min(gap);
            garding_bad[k - 1] += usize::from(gap < -tol);
        }
        let gap = minkowski_gap(&a, &b)?;
        mink_min = mink_min.min(gap);
        mink_bad += usize::from(gap < -tol);
    }
    report.count("pairs", count, Provenance::Exact);
    for k in 1..n {
        report.real(
            format!("garding_min_gap[k={k}]"),
            garding_min[k - 1],
            Provenance::FloatingPoint,
        );
        report.count(
            format!("garding_violations[k={k}]"),
            garding_bad[k - 1],
            Provenance::FloatingPoint,
        );
    }
    report.real("minkowski_min_gap", mink_min, Provenance::FloatingPoint);
    report.count("minkowski_violations", mink_bad, Provenance::FloatingPoint);
    let garding_ok = garding_bad.iter().all(|&c| c == 0);
    report.verdict("garding", Status::from_holds(garding_ok));
    report.verdict("minkowski", Status::from_holds(mink_bad == 0));
    report.set_status(Status::from_holds(garding_ok && mink_bad == 0));
    Ok(report)
}

fn read_grid(path: &str, report: &mut Report, key: &str) -> CliResult<GridFunction<f64>> {
    let bytes = read(path)?;
    report.input_file(key, path, &bytes);
    Ok(GridFunction::read_from(BufReader::new(bytes.as_slice()))?)
}

/// `tol` defaults to `10h²`.
pub fn grid_check(u_path: &str, v_path: &str, k: usize, tol: Option<f64>) -> CliResult<Report> {
    let mut report = Report::new("grid-check");
    let u = read_grid(u_path, &mut report, "u")?;
    let v = read_grid(v_path, &mut report, "v")?;
    let h = u.spacing();
    let tol = tol.unwrap_or(10.0 * h * h);
    report.input("k", k);
    report.input("tol", tol);
    if k > u.complex_dim() {
        return Err(CliError::Usage(format!("k must be at most n = {}", u.complex_dim())));
    }

    let psh_u = psh_violation_count(&u, tol);
    let psh_v = psh_violation_count(&v, tol);
    let f = ma_density(&u)?;
    let g = ma_density(&v)?;
    let r = check_theorem1(&u, &v, &f, &g, k, tol)?;
    report.real("spacing", h, Provenance::FdGrid);
    report.count("interior_nodes", r.mixed_gaps.len(), Provenance::FdGrid);
    report.count("psh_violations_u", psh_u, Provenance::FdGrid);
    report.count("psh_violations_v", psh_v, Provenance::FdGrid);
    report.real("min_mixed_gap", r.min_mixed_gap, Provenance::FdGrid);
    report.count("mixed_violations", r.mixed_violations, Provenance::FdGrid);
    report.real("min_minkowski_gap", r.min_minkowski_gap, Provenance::FdGrid);
    report.count("minkowski_violations", r.minkowski_violations, Provenance::FdGrid);

    let status = if psh_u > 0 || psh_v > 0 || !r.hypotheses_hold() {
        Status::HypothesisFailed
    } else {
        Status::from_holds(r.inequalities_hold())
    };
    report.verdict("mixed", Status::from_holds(r.mixed_violations == 0));
    report.verdict("minkowski", Status::from_holds(r.minkowski_violations == 0));
    if status == Status::HypothesisFailed {
        report.note("an input is not plurisubharmonic at some node; the inequalities are not expected to hold");
    }
    report.set_status(status);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ToricMode {
    Mass,
    Mixed,
}

fn subset_name(subset: &[usize]) -> String {
    subset
        .iter()
        .map(|i| format!("u{}", i + 1))
        .collect::<Vec<_>>()
        .join("+")
}

pub fn toric(paths: &[String], mode: ToricMode, normalization: Normalization) -> CliResult<Report> {
    let mut report = Report::new("toric");
    report.input("mode", format!("{mode:?}").to_lowercase());
    let mut funcs = Vec::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let bytes = read(p)?;
        report.input_file(&format!("u{}", i + 1), p, &bytes);
        funcs.push(ToricFunction::read_from(BufReader::new(bytes.as_slice()))?);
    }
    report.normalization(normalization);
    let Some(first) = funcs.first() else {
        return Err(CliError::Usage("at least one slope file is required".into()));
    };
    let n = first.complex_dim();
    match mode {
        ToricMode::Mass => {
            for (i, u) in funcs.iter().enumerate() {
                let m = reduced_mass(u);
                let value = normalization.factor(u.complex_dim()) * to_f64(&m);
                report.real(format!("mass[u{}]", i + 1), value, Provenance::Exact);
                report.exact(format!("reduced_mass[u{}]", i + 1), m);
            }
            report.set_status(Status::Holds);
        }
        ToricMode::Mixed => {
            if funcs.len() != n {
                return Err(CliError::Usage(format!(
                    "mixed mode needs {n} slope files on ℂ^{n}, got {}",
                    funcs.len()
                )));
            }
            let refs: Vec<&ToricFunction> = funcs.iter().collect();
            for t in polarization_terms(&refs)? {
                let sign = if t.sign > 0 { "+" } else { "-" };
                report.exact(
                    format!("polarization[{}] sign={sign}", subset_name(&t.subset)),
                    t.reduced,
                );
            }
            let mixed = mixed_dirac_mass(&refs, normalization)?;
            report.exact("reduced_mixed_mass", mixed.reduced.clone());
            report.real("mixed_mass", mixed.value, Provenance::Exact);
            // m_mixed ≥ (Π m_i)^{1/n}, compared after raising to the n-th power.
            let product = funcs.iter().fold(int(1), |acc, u| acc * reduced_mass(u));
            let lhs: Rational = Pow::pow(&mixed.reduced, n as u32);
            report.exact("mixed_mass_power_n", lhs.clone());
            report.exact("product_of_masses", product.clone());
            let status = Status::from_holds(!mixed.reduced.is_negative() && lhs >= product);
            report.verdict("mixed_geometric_mean", status);
            report.set_status(status);
        }
    }
    Ok(report)
}

fn parse_level_list(levels: &[usize]) -> String {
    levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

fn domination_lines(report: &mut Report, label: &str, r: &DominationReport) {
    for l in &r.levels {
        let worst = l.worst.as_ref().map_or(0.0, |w| w.deficit);
        report.real(
            format!("{label}_worst_deficit[level={}]", l.level),
            worst,
            Provenance::FloatingPoint,
        );
        report.count(
            format!("{label}_violating_cells[level={}]", l.level),
            l.violations.len(),
            Provenance::FloatingPoint,
        );
        report.verdict(
            format!("{label}_domination[level={}]", l.level),
            Status::from_holds(l.violations.is_empty()),
        );
    }
}

pub fn counterexample(k: &Rational, levels: &[usize], tol: f64, normalization: Normalization) -> CliResult<Report> {
    let mut report = Report::new("counterexample");
    report.input("k", render_exact(k));
    report.input("levels", parse_level_list(levels));
    report.input("tol", tol);
    report.normalization(normalization);
    let r = counterexample_report(k)?;

    let names = ["m_u", "m_v", "m_sum", "m_mixed"];
    let masses = [&r.m_u, &r.m_v, &r.m_sum, &r.m_mixed];
    let normalized = r.normalized(normalization);
    for ((name, m), x) in names.iter().zip(masses).zip(normalized) {
        report.exact(format!("reduced_{name}"), m.clone());
        report.real(format!("normalized_{name}"), x, Provenance::Exact);
    }
    match &r.mixed.rhs_exact {
        Some(q) => report.exact("mixed_rhs", q.clone()),
        None => report.real("mixed_rhs", r.mixed.rhs_approx, Provenance::Exact),
    }
    match &r.sum.rhs_exact {
        Some(q) => report.exact("minkowski_rhs", q.clone()),
        None => report.real("minkowski_rhs", r.sum.rhs_approx, Provenance::Exact),
    }
    if let Some(matches) = r.closed_forms_match() {
        report.verdict("closed_forms", if matches { "MATCH" } else { "MISMATCH" });
    }
    report.verdict("mixed_inequality", r.mixed.verdict);
    report.verdict("minkowski_inequality", r.sum.verdict);

    // Point masses at the origin of ℂ² ≅ ℝ⁴ against μ = δ₀, f = mass of u, g = mass of v.
    let domain = BoxDomain::new(vec![int(-1); 4], vec![int(1); 4])?;
    let cube = Cube::enclosing(&domain);
    let origin = vec![int(0); 4];
    let mu: ExactMeasure = DiscreteMeasure::dirac(domain.clone(), origin.clone())?;
    let f = Density::atomic(vec![normalized[0]]);
    let g = Density::atomic(vec![normalized[1]]);
    let point = |w: f64| -> CliResult<DiscreteMeasure<f64>> {
        let d = BoxDomain::new(vec![-1.0; 4], vec![1.0; 4])?;
        let c = Cube::new(cube.lo().iter().map(to_f64).collect(), to_f64(cube.side()))?;
        Ok(DiscreteMeasure::atomic(
            d,
            c,
            vec![Atom {
                location: vec![0.0; 4],
                weight: w,
            }],
        )?)
    };
    let mut pluripolar_violation = false;
    for (label, mass, variant) in [
        ("mixed", normalized[3], DominationVariant::GeometricMean),
        ("minkowski", normalized[2], DominationVariant::Minkowski),
    ] {
        if mass > 0.0 {
            let nu = point(mass)?;
            let d = domination_check(&nu, &f, &g, &mu, 1, 2, levels, tol, variant)?;
            domination_lines(&mut report, label, &d);
            pluripolar_violation |= !d.holds;
        }
    }
    if pluripolar_violation {
        report.note("all violating mass sits on the origin, a pluripolar set");
    }
    if let Some(note) = &r.note {
        report.note(note.clone());
    }

    let violated = r.mixed.verdict == Verdict::Violated || r.sum.verdict == Verdict::Violated || pluripolar_violation;
    report.set_status(Status::from_holds(!violated));

    let mut table = Table {
        header: [
            "quantity",
            "exact",
            "decimal",
            "normalized",
            "closed_form",
            "provenance",
        ]
        .map(String::from)
        .to_vec(),
        rows: Vec::new(),
    };
    for (i, name) in names.iter().enumerate() {
        let closed = r.closed_forms.as_ref().map_or(String::new(), |c| render_exact(&c[i]));
        table.rows.push(vec![
            name.to_string(),
            render_exact(masses[i]),
            to_f64(masses[i]).to_string(),
            normalized[i].to_string(),
            closed,
            "exact".into(),
        ]);
    }
    report.table(table);
    Ok(report)
}

pub fn approx(path: &str, k: usize, phi_name: &str, out: Option<&str>) -> CliResult<Report> {
    let mut report = Report::new("approx");
    let bytes = read(path)?;
    report.input_file("measure", path, &bytes);
    report.input("k", k);
    report.input("phi", phi_name);
    let mu = ExactMeasure::read_from(BufReader::new(bytes.as_slice()))?;
    let phi = TestFunction::named(phi_name, mu.dim())?;
    let nu = canonical_approximation(&mu, k)?;
    if let Some(out) = out {
        let mut buf = Vec::new();
        nu.write_to(&mut buf)?;
        fs::write(out, buf).map_err(|e| CliError::Io(out.to_string(), e))?;
        report.input("output", out);
    }

    report.exact("cube_side", mu.cube().side().clone());
    report.exact("mass", mu.total_mass());
    report.exact("approximant_mass", nu.total_mass());
    if let Some(cells) = nu.cells() {
        for (&cell, rho) in &cells.densities {
            report.exact(format!("density[{cell}]"), rho.clone());
        }
    }
    let lo: Vec<f64> = mu.domain().lo().iter().map(to_f64).collect();
    let hi: Vec<f64> = mu.domain().hi().iter().map(to_f64).collect();
    let gap = weak_star_gap(&mu, &nu, |x| phi.eval(x));
    let bound = weak_star_bound(&mu, k, phi.lipschitz_on(&lo, &hi));
    report.real("weak_star_gap", gap, Provenance::QuadratureOracle);
    report.real("weak_star_bound", bound, Provenance::QuadratureOracle);

    let conserved = nu.total_mass() == mu.total_mass();
    report.verdict("mass_conservation", Status::from_holds(conserved));
    report.verdict("weak_star_bound", Status::from_holds(gap <= bound));
    report.set_status(Status::from_holds(conserved && gap <= bound));
    Ok(report)
}
