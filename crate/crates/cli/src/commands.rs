use kreinlab::contraction::{
    classical_hamilton_residual, classical_limit_scan, coherent_separation_scan, contracted_gram,
    galilean_generator_limit, galilean_overlap_scan, GalileanLabels,
};
use kreinlab::fock::{krein_inner, FockIndex, KreinVector, TruncatedBasis};
use kreinlab::minkowski::{FourVector, MinkowskiMetric};
use kreinlab::operators::{
    boost_exponential, coherent_overlap, coherent_state, expectation, fock_overlap, guarded_spectrum,
    ladder_ops, oscillator_square, position_momentum, pseudo_unitarity_residual, verify_algebra,
    weyl_displacement_guarded, GuardedSubspace, PhasePoint,
};
use kreinlab::quadrature::{
    krein_inner_table, krein_integral_inner, log_density, rho_integral_demo, unitary_integral_inner,
    vacuum_wavefunction, QuadratureGrid, UnitaryVerdict,
};
use kreinlab::symbol::{
    free_hamiltonian, generator_table_residuals, heisenberg_flow, klein_gordon_check, left_right_commutator,
    plane_wave, schrodinger_flow, vl_shift, Monomial, Poly, Symbol,
};
use kreinlab::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{ContractArgs, DivergenceArgs, EvolveArgs, OverlapArgs, Params, RunConfig, VerifyArgs};
use crate::report::{num, Check, Report, Table};

/// Guard used for the pseudo-unitarity block.
const UNITARITY_GUARD: usize = 4;
/// Coherent overlaps by quadrature carry the Gauss–Hermite error.
const QUADRATURE_OVERLAP_TOL: f64 = 1e-6;
const SPECTRUM_IMAG_TOL: f64 = 1e-10;

fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn n_max(cfg: &RunConfig) -> usize {
    cfg.n_max.expect("command has an N_max default")
}

fn grid(cfg: &RunConfig) -> Result<QuadratureGrid> {
    QuadratureGrid::new(cfg.nodes.expect("command has a node default"))
}

fn guarded(cfg: &RunConfig, basis: &TruncatedBasis, guard: usize) -> GuardedSubspace {
    if cfg.respect_guard {
        GuardedSubspace::new(basis, guard)
    } else {
        GuardedSubspace::unguarded(basis)
    }
}

fn label(n: &FockIndex) -> String {
    format!("{} {} {} {}", n.0[0], n.0[1], n.0[2], n.0[3])
}

fn four(v: FourVector) -> [f64; 4] {
    v.0
}

/// Integer-coefficient polynomial of degree ≤ 3 with up to four terms.
fn random_polynomial(rng: &mut ChaCha8Rng) -> Symbol {
    let mut p = Poly::zero();
    for _ in 0..rng.random_range(1..=4) {
        let mut m: Monomial = [0; 8];
        for _ in 0..rng.random_range(0..=3) {
            m[rng.random_range(0..8)] += 1;
        }
        let c = rng.random_range(-3i32..=3) as f64;
        p.add_term(m, Complex64::new(c, 0.0));
    }
    Symbol::from_poly(p)
}

fn random_four(rng: &mut ChaCha8Rng, bound: f64) -> FourVector {
    FourVector(std::array::from_fn(|_| rng.random_range(-bound..=bound)))
}

pub fn cmd_verify_algebra(cfg: &RunConfig) -> Result<Report> {
    let Params::Verify(args) = &cfg.parameters else { unreachable!("verify parameters") };
    let VerifyArgs { unitarity_samples, commutant_samples } = *args;
    let mut r = Report::new(cfg);
    let basis = TruncatedBasis::new(n_max(cfg));
    let algebra = verify_algebra(&basis, cfg.respect_guard);
    let mut table = Table::new("identities", &["identity", "guard", "max_residual"]);
    for e in &algebra.entries {
        r.check(Check::at_most(
            &format!("operator:{}", e.identity),
            format!("truncated-matrix identity on levels <= N_max - {}", e.guard),
            e.max_residual,
            cfg.tol,
        ));
        table.push(vec![e.identity.clone(), e.guard.to_string(), num(e.max_residual)]);
    }

    let gt = generator_table_residuals();
    for (tag, what, v) in [
        ("generator-table:left", "[G_a*, G_b*] against the structure constants", gt.left_actions),
        ("generator-table:tilde", "[G~_a, G~_b] with G~_theta = 0", gt.tilde_actions),
        ("generator-table:mixed", "[G_a, G~_b] with G_theta = 1", gt.mixed),
        ("generator-table:multiplicative", "[G_a, G_b] = 0", gt.multiplicative),
    ] {
        r.check(Check::at_most(tag, what, v, cfg.tol));
        table.push(vec![tag.to_string(), "0".into(), num(v)]);
    }

    let mut rng = rng(cfg);
    let mut commutant = 0.0f64;
    for _ in 0..commutant_samples {
        let (a, b) = (random_polynomial(&mut rng), random_polynomial(&mut rng));
        commutant = commutant.max(left_right_commutator(&a, &b)?.max_abs_coeff());
    }
    r.check(Check::at_most(
        "symbol:left-right-commute",
        format!("[a*, *b] = 0 on {commutant_samples} seeded random polynomial pairs"),
        commutant,
        cfg.tol,
    ));
    table.push(vec!["symbol:left-right-commute".into(), "0".into(), num(commutant)]);

    let sub = guarded(cfg, &basis, UNITARITY_GUARD);
    let mut samples = Vec::new();
    if !sub.is_empty() {
        let guard = cfg.respect_guard.then_some(UNITARITY_GUARD);
        let mut worst = 0.0f64;
        for _ in 0..unitarity_samples {
            let axis = rng.random_range(1..=3usize);
            let rapidity = rng.random_range(-0.2..=0.2);
            let boost = boost_exponential(&basis, axis, rapidity, guard)?;
            let rb = pseudo_unitarity_residual(&boost, &sub)?;
            // Components bounded by 1/4 keep the Euclidean norms below 1/2.
            let (p, x) = (random_four(&mut rng, 0.25), random_four(&mut rng, 0.25));
            let v = weyl_displacement_guarded(&basis, p, x, guard.unwrap_or(0))?;
            let rv = pseudo_unitarity_residual(&v, &sub)?;
            worst = worst.max(rb).max(rv);
            samples.push(json!({"axis": axis, "rapidity": rapidity, "boost_residual": rb,
                                "p": four(p), "x": four(x), "displacement_residual": rv}));
        }
        r.check(Check::at_most(
            "operator:pseudo-unitarity",
            format!("V^(dagger eta) V = 1 for {unitarity_samples} seeded boosts and displacements"),
            worst,
            1e-8f64.max(cfg.tol),
        ));
        table.push(vec!["operator:pseudo-unitarity".into(), UNITARITY_GUARD.to_string(), num(worst)]);
    }
    r.insert("n_max", basis.n_max());
    r.insert("dimension", basis.len());
    r.insert("identities", &algebra.entries);
    r.insert("generator_table", &gt);
    r.insert("pseudo_unitarity", samples);
    r.tables.push(table);
    Ok(r)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new(cfg);
    let basis = TruncatedBasis::new(n_max(cfg));
    let sub = guarded(cfg, &basis, 2);
    let eig = guarded_spectrum(&oscillator_square(&basis), &sub)?;
    let top = sub.top_level().unwrap_or(0);
    let levels = if sub.is_empty() { 0 } else { top + 1 };
    let mut found = vec![0usize; levels];
    let mut deviation = vec![0.0f64; levels];
    let mut imag = vec![0.0f64; levels];
    for z in &eig {
        // Nearest predicted value 4(n + 2).
        let n = ((z.re / 4.0 - 2.0).round().max(0.0) as usize).min(levels.saturating_sub(1));
        found[n] += 1;
        deviation[n] = deviation[n].max((z.re - 4.0 * (n as f64 + 2.0)).abs());
        imag[n] = imag[n].max(z.im.abs());
    }
    let mut table = Table::new(
        "levels",
        &["level", "expected", "expected_multiplicity", "found_multiplicity", "max_deviation", "max_imag"],
    );
    let mut mismatched = 0usize;
    for n in 0..levels {
        let expected = kreinlab::fock::level_size(n);
        mismatched += usize::from(found[n] != expected);
        table.push(vec![
            n.to_string(),
            num(4.0 * (n as f64 + 2.0)),
            expected.to_string(),
            found[n].to_string(),
            num(deviation[n]),
            num(imag[n]),
        ]);
    }
    let max_dev = deviation.iter().fold(0.0f64, |m, &v| m.max(v));
    let max_imag = imag.iter().fold(0.0f64, |m, &v| m.max(v));
    r.check(Check::at_most("spectrum:levels", "eigenvalues equal 4(n+2)", max_dev, cfg.tol));
    r.check(Check::at_most(
        "spectrum:multiplicity",
        "levels whose multiplicity differs from C(n+3,3)",
        mismatched as f64,
        0.0,
    ));
    r.check(Check::at_most("spectrum:real", "largest imaginary part", max_imag, SPECTRUM_IMAG_TOL));
    r.insert("n_max", basis.n_max());
    r.insert("guarded_dimension", sub.len());
    r.insert("eigenvalues", eig.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>());
    r.tables.push(table);
    Ok(r)
}

pub fn cmd_inner_table(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new(cfg);
    let basis = TruncatedBasis::new(n_max(cfg));
    let quad = krein_inner_table(&basis, &grid(cfg)?)?;
    let vectors: Vec<KreinVector<i64>> =
        basis.indices().iter().map(|n| KreinVector::basis_vector(&basis, *n, 1i64)).collect();
    let mut algebraic = Vec::with_capacity(basis.len());
    let mut table = Table::new("inner_products", &["m", "n", "algebraic", "quadrature_re", "quadrature_im"]);
    let (mut wrong, mut quad_dev) = (0usize, 0.0f64);
    for (i, m) in basis.indices().iter().enumerate() {
        let mut row = Vec::with_capacity(basis.len());
        for (j, n) in basis.indices().iter().enumerate() {
            let v = krein_inner(&vectors[i], &vectors[j])?;
            let expected = if i == j { m.krein_sign() } else { 0 };
            wrong += usize::from(v != expected);
            quad_dev = quad_dev.max((quad[i][j] - Complex64::new(expected as f64, 0.0)).norm());
            table.push(vec![label(m), label(n), v.to_string(), num(quad[i][j].re), num(quad[i][j].im)]);
            row.push(v);
        }
        algebraic.push(row);
    }
    r.check(Check::at_most(
        "krein:orthonormality",
        "algebraic entries differing from diag((-1)^n0), exact integers",
        wrong as f64,
        0.0,
    ));
    r.check(Check::at_most(
        "krein:quadrature",
        "integral inner products against diag((-1)^n0)",
        quad_dev,
        cfg.tol,
    ));
    r.insert("basis", basis.indices().iter().map(|n| n.0).collect::<Vec<_>>());
    r.insert("algebraic", algebraic);
    r.insert("quadrature", quad.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect::<Vec<Vec<_>>>());
    r.tables.push(table);
    Ok(r)
}

pub fn cmd_overlap(cfg: &RunConfig) -> Result<Report> {
    let Params::Overlap(OverlapArgs { pairs }) = cfg.parameters else { unreachable!("overlap parameters") };
    let mut r = Report::new(cfg);
    let basis = TruncatedBasis::new(n_max(cfg));
    let grid = grid(cfg)?;
    let ladder = ladder_ops(&basis);
    let (xo, po) = position_momentum(&basis);
    let sub = guarded(cfg, &basis, 1);
    let vacuum = vacuum_wavefunction();
    let mut rng = rng(cfg);
    let mut table = Table::new(
        "overlaps",
        &["pair", "closed_re", "closed_im", "fock_deviation", "quadrature_deviation", "eigen_residual", "expectation_residual"],
    );
    let (mut fock_dev, mut quad_dev, mut eigen, mut expect) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut labels = Vec::new();
    for k in 0..pairs {
        let a = PhasePoint::new(random_four(&mut rng, 0.5), random_four(&mut rng, 0.5));
        let b = PhasePoint::new(random_four(&mut rng, 0.5), random_four(&mut rng, 0.5));
        let closed = coherent_overlap(&a, &b);
        let fd = (fock_overlap(&basis, &a, &b) - closed).norm();
        let (phi_a, phi_b) = (vl_shift(&vacuum, a.p, a.x)?, vl_shift(&vacuum, b.p, b.x)?);
        let qd = (krein_integral_inner(&phi_b, &phi_a, &grid)? - closed).norm();

        let state = coherent_state(&basis, &a);
        let (mut er, mut xr) = (0.0f64, 0.0f64);
        for nu in 0..4 {
            let image = ladder.lower[nu].apply(&state)?;
            let diff: Vec<Complex64> = image
                .coefficients()
                .iter()
                .zip(state.coefficients())
                .map(|(l, c)| l - 2.0 * a.z(nu) * c)
                .collect();
            er = er.max(sub.vector_residual(&diff));
            let eta = MinkowskiMetric::sign(nu);
            xr = xr.max((expectation(&xo[nu], &state)? - 2.0 * eta * a.x[nu]).norm());
            xr = xr.max((expectation(&po[nu], &state)? - 2.0 * eta * a.p[nu]).norm());
        }
        fock_dev = fock_dev.max(fd);
        quad_dev = quad_dev.max(qd);
        eigen = eigen.max(er);
        expect = expect.max(xr);
        table.push(vec![k.to_string(), num(closed.re), num(closed.im), num(fd), num(qd), num(er), num(xr)]);
        labels.push(json!({"a": a, "b": b, "closed": [closed.re, closed.im]}));
    }
    r.check(Check::at_most("coherent:fock-sum", "truncated Fock sum against the closed form", fock_dev, cfg.tol));
    r.check(Check::at_most(
        "coherent:quadrature",
        "integral of the shifted vacua against the closed form",
        quad_dev,
        QUADRATURE_OVERLAP_TOL.max(cfg.tol),
    ));
    r.check(Check::at_most("coherent:eigenvector", "a^nu c = 2 z^nu c on levels < N_max", eigen, cfg.tol));
    r.check(Check::at_most("coherent:expectation", "<X_nu> = 2 x_nu and <P_nu> = 2 p_nu", expect, cfg.tol));
    r.insert("pairs", labels);
    r.tables.push(table);
    Ok(r)
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Report> {
    let Params::Evolve(EvolveArgs { mass, tau }) = cfg.parameters else { unreachable!("evolve parameters") };
    let mut r = Report::new(cfg);
    let g = free_hamiltonian(mass);
    let ratio = Complex64::new(tau / mass, 0.0);
    let (mut heis, mut symbols) = (0.0f64, Vec::new());
    for mu in 0..4 {
        let x = heisenberg_flow(&Symbol::x_lower(mu), &g, tau, 64)?;
        let p = heisenberg_flow(&Symbol::p_lower(mu), &g, tau, 64)?;
        let x_expected = Symbol::x_lower(mu).add(&Symbol::p_lower(mu).scale(ratio));
        heis = heis.max(x.sub(&x_expected).max_abs_coeff());
        heis = heis.max(p.sub(&Symbol::p_lower(mu)).max_abs_coeff());
        symbols.push(json!({"mu": mu, "x": x.to_string(), "p": p.to_string()}));
    }
    r.check(Check::at_most(
        "flow:hamilton",
        "x_mu(tau) = x_mu + (tau/m) p_mu and p_mu(tau) = p_mu",
        heis,
        cfg.tol,
    ));

    // On-shell wave vector with dyadic spatial part; k⁰ follows from the mass.
    let k1 = 0.75;
    let on_shell = FourVector::new((k1 * k1 + mass * mass / 4.0).sqrt(), k1, 0.0, 0.0);
    let kg = klein_gordon_check(on_shell, mass)?;
    r.check(Check::at_most("klein-gordon:residual", "G_tau* phi - lambda phi on shell", kg.residual, cfg.tol));
    r.check(Check::at_most(
        "klein-gordon:mass-shell",
        "eigenvalue against -m/2",
        (kg.eigenvalue + mass / 2.0).abs(),
        cfg.tol,
    ));

    // Dyadic components keep every coefficient exactly representable.
    let mut rng = rng(cfg);
    let off_shell = FourVector(std::array::from_fn(|_| rng.random_range(-16i32..=16) as f64 / 8.0));
    let kg_off = klein_gordon_check(off_shell, mass)?;
    r.check(Check::at_most("klein-gordon:off-shell-residual", "residual for a seeded off-shell k", kg_off.residual, cfg.tol));
    r.check(Check::at_most(
        "klein-gordon:eigenvalue",
        "eigenvalue against 2k.k/m off shell",
        (kg_off.eigenvalue - kg_off.predicted).abs(),
        cfg.tol,
    ));

    let phi = plane_wave(on_shell)?;
    let evolved = schrodinger_flow(&phi, &g, tau)?;
    let phase = Complex64::new(0.0, mass * tau / 4.0).exp();
    let sdev = evolved.sub(&phi.scale(phase)).max_abs_coeff();
    r.check(Check::at_most("flow:schrodinger-phase", "on-shell plane wave picks up exp(-m tau/(4i))", sdev, cfg.tol));

    r.insert("heisenberg", symbols);
    r.insert("x1", heisenberg_flow(&Symbol::x_lower(1), &g, tau, 64)?.to_string());
    r.insert("klein_gordon_on_shell", json!({"k": four(on_shell), "report": kg}));
    r.insert("klein_gordon_off_shell", json!({"k": four(off_shell), "report": kg_off}));
    r.insert("schrodinger_phase", [phase.re, phase.im]);
    Ok(r)
}

fn galilean_labels(t: f64, e: f64) -> GalileanLabels {
    GalileanLabels {
        p: [0.1, -0.2, 0.05],
        x: [0.3, 0.0, -0.1],
        t,
        e,
    }
}

/// α, β with enough mixed terms that every derivative order contributes.
fn cubic_pair() -> (Symbol, Symbol) {
    let (x0, x1, x2) = (Symbol::x_upper(0), Symbol::x_upper(1), Symbol::x_upper(2));
    let (p0, p1, p2) = (Symbol::p_upper(0), Symbol::p_upper(1), Symbol::p_upper(2));
    let alpha = x1.mul(&x1).mul(&p1).add(&x2.mul(&p0).mul(&x1));
    let beta = p1.mul(&p1).mul(&x1).add(&p2.mul(&x2).mul(&p0)).add(&x0.mul(&p0).mul(&p0));
    (alpha, beta)
}

pub fn cmd_contract(cfg: &RunConfig) -> Result<Report> {
    let Params::Contract(args) = &cfg.parameters else { unreachable!("contract parameters") };
    let ContractArgs { c_values, e_c_values, boost_c, k_values } = args;
    let mut r = Report::new(cfg);
    let origin = galilean_labels(0.0, 0.0);

    let dt = 0.3;
    let t_scan = galilean_overlap_scan(&origin, &galilean_labels(dt, 0.0), c_values)?;
    let slope = t_scan.log_magnitude_slope_c2.unwrap_or(f64::NAN);
    r.check(Check::at_most(
        "galilean:time-slope",
        "relative error of the log-magnitude slope in c^2 against dt^2/2",
        (slope / (dt * dt / 2.0) - 1.0).abs(),
        0.01,
    ));
    let e_scan = galilean_overlap_scan(&origin, &galilean_labels(0.0, 1.0), e_c_values)?;
    let exponent = e_scan.e_factor_exponent.unwrap_or(f64::NAN);
    r.check(Check::at_most(
        "galilean:energy-exponent",
        "relative error of the e-factor exponent against -2",
        (exponent / -2.0 - 1.0).abs(),
        0.05,
    ));

    let mut limits = Table::new(
        "generator_limit",
        &["axis", "c", "boost_residual", "tilde_residual", "commutator_residual", "hamilton_residual"],
    );
    let (mut worst_ratio, mut exact) = (0.0f64, 0.0f64);
    let mut ratios = Vec::new();
    for axis in 1..=3 {
        let a = galilean_generator_limit(*boost_c, axis)?;
        let b = galilean_generator_limit(2.0 * boost_c, axis)?;
        let ratio = a.boost_residual / b.boost_residual;
        worst_ratio = worst_ratio.max((ratio / 4.0 - 1.0).abs());
        ratios.push(ratio);
        for rep in [&a, &b] {
            exact = exact.max(rep.commutator_residual).max(rep.hamilton_residual);
            limits.push(vec![
                axis.to_string(),
                num(rep.c),
                num(rep.boost_residual),
                num(rep.tilde_residual),
                num(rep.commutator_residual),
                num(rep.hamilton_residual),
            ]);
        }
    }
    r.check(Check::at_most(
        "galilean:boost-rate",
        "relative error of the boost residual ratio against 4 when c doubles",
        worst_ratio,
        0.05,
    ));
    r.check(Check::at_most(
        "galilean:contracted-algebra",
        "contracted commutators and Hamilton equations",
        exact,
        cfg.tol,
    ));

    let (alpha, beta) = cubic_pair();
    let classical = classical_limit_scan(&alpha, &beta, k_values)?;
    let s1 = classical.star_slope.unwrap_or(f64::NAN);
    let s2 = classical.bracket_slope.unwrap_or(f64::NAN);
    r.check(Check::at_most("classical:star-slope", "relative error of the star deviation slope against -1", (s1 + 1.0).abs(), 0.02));
    r.check(Check::at_most(
        "classical:bracket-slope",
        "relative error of the bracket deviation slope against -2",
        (s2 / -2.0 - 1.0).abs(),
        0.02,
    ));
    let hamilton = classical_hamilton_residual(2.0, 1e-3)?;
    r.check(Check::at_most("classical:hamilton", "Poisson-bracket Hamilton equations", hamilton, cfg.tol));

    let gram = contracted_gram(n_max(cfg), &grid(cfg)?)?;
    let gram_dev = (gram.min_eigenvalue - 1.0).abs().max((gram.max_eigenvalue - 1.0).abs());
    r.check(Check::at_most(
        "galilean:positive-states",
        "n0 = 0 Gram matrix eigenvalues against 1",
        gram_dev,
        1e-8f64.max(cfg.tol),
    ));

    let a = PhasePoint::new(FourVector::new(0.0, 0.2, 0.0, 0.1), FourVector::new(0.0, 0.1, -0.3, 0.0));
    let b = PhasePoint::new(FourVector::new(0.0, -0.1, 0.2, 0.0), FourVector::new(0.0, 0.4, 0.1, 0.2));
    let separation = coherent_separation_scan(&a, &b, k_values)?;

    let mut overlap = Table::new("galilean_overlap", &["scan", "c", "log_magnitude", "e_factor", "t_factor"]);
    for (name, scan) in [("time", &t_scan), ("energy", &e_scan)] {
        for row in &scan.rows {
            overlap.push(vec![name.into(), num(row.c), num(row.log_magnitude), num(row.e_factor), num(row.t_factor)]);
        }
    }
    let mut cl = Table::new("classical", &["kx", "kp", "star_deviation", "bracket_deviation"]);
    for row in &classical.rows {
        cl.push(vec![num(row.kx), num(row.kp), num(row.star_deviation), num(row.bracket_deviation)]);
    }
    let mut sep = Table::new("separation", &["kx", "kp", "magnitude", "log_magnitude", "growing"]);
    for row in &separation {
        sep.push(vec![num(row.kx), num(row.kp), num(row.magnitude), num(row.log_magnitude), row.growing.to_string()]);
    }
    r.insert("time_scan", &t_scan);
    r.insert("energy_scan", &e_scan);
    r.insert("boost_ratios", ratios);
    r.insert("classical", &classical);
    r.insert("gram", &gram);
    r.insert("separation", &separation);
    r.tables.extend([overlap, limits, cl, sep]);
    Ok(r)
}

/// exp(−Σz²/2): square-integrable with the flat measure, unlike the vacuum.
fn euclidean_gaussian() -> Result<Symbol> {
    let q = (0..8).fold(Poly::zero(), |acc, i| acc.add(&Poly::var(i).mul(&Poly::var(i))));
    Symbol::exp_of(&q.scale(Complex64::new(-0.5, 0.0)))
}

pub fn cmd_divergence(cfg: &RunConfig) -> Result<Report> {
    let Params::Divergence(DivergenceArgs { rho_values, t_values }) = &cfg.parameters else {
        unreachable!("divergence parameters")
    };
    let mut r = Report::new(cfg);
    let mut series = Table::new("rho_integral", &["rho_cut", "integral", "integral_times_gap"]);
    let mut rows = Vec::new();
    for &rho in rho_values {
        let v = rho_integral_demo(rho)?;
        series.push(vec![num(rho), num(v), num(v * (1.0 - rho))]);
        rows.push(json!({"rho_cut": rho, "integral": v}));
    }
    let i09 = rho_integral_demo(0.9)?;
    r.check(Check::at_most("rho-integral:value", "|I(0.9) - 6.2090|", (i09 - 6.2090).abs(), cfg.tol));
    let near = 1.0 - 1e-4;
    let scaled = rho_integral_demo(near)? * (1.0 - near);
    r.check(Check::at_most(
        "rho-integral:pole",
        "relative error of I(rho)(1 - rho) against 1/2 at rho = 1 - 1e-4",
        (scaled / 0.5 - 1.0).abs(),
        0.01,
    ));

    let grid = grid(cfg)?;
    let vacuum = vacuum_wavefunction();
    let flat = unitary_integral_inner(&vacuum, &vacuum, &grid)?;
    let min_growth = flat.growth.iter().fold(f64::INFINITY, |m, &g| m.min(g));
    r.check(Check::at_least("unitary:growth", "smallest growth factor between cutoffs", min_growth, 10.0));
    let divergent = matches!(flat.verdict, UnitaryVerdict::Divergent { .. });
    r.check(Check::at_least("unitary:verdict", "vacuum flagged divergent (1 = yes)", f64::from(u8::from(divergent)), 1.0));
    let gaussian = unitary_integral_inner(&euclidean_gaussian()?, &euclidean_gaussian()?, &grid)?;
    let finite = gaussian.value().map(|v| (v - 1.0).norm()).unwrap_or(f64::INFINITY);
    r.check(Check::at_most("unitary:finite-control", "Euclidean Gaussian norm against 1", finite, 1e-10));
    let mut partials = Table::new("flat_measure", &["state", "cutoff", "partial_re", "partial_im", "growth"]);
    for (name, rep) in [("vacuum", &flat), ("euclidean_gaussian", &gaussian)] {
        for (k, (cut, v)) in rep.cutoffs.iter().zip(&rep.partials).enumerate() {
            let g = if k == 0 { String::new() } else { num(rep.growth[k - 1]) };
            partials.push(vec![name.into(), num(*cut), num(v.re), num(v.im), g]);
        }
    }

    let mut density = Table::new("log_density", &["t", "log_density", "expected"]);
    let mut worst = 0.0f64;
    for &t in t_values {
        let mut z = [0.0; 8];
        z[4] = t;
        let v = log_density(&vacuum, &z);
        worst = worst.max((v - t * t).abs() / (t * t).max(1.0));
        density.push(vec![num(t), num(v), num(t * t)]);
    }
    r.check(Check::at_most(
        "unitary:log-density",
        "ln|phi_0|^2 grows as t^2 along the time axis (relative)",
        worst,
        1e-12,
    ));
    r.insert("rho_series", rows);
    r.insert("flat_vacuum", &flat);
    r.insert("flat_gaussian", &gaussian);
    r.tables.extend([series, partials, density]);
    Ok(r)
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command.as_str() {
        "verify-algebra" => cmd_verify_algebra(cfg),
        "spectrum" => cmd_spectrum(cfg),
        "inner-table" => cmd_inner_table(cfg),
        "overlap" => cmd_overlap(cfg),
        "evolve" => cmd_evolve(cfg),
        "contract" => cmd_contract(cfg),
        "divergence" => cmd_divergence(cfg),
        other => unreachable!("unknown command {other}"),
    }
}
