use dirac_forge_core::{
    build_generators, check_integrable_direct, check_isotropy, check_rank, check_tau_complementarity, cross_check,
    is_orthogonal, pde_residual, recover_automorphism, AutMatrix, Backend, Chart, Error, Expr, Recovered,
};

fn chart(n: usize) -> Chart {
    Chart::new(n).unwrap()
}

fn mat(rows: &[&[&str]]) -> AutMatrix {
    let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    AutMatrix::parse(&chart(rows.len()), &rows).unwrap()
}

fn constant_o2() -> Vec<AutMatrix> {
    vec![
        mat(&[&["1", "0"], &["0", "1"]]),
        mat(&[&["-1", "0"], &["0", "-1"]]),
        mat(&[&["0", "-1"], &["1", "0"]]),
        mat(&[&["0", "1"], &["-1", "0"]]),
        mat(&[&["3/5", "-4/5"], &["4/5", "3/5"]]),
        mat(&[&["5/13", "-12/13"], &["12/13", "5/13"]]),
        mat(&[&["1", "0"], &["0", "-1"]]),
        mat(&[&["-1", "0"], &["0", "1"]]),
        mat(&[&["0", "1"], &["1", "0"]]),
        mat(&[&["3/5", "4/5"], &["4/5", "-3/5"]]),
    ]
}

fn rotations_by_f() -> Vec<(&'static str, AutMatrix)> {
    ["x", "y", "x + y", "x*y", "x^2"]
        .into_iter()
        .map(|f| (f, AutMatrix::rotation(chart(2).parse(f).unwrap())))
        .collect()
}

#[test]
fn generators_form_a_dirac_structure() {
    let exact = Backend::exact();
    for b in constant_o2() {
        let l = build_generators(&b, &exact).unwrap();
        assert!(check_isotropy(&l, &exact).unwrap());
        assert!(check_tau_complementarity(&l, &exact).unwrap());
        assert!(check_rank(&l, &exact).unwrap());
    }
    let numeric = Backend::numeric();
    for (f, b) in rotations_by_f() {
        let l = build_generators(&b, &numeric).unwrap();
        assert!(check_isotropy(&l, &numeric).unwrap(), "isotropy for f = {f}");
        assert!(check_tau_complementarity(&l, &numeric).unwrap(), "tau for f = {f}");
        assert!(check_rank(&l, &numeric).unwrap(), "rank for f = {f}");
    }
}

#[test]
fn recovery_inverts_construction() {
    let exact = Backend::exact();
    for b in constant_o2() {
        let l = build_generators(&b, &exact).unwrap();
        let a = recover_automorphism(&l, &exact).unwrap();
        assert!(matches!(a, Recovered::Exact(_)));
        assert_eq!(a.defect_against(&b, &exact).unwrap(), 0.0);
        if let Recovered::Exact(a) = a {
            assert_eq!(a, b.transpose());
        }
    }
    let numeric = Backend::numeric();
    for (f, b) in rotations_by_f() {
        let l = build_generators(&b, &numeric).unwrap();
        let a = recover_automorphism(&l, &numeric).unwrap();
        assert!(a.defect_against(&b, &numeric).unwrap() <= 1e-9, "f = {f}");
    }
}

#[test]
fn non_orthogonal_controls_are_rejected() {
    let exact = Backend::exact();
    for s in ["2", "-2"] {
        let b = mat(&[&[s, "0"], &["0", s]]);
        assert!(!is_orthogonal(&b, &exact).unwrap());
        assert!(matches!(build_generators(&b, &exact), Err(Error::NotOrthogonal)));
        assert!(matches!(check_integrable_direct(&b, &exact, false), Err(Error::NotOrthogonal)));
    }
}

#[test]
fn constant_orthogonal_matrices_agree_exactly() {
    let exact = Backend::exact();
    for b in constant_o2() {
        let cc = cross_check(&b, &exact, true).unwrap();
        assert!(cc.agree && cc.direct.integrable && cc.pde.integrable);
        assert!(cc.direct.residuals.iter().chain(&cc.pde.residuals).all(|r| r.zero && r.max_abs.is_none()));
        let ext = cc.direct.extended.unwrap();
        assert!(ext.integrable && !ext.diverges);
    }
}

#[test]
fn exact_mode_rejects_trig_entries() {
    let b = AutMatrix::rotation(Expr::var(0));
    assert!(matches!(check_integrable_direct(&b, &Backend::exact(), false), Err(Error::NotPolynomial)));
    assert!(matches!(pde_residual(&b, &Backend::exact()), Err(Error::NotPolynomial)));
}

/// Closure residual `(I+B){α,β} − (I−B)[X,Y]` for `X = (I+B)∂_i`, `α = (I−B)dx_i`
/// (and likewise for `k`), computed from scratch with central differences.
fn fd_closure(b: &dyn Fn(&[f64]) -> [[f64; 2]; 2], i: usize, k: usize, p: &[f64]) -> [f64; 2] {
    const H: f64 = 1e-5;
    let col = |sign: f64, j: usize, q: &[f64]| {
        let m = b(q);
        let mut v = [0.0; 2];
        for r in 0..2 {
            v[r] = f64::from(u8::from(r == j)) + sign * m[r][j];
        }
        v
    };
    let x = |q: &[f64]| col(1.0, i, q);
    let y = |q: &[f64]| col(1.0, k, q);
    let alpha = |q: &[f64]| col(-1.0, i, q);
    let beta = |q: &[f64]| col(-1.0, k, q);
    let partial = |f: &dyn Fn(&[f64]) -> [f64; 2], v: usize, c: usize| {
        let mut hi = p.to_vec();
        let mut lo = p.to_vec();
        hi[v] += H;
        lo[v] -= H;
        (f(&hi)[c] - f(&lo)[c]) / (2.0 * H)
    };
    let scalar_partial = |f: &dyn Fn(&[f64]) -> f64, v: usize| {
        let mut hi = p.to_vec();
        let mut lo = p.to_vec();
        hi[v] += H;
        lo[v] -= H;
        (f(&hi) - f(&lo)) / (2.0 * H)
    };
    let d = |f: &dyn Fn(&[f64]) -> [f64; 2], t: usize, j: usize| partial(f, t, j) - partial(f, j, t);
    let (xp, yp) = (x(p), y(p));
    let pair_value = |q: &[f64]| {
        let (xv, yv, av, bv) = (x(q), y(q), alpha(q), beta(q));
        (bv[0] * xv[0] + bv[1] * xv[1]) - (av[0] * yv[0] + av[1] * yv[1])
    };
    let mut bracket = [0.0; 2];
    for j in 0..2 {
        for t in 0..2 {
            bracket[j] += xp[t] * d(&beta, t, j) - yp[t] * d(&alpha, t, j);
        }
        bracket[j] += 0.5 * scalar_partial(&pair_value, j);
    }
    let mut lie = [0.0; 2];
    for m in 0..2 {
        for j in 0..2 {
            lie[m] += xp[j] * partial(&y, j, m) - yp[j] * partial(&x, j, m);
        }
    }
    let bp = b(p);
    let mut out = [0.0; 2];
    for r in 0..2 {
        for c in 0..2 {
            let plus = f64::from(u8::from(r == c)) + bp[r][c];
            let minus = f64::from(u8::from(r == c)) - bp[r][c];
            out[r] += plus * bracket[c] - minus * lie[c];
        }
    }
    out
}

type Angle = (&'static str, fn(&[f64]) -> f64);

#[test]
fn finite_difference_oracle_confirms_direct_verdicts() {
    let fs: [Angle; 5] = [
        ("x", |p| p[0]),
        ("y", |p| p[1]),
        ("x + y", |p| p[0] + p[1]),
        ("x*y", |p| p[0] * p[1]),
        ("x^2", |p| p[0] * p[0]),
    ];
    let backend = Backend::numeric();
    for ((name, f), (fname, b)) in fs.into_iter().zip(rotations_by_f()) {
        assert_eq!(name, fname);
        let rot = |q: &[f64]| {
            let (s, c) = f(q).sin_cos();
            [[c, -s], [s, c]]
        };
        let mut worst = 0.0_f64;
        for p in backend.grid(2).unwrap() {
            for v in fd_closure(&rot, 0, 1, &p) {
                worst = worst.max(v.abs());
            }
        }
        assert!(worst <= 1e-6, "oracle residual {worst} for f = {name}");
        let direct = check_integrable_direct(&b, &backend, false).unwrap();
        assert!(direct.integrable);
        assert!(direct.max_residual().unwrap() <= 1e-9);
    }
    // The oracle is not blind: a non-orthogonal matrix leaves a residual.
    let skew = |q: &[f64]| [[1.0, q[1]], [0.0, 1.0]];
    assert!(fd_closure(&skew, 0, 1, &[0.3, 0.4]).iter().any(|v| v.abs() > 1e-3));
}

#[test]
fn angle_varying_across_the_plane_is_not_integrable() {
    // Rotation of the (x, y) plane by an angle depending on z.
    let b = mat(&[&["cos(z)", "-sin(z)", "0"], &["sin(z)", "cos(z)", "0"], &["0", "0", "1"]]);
    let cc = cross_check(&b, &Backend::numeric(), true).unwrap();
    assert!(!cc.direct.integrable && !cc.pde.integrable && cc.agree);
    assert!(!cc.direct.membership.unwrap().closed);
}

#[test]
fn rotation_by_function_verdicts_are_frozen() {
    // Direct: integrable (closure residual vanishes identically).
    // Transcribed PDE: nonzero. The disagreement is an expected audit finding.
    let backend = Backend::numeric();
    let expected_pde_max = [4.0, 4.0, 4.2345906623849485, 4.223244275483933, 6.16120922347256];
    for ((f, b), pde_max) in rotations_by_f().into_iter().zip(expected_pde_max) {
        let cc = cross_check(&b, &backend, true).unwrap();
        assert!(cc.direct.integrable, "direct for f = {f}");
        assert!(!cc.pde.integrable, "pde for f = {f}");
        assert!(!cc.agree);
        assert!((cc.pde.max_residual().unwrap() - pde_max).abs() <= 1e-12, "f = {f}");
        let ext = cc.direct.extended.unwrap();
        assert!(ext.integrable && !ext.diverges);
        assert!(cc.direct.membership.unwrap().closed);
    }
}
